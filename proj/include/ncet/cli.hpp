#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ncet/counterexample.hpp"
#include "ncet/system.hpp"

namespace ncet::cli {

/// A loaded system: either dense, or the structured counterexample.
struct LoadedSystem {
  std::optional<DynamicalSystem> dense;
  std::optional<CounterexampleSystem> ce;

  std::string label() const;
  std::size_t dim() const;
};

/// Accepts a description {"label", "dim", "U", "omega", "m_generators"[, "compact"]}
/// or a constructor record such as {"model": "ROT", "d": 6, "p": 2}. Complex
/// entries are [re, im] pairs or plain reals; matrices are lists of rows or
/// flat row-major lists. ConfigError on anything malformed.
LoadedSystem load_system(const nlohmann::json& record);

ComplexMatrix parse_matrix(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                           const std::string& what);
nlohmann::ordered_json complex_json(Complex z);
nlohmann::ordered_json matrix_json(const ComplexMatrix& m);

enum class Route { Ergodic, Decomposition, Compact, None };
std::string to_string(Route r);

/// ergodic: Omega separating and U^{k2-k1} ergodic. decomposition: Omega
/// separating, l = k2 - k1 > 0 divides k1, and M' ∩ {U^l}' lies in the center.
/// compact: the system is compact. none otherwise. The report must contain
/// the step k2 - k1.
Route select_route(const HypothesisReport& report, long long k1, long long k2);

/// Runs one command line (argv[0] is the program name). Returns the exit
/// code: 0 success, 2 configuration, 3 hypothesis, 4 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncet::cli
