#include "ncet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "ncet/cesaro.hpp"
#include "ncet/decomposition.hpp"
#include "ncet/error.hpp"
#include "ncet/models.hpp"
#include "ncet/spectral.hpp"

namespace ncet::cli {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

Complex parse_complex(const nlohmann::json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  config_error(what + ": expected a number or an [re, im] pair, got " + j.dump());
}

bool is_entry(const nlohmann::json& j) {
  return j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number());
}

std::size_t get_count(const nlohmann::json& record, const char* key) {
  if (!record.contains(key) || !record[key].is_number_integer() || record[key].get<long long>() < 1)
    config_error(std::string("model record needs a positive integer \"") + key + "\"");
  return record[key].get<std::size_t>();
}

std::vector<long long> parse_ladder(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      config_error("not an integer list: " + text);
    }
  }
  if (out.empty()) config_error("empty integer list");
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error("not a list of reals: " + text);
    }
  }
  return out;
}

ComplexMatrix diagonal_unitary(const std::vector<double>& turns) {
  std::vector<Complex> d;
  for (const double t : turns) d.push_back(std::polar(1.0, 2.0 * std::numbers::pi * t));
  return ComplexMatrix::diagonal(d);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string LoadedSystem::label() const { return dense ? dense->label() : "CE(" + std::to_string(ce->n()) + ")"; }

std::size_t LoadedSystem::dim() const { return dense ? dense->dim() : ce->dim(); }

ComplexMatrix parse_matrix(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                           const std::string& what) {
  if (!j.is_array()) config_error(what + ": expected a list");
  std::vector<Complex> entries;
  entries.reserve(rows * cols);
  const bool flat = j.size() == rows * cols && std::all_of(j.begin(), j.end(), is_entry);
  if (flat) {
    for (const auto& e : j) entries.push_back(parse_complex(e, what));
  } else {
    if (j.size() != rows) config_error(what + ": expected " + std::to_string(rows) + " rows");
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& row = j[r];
      if (!row.is_array() || row.size() != cols)
        config_error(what + ": row " + std::to_string(r) + " must have " + std::to_string(cols) +
                     " entries");
      for (const auto& e : row) entries.push_back(parse_complex(e, what));
    }
  }
  return ComplexMatrix(rows, cols, std::move(entries));
}

nlohmann::ordered_json complex_json(Complex z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

nlohmann::ordered_json matrix_json(const ComplexMatrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

LoadedSystem load_system(const nlohmann::json& record) {
  if (!record.is_object()) config_error("system description must be a JSON object");
  LoadedSystem out;
  if (record.contains("model")) {
    const std::string model = record["model"].get<std::string>();
    if (model == "ROT") {
      const long long p = record.value("p", 1LL);
      out.dense = rot_model(get_count(record, "d"), p);
    } else if (model == "TRACIAL") {
      const std::size_t d = get_count(record, "d");
      if (record.contains("phases")) {
        const auto turns = record["phases"].get<std::vector<double>>();
        if (turns.size() != d) config_error("TRACIAL phases must have d entries");
        out.dense = tracial_model(d, diagonal_unitary(turns));
      } else if (record.contains("u")) {
        out.dense = tracial_model(d, parse_matrix(record["u"], d, d, "u"));
      } else if (record.contains("seed")) {
        out.dense = tracial_model_seeded(d, record["seed"].get<std::uint64_t>());
      } else {
        out.dense = tracial_model(d, ComplexMatrix::identity(d));
      }
    } else if (model == "CE") {
      const auto n = static_cast<long long>(get_count(record, "n"));
      out.ce = build_counterexample(n, doubling_sequence(n));
    } else {
      config_error("unknown model \"" + model + "\" (ROT, TRACIAL, CE)");
    }
    return out;
  }
  for (const char* key : {"dim", "U", "omega", "m_generators"})
    if (!record.contains(key)) config_error(std::string("system description lacks \"") + key + "\"");
  if (!record["dim"].is_number_integer() || record["dim"].get<long long>() < 1)
    config_error("\"dim\" must be a positive integer");
  const auto d = record["dim"].get<std::size_t>();
  ComplexMatrix u = parse_matrix(record["U"], d, d, "U");
  ComplexMatrix omega = parse_matrix(record["omega"], d, 1, "omega");
  std::vector<ComplexMatrix> gens;
  if (!record["m_generators"].is_array()) config_error("\"m_generators\" must be a list");
  for (std::size_t i = 0; i < record["m_generators"].size(); ++i)
    gens.push_back(parse_matrix(record["m_generators"][i], d, d, "m_generators[" + std::to_string(i) + "]"));
  DynamicalSystem::Options options;
  options.compact = record.value("compact", true);
  out.dense = DynamicalSystem::create(record.value("label", std::string("system")), std::move(u),
                                      std::move(omega), std::move(gens), options);
  return out;
}

std::string to_string(Route r) {
  switch (r) {
    case Route::Ergodic: return "ergodic";
    case Route::Decomposition: return "decomposition";
    case Route::Compact: return "compact";
    case Route::None: return "none";
  }
  return "none";
}

Route select_route(const HypothesisReport& report, long long k1, long long k2) {
  const long long step = k2 - k1;
  const auto flag = [](const std::map<long long, bool>& m, long long key) {
    const auto it = m.find(key);
    return it != m.end() && it->second;
  };
  if (report.separating && flag(report.ergodic_for, step)) return Route::Ergodic;
  if (report.separating && step > 0 && k1 % step == 0 && flag(report.commutant_fixed_in_center, step))
    return Route::Decomposition;
  if (report.compact) return Route::Compact;
  return Route::None;
}

// ---------------------------------------------------------------------------

namespace {

struct Config {
  std::string system_file;
  std::string model;
  std::size_t d = 0;
  long long p = 1;
  long long n = 0;
  std::optional<std::uint64_t> u_seed;
  std::string phases;
  std::optional<long long> k1, k2, k, l;
  std::string n_ladder;
  std::string x = "I";
  std::string xi = "omega";
  std::string a0 = "I", a1 = "I", a2 = "I";
  std::string steps = "1";
  std::string out_path;
  std::string json_path;
  double tol = tol::kCheck;
  std::uint64_t seed = 0;
  long long k_max = -1;
  bool no_centrality = false;
};

/// Structured operator on the loaded system.
using Apply = std::function<ComplexMatrix(const ComplexMatrix&)>;

struct Operator {
  Apply apply;
  std::optional<ComplexMatrix> dense;
};

LoadedSystem load(const Config& c) {
  if (!c.system_file.empty() && !c.model.empty()) config_error("give either --system or --model");
  if (!c.system_file.empty()) {
    std::ifstream in(c.system_file);
    if (!in) config_error("cannot open " + c.system_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      config_error(c.system_file + ": " + e.what());
    }
    return load_system(j);
  }
  if (c.model.empty()) config_error("no system: give --system FILE or --model NAME");
  nlohmann::json record{{"model", c.model}};
  if (c.model == "ROT") {
    record["d"] = c.d;
    record["p"] = c.p;
  } else if (c.model == "TRACIAL") {
    record["d"] = c.d;
    if (!c.phases.empty()) record["phases"] = parse_reals(c.phases);
    else if (c.u_seed) record["seed"] = *c.u_seed;
  } else if (c.model == "CE") {
    record["n"] = c.n;
  }
  return load_system(record);
}

std::vector<std::size_t> parse_index_set(std::string text, std::size_t d) {
  if (!text.empty() && text.front() == '{') text = text.substr(1);
  if (!text.empty() && text.back() == '}') text.pop_back();
  std::vector<std::size_t> out;
  for (const long long v : parse_ladder(text)) {
    if (v < 0 || static_cast<std::size_t>(v) >= d) config_error("index " + std::to_string(v) + " out of range");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Operator dense_operator(ComplexMatrix m) {
  auto shared = std::make_shared<ComplexMatrix>(m);
  return {[shared](const ComplexMatrix& v) { return *shared * v; }, std::move(m)};
}

Operator select_operator(const LoadedSystem& s, const std::string& sel) {
  const std::size_t d = s.dim();
  if (s.ce) {
    const CounterexampleSystem& ce = *s.ce;
    if (sel == "I") return {[](const ComplexMatrix& v) { return v; }, std::nullopt};
    if (sel == "A") return {[&ce](const ComplexMatrix& v) { return ce.apply_a(v); }, std::nullopt};
    if (sel == "B") return {[&ce](const ComplexMatrix& v) { return ce.apply_b(v); }, std::nullopt};
    if (sel == "Bdag")
      return {[&ce](const ComplexMatrix& v) { return ce.apply_b_adjoint(v); }, std::nullopt};
    if (sel == "shift") return {[&ce](const ComplexMatrix& v) { return ce.apply_u(v); }, std::nullopt};
    config_error("selector \"" + sel + "\" is not available on CE (I, A, B, Bdag, shift)");
  }
  const DynamicalSystem& sys = *s.dense;
  if (sel == "I") return dense_operator(ComplexMatrix::identity(d));
  if (sel == "shift") return dense_operator(sys.unitary());
  if (sel.rfind("gen:", 0) == 0) {
    const auto idx = parse_ladder(sel.substr(4));
    if (idx.size() != 1 || idx[0] < 0 || static_cast<std::size_t>(idx[0]) >= sys.generators().size())
      config_error("generator index out of range in " + sel);
    return dense_operator(sys.generators()[static_cast<std::size_t>(idx[0])]);
  }
  if (sel.rfind("indicator:", 0) == 0) {
    ComplexMatrix m(d, d);
    for (const auto i : parse_index_set(sel.substr(10), d)) m(i, i) = 1.0;
    return dense_operator(std::move(m));
  }
  if (sel.rfind("inline:", 0) == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(sel.substr(7));
    } catch (const nlohmann::json::exception& e) {
      config_error(std::string("inline matrix: ") + e.what());
    }
    return dense_operator(parse_matrix(j, d, d, "inline matrix"));
  }
  config_error("unknown operator selector \"" + sel + "\"");
}

ComplexMatrix select_vector(const LoadedSystem& s, const std::string& sel) {
  const std::size_t d = s.dim();
  if (sel == "omega") return s.ce ? s.ce->omega() : s.dense->omega();
  if (sel.rfind("e:", 0) == 0) {
    const auto idx = parse_ladder(sel.substr(2));
    if (idx.size() != 1) config_error("bad basis selector " + sel);
    if (s.ce) return s.ce->basis(idx[0]);
    if (idx[0] < 0 || static_cast<std::size_t>(idx[0]) >= d) config_error("basis index out of range");
    return ComplexMatrix::basis_vector(d, static_cast<std::size_t>(idx[0]));
  }
  if (sel.rfind("inline:", 0) == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(sel.substr(7));
    } catch (const nlohmann::json::exception& e) {
      config_error(std::string("inline vector: ") + e.what());
    }
    return parse_matrix(j, d, 1, "inline vector");
  }
  config_error("unknown vector selector \"" + sel + "\"");
}

const ComplexMatrix& require_dense(const Operator& op, const std::string& sel) {
  if (!op.dense) config_error("operator " + sel + " has no dense form here");
  return *op.dense;
}

struct Steps {
  long long k1 = 0, k2 = 0;
};

Steps resolve_steps(const Config& c) {
  const bool pair = c.k1 || c.k2;
  const bool kl = c.k || c.l;
  if (pair && kl) config_error("give either --k1/--k2 or --k/--l");
  Steps s;
  if (pair) {
    if (!c.k1 || !c.k2) config_error("both --k1 and --k2 are required");
    s = {*c.k1, *c.k2};
  } else if (kl) {
    const long long k = c.k.value_or(1), l = c.l.value_or(1);
    if (l < 1) config_error("--l must be positive");
    if (k == 0 || k == -1) config_error("--k must avoid -1 and 0");
    s = {k * l, (k + 1) * l};
  } else {
    config_error("give --k1/--k2 or --k/--l");
  }
  if (s.k1 == 0 || s.k2 == 0 || s.k1 == s.k2)
    throw Error(ErrorCode::TrivialPair, "avoid the trivial cases k1 = 0, k2 = 0 and k1 = k2; got (" +
                                            std::to_string(s.k1) + ", " + std::to_string(s.k2) + ")");
  return s;
}

HypothesisReport report_for(const LoadedSystem& s, std::vector<long long> steps) {
  if (s.ce) return counterexample_hypotheses(*s.ce, steps);
  return check_hypotheses(*s.dense, steps);
}

void write_to(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) config_error("cannot write " + path);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string sidecar_path(const Config& c) {
  if (!c.json_path.empty()) return c.json_path;
  if (!c.out_path.empty()) return c.out_path + ".json";
  return {};
}

json hypothesis_json(const LoadedSystem& s, const HypothesisReport& r) {
  json j;
  j["system"] = s.label();
  j["dim"] = s.dim();
  j["separating"] = r.separating;
  j["cyclic"] = r.cyclic;
  j["compact"] = r.compact;
  j["commutant_dim"] = r.commutant_dim;
  j["center_dim"] = r.center_dim;
  j["g_abelian"] = r.g_abelian;
  j["commutant_fixed_abelian"] = r.commutant_fixed_abelian;
  json steps = json::array();
  for (const auto& [m, fixed] : r.fixed_space_dim)
    steps.push_back(json{{"m", m},
                         {"fixed_space_dim", fixed},
                         {"ergodic", r.ergodic_for.at(m)},
                         {"commutant_fixed_in_center", r.commutant_fixed_in_center.at(m)}});
  j["steps"] = std::move(steps);
  return j;
}

// Limit of the Cesàro means of X on the chosen route.
struct RouteLimit {
  Route route = Route::None;
  ComplexMatrix limit;
  std::size_t blocks = 0;
};

RouteLimit route_limit(const LoadedSystem& s, const Config& c, const Steps& st, const ComplexMatrix& x) {
  RouteLimit out;
  const HypothesisReport report = report_for(s, {st.k2 - st.k1});
  out.route = select_route(report, st.k1, st.k2);
  if (s.ce) return out;
  const DynamicalSystem& sys = *s.dense;
  switch (out.route) {
    case Route::Ergodic:
      out.limit = v_of_X(limit_bundle(sys, st.k1, st.k2), x);
      out.blocks = 1;
      break;
    case Route::Decomposition: {
      const long long l = st.k2 - st.k1;
      const DecomposedSystem dec = decompose(sys, l, c.seed);
      out.limit = assemble_VB(dec, x, st.k1 / l);
      out.blocks = dec.blocks.size();
      break;
    }
    case Route::Compact:
      out.limit = s_compact(spectral_data(sys.unitary()), x, st.k1, st.k2);
      break;
    case Route::None:
      break;
  }
  return out;
}

std::vector<long long> require_ladder(const Config& c) {
  if (c.n_ladder.empty()) config_error("--N is required");
  const auto ladder = parse_ladder(c.n_ladder);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) config_error("N values must be at least 1");
    if (i > 0 && ladder[i] <= ladder[i - 1]) config_error("N values must be strictly increasing");
  }
  return ladder;
}

// <A_N(X) xi, xi> along the ladder using only operator applications.
std::vector<Complex> raw_diagonal_means(const LoadedSystem& s, const Operator& x, const ComplexMatrix& xi,
                                        const Steps& st, const std::vector<long long>& ladder) {
  Apply u_pow;
  if (s.ce) {
    const CounterexampleSystem& ce = *s.ce;
    u_pow = [&ce](const ComplexMatrix& v) { return v; };
    const long long step = st.k2 - st.k1, back = -st.k1;
    Apply step_r = [&ce, step](const ComplexMatrix& v) { return ce.apply_u(v, step); };
    Apply step_z = [&ce, back](const ComplexMatrix& v) { return ce.apply_u(v, back); };
    std::vector<Complex> out;
    for (const long long n : ladder) out.push_back(three_point_average(x.apply, step_r, step_z, xi, xi, n));
    return out;
  }
  const ComplexMatrix r = unitary_power(s.dense->unitary(), st.k2 - st.k1);
  const ComplexMatrix z = unitary_power(s.dense->unitary(), -st.k1);
  std::vector<Complex> out;
  for (const long long n : ladder)
    out.push_back(three_point_average(
        x.apply, [&](const ComplexMatrix& v) { return r * v; },
        [&](const ComplexMatrix& v) { return z * v; }, xi, xi, n));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_check(const Config& c, std::ostream& out) {
  const LoadedSystem s = load(c);
  const HypothesisReport r = report_for(s, parse_ladder(c.steps));
  json j = hypothesis_json(s, r);
  if (s.dense && r.separating) {
    const Br1Report b = verify_br1_equivalence(*s.dense);
    j["br1"] = json{{"algebra_fixed_trivial", b.algebra_fixed_trivial},
                    {"fixed_projection_rank_one", b.fixed_projection_rank_one},
                    {"commutant_fixed_trivial", b.commutant_fixed_trivial},
                    {"equivalent", b.equivalent}};
  } else {
    j["br1"] = nullptr;
  }
  write_to(c.out_path, dump(j), out);
  return 0;
}

int cmd_converge(const Config& c, std::ostream& out, std::ostream& err) {
  const LoadedSystem s = load(c);
  const Steps st = resolve_steps(c);
  const auto ladder = require_ladder(c);
  const Operator x = select_operator(s, c.x);
  const ComplexMatrix xi = select_vector(s, c.xi);

  json side;
  side["system"] = s.label();
  side["k1"] = st.k1;
  side["k2"] = st.k2;
  side["X"] = c.x;
  side["xi"] = c.xi;
  std::string csv;
  const RouteLimit rl = s.ce ? RouteLimit{} : route_limit(s, c, st, require_dense(x, c.x));
  side["route"] = to_string(rl.route);
  if (rl.route == Route::None) {
    err << "warning: no convergence theorem applies to " << s.label() << "; emitting the raw trace\n";
    side["warning"] = "no theorem route applies; raw diagonal means <A_N(X) xi, xi>";
    const auto means = raw_diagonal_means(s, x, xi, st, ladder);
    csv = "N,re,im\n";
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      csv += std::to_string(ladder[i]) + "," + fmt(means[i].real()) + "," + fmt(means[i].imag()) + "\n";
      lo = std::min(lo, means[i].real());
      hi = std::max(hi, means[i].real());
    }
    side["spread"] = hi - lo;
  } else {
    if (rl.route == Route::Decomposition) side["blocks"] = rl.blocks;
    const ConvergenceTrace t =
        convergence_trace(*s.dense, require_dense(x, c.x), xi, st.k1, st.k2, ladder, rl.limit);
    csv = t.to_csv();
    double worst = 0.0;
    for (const double dv : t.deviations) worst = std::max(worst, dv);
    side["max_deviation"] = worst;
    side["final_deviation"] = t.deviations.back();
    side["converged"] = t.deviations.back() <= c.tol;
  }
  write_to(c.out_path, csv, out);
  write_to(sidecar_path(c), dump(side), err);
  return 0;
}

int cmd_limit(const Config& c, std::ostream& out) {
  const LoadedSystem s = load(c);
  const Steps st = resolve_steps(c);
  if (s.ce) throw Error(ErrorCode::HypothesisViolation, s.label() + ": no theorem route applies");
  const Operator x = select_operator(s, c.x);
  const RouteLimit rl = route_limit(s, c, st, require_dense(x, c.x));
  if (rl.route == Route::None)
    throw Error(ErrorCode::HypothesisViolation, s.label() + ": no theorem route applies");
  json j;
  j["system"] = s.label();
  j["k1"] = st.k1;
  j["k2"] = st.k2;
  j["X"] = c.x;
  j["route"] = to_string(rl.route);
  if (rl.route == Route::Decomposition) j["blocks"] = rl.blocks;
  j["limit"] = matrix_json(rl.limit);
  write_to(c.out_path, dump(j), out);
  return 0;
}

int cmd_threepoint(const Config& c, std::ostream& out) {
  const LoadedSystem s = load(c);
  const Steps st = resolve_steps(c);
  const auto ladder = require_ladder(c);
  const Operator a0 = select_operator(s, c.a0), a1 = select_operator(s, c.a1), a2 = select_operator(s, c.a2);
  json j;
  j["system"] = s.label();
  j["k1"] = st.k1;
  j["k2"] = st.k2;
  j["A0"] = c.a0;
  j["A1"] = c.a1;
  j["A2"] = c.a2;
  j["N"] = ladder;

  if (s.ce) {
    const CounterexampleSystem& ce = *s.ce;
    // eta = A0^dagger Omega; A0 is one of the structured selectors.
    ComplexMatrix eta;
    if (c.a0 == "Bdag") eta = ce.apply_b(ce.omega());
    else if (c.a0 == "B") eta = ce.apply_b_adjoint(ce.omega());
    else if (c.a0 == "I") eta = ce.omega();
    else if (c.a0 == "A") eta = ce.apply_a(ce.omega());
    else config_error("A0 = " + c.a0 + " is not supported on CE");
    const ComplexMatrix xi = a2.apply(ce.omega());
    const long long step = st.k2 - st.k1, back = -st.k1;
    json means = json::array();
    double lo = INFINITY, hi = -INFINITY;
    for (const long long n : ladder) {
      const Complex m = three_point_average(
          a1.apply, [&](const ComplexMatrix& v) { return ce.apply_u(v, step); },
          [&](const ComplexMatrix& v) { return ce.apply_u(v, back); }, xi, eta, n);
      means.push_back(complex_json(m));
      lo = std::min(lo, m.real());
      hi = std::max(hi, m.real());
    }
    j["route"] = to_string(Route::None);
    j["finite_means"] = std::move(means);
    j["limit"] = "divergent-demo";
    j["spread"] = hi - lo;
    write_to(c.out_path, dump(j), out);
    return 0;
  }

  const DynamicalSystem& sys = *s.dense;
  const ComplexMatrix& m0 = require_dense(a0, c.a0);
  const ComplexMatrix& m1 = require_dense(a1, c.a1);
  const ComplexMatrix& m2 = require_dense(a2, c.a2);
  json means = json::array();
  Complex last;
  for (const long long n : ladder) {
    last = three_point(sys, m0, m1, m2, st.k1, st.k2, n);
    means.push_back(complex_json(last));
  }
  j["finite_means"] = std::move(means);
  const RouteLimit rl = route_limit(s, c, st, m1);
  j["route"] = to_string(rl.route);
  if (rl.route == Route::None) {
    j["limit"] = nullptr;
  } else {
    const Complex limit = inner(rl.limit * (m2 * sys.omega()), m0.adjoint() * sys.omega());
    j["limit"] = complex_json(limit);
    j["residual"] = std::abs(last - limit);
    j["within_tol"] = std::abs(last - limit) <= c.tol;
  }
  write_to(c.out_path, dump(j), out);
  return 0;
}

int cmd_decompose(const Config& c, std::ostream& out) {
  const LoadedSystem s = load(c);
  if (s.ce) throw Error(ErrorCode::NotSeparating, s.label() + ": Omega is not separating");
  const long long l = c.l.value_or(1);
  DecomposeOptions options;
  options.enforce_centrality = !c.no_centrality;
  const DecomposedSystem dec = decompose(*s.dense, l, c.seed, options);
  json j;
  j["system"] = s.label();
  j["l"] = l;
  j["seed"] = c.seed;
  j["frak_z_dim"] = dec.frak_z.dim();
  json blocks = json::array();
  for (const auto& b : dec.blocks) {
    const SpectralData spec = spectral_data(b.system.unitary());
    json spectrum = json::array();
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
      spectrum.push_back(json{{"eigenvalue", complex_json(spec.eigenvalues[i])},
                              {"multiplicity", spec.multiplicities[i]}});
    blocks.push_back(json{{"dim", b.system.dim()},
                          {"weight", b.weight},
                          {"ergodic", true},
                          {"spectrum", std::move(spectrum)}});
  }
  j["blocks"] = std::move(blocks);
  j["dropped"] = dec.dropped;
  const DecompositionResiduals r = decomposition_residuals(dec);
  j["residuals"] = json{{"unitary", r.unitary},       {"omega", r.omega},
                        {"generators", r.generators}, {"weight_sum", r.weight_sum},
                        {"state", r.state},           {"isometries", r.isometries}};
  const SplitCheck split = verify_block_algebra_split(dec);
  j["split"] = json{{"z_in_algebra", split.z_in_algebra},
                    {"split", split.split},
                    {"consistent", split.consistent}};
  try {
    const FiberCheck f = verify_fiber_modular(dec);
    j["fiber_modular"] = json{{"ok", f.ok}, {"j_residuals", f.j_residuals}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSeparating) throw;
    j["fiber_modular"] = json{{"ok", false}, {"error", e.what()}};
  }
  write_to(c.out_path, dump(j), out);
  return 0;
}

int cmd_counterexample(const Config& c, std::ostream& out, std::ostream& err) {
  const long long n = c.n > 0 ? c.n : 4096;
  const CounterexampleSystem ce = build_counterexample(n, doubling_sequence(n));
  const auto ladder = c.n_ladder.empty() ? std::vector<long long>{1024, 2048, 4096} : require_ladder(c);
  const long long k_max = c.k_max >= 0 ? c.k_max : n / 2;
  verify_lemma_nconve(ce, k_max);
  const DivergenceResult r = divergence_demo(ce, ladder);
  const ComplexMatrix e0 = ce.basis(0);
  const bool mixing = mixing_window_check(ce, e0, e0, n / 2);
  json j;
  j["n"] = n;
  j["block_rule"] = ce.sequence().block_rule;
  j["lemma_exact_through"] = k_max;
  j["N"] = r.n_values;
  j["means"] = r.means;
  j["spread"] = r.spread;
  j["low"] = r.low;
  j["high"] = r.high;
  j["mixing_window"] = mixing;
  write_to(c.out_path, r.to_csv(), out);
  write_to(sidecar_path(c), dump(j), err);
  return 0;
}

int cmd_tensor_fixed(const Config& c, std::ostream& out) {
  const LoadedSystem s = load(c);
  if (s.ce) config_error("tensor-fixed needs a dense system");
  const Steps st = resolve_steps(c);
  const ComplexMatrix& u = s.dense->unitary();
  const SpectralData spec = spectral_data(u);
  const PairSet ps = sigma_set(spec, st.k1, st.k2);
  const ComplexMatrix p = tensor_fixed_projection(spec, st.k1, st.k2);
  json j;
  j["system"] = s.label();
  j["k1"] = st.k1;
  j["k2"] = st.k2;
  json pairs = json::array();
  for (const auto& [v, w] : ps.pairs) pairs.push_back(json{{"v", complex_json(v)}, {"w", complex_json(w)}});
  j["pairs"] = std::move(pairs);
  j["rank"] = static_cast<long long>(std::llround(p.trace().real()));
  if (s.dim() <= 16) {
    const ComplexMatrix direct =
        fixed_space_projection(tensor(unitary_power(u, st.k1), unitary_power(u, st.k2)));
    j["residual"] = max_abs_diff(p, direct);
  } else {
    j["residual"] = nullptr;
  }
  write_to(c.out_path, dump(j), out);
  return 0;
}

void add_system_options(CLI::App* app, Config& c) {
  app->add_option("--system", c.system_file, "System description JSON file");
  app->add_option("--model", c.model, "Model: ROT, TRACIAL or CE");
  app->add_option("--d", c.d, "Dimension parameter for ROT / TRACIAL");
  app->add_option("--p", c.p, "Rotation step for ROT");
  app->add_option("--n", c.n, "Truncation radius for CE");
  app->add_option("--u-seed", c.u_seed, "Seed for the TRACIAL unitary");
  app->add_option("--phases", c.phases, "TRACIAL diagonal unitary, phases in turns (comma list)");
  app->add_option("--out", c.out_path, "Output path (default stdout)");
  app->add_option("--tol", c.tol, "Tolerance for pass/fail fields");
  app->add_option("--seed", c.seed, "Seed for the decomposition's generic element");
}

void add_step_options(CLI::App* app, Config& c) {
  app->add_option("--k1", c.k1);
  app->add_option("--k2", c.k2);
  app->add_option("--k", c.k);
  app->add_option("--l", c.l);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Nonconventional ergodic averages on finite-dimensional quantum dynamical systems"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Report the hypothesis predicates as JSON");
  add_system_options(check, c);
  check->add_option("--steps", c.steps, "Comma list of powers m of U to examine");

  auto* converge = app.add_subcommand("converge", "Convergence trace of the Cesàro means as CSV");
  add_system_options(converge, c);
  add_step_options(converge, c);
  converge->add_option("--N", c.n_ladder, "Comma list of N values");
  converge->add_option("--X", c.x, "Operator selector");
  converge->add_option("--xi", c.xi, "Vector selector");
  converge->add_option("--json", c.json_path, "Sidecar JSON path");

  auto* limit = app.add_subcommand("limit", "Closed-form limit operator as JSON");
  add_system_options(limit, c);
  add_step_options(limit, c);
  limit->add_option("--X", c.x, "Operator selector");

  auto* threepoint = app.add_subcommand("threepoint", "Three-point correlation means and limit");
  add_system_options(threepoint, c);
  add_step_options(threepoint, c);
  threepoint->add_option("--N", c.n_ladder, "Comma list of N values");
  threepoint->add_option("--A0", c.a0);
  threepoint->add_option("--A1", c.a1);
  threepoint->add_option("--A2", c.a2);

  auto* decomp = app.add_subcommand("decompose", "Ergodic decomposition report as JSON");
  add_system_options(decomp, c);
  decomp->add_option("--l", c.l, "Power of U");
  decomp->add_flag("--no-centrality", c.no_centrality,
                   "Skip the centrality requirement (exploration outside the theorem)");

  auto* counter = app.add_subcommand("counterexample", "Divergence demonstration: CSV N,mean");
  counter->add_option("--n", c.n, "Truncation radius (default 4096)");
  counter->add_option("--N", c.n_ladder, "Comma list of N values (default 1024,2048,4096)");
  counter->add_option("--k-max", c.k_max, "Lemma check range (default n/2)");
  counter->add_option("--out", c.out_path, "CSV output path (default stdout)");
  counter->add_option("--json", c.json_path, "Summary JSON path");

  auto* tfixed = app.add_subcommand("tensor-fixed", "Fixed space of U^k1 (x) U^k2 as JSON");
  add_system_options(tfixed, c);
  add_step_options(tfixed, c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (check->parsed()) return cmd_check(c, out);
    if (converge->parsed()) return cmd_converge(c, out, err);
    if (limit->parsed()) return cmd_limit(c, out);
    if (threepoint->parsed()) return cmd_threepoint(c, out);
    if (decomp->parsed()) return cmd_decompose(c, out);
    if (counter->parsed()) return cmd_counterexample(c, out, err);
    if (tfixed->parsed()) return cmd_tensor_fixed(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: ConfigError: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace ncet::cli
