#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ncet/cesaro.hpp"
#include "ncet/cli.hpp"
#include "ncet/counterexample.hpp"
#include "ncet/decomposition.hpp"
#include "ncet/error.hpp"
#include "ncet/models.hpp"
#include "ncet/spectral.hpp"

namespace py = pybind11;
using namespace ncet;

namespace {

using Array = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

py::array to_numpy(const ComplexMatrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.entries().begin(), m.entries().end(), out.mutable_data());
  return out;
}

ComplexMatrix from_numpy(const Array& a) {
  if (a.ndim() == 1) {
    std::vector<Complex> v(a.data(), a.data() + a.shape(0));
    return ComplexMatrix(v.size(), 1, std::move(v));
  }
  if (a.ndim() != 2) throw Error(ErrorCode::DimensionMismatch, "expected a 1-d or 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  return ComplexMatrix(rows, cols, std::vector<Complex>(a.data(), a.data() + rows * cols));
}

py::dict report_dict(const HypothesisReport& r) {
  py::dict d;
  d["separating"] = r.separating;
  d["cyclic"] = r.cyclic;
  d["compact"] = r.compact;
  d["ergodic_for"] = r.ergodic_for;
  d["fixed_space_dim"] = r.fixed_space_dim;
  d["commutant_fixed_in_center"] = r.commutant_fixed_in_center;
  d["g_abelian"] = r.g_abelian;
  d["commutant_fixed_abelian"] = r.commutant_fixed_abelian;
  d["commutant_dim"] = r.commutant_dim;
  d["center_dim"] = r.center_dim;
  return d;
}

}  // namespace

PYBIND11_MODULE(ncet, m) {
  m.doc() = "Nonconventional ergodic averages on finite-dimensional quantum dynamical systems";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<DynamicalSystem>(m, "DynamicalSystem")
      .def_static(
          "create",
          [](const std::string& label, const Array& u, const Array& omega, const std::vector<Array>& gens,
             bool compact) {
            std::vector<ComplexMatrix> g;
            for (const auto& x : gens) g.push_back(from_numpy(x));
            return DynamicalSystem::create(label, from_numpy(u), from_numpy(omega), std::move(g),
                                           DynamicalSystem::Options{compact});
          },
          py::arg("label"), py::arg("unitary"), py::arg("omega"), py::arg("generators"),
          py::arg("compact") = true)
      .def_property_readonly("dim", &DynamicalSystem::dim)
      .def_property_readonly("label", &DynamicalSystem::label)
      .def_property_readonly("unitary", [](const DynamicalSystem& s) { return to_numpy(s.unitary()); })
      .def_property_readonly("omega", [](const DynamicalSystem& s) { return to_numpy(s.omega()); })
      .def_property_readonly("generators", [](const DynamicalSystem& s) {
        py::list out;
        for (const auto& g : s.generators()) out.append(to_numpy(g));
        return out;
      });

  m.def("rot_model", &rot_model, py::arg("d"), py::arg("p"));
  m.def("tracial_model", [](std::size_t d, const Array& u) { return tracial_model(d, from_numpy(u)); },
        py::arg("d"), py::arg("u"));
  m.def("tracial_model_seeded", &tracial_model_seeded, py::arg("d"), py::arg("seed"));

  m.def("check_hypotheses",
        [](const DynamicalSystem& s, const std::vector<long long>& steps) {
          return report_dict(check_hypotheses(s, steps));
        },
        py::arg("system"), py::arg("steps") = std::vector<long long>{1});

  m.def("modular_conjugation", [](const DynamicalSystem& s) { return to_numpy(modular_pair(s).j.linear); },
        "Linear part L of J, with J xi = L conj(xi).");

  m.def("cesaro_mean",
        [](const DynamicalSystem& s, const Array& x, long long k1, long long k2, long long n) {
          return to_numpy(cesaro_mean(s, from_numpy(x), k1, k2, n));
        },
        py::arg("system"), py::arg("x"), py::arg("k1"), py::arg("k2"), py::arg("n"));

  m.def("ergodic_limit",
        [](const DynamicalSystem& s, const Array& x, long long k1, long long k2) {
          return to_numpy(v_of_X(limit_bundle(s, k1, k2), from_numpy(x)));
        },
        py::arg("system"), py::arg("x"), py::arg("k1"), py::arg("k2"));

  m.def("compact_limit",
        [](const DynamicalSystem& s, const Array& x, long long k1, long long k2) {
          return to_numpy(s_compact(spectral_data(s.unitary()), from_numpy(x), k1, k2));
        },
        py::arg("system"), py::arg("x"), py::arg("k1"), py::arg("k2"));

  m.def("three_point",
        [](const DynamicalSystem& s, const Array& a0, const Array& a1, const Array& a2, long long k1,
           long long k2, long long n) {
          return three_point(s, from_numpy(a0), from_numpy(a1), from_numpy(a2), k1, k2, n);
        },
        py::arg("system"), py::arg("a0"), py::arg("a1"), py::arg("a2"), py::arg("k1"), py::arg("k2"),
        py::arg("n"));

  m.def("decomposition_limit",
        [](const DynamicalSystem& s, const Array& b, long long k, long long l, std::uint64_t seed) {
          return to_numpy(assemble_VB(decompose(s, l, seed), from_numpy(b), k));
        },
        py::arg("system"), py::arg("b"), py::arg("k"), py::arg("l"), py::arg("seed") = 0);

  m.def("decompose",
        [](const DynamicalSystem& s, long long l, std::uint64_t seed) {
          const DecomposedSystem dec = decompose(s, l, seed);
          py::list blocks;
          for (const auto& b : dec.blocks) {
            py::dict d;
            d["dim"] = b.system.dim();
            d["weight"] = b.weight;
            d["isometry"] = to_numpy(b.isometry);
            blocks.append(d);
          }
          return blocks;
        },
        py::arg("system"), py::arg("l") = 1, py::arg("seed") = 0);

  m.def("doubling_sequence", [](long long n) { return doubling_sequence(n).values; }, py::arg("n"),
        "a_0 .. a_n of the doubling-block sequence.");

  m.def("divergence_demo",
        [](long long n, const std::vector<long long>& n_values) {
          const DivergenceResult r = divergence_demo(build_counterexample(n, doubling_sequence(n)), n_values);
          return py::make_tuple(r.means, r.spread);
        },
        py::arg("n"), py::arg("n_values"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::vector<std::string> full{"ncet"};
          full.insert(full.end(), args.begin(), args.end());
          std::ostringstream out, err;
          const int code = cli::run(full, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one CLI command in process; returns (exit code, stdout, stderr).");
}
