#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hausdim/cli_report.hpp"
#include "hausdim/errors.hpp"
#include "hausdim/gv_martingale.hpp"
#include "hausdim/kappa_bound.hpp"
#include "hausdim/riesz_products.hpp"
#include "hausdim/zq_spectral.hpp"

namespace py = pybind11;
using namespace hausdim;

namespace {

VertexSet vertex_set(int q, const std::vector<int>& b) {
  return polytope_vertices(FeasiblePolytope(wb_basis(symmetrize(ResidueSet(q, b)))));
}

py::dict bound_dict(const DimensionBound& d) {
  py::dict out;
  out["q"] = d.residues.q();
  out["B"] = d.residues.members();
  out["symmetrized"] = d.symmetrized;
  out["kappa_prime_1"] = d.kappa_prime_1;
  out["raw_bound"] = d.raw_bound;
  out["bound"] = d.bound;
  out["subgroup_bound"] = d.subgroup.bound;
  out["subgroup_proper"] = d.subgroup.proper;
  out["delta"] = d.delta;
  out["witness_vertex"] = d.witness_vertex;
  out["vertex_count"] = d.vertex_count;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral dimension bounds for measures with arithmetically restricted spectrum";
  m.attr("__version__") = kToolVersion;

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("wb_basis", [](int q, const std::vector<int>& b) { return wb_basis(ResidueSet(q, b)).columns; },
        py::arg("q"), py::arg("B"), "Orthonormal basis of W_B as the columns of a q x |B| matrix.");
  m.def("in_cb", [](std::int64_t n, int q, const std::vector<int>& b) { return in_cb(n, ResidueSet(q, b)); },
        py::arg("n"), py::arg("q"), py::arg("B"));
  m.def("vertices",
        [](int q, const std::vector<int>& b) {
          const VertexSet vs = vertex_set(q, b);
          Eigen::MatrixXd rows(static_cast<Eigen::Index>(vs.size()), q);
          for (std::size_t i = 0; i < vs.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = vs.vertices[i].transpose();
          return rows;
        },
        py::arg("q"), py::arg("B"), "Vertices of the feasible polytope, one per row, sorted lexicographically.");
  m.def("kappa", [](double theta, int q, const std::vector<int>& b) { return kappa(theta, vertex_set(q, b)); },
        py::arg("theta"), py::arg("q"), py::arg("B"));
  m.def("kappa_prime_1", [](int q, const std::vector<int>& b) { return kappa_prime_1(vertex_set(q, b)).value; },
        py::arg("q"), py::arg("B"));
  m.def("dimension_bound", [](int q, const std::vector<int>& b) { return bound_dict(dimension_bound(ResidueSet(q, b))); },
        py::arg("q"), py::arg("B"));

  m.def("kappa_prime_riesz", &kappa_prime_riesz, py::arg("q"));
  m.def("bound_theorem3", &bound_theorem3, py::arg("q"));
  m.def("bound_prop4", &bound_prop4, py::arg("q"));
  m.def("bound_prop4_substituted", &bound_prop4_substituted, py::arg("q"));
  m.def("bound_prop5", &bound_prop5, py::arg("q"));
  m.def("fan_entropy_integral", &fan_entropy_integral, py::arg("a"));
  m.def("fan_main_term", [](double a, int q) { return fan_main_term({a, q}); }, py::arg("a"), py::arg("q"));
  m.def("log_integral", [](int q) { return log_integral(q).value; }, py::arg("q"));
  m.def("riesz_spectrum",
        [](double a, int q, int truncation) {
          std::vector<std::pair<std::int64_t, Complex>> out;
          for (const auto& e : riesz_spectrum({a, q}, truncation).entries()) out.push_back(e);
          return out;
        },
        py::arg("a"), py::arg("q"), py::arg("truncation"));
  m.def("partial_product_values",
        [](double a, int q, int truncation, std::int64_t grid) { return partial_product_values({a, q}, truncation, grid); },
        py::arg("a"), py::arg("q"), py::arg("truncation"), py::arg("grid_size"));
  m.def("peyriere_dimension",
        [](double a, int q, int truncation, std::int64_t grid) {
          const PeyriereEstimate e = peyriere_dimension({a, q}, truncation, grid);
          return py::dict(py::arg("estimate") = e.estimate, py::arg("converged") = e.converged,
                          py::arg("truncation") = e.truncation, py::arg("grid_size") = e.grid_size);
        },
        py::arg("a"), py::arg("q"), py::arg("truncation"), py::arg("grid_size"));
  m.def("entropy_dimension_estimate",
        [](double a, int q, int truncation, int level) { return entropy_dimension_estimate({a, q}, truncation, level); },
        py::arg("a"), py::arg("q"), py::arg("truncation"), py::arg("level"));

  m.def("martingale_levels",
        [](std::vector<double> f, int q, int levels) {
          const QadicGrid grid(q, levels);
          const MartingaleSequence seq = martingale_levels(std::move(f), grid);
          std::vector<std::vector<double>> out;
          for (int k = 0; k <= levels; ++k) out.push_back(seq.atom_values(k));
          return out;
        },
        py::arg("f"), py::arg("q"), py::arg("levels"),
        "Atom values of f_0..f_N; level k holds q^k values indexed by j mod q^k.");
  m.def("riesz_growth_check",
        [](double a, int q, int levels, double p) {
          const MartingaleSequence seq = martingale_from_spectrum(riesz_spectrum({a, q}, levels), QadicGrid(q, levels));
          const GrowthReport r = growth_check(seq, ResidueSet(q, {1, q - 1}), p);
          return py::dict(py::arg("pass") = r.pass(), py::arg("kappa") = r.kappa, py::arg("norms") = r.norms,
                          py::arg("worst_relative_slack") = r.worst_relative_slack, py::arg("checks") = r.checks);
        },
        py::arg("a"), py::arg("q"), py::arg("levels"), py::arg("p"));

  m.def("run",
        [](const std::string& config_json) {
          RunConfig config = nlohmann::json::parse(config_json).get<RunConfig>();
          std::ostringstream out, err;
          const int code = run_command(config, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("config_json"), "Runs a CLI command from a JSON config; returns (exit_code, stdout, stderr).");
}
