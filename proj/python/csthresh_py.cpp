#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csthresh/errors.hpp"
#include "csthresh/lp.hpp"
#include "csthresh/recovery.hpp"
#include "csthresh/scalar_funcs.hpp"
#include "csthresh/thresholds.hpp"
#include "csthresh/width.hpp"

namespace py = pybind11;
using namespace csthresh;

namespace {

// Kinds cross the boundary as strings: "strong", "sectional", "weak", "weak-nonneg".
ThresholdKind kind_of(const std::string& s) { return parse_kind(s); }

SolverConfig config(double eps, double theta_tol) {
  SolverConfig c;
  c.eps = eps;
  c.theta_tol = theta_tol;
  return c;
}

py::dict point_dict(const CurvePoint& p) {
  py::dict d;
  d["kind"] = std::string(to_string(p.kind));
  d["beta"] = p.beta;
  d["theta_hat"] = p.theta_hat;
  d["alpha_min"] = p.alpha_min;
  d["eps"] = p.eps;
  d["residual"] = p.residual;
  d["iterations"] = p.iterations;
  d["saturated"] = p.saturated;
  d["multiple_roots"] = p.multiple_roots;
  d["no_root"] = p.no_root;
  return d;
}

py::dict nsp_dict(const NspResult& r) {
  py::dict d;
  d["holds"] = r.holds;
  d["boundary"] = r.boundary;
  d["verdict"] = std::string(r.verdict());
  if (r.witness) {
    py::dict w;
    w["support"] = r.witness->support;
    w["signs"] = r.witness->signs;
    w["w"] = r.witness->w;
    w["value"] = r.witness->value;
    d["witness"] = w;
  } else {
    d["witness"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_csthresh, m) {
  m.doc() = "Recovery thresholds for l1 minimization";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<NoRootError>(m, "NoRootError", PyExc_RuntimeError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
  py::register_exception<LpStatusError>(m, "LpStatusError", PyExc_RuntimeError);

  m.def("erfinv", &erfinv, py::arg("p"));
  m.def("tail_m1_abs", &tail_m1_abs, py::arg("theta"));
  m.def("tail_m2_abs", &tail_m2_abs, py::arg("theta"));
  m.def("tail_m1_gauss", &tail_m1_gauss, py::arg("theta"));
  m.def("tail_m2_signed", &tail_m2_signed, py::arg("theta"));

  m.def(
      "theta_residual",
      [](const std::string& kind, double theta, double beta, double eps) {
        return theta_residual(kind_of(kind), theta, beta, eps);
      },
      py::arg("kind"), py::arg("theta"), py::arg("beta"), py::arg("eps") = 0.0);
  m.def(
      "solve_theta",
      [](const std::string& kind, double beta, double eps, double theta_tol) {
        return solve_theta(kind_of(kind), beta, config(eps, theta_tol));
      },
      py::arg("kind"), py::arg("beta"), py::arg("eps") = 0.0, py::arg("theta_tol") = 1e-12);
  m.def(
      "alpha_bound",
      [](const std::string& kind, double beta, double eps, double theta_tol) {
        return point_dict(alpha_bound(kind_of(kind), beta, config(eps, theta_tol)));
      },
      py::arg("kind"), py::arg("beta"), py::arg("eps") = 0.0, py::arg("theta_tol") = 1e-12);
  m.def(
      "curve",
      [](const std::string& kind, const std::vector<double>& betas, double eps, int threads) {
        SolverConfig c = config(eps, 1e-12);
        c.threads = threads;
        std::vector<CurvePoint> pts;
        {
          py::gil_scoped_release release;
          pts = curve(kind_of(kind), betas, c);
        }
        py::list out;
        for (const auto& p : pts) out.append(point_dict(p));
        return out;
      },
      py::arg("kind"), py::arg("betas"), py::arg("eps") = 0.0, py::arg("threads") = 1);
  m.def(
      "invert_alpha",
      [](const std::string& kind, double alpha, double eps) {
        return invert_alpha(kind_of(kind), alpha, config(eps, 1e-12));
      },
      py::arg("kind"), py::arg("alpha"), py::arg("eps") = 0.0);
  m.def(
      "beta_max", [](const std::string& kind) { return beta_max(kind_of(kind)); },
      py::arg("kind"));

  m.def(
      "dual_width_bound",
      [](const std::string& kind, const std::vector<double>& h, std::size_t k) {
        return dual_width_bound(scenario_vector(kind_of(kind), h, k), CMode::ExactDual);
      },
      py::arg("kind"), py::arg("h"), py::arg("k"));
  m.def(
      "primal_width_oracle",
      [](const std::string& kind, const std::vector<double>& h, std::size_t k) {
        return primal_width_oracle(scenario_vector(kind_of(kind), h, k));
      },
      py::arg("kind"), py::arg("h"), py::arg("k"));
  m.def(
      "width_monte_carlo",
      [](const std::string& kind, std::size_t n, std::size_t k, std::size_t samples,
         std::uint64_t seed, const std::string& c_mode, std::size_t m_rows, int threads) {
        WidthReport r;
        {
          py::gil_scoped_release release;
          r = width_monte_carlo(kind_of(kind), n, k, samples, seed, parse_c_mode(c_mode), m_rows,
                                threads);
        }
        py::dict d;
        d["kind"] = std::string(to_string(r.kind));
        d["n"] = r.n;
        d["k"] = r.k;
        d["m"] = r.m;
        d["samples"] = r.samples;
        d["seed"] = r.seed;
        d["c_mode"] = std::string(to_string(r.c_mode));
        d["mean_B_over_sqrt_n"] = r.mean_B_over_sqrt_n;
        d["std_err"] = r.std_err;
        d["gordon_budget"] = r.gordon_budget;
        d["pass"] = r.pass;
        d["no_feasible_samples"] = r.no_feasible_samples;
        return d;
      },
      py::arg("kind"), py::arg("n"), py::arg("k"), py::arg("samples") = 200,
      py::arg("seed") = 1, py::arg("c_mode") = "exact", py::arg("m") = 0,
      py::arg("threads") = 1);

  m.def(
      "solve_lp",
      [](const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
        const LpSolution s = solve_lp(LinearProgram{c, A, b});
        py::dict d;
        d["status"] = std::string(to_string(s.status));
        d["x"] = s.x ? py::cast(*s.x) : py::none();
        d["objective"] = s.objective_value ? py::cast(*s.objective_value) : py::none();
        d["iterations"] = s.iterations;
        return d;
      },
      py::arg("c"), py::arg("A"), py::arg("b"));
  m.def("l1_solve", &l1_solve, py::arg("A"), py::arg("y"));
  m.def("nonneg_l1_solve", &nonneg_l1_solve, py::arg("A"), py::arg("y"));
  m.def("recovery_success", &recovery_success, py::arg("x_true"), py::arg("x_hat"));
  m.def(
      "nsp_check",
      [](const Eigen::MatrixXd& A, std::size_t k, const std::string& variant) {
        if (variant == "strong") return nsp_dict(nsp_check_strong(A, k));
        return nsp_dict(nsp_check_fixed_support(A, k, parse_nsp_variant(variant)));
      },
      py::arg("A"), py::arg("k"), py::arg("variant") = "strong");
  m.def(
      "phase_diagram",
      [](std::size_t n, const std::vector<double>& alphas, const std::vector<double>& betas,
         std::size_t trials, const std::string& model, std::uint64_t seed, int threads) {
        std::vector<PhaseCell> cells;
        {
          py::gil_scoped_release release;
          cells = phase_diagram(n, alphas, betas, trials, kind_of(model), seed, threads);
        }
        py::list out;
        for (const auto& c : cells) {
          py::dict d;
          d["alpha"] = c.alpha;
          d["beta"] = c.beta;
          d["n"] = c.n;
          d["m"] = c.m;
          d["k"] = c.k;
          d["trials"] = c.trials;
          d["successes"] = c.successes;
          d["lp_failures"] = c.lp_failures;
          d["seed"] = c.seed;
          out.append(d);
        }
        return out;
      },
      py::arg("n"), py::arg("alphas"), py::arg("betas"), py::arg("trials"), py::arg("model"),
      py::arg("seed") = 1, py::arg("threads") = 1);
}
