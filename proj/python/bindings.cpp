#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <tuple>
#include <vector>

#include "lapmm/covariance.hpp"
#include "lapmm/error.hpp"
#include "lapmm/laplacian.hpp"
#include "lapmm/majorize.hpp"
#include "lapmm/oracle.hpp"
#include "lapmm/portfolio.hpp"
#include "lapmm/solver.hpp"

namespace py = pybind11;
using namespace lapmm;

namespace {

py::dict trace_dict(const SolveTrace& trace) {
  std::vector<double> residuals, objectives;
  for (const auto& rec : trace.iterations) {
    residuals.push_back(rec.residual_norm);
    objectives.push_back(rec.objective.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  py::dict d;
  d["iterations"] = trace.num_iterations();
  d["residuals"] = residuals;
  d["objectives"] = objectives;
  d["threshold"] = trace.threshold;
  d["converged"] = trace.status == SolveStatus::kConverged;
  return d;
}

SolveOptions make_options(double eps_abs, double eps_rel, int max_iter, int workers) {
  SolveOptions opts;
  opts.eps_abs = eps_abs;
  opts.eps_rel = eps_rel;
  opts.max_iter = max_iter;
  opts.workers = workers;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_lapmm, m) {
  m.doc() = "Distributed majorization-minimization for Laplacian-regularized problems";

  static py::exception<Error> error(m, "LapmmError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<WeightedLaplacian>(m, "Laplacian")
      .def_property_readonly("size", &WeightedLaplacian::size)
      .def_property_readonly("diagonal", &WeightedLaplacian::diagonal)
      .def_property_readonly("edges",
                             [](const WeightedLaplacian& L) {
                               std::vector<std::tuple<Index, Index, double>> out;
                               for (const auto& e : L.edges()) out.emplace_back(e.i, e.j, e.weight);
                               return out;
                             })
      .def("to_dense", &WeightedLaplacian::to_dense)
      .def("matvec", [](const WeightedLaplacian& L, const Vector& x) { return matvec(L, x); })
      .def("energy", [](const WeightedLaplacian& L, const Vector& x) {
        return dirichlet_energy(L, x);
      });

  m.def(
      "laplacian",
      [](Index n, const std::vector<std::tuple<Index, Index, double>>& edges) {
        std::vector<Edge> list;
        for (const auto& [i, j, w] : edges) list.push_back({i, j, w});
        return laplacian_from_edges(n, list);
      },
      py::arg("n"), py::arg("edges"));
  m.def(
      "grid_laplacian",
      [](Index rows, Index cols, double weight) {
        return laplacian_from_edges(rows * cols, grid_graph(rows, cols, weight));
      },
      py::arg("rows"), py::arg("cols"), py::arg("weight") = 1.0);

  m.def(
      "diagonal_majorizer",
      [](const WeightedLaplacian& L, double factor) { return diagonal_majorizer(L, factor).alpha; },
      py::arg("L"), py::arg("factor") = kDefaultFactor);
  m.def(
      "spectral_majorizer", [](const WeightedLaplacian& L) { return spectral_majorizer(L).alpha; },
      py::arg("L"));

  m.def(
      "solve_portfolio",
      [](Index n, Index T, Index factors, std::uint64_t seed, double gamma, bool shorting,
         double eps_abs, int max_iter, int workers) {
        portfolio::GeneratorOptions g;
        g.n = n;
        g.T = T;
        g.factors = factors;
        g.seed = seed;
        g.gamma = gamma;
        g.shorting = shorting;
        const auto inst = portfolio::generate_instance(g);
        const auto lrmp = portfolio::build_problem(inst);
        SolveResult result;
        {
          py::gil_scoped_release release;
          result = solve(lrmp.L, lrmp.partition, diagonal_majorizer(lrmp.L), *lrmp.problem,
                         std::nullopt, make_options(eps_abs, 0.0, max_iter, workers));
        }
        py::dict d = trace_dict(result.trace);
        d["weights"] = portfolio::weights_matrix(inst, result.x);
        return d;
      },
      py::arg("n") = 10, py::arg("T") = 4, py::arg("factors") = 3, py::arg("seed") = 0,
      py::arg("gamma") = 1000.0, py::arg("shorting") = true, py::arg("eps_abs") = 1e-6,
      py::arg("max_iter") = 1000, py::arg("workers") = 1);

  m.def(
      "solve_covariance",
      [](Index rows, Index cols, Index d, Index samples, std::uint64_t seed, double lambda,
         double kappa, int workers) {
        auto inst = covariance::generate_instance(rows, cols, d, samples, seed);
        inst.lambda = lambda;
        inst.kappa = kappa;
        auto opts = covariance::default_options();
        opts.workers = workers;
        covariance::CovSolution sol;
        {
          py::gil_scoped_release release;
          sol = covariance::solve_covariance(inst, opts);
        }
        py::dict out = trace_dict(sol.trace);
        out["theta"] = sol.theta;
        out["rmse"] = covariance::rmse(sol.theta, inst.theta_true);
        out["lambda_zero"] = [&] {
          std::vector<Matrix> t;
          for (const auto& s : inst.S) t.push_back(covariance::analytic_lambda_zero(s, kappa));
          return t;
        }();
        out["lambda_inf"] = covariance::analytic_lambda_inf(inst.S, kappa);
        return out;
      },
      py::arg("rows"), py::arg("cols"), py::arg("d"), py::arg("samples"), py::arg("seed") = 0,
      py::arg("lam") = covariance::kDefaultLambda, py::arg("kappa") = covariance::kDefaultKappa,
      py::arg("workers") = 1);

  m.def(
      "regularization_path",
      [](Index rows, Index cols, Index d, Index samples, std::uint64_t seed,
         const std::vector<double>& lambdas, bool warm_start) {
        const auto inst = covariance::generate_instance(rows, cols, d, samples, seed);
        std::vector<covariance::PathPoint> path;
        {
          py::gil_scoped_release release;
          path = covariance::regularization_path(inst, lambdas, warm_start,
                                                 covariance::default_options());
        }
        py::list out;
        for (const auto& p : path) {
          py::dict row;
          row["lambda"] = p.lambda;
          row["iterations"] = p.iterations;
          row["rmse"] = p.rmse;
          row["converged"] = p.status == SolveStatus::kConverged;
          out.append(row);
        }
        return out;
      },
      py::arg("rows"), py::arg("cols"), py::arg("d"), py::arg("samples"), py::arg("seed"),
      py::arg("lambdas"), py::arg("warm_start") = true);

  m.def("cov_block_update", &covariance::block_update, py::arg("S"), py::arg("H"),
        py::arg("kappa"), py::arg("alpha"), py::arg("theta_k"));
  m.def(
      "symmetric_eigen",
      [](const Matrix& M) {
        const auto e = covariance::symmetric_eigen(M);
        return py::make_tuple(e.values, e.Q);
      },
      py::arg("M"));
}
