#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "eit/master_equation.hpp"

namespace eit {

namespace {

// Generator with the population equation of `level` swapped for Tr rho = 1.
std::pair<ComplexMatrix, ComplexVector> constrained_system(const ComplexMatrix& generator, int n,
                                                           int level) {
  ComplexMatrix a = generator;
  ComplexVector b = ComplexVector::Zero(generator.rows());
  const Eigen::Index row = Liouvillian::index(n, level, level);
  a.row(row).setZero();
  for (int i = 0; i < n; ++i) a(row, Liouvillian::index(n, i, i)) = 1.0;
  b(row) = 1.0;
  return {std::move(a), std::move(b)};
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts) {
  const int n = L.n_levels;
  const auto& g = L.generator;
  if (n < 1 || g.rows() != static_cast<Eigen::Index>(n) * n || g.cols() != g.rows()) {
    throw InvalidArgument("malformed Liouvillian");
  }

  const auto [a, b] = constrained_system(g, n, 0);
  const ComplexVector x = a.partialPivLu().solve(b);
  const double norm = g.cwiseAbs().rowwise().sum().maxCoeff();
  const double residual = x.allFinite() ? (g * x).cwiseAbs().maxCoeff()
                                        : std::numeric_limits<double>::infinity();
  if (!(residual <= opts.residual_tol * std::max(norm, 1e-300))) {
    std::ostringstream os;
    os << "no unique steady state: residual " << residual << " vs ||L|| = " << norm;
    throw NoUniqueSteadyState(os.str());
  }

  if (n > 1) {
    // Full pivoting both reorders the elimination and exposes rank loss,
    // which partial pivoting silently steps over.
    const auto [a2, b2] = constrained_system(g, n, n - 1);
    const Eigen::FullPivLU<ComplexMatrix> lu(a2);
    if (lu.rank() < a2.rows()) {
      std::ostringstream os;
      os << "no unique steady state: constrained generator has rank " << lu.rank() << " < "
         << a2.rows() << " (stationary subspace is degenerate)";
      throw NoUniqueSteadyState(os.str());
    }
    const ComplexVector y = lu.solve(b2);
    const double disagreement =
        y.allFinite() ? (x - y).cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
    if (!(disagreement <= opts.agreement_tol)) {
      std::ostringstream os;
      os << "no unique steady state: constraint placements disagree by " << disagreement
         << " (residual " << residual << ")";
      throw NoUniqueSteadyState(os.str());
    }
  }
  return assert_density_matrix(unvectorize(x, n));
}

double slowest_relaxation_rate(const Liouvillian& L) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(L.generator, false);
  if (solver.info() != Eigen::Success) {
    throw NoUniqueSteadyState("eigen decomposition of the Liouvillian failed");
  }
  std::vector<double> rates;
  for (const auto& ev : solver.eigenvalues()) rates.push_back(-ev.real());
  std::sort(rates.begin(), rates.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  return rates.size() > 1 ? rates[1] : 0.0;
}

}  // namespace eit
