#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "eit/master_equation.hpp"

namespace eit {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double trace_drift(const ComplexVector& y, int n) {
  Complex tr = 0.0;
  for (int i = 0; i < n; ++i) tr += y(Liouvillian::index(n, i, i));
  return std::abs(tr - 1.0);
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const Liouvillian& L, double t_end, double tol,
                  const EvolveOptions& opts) {
  const int n = L.n_levels;
  if (rho0.levels() != n) throw InvalidArgument("initial state does not match the Liouvillian");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be finite and >= 0");
  if (!(tol >= 1e-12 && tol <= 1e-3)) throw InvalidArgument("tol must lie in [1e-12, 1e-3]");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  if (t_end == 0.0) return traj;

  const auto& A = L.generator;
  const std::size_t samples = std::max<std::size_t>(opts.samples, 2);
  const double norm = std::max(A.cwiseAbs().rowwise().sum().maxCoeff(), 1.0 / t_end);

  ComplexVector y = vectorize(rho0.matrix());
  ComplexVector k1 = A * y, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  double t = 0.0;
  double h = std::min(t_end, 0.1 * std::pow(tol, 0.2) / norm);

  for (std::size_t s = 1; s < samples; ++s) {
    const double t_out = t_end * static_cast<double>(s) / static_cast<double>(samples - 1);
    while (t < t_out) {
      if (traj.accepted_steps + traj.rejected_steps >= opts.max_steps) {
        std::ostringstream os;
        os << "step budget of " << opts.max_steps << " exhausted at t = " << t << " s";
        throw IntegrationFailure(os.str());
      }
      const bool last = t + h >= t_out;
      const double step = last ? t_out - t : h;
      if (step < 16.0 * std::numeric_limits<double>::epsilon() * std::max(t, 1e-300)) {
        std::ostringstream os;
        os << "step size underflow (h = " << step << ") at t = " << t << " s";
        throw IntegrationFailure(os.str());
      }

      ytmp = y + step * a21 * k1;
      k2.noalias() = A * ytmp;
      ytmp = y + step * (a31 * k1 + a32 * k2);
      k3.noalias() = A * ytmp;
      ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      k4.noalias() = A * ytmp;
      ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      k5.noalias() = A * ytmp;
      ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      k6.noalias() = A * ytmp;
      ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7.noalias() = A * ynew;
      err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = tol * std::max({1.0, std::abs(y(i)), std::abs(ynew(i))});
        err_norm = std::max(err_norm, std::abs(err(i)) / scale);
      }
      if (!std::isfinite(err_norm)) {
        throw IntegrationFailure("non-finite local error estimate at t = " + std::to_string(t));
      }

      const double factor =
          err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      if (err_norm <= 1.0) {
        t = last ? t_out : t + step;
        y.swap(ynew);
        k1.swap(k7);
        ++traj.accepted_steps;
        traj.max_trace_drift = std::max(traj.max_trace_drift, trace_drift(y, n));
        traj.max_hermiticity_drift =
            std::max(traj.max_hermiticity_drift, hermiticity_deviation(unvectorize(y, n)));
        // A step clipped to land on t_out says nothing about the natural size.
        if (!last) h = step * factor;
      } else {
        ++traj.rejected_steps;
        h = step * std::min(factor, 1.0);
      }
    }
    traj.times.push_back(t_out);
    traj.states.push_back(assert_density_matrix(unvectorize(y, n)));
  }
  return traj;
}

}  // namespace eit
