#include "eit/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eit {

ReductionReport validate_reduction(const MaterialParams& mat, double omega_c, double omega_p,
                                   std::span<const double> grid, const ReductionOptions& opts) {
  if (grid.empty()) throw InvalidArgument("reduction grid is empty");
  if (!(omega_p > 0.0)) throw InvalidArgument("probe Rabi frequency must be > 0");
  if (omega_c < 0.0) throw InvalidArgument("coupling Rabi frequency must be >= 0");
  if (omega_c > 0.0 && omega_p > 0.05 * omega_c) {
    std::ostringstream os;
    os << "weak-probe regime violated: omega_p = " << omega_p << " > 0.05 omega_c = "
       << 0.05 * omega_c;
    throw InvalidArgument(os.str());
  }

  DriveSet drives;
  drives.probe = omega_p;
  drives.coupling = omega_c;
  drives.auxiliary = opts.auxiliary.value_or(omega_c);

  const auto full = evaluate_chi_many(Backend::kFull, mat, drives, grid, opts.backend);
  const auto analytic = evaluate_chi_many(Backend::kAnalytic, mat, drives, grid, opts.backend);

  ReductionReport rep;
  double peak = 0.0;
  for (const auto& a : analytic) peak = std::max(peak, a.chi_im);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ReductionPoint pt{grid[i], full[i], analytic[i], analytic[i].chi_im > 0.01 * peak};
    if (grid.size() == 1) pt.compared = true;
    if (pt.compared) {
      ++rep.points_compared;
      const double mag = std::abs(pt.analytic.value());
      rep.max_chi_im_deviation = std::max(
          rep.max_chi_im_deviation, std::abs(pt.full.chi_im - pt.analytic.chi_im) / pt.analytic.chi_im);
      rep.max_chi_re_deviation =
          std::max(rep.max_chi_re_deviation, std::abs(pt.full.chi_re - pt.analytic.chi_re) / mag);
    }
    rep.points.push_back(pt);
  }

  // Peak positions, one per side of delta = 0.
  for (bool positive : {false, true}) {
    std::size_t best_full = grid.size(), best_analytic = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if ((grid[i] >= 0.0) != positive) continue;
      if (best_full == grid.size() || full[i].chi_im > full[best_full].chi_im) best_full = i;
      if (best_analytic == grid.size() || analytic[i].chi_im > analytic[best_analytic].chi_im) {
        best_analytic = i;
      }
    }
    if (best_full != grid.size()) {
      rep.max_peak_shift = std::max(rep.max_peak_shift, std::abs(grid[best_full] - grid[best_analytic]));
    }
  }
  return rep;
}

}  // namespace eit
