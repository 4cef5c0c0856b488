#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eit/optics.hpp"

namespace eit {

struct ReductionOptions {
  /// Auxiliary (6-1) Rabi frequency; defaults to omega_c.
  std::optional<double> auxiliary;
  BackendOptions backend;
};

struct ReductionPoint {
  double delta = 0.0;
  Susceptibility<double> full;
  Susceptibility<double> analytic;
  bool compared = false;
};

struct ReductionReport {
  /// max |chi''_full - chi''_analytic| / chi''_analytic over compared points.
  double max_chi_im_deviation = 0.0;
  /// max |chi'_full - chi'_analytic| / |chi_analytic| over compared points;
  /// normalised by |chi| because chi' changes sign inside the window.
  double max_chi_re_deviation = 0.0;
  /// Largest shift (rad/s) of the chi'' maximum on either side of delta = 0.
  double max_peak_shift = 0.0;
  std::size_t points_compared = 0;
  std::vector<ReductionPoint> points;
};

/// Compares the six-level steady-state susceptibility with the closed-form
/// Lambda result on `grid`. Only points where the analytic chi'' exceeds 1%
/// of its maximum are compared, which keeps the transparency hole from
/// turning the relative deviation into 0/0.
///
/// Requires 0 < omega_p <= 0.05 omega_c unless omega_c = 0.
ReductionReport validate_reduction(const MaterialParams& mat, double omega_c, double omega_p,
                                   std::span<const double> grid,
                                   const ReductionOptions& opts = {});

}  // namespace eit
