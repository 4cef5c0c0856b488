#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eit/core.hpp"
#include "eit/lambda.hpp"
#include "eit/master_equation.hpp"
#include "eit/materials.hpp"

namespace eit {

/// chi = 2 N mu52 rho52 / (eps0 E0) with E0 = hbar Wp / mu52, i.e.
/// chi = 2 A rho52 / Wp. Throws DivisionByZero for Wp = 0.
Susceptibility<double> rho_to_chi(Complex rho52, const MaterialParams& mat, Complex omega_p);

/// n = 1 + chi'/2.
inline double refractive_index(const Susceptibility<double>& chi) { return 1.0 + 0.5 * chi.chi_re; }

/// alpha = k chi''/2, k = 2 pi / lambda. Throws ConventionViolation when
/// chi'' < -1e-12 (gain is outside this model).
double absorption(const Susceptibility<double>& chi, double wavelength_m);

/// Group velocity c / (n + w dn/dw) with dn/dw from a central difference of
/// step h. Throws DivergentVelocity when the group index is below 1e-12 in
/// magnitude.
///
/// Optical frequencies are ~1e15 rad/s where doubles are spaced ~0.5 rad/s,
/// so the difference quotient divides by the step actually realised.
template <typename Sampler>
double group_velocity(Sampler&& n_of_omega, double omega, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
  const double up = omega + h;
  const double down = omega - h;
  if (!(up > down)) throw InvalidArgument("finite-difference step below frequency resolution");
  const double dn = (n_of_omega(up) - n_of_omega(down)) / (up - down);
  const double group_index = n_of_omega(omega) + omega * dn;
  if (!(std::abs(group_index) >= 1e-12)) {
    throw DivergentVelocity("group index vanishes; group velocity diverges");
  }
  return PhysicalConstants::c / group_index;
}

/// Group velocity of the analytic backend from the exact slope of chi'.
/// Detuning and optical frequency run opposite (d delta / d omega = -1).
double group_velocity_analytic(const LambdaParams<double>& p, const MaterialParams& mat,
                               double delta);

enum class Backend { kAnalytic, kFull };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

/// The three fields of the six-level model: probe on 5-2, coupling on 5-3,
/// auxiliary on 6-1. Rabi frequencies and detunings in rad/s.
struct DriveSet {
  Complex probe{0.0, 0.0};
  Complex coupling{0.0, 0.0};
  Complex auxiliary{0.0, 0.0};
  double coupling_detuning = 0.0;
  double auxiliary_detuning = 0.0;

  std::vector<FieldDrive> drives(double probe_detuning) const;
};

/// `points` samples spaced evenly over [min, max], endpoints included.
struct DetuningGrid {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;

  void validate() const;
  double at(std::size_t i) const;
};

struct SpectrumRow {
  double delta = 0.0;  // rad/s
  double chi_re = 0.0;
  double chi_im = 0.0;
  double n = 1.0;
  double alpha = 0.0;  // 1/m
};

struct Spectrum {
  Backend backend = Backend::kAnalytic;
  std::vector<SpectrumRow> rows;
  /// Canonical JSON text describing every input of the run.
  std::string params_digest;

  std::string to_csv() const;
  std::string to_json() const;
};

/// Options shared by every backend evaluation.
struct BackendOptions {
  std::size_t jobs = 1;
  SteadyStateOptions steady;
  /// Test hook: multiplies gamma52 seen by the analytic backend only.
  double analytic_gamma52_factor = 1.0;
};

/// chi at one probe detuning.
Susceptibility<double> evaluate_chi(Backend backend, const MaterialParams& mat,
                                    const DriveSet& drives, double delta,
                                    const BackendOptions& opts = {});

/// evaluate_chi over many detunings, fanned out over `opts.jobs` threads.
/// Results are in input order regardless of the job count. Backend errors
/// are re-raised with the offending detuning; the lowest failing index wins.
std::vector<Susceptibility<double>> evaluate_chi_many(Backend backend, const MaterialParams& mat,
                                                     const DriveSet& drives,
                                                     std::span<const double> deltas,
                                                     const BackendOptions& opts = {});

/// Evaluates chi, n and alpha at every grid point. Points are independent
/// and may run on `opts.jobs` threads; rows come back in grid order and are
/// identical for any job count.
Spectrum sweep(Backend backend, const MaterialParams& mat, const DriveSet& drives,
               const DetuningGrid& grid, const BackendOptions& opts = {});

/// Refractive index as a function of optical angular frequency, centred so
/// that `omega_at(delta)` maps back to probe detuning `delta`.
struct IndexSampler {
  Backend backend;
  const MaterialParams* mat;
  DriveSet drives;
  BackendOptions opts;
  double delta0;

  double omega_at_delta0() const { return mat->probe_omega() - delta0; }
  double operator()(double omega) const;
};

/// Half-absorption transparency window around delta = 0.
struct WindowReport {
  bool found = false;
  /// The interval reached the end of the grid on at least one side.
  bool truncated = false;
  double width = 0.0;     // rad/s
  double width_hz = 0.0;  // width / 2 pi
  double threshold_alpha = 0.0;
  double reference_alpha = 0.0;
  double alpha_at_zero = 0.0;
  std::pair<double, double> edges{0.0, 0.0};
};

/// Maximal contiguous interval containing delta = 0 on which alpha stays at
/// or below reference_alpha / 2; edges by linear interpolation. When
/// alpha(0) is already above the threshold the report has found = false and
/// width 0.
WindowReport transparency_window(const Spectrum& spectrum, double reference_alpha);

/// Distance between the absorption maxima on either side of delta = 0
/// (Autler-Townes doublet), refined by a parabola through each maximum.
/// Returns 0 when either side has no interior maximum.
double autler_townes_separation(const Spectrum& spectrum);

}  // namespace eit
