#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "eit/core.hpp"

namespace eit {

/// How inverse lifetimes enter the coherence-decay sum.
///   kCyclic:  1/T1 and dephasing are both summed as cyclic rates, then the
///             half-sum is converted to rad/s (gamma = pi * sum). This
///             reproduces the Pr:YSO literature values 6.28e3 and 4.7e4 rad/s.
///   kAngular: 1/T1 is already an angular rate; only dephasing (Hz) is
///             converted (gamma = (1/Ti + 1/Tj)/2 + pi * dph).
enum class RateConvention { kCyclic, kAngular };

std::string to_string(RateConvention c);
RateConvention rate_convention_from_string(const std::string& s);

/// Level lifetimes, population-transfer table and pure dephasing.
///
/// Levels are labelled 1..n in the public API; storage is 0-based.
/// `branching(m, k)` is the population transfer rate from level m+1 to level
/// k+1 in s^-1. `dephasing_hz` is symmetric, in Hz. A lifetime of +inf means
/// the level does not decay.
struct LevelSystem {
  std::vector<double> lifetimes_s;
  RealMatrix branching;
  RealMatrix dephasing_hz;

  int n_levels() const { return static_cast<int>(lifetimes_s.size()); }

  /// Sum of outgoing transfer rates of level m (1-based).
  double total_decay(int m) const { return branching.row(m - 1).sum(); }

  /// Builds a system with no decay channels and no dephasing.
  static LevelSystem isolated(int n_levels);

  /// Replaces the decay channels of level m (1-based): rate(m -> k) =
  /// fraction_k / T1(m). Fractions must be non-negative and sum to 1.
  void set_branching_fractions(int m, const std::vector<std::pair<int, double>>& fractions);

  /// Equal shares of 1/T1(m) into each listed destination.
  void set_equal_branching(int m, const std::vector<int>& destinations);

  void set_dephasing_hz(int i, int j, double rate_hz);

  /// Throws ConfigError when sizes mismatch, a rate is negative, a level
  /// decays into itself, or a level's channels do not sum to 1/T1.
  void validate() const;
};

/// Total coherence-decay table gamma_ij (rad/s), zero on the diagonal:
/// gamma_ij = (Gamma_i + Gamma_j + gamma_ij^dph) / 2, with Gamma_i = 1/T1(i)
/// and the unit handling chosen by `convention`.
RealMatrix derive_gamma(const LevelSystem& levels,
                        RateConvention convention = RateConvention::kCyclic);

struct MaterialParams {
  double density_per_m3 = 0.0;
  double dipole_c_m = 0.0;  // mu_52
  double probe_wavelength_m = 0.0;
  LevelSystem levels;
  RateConvention rate_convention = RateConvention::kCyclic;
  RealMatrix gamma;  // rad/s, derived

  /// Recomputes `gamma` from `levels`; call after editing levels.
  void refresh();

  /// Throws ConfigError if any invariant is violated.
  void validate() const;

  double gamma_between(int i, int j) const { return gamma(i - 1, j - 1); }

  /// Probe carrier angular frequency 2 pi c / lambda.
  double probe_omega() const;
};

/// Six-level Pr3+:Y2SiO5 model at 1.4 K.
///
/// Ground levels |1>..|3> live 400 s, excited levels |4>..|6> 164 us. Pure
/// dephasing 2 kHz on 3-2, 9 kHz on 5-2 and 5-3. N = 4.7e24 m^-3,
/// mu_52 = 1e-33 C m. The 605.7 nm probe wavelength (3H4 -> 1D2) comes
/// from the Pr:YSO literature rather than the rate data above.
/// Branching is equal among destinations: 2 -> {1}, 3 -> {1,2},
/// 4 -> {1,2,3}, 5 -> {1..4}, 6 -> {1..5}; level 1 is the bottom of every
/// decay chain and has no outgoing channel.
MaterialParams pryso_defaults();

}  // namespace eit
