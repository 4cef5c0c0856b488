#pragma once

#include <vector>

#include "eit/core.hpp"
#include "eit/materials.hpp"

namespace eit {

/// One classical field driving the transition upper <-> lower (1-based).
/// `detuning` is omega_atom - omega_field in rad/s.
struct FieldDrive {
  int upper = 0;
  int lower = 0;
  Complex rabi{0.0, 0.0};
  double detuning = 0.0;
};

/// H / hbar in the rotating frame.
///
/// The diagonal holds frame phases phi, fixed by phi(upper) - phi(lower) =
/// detuning along every drive. Level 2 is the reference (phi = 0) of the
/// component containing it; other components are anchored at their lowest
/// level. Off-diagonal: -rabi/2 at (upper, lower) and -conj(rabi)/2 at
/// (lower, upper).
///
/// Throws ConfigError for out-of-range indices or two drives on one pair,
/// InconsistentFrame when a cycle of drives has non-zero net detuning.
ComplexMatrix build_hamiltonian(int n_levels, const std::vector<FieldDrive>& drives);

/// Generator of d vec(rho)/dt = L vec(rho), with vec stacking columns
/// (element (m, n) of rho lives at index m + n * n_levels).
struct Liouvillian {
  ComplexMatrix generator;
  int n_levels = 0;

  static Eigen::Index index(int n_levels, int m, int n) { return m + n * n_levels; }
};

/// Coherent part -i[H, rho] plus Bloch-form relaxation:
///   d rho_mm/dt += sum_k Gamma_{k->m} rho_kk - (sum_k Gamma_{m->k}) rho_mm
///   d rho_mn/dt += -gamma_mn rho_mn   (m != n)
Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, const LevelSystem& levels,
                              const RealMatrix& gamma);

/// Convenience: Hamiltonian + Liouvillian from a material and a drive set.
Liouvillian build_liouvillian(const MaterialParams& mat, const std::vector<FieldDrive>& drives);

ComplexVector vectorize(const ComplexMatrix& rho);
ComplexMatrix unvectorize(const ComplexVector& v, int n_levels);

struct SteadyStateOptions {
  /// Relative residual bound ||L vec(rho)||_inf <= tol * ||L||_inf.
  double residual_tol = 1e-9;
  /// Maximum entrywise disagreement between the two constraint placements.
  double agreement_tol = 1e-8;
};

/// Stationary state of L with unit trace.
///
/// One population equation is replaced by the trace constraint and the
/// dense system is solved by LU with partial pivoting. The solve is then
/// repeated with the constraint in a different row; when the nullspace of
/// L is degenerate the two answers disagree (or the residual blows up) and
/// NoUniqueSteadyState is raised.
DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  /// Largest |Tr rho - 1| and hermiticity deviation of the raw integrator
  /// state over every accepted step, before validation.
  double max_trace_drift = 0.0;
  double max_hermiticity_drift = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

struct EvolveOptions {
  /// Output points including t = 0 and t_end, uniformly spaced.
  std::size_t samples = 101;
  std::size_t max_steps = 50'000'000;
};

/// Integrates d vec(rho)/dt = L vec(rho) from rho0 to t_end with the
/// Dormand-Prince 5(4) pair. `tol` bounds the local error per step relative
/// to max(|y|, 1) and must lie in [1e-12, 1e-3]. t_end = 0 yields the
/// single initial point.
Trajectory evolve(const DensityMatrix& rho0, const Liouvillian& L, double t_end, double tol,
                  const EvolveOptions& opts = {});

/// Relaxation rate (s^-1) of the slowest decaying eigenmode of L, ignoring
/// the stationary mode.
double slowest_relaxation_rate(const Liouvillian& L);

}  // namespace eit
