#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "eit/errors.hpp"

namespace eit {

/// Vacuum constants in SI units. Fixed; not configurable.
struct PhysicalConstants {
  static constexpr double epsilon0 = 8.8541878128e-12;  // F/m
  static constexpr double hbar = 1.054571817e-34;       // J s
  static constexpr double c = 2.99792458e8;             // m/s
};

template <typename Real>
using ComplexMatrixX = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVectorX = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixX<double>;
using ComplexVector = ComplexVectorX<double>;
using RealMatrix = Eigen::MatrixXd;

/// Angular frequency in rad/s. Every frequency-like quantity inside the
/// engine (Rabi frequencies, detunings, decay rates) is angular; Hz values
/// are converted once, at the input boundary.
struct AngularFrequency {
  double value = 0.0;

  constexpr double hz() const { return value / (2.0 * std::numbers::pi); }
  friend constexpr auto operator<=>(AngularFrequency, AngularFrequency) = default;
};

AngularFrequency hz_to_angular(double frequency_hz);

/// Tolerances a density matrix must meet after construction.
struct DensityTolerance {
  static constexpr double kHermiticity = 1e-10;
  static constexpr double kTrace = 1e-9;
  static constexpr double kPopulation = 1e-9;
  /// Deviations above this are rejected outright rather than repaired.
  static constexpr double kReject = 1e-6;
};

/// Hermitian, unit-trace state. Only obtainable through
/// assert_density_matrix, so a held value is always valid.
class DensityMatrix {
 public:
  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index levels() const { return rho_.rows(); }

  /// 1-based element access, matching level labels |1>..|n>.
  Complex operator()(int m, int n) const { return rho_(m - 1, n - 1); }

  Eigen::VectorXd populations() const { return rho_.diagonal().real(); }
  Complex trace() const { return rho_.trace(); }

 private:
  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {}
  friend DensityMatrix assert_density_matrix(const ComplexMatrix& m);

  ComplexMatrix rho_;
};

/// Largest |m_ij - conj(m_ji)|.
double hermiticity_deviation(const ComplexMatrix& m);

/// Validates `m` as a density matrix. Small anti-hermitian residue (below
/// DensityTolerance::kReject) is projected away; anything larger, a trace
/// off by more than kReject, or a population outside [0, 1] by more than
/// kReject raises StateCorruption.
DensityMatrix assert_density_matrix(const ComplexMatrix& m);

/// rho_mn with 1-based indices.
Complex coherence(const DensityMatrix& rho, int m, int n);

}  // namespace eit
