#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "eit/core.hpp"
#include "eit/materials.hpp"

namespace eit {

/// Three-level Lambda reduction of the six-level model: probe on 5-2,
/// coupling on 5-3, all population in |2>.
template <typename Real = double>
struct LambdaParams {
  Real gamma52{};     // rad/s
  Real gamma32{};     // rad/s
  Real omega_c{};     // coupling Rabi magnitude, rad/s
  Real coupling_a{};  // N |mu52|^2 / (eps0 hbar), rad/s

  void validate() const {
    if (!(gamma52 > 0) || !(gamma32 >= 0) || !(omega_c >= 0) || !(coupling_a > 0)) {
      throw InvalidArgument(
          "Lambda parameters need gamma52 > 0, gamma32 >= 0, omega_c >= 0, A > 0");
    }
  }
};

template <typename Real = double>
struct Susceptibility {
  Real chi_re{};
  Real chi_im{};

  std::complex<Real> value() const { return {chi_re, chi_im}; }
};

/// Prefactor A = N mu^2 / (eps0 hbar) in rad/s.
inline double coupling_prefactor(const MaterialParams& mat) {
  return mat.density_per_m3 * mat.dipole_c_m * mat.dipole_c_m /
         (PhysicalConstants::epsilon0 * PhysicalConstants::hbar);
}

inline LambdaParams<double> lambda_from_material(const MaterialParams& mat, double omega_c) {
  LambdaParams<double> p;
  p.gamma52 = mat.gamma_between(5, 2);
  p.gamma32 = mat.gamma_between(3, 2);
  p.omega_c = std::abs(omega_c);
  p.coupling_a = coupling_prefactor(mat);
  return p;
}

/// Stationary (rho52, rho32) of the slowly-varying Lambda equations
///   d rho52/dt = -(g52 + i D) rho52 + i Wp/2 + i Wc/2 rho32
///   d rho32/dt = -(g32 + i D) rho32 + i Wc/2 rho52
/// with the common denominator
///   den = (g52 + i D)(g32 + i D) + Wc^2/4.
/// den vanishes only for g32 = D = Wc = 0, where rho32 is undetermined.
template <typename Real>
std::pair<std::complex<Real>, std::complex<Real>> lambda_steady_state(
    const LambdaParams<Real>& p, std::complex<Real> omega_p, Real delta) {
  using C = std::complex<Real>;
  if (p.gamma32 == Real(0) && delta == Real(0) && p.omega_c == Real(0)) {
    throw SingularParameters("Lambda steady state undefined for gamma32 = delta = omega_c = 0");
  }
  const C i(0, 1);
  const C den = (p.gamma52 + i * delta) * (p.gamma32 + i * delta) + p.omega_c * p.omega_c / Real(4);
  const C rho52 = (i * omega_p / Real(2)) * (p.gamma32 + i * delta) / den;
  const C rho32 = -p.omega_c * omega_p / (Real(4) * den);
  return {rho52, rho32};
}

namespace detail {
template <typename Real>
struct LambdaTerms {
  Real g;  // g32 g52 + Wc^2/4
  Real s;  // g52 + g32
  Real z;  // (D^2 - g)^2 + D^2 s^2
};

template <typename Real>
LambdaTerms<Real> lambda_terms(const LambdaParams<Real>& p, Real delta) {
  const Real g = p.gamma32 * p.gamma52 + p.omega_c * p.omega_c / Real(4);
  const Real s = p.gamma52 + p.gamma32;
  const Real u = delta * delta - g;
  return {g, s, u * u + delta * delta * s * s};
}
}  // namespace detail

/// Closed-form susceptibility of the Lambda system:
///   chi'  = A D (D^2 + g32^2 - Wc^2/4) / Z
///   chi'' = A [g32 (g32 g52 + Wc^2/4) + D^2 g52] / Z
///   Z     = (D^2 - g32 g52 - Wc^2/4)^2 + D^2 (g52 + g32)^2
template <typename Real>
Susceptibility<Real> chi_analytic(const LambdaParams<Real>& p, Real delta) {
  const auto t = detail::lambda_terms(p, delta);
  const Real d2 = delta * delta;
  Susceptibility<Real> chi;
  chi.chi_re = p.coupling_a * delta * (d2 + p.gamma32 * p.gamma32 - p.omega_c * p.omega_c / Real(4)) / t.z;
  chi.chi_im = p.coupling_a * (p.gamma32 * t.g + d2 * p.gamma52) / t.z;
  return chi;
}

/// d chi'/d delta of chi_analytic, by the quotient rule.
template <typename Real>
Real dchi_prime_ddelta(const LambdaParams<Real>& p, Real delta) {
  const auto t = detail::lambda_terms(p, delta);
  const Real d2 = delta * delta;
  const Real poly = d2 + p.gamma32 * p.gamma32 - p.omega_c * p.omega_c / Real(4);
  const Real dz = Real(4) * delta * (d2 - t.g) + Real(2) * delta * t.s * t.s;
  return p.coupling_a * ((poly + Real(2) * d2) * t.z - delta * poly * dz) / (t.z * t.z);
}

/// chi''(0; Wc = 0) / chi''(0; Wc) = 1 + Wc^2 / (4 g32 g52).
template <typename Real>
Real eit_suppression_ratio(const LambdaParams<Real>& p) {
  return Real(1) + p.omega_c * p.omega_c / (Real(4) * p.gamma32 * p.gamma52);
}

/// Half-absorption window width sqrt(g52^2 + Wc^2) - g52 in the g32 -> 0
/// limit, measured against the uncoupled resonant absorption.
template <typename Real>
Real window_width_closed_form(const LambdaParams<Real>& p) {
  return std::sqrt(p.gamma52 * p.gamma52 + p.omega_c * p.omega_c) - p.gamma52;
}

}  // namespace eit
