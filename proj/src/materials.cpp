#include "eit/materials.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace eit {

namespace {
constexpr double kPi = std::numbers::pi;

void check_level(int m, int n, const char* what) {
  if (m < 1 || m > n) {
    std::ostringstream os;
    os << what << ": level " << m << " outside 1.." << n;
    throw ConfigError(os.str());
  }
}

double inverse_lifetime(double t1) {
  return std::isinf(t1) ? 0.0 : 1.0 / t1;
}
}  // namespace

std::string to_string(RateConvention c) {
  return c == RateConvention::kCyclic ? "cyclic" : "angular";
}

RateConvention rate_convention_from_string(const std::string& s) {
  if (s == "cyclic") return RateConvention::kCyclic;
  if (s == "angular") return RateConvention::kAngular;
  throw ConfigError("rate_convention must be 'cyclic' or 'angular', got '" + s + "'");
}

LevelSystem LevelSystem::isolated(int n_levels) {
  LevelSystem s;
  s.lifetimes_s.assign(n_levels, std::numeric_limits<double>::infinity());
  s.branching = RealMatrix::Zero(n_levels, n_levels);
  s.dephasing_hz = RealMatrix::Zero(n_levels, n_levels);
  return s;
}

void LevelSystem::set_branching_fractions(int m, const std::vector<std::pair<int, double>>& fractions) {
  const int n = n_levels();
  check_level(m, n, "branching source");
  double total = 0.0;
  for (const auto& [k, f] : fractions) {
    check_level(k, n, "branching destination");
    if (k == m) throw ConfigError("level cannot decay into itself");
    if (!(f >= 0.0)) throw ConfigError("branching fractions must be non-negative");
    total += f;
  }
  if (!fractions.empty() && std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "branching fractions of level " << m << " sum to " << total << ", not 1";
    throw ConfigError(os.str());
  }
  branching.row(m - 1).setZero();
  const double rate = inverse_lifetime(lifetimes_s[m - 1]);
  for (const auto& [k, f] : fractions) branching(m - 1, k - 1) = f * rate;
}

void LevelSystem::set_equal_branching(int m, const std::vector<int>& destinations) {
  std::vector<std::pair<int, double>> fractions;
  for (int k : destinations) fractions.emplace_back(k, 1.0 / static_cast<double>(destinations.size()));
  set_branching_fractions(m, fractions);
}

void LevelSystem::set_dephasing_hz(int i, int j, double rate_hz) {
  const int n = n_levels();
  check_level(i, n, "dephasing");
  check_level(j, n, "dephasing");
  dephasing_hz(i - 1, j - 1) = rate_hz;
  dephasing_hz(j - 1, i - 1) = rate_hz;
}

void LevelSystem::validate() const {
  const int n = n_levels();
  if (n < 2) throw ConfigError("level system needs at least two levels");
  if (branching.rows() != n || branching.cols() != n || dephasing_hz.rows() != n ||
      dephasing_hz.cols() != n) {
    throw ConfigError("level system tables do not match the level count");
  }
  for (int m = 0; m < n; ++m) {
    const double t1 = lifetimes_s[m];
    if (std::isnan(t1) || t1 <= 0.0) {
      std::ostringstream os;
      os << "missing or non-positive lifetime for level " << (m + 1);
      throw ConfigError(os.str());
    }
    if (branching(m, m) != 0.0) {
      std::ostringstream os;
      os << "level " << (m + 1) << " decays into itself";
      throw ConfigError(os.str());
    }
    if ((branching.row(m).array() < 0.0).any()) {
      std::ostringstream os;
      os << "negative branching rate out of level " << (m + 1);
      throw ConfigError(os.str());
    }
    // A level with no channels is the bottom of its chain.
    const double total = branching.row(m).sum();
    if (total > 0.0) {
      const double expect = inverse_lifetime(t1);
      if (std::abs(total - expect) > 1e-12 * expect) {
        std::ostringstream os;
        os << "decay channels of level " << (m + 1) << " sum to " << total
           << " s^-1 but 1/T1 = " << expect << " s^-1";
        throw ConfigError(os.str());
      }
    }
  }
  if ((dephasing_hz.array() < 0.0).any() || !dephasing_hz.isApprox(dephasing_hz.transpose(), 0.0)) {
    throw ConfigError("dephasing table must be symmetric and non-negative");
  }
}

RealMatrix derive_gamma(const LevelSystem& levels, RateConvention convention) {
  const int n = levels.n_levels();
  for (int m = 0; m < n; ++m) {
    if (std::isnan(levels.lifetimes_s[m]) || levels.lifetimes_s[m] <= 0.0) {
      std::ostringstream os;
      os << "missing lifetime for level " << (m + 1);
      throw ConfigError(os.str());
    }
  }
  RealMatrix gamma = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gi = inverse_lifetime(levels.lifetimes_s[i]);
      const double gj = inverse_lifetime(levels.lifetimes_s[j]);
      const double dph = levels.dephasing_hz(i, j);
      const double g = convention == RateConvention::kCyclic ? kPi * (gi + gj + dph)
                                                            : 0.5 * (gi + gj) + kPi * dph;
      gamma(i, j) = g;
      gamma(j, i) = g;
    }
  }
  return gamma;
}

void MaterialParams::refresh() { gamma = derive_gamma(levels, rate_convention); }

void MaterialParams::validate() const {
  if (!(density_per_m3 > 0.0)) throw ConfigError("material density must be > 0");
  if (!(dipole_c_m > 0.0)) throw ConfigError("dipole moment must be > 0");
  if (!(probe_wavelength_m > 0.0)) throw ConfigError("probe wavelength must be > 0");
  levels.validate();
  const int n = levels.n_levels();
  if (gamma.rows() != n || gamma.cols() != n) {
    throw ConfigError("gamma table not derived for this level system");
  }
  if ((gamma.array() < 0.0).any() || gamma != gamma.transpose()) {
    throw ConfigError("gamma table must be symmetric and non-negative");
  }
}

double MaterialParams::probe_omega() const {
  return 2.0 * kPi * PhysicalConstants::c / probe_wavelength_m;
}

MaterialParams pryso_defaults() {
  MaterialParams mat;
  mat.density_per_m3 = 4.7e24;  // 4.7e18 cm^-3
  mat.dipole_c_m = 1e-33;
  mat.probe_wavelength_m = 605.7e-9;

  auto& lv = mat.levels;
  lv = LevelSystem::isolated(6);
  lv.lifetimes_s = {400.0, 400.0, 400.0, 164e-6, 164e-6, 164e-6};
  lv.set_equal_branching(2, {1});
  lv.set_equal_branching(3, {1, 2});
  lv.set_equal_branching(4, {1, 2, 3});
  lv.set_equal_branching(5, {1, 2, 3, 4});
  lv.set_equal_branching(6, {1, 2, 3, 4, 5});
  lv.set_dephasing_hz(3, 2, 2e3);
  lv.set_dephasing_hz(5, 2, 9e3);
  lv.set_dephasing_hz(5, 3, 9e3);

  mat.refresh();
  return mat;
}

}  // namespace eit
