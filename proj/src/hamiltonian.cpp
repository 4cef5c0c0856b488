#include <cmath>
#include <optional>
#include <sstream>

#include "eit/master_equation.hpp"

namespace eit {

namespace {

// Relative tolerance when a cycle of drives closes back on an assigned level.
constexpr double kFrameTol = 1e-9;

std::vector<double> frame_phases(int n, const std::vector<FieldDrive>& drives) {
  std::vector<std::optional<double>> phi(n);
  auto propagate = [&](int root) {
    phi[root] = 0.0;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int level = stack.back();
      stack.pop_back();
      for (const auto& d : drives) {
        const int u = d.upper - 1;
        const int l = d.lower - 1;
        int next = -1;
        double value = 0.0;
        if (u == level) {
          next = l;
          value = *phi[u] - d.detuning;
        } else if (l == level) {
          next = u;
          value = *phi[l] + d.detuning;
        } else {
          continue;
        }
        if (phi[next]) {
          const double scale = std::max({std::abs(value), std::abs(*phi[next]), 1.0});
          if (std::abs(*phi[next] - value) > kFrameTol * scale) {
            std::ostringstream os;
            os << "drives on a cycle through levels " << d.upper << " and " << d.lower
               << " have inconsistent detunings";
            throw InconsistentFrame(os.str());
          }
        } else {
          phi[next] = value;
          stack.push_back(next);
        }
      }
    }
  };
  if (n >= 2) propagate(1);
  for (int i = 0; i < n; ++i) {
    if (!phi[i]) propagate(i);
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = *phi[i];
  return out;
}

}  // namespace

ComplexMatrix build_hamiltonian(int n_levels, const std::vector<FieldDrive>& drives) {
  if (n_levels < 1) throw ConfigError("level count must be positive");
  for (std::size_t a = 0; a < drives.size(); ++a) {
    const auto& d = drives[a];
    if (d.upper < 1 || d.upper > n_levels || d.lower < 1 || d.lower > n_levels ||
        d.upper == d.lower) {
      std::ostringstream os;
      os << "drive on levels (" << d.upper << ", " << d.lower << ") invalid for "
         << n_levels << " levels";
      throw ConfigError(os.str());
    }
    if (!std::isfinite(d.detuning) || !std::isfinite(d.rabi.real()) ||
        !std::isfinite(d.rabi.imag())) {
      throw ConfigError("drive parameters must be finite");
    }
    for (std::size_t b = 0; b < a; ++b) {
      const auto& e = drives[b];
      if ((e.upper == d.upper && e.lower == d.lower) ||
          (e.upper == d.lower && e.lower == d.upper)) {
        std::ostringstream os;
        os << "duplicate drive on levels " << d.upper << "-" << d.lower;
        throw ConfigError(os.str());
      }
    }
  }

  const auto phi = frame_phases(n_levels, drives);
  ComplexMatrix h = ComplexMatrix::Zero(n_levels, n_levels);
  for (int i = 0; i < n_levels; ++i) h(i, i) = phi[i];
  for (const auto& d : drives) {
    h(d.upper - 1, d.lower - 1) += -0.5 * d.rabi;
    h(d.lower - 1, d.upper - 1) += -0.5 * std::conj(d.rabi);
  }
  return h;
}

}  // namespace eit
