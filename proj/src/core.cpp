#include "eit/core.hpp"

#include <cmath>
#include <sstream>

namespace eit {

AngularFrequency hz_to_angular(double frequency_hz) {
  if (!std::isfinite(frequency_hz)) {
    throw InvalidArgument("hz_to_angular: frequency must be finite");
  }
  return AngularFrequency{2.0 * std::numbers::pi * frequency_hz};
}

double hermiticity_deviation(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix assert_density_matrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("density matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw StateCorruption("density matrix has non-finite entries");
  }
  const double herm = hermiticity_deviation(m);
  if (herm > DensityTolerance::kReject) {
    std::ostringstream os;
    os << "density matrix not hermitian: deviation " << herm;
    throw StateCorruption(os.str());
  }
  const double trace_dev = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_dev > DensityTolerance::kReject) {
    std::ostringstream os;
    os << "density matrix trace off by " << trace_dev;
    throw StateCorruption(os.str());
  }
  ComplexMatrix rho = 0.5 * (m + m.adjoint());
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    const double p = rho(i, i).real();
    if (p < -DensityTolerance::kReject || p > 1.0 + DensityTolerance::kReject) {
      std::ostringstream os;
      os << "population of level " << (i + 1) << " out of range: " << p;
      throw StateCorruption(os.str());
    }
  }
  return DensityMatrix(std::move(rho));
}

Complex coherence(const DensityMatrix& rho, int m, int n) {
  const auto size = static_cast<int>(rho.levels());
  if (m < 1 || n < 1 || m > size || n > size) {
    std::ostringstream os;
    os << "coherence index (" << m << ", " << n << ") outside 1.." << size;
    throw InvalidArgument(os.str());
  }
  return rho(m, n);
}

}  // namespace eit
