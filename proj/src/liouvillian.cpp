#include <sstream>

#include "eit/master_equation.hpp"

namespace eit {

Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, const LevelSystem& levels,
                              const RealMatrix& gamma) {
  const int n = levels.n_levels();
  if (hamiltonian.rows() != n || hamiltonian.cols() != n || gamma.rows() != n ||
      gamma.cols() != n || levels.branching.rows() != n) {
    std::ostringstream os;
    os << "Liouvillian dimension mismatch: H is " << hamiltonian.rows() << "x"
       << hamiltonian.cols() << ", level system has " << n << " levels";
    throw ConfigError(os.str());
  }
  const auto idx = [n](int m, int k) { return Liouvillian::index(n, m, k); };
  const Complex minus_i(0.0, -1.0);

  Liouvillian L;
  L.n_levels = n;
  L.generator = ComplexMatrix::Zero(n * n, n * n);
  auto& G = L.generator;

  // -i (H rho - rho H)_{mk} = -i sum_j (H_mj rho_jk - rho_mj H_jk)
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        G(idx(m, k), idx(j, k)) += minus_i * hamiltonian(m, j);
        G(idx(m, k), idx(m, j)) -= minus_i * hamiltonian(j, k);
      }
    }
  }

  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      if (m == k) continue;
      G(idx(m, k), idx(m, k)) -= gamma(m, k);
      const double transfer = levels.branching(k, m);  // k -> m
      if (transfer != 0.0) G(idx(m, m), idx(k, k)) += transfer;
    }
    G(idx(m, m), idx(m, m)) -= levels.branching.row(m).sum();
  }
  return L;
}

Liouvillian build_liouvillian(const MaterialParams& mat, const std::vector<FieldDrive>& drives) {
  return build_liouvillian(build_hamiltonian(mat.levels.n_levels(), drives), mat.levels, mat.gamma);
}

ComplexVector vectorize(const ComplexMatrix& rho) {
  return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, int n_levels) {
  if (v.size() != static_cast<Eigen::Index>(n_levels) * n_levels) {
    throw InvalidArgument("vector length is not n_levels^2");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), n_levels, n_levels);
}

}  // namespace eit
