#include "aqst/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aqst {

namespace {

constexpr int n_atoms = 3;

void check_finite(const std::array<double, 3>& a, const char* what) {
  for (double x : a)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string("non-finite ") + what);
}

double spin(char c) { return c == 'e' ? 1.0 : -1.0; }

}  // namespace

SubspaceBasis single_double_excitation_basis() {
  SubspaceBasis basis;
  basis.labels = {"egg", "eeg", "geg", "gee", "gge", "ege"};
  const auto full = register_labels(n_atoms);
  for (const auto& label : basis.labels) {
    Eigen::Index idx = 0;
    for (int a = 0; a < n_atoms; ++a)
      if (label[a] == 'e') idx |= Eigen::Index(1) << (n_atoms - 1 - a);
    basis.embedding.push_back(idx);
    // embedding is positional, so double-check against the register order
    if (full[idx] != label)
      throw std::logic_error("subspace embedding out of sync with register order");
  }
  return basis;
}

DenseOperator build_h_zz(const std::array<double, 3>& j) {
  check_finite(j, "coupling");
  const auto labels = register_labels(n_atoms);
  Matrix h = Matrix::Zero(labels.size(), labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double s1 = spin(labels[i][0]);
    const double s2 = spin(labels[i][1]);
    const double s3 = spin(labels[i][2]);
    h(i, i) = j[0] * s1 * s2 + j[1] * s2 * s3 + j[2] * s3 * s1;
  }
  return DenseOperator{std::move(h), true};
}

DenseOperator build_h_x(const std::array<double, 3>& gamma) {
  check_finite(gamma, "drive strength");
  DenseOperator h = DenseOperator::make(Matrix::Zero(8, 8), true);
  for (int i = 0; i < n_atoms; ++i)
    h = h + gamma[i] * pauli(PauliAxis::x, i + 1, n_atoms);
  return h;
}

DenseOperator build_h_secular(const std::array<double, 3>& gamma,
                              SecularForm form) {
  check_finite(gamma, "drive strength");
  Matrix h = Matrix::Zero(8, 8);
  const Matrix id = Matrix::Identity(8, 8);
  for (int i = 0; i < n_atoms; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const Matrix sx = pauli(PauliAxis::x, i + 1, n_atoms).entries;
    const Matrix zz = pauli(PauliAxis::z, j + 1, n_atoms).entries *
                      pauli(PauliAxis::z, k + 1, n_atoms).entries;
    const Matrix weight =
        form == SecularForm::projector ? ((id - zz) / 2.0).eval() : (id - zz / 2.0).eval();
    h += gamma[i] * (sx * weight);
  }
  return DenseOperator::make(std::move(h), true);
}

HamiltonianSet make_hamiltonians(const std::array<double, 3>& j,
                                 const std::array<double, 3>& gamma,
                                 SecularForm form) {
  HamiltonianSet set{build_h_zz(j), build_h_x(gamma),
                     DenseOperator::identity(8), build_h_secular(gamma, form)};
  set.h_eff = set.h_zz + set.h_x;
  return set;
}

Matrix restrict_to_subspace(const DenseOperator& h, const SubspaceBasis& basis) {
  const Eigen::Index d = h.dim();
  const Eigen::Index m = static_cast<Eigen::Index>(basis.embedding.size());
  std::vector<bool> inside(d, false);
  for (Eigen::Index idx : basis.embedding) {
    if (idx < 0 || idx >= d)
      throw std::invalid_argument("subspace embedding exceeds operator dimension");
    inside[idx] = true;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index row = 0; row < d; ++row) {
      if (inside[row]) continue;
      if (std::abs(h.entries(row, basis.embedding[j])) > tol::algebra)
        throw std::domain_error("operator couples the subspace to states outside it");
    }
  }
  Matrix out(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c)
      out(r, c) = h.entries(basis.embedding[r], basis.embedding[c]);
  return out;
}

double secular_error(double j0, const std::array<double, 3>& gamma,
                     const StateVector& psi0,
                     const std::vector<double>& t_grid) {
  if (!std::isfinite(j0) || j0 <= 0.0)
    throw std::invalid_argument("ring coupling must be positive");
  if (psi0.dim() != 8)
    throw std::invalid_argument("reference state must live in the 3-atom register");

  const auto set = make_hamiltonians({j0, j0, j0}, gamma);
  const auto eig_eff = hermitian_eigensystem(set.h_eff);
  const auto eig_zz = hermitian_eigensystem(set.h_zz);
  const auto eig_sec = hermitian_eigensystem(set.h_secular);

  double worst = 0.0;
  for (double t : t_grid) {
    const StateVector full = propagate(eig_eff, t, psi0);
    const StateVector split = propagate(eig_zz, t, propagate(eig_sec, t, psi0));
    for (Eigen::Index i = 0; i < full.dim(); ++i) {
      const double dev = std::abs(std::norm(full.amplitudes[i]) -
                                  std::norm(split.amplitudes[i]));
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

}  // namespace aqst
