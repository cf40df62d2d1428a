#include "aqst/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace aqst {

namespace {

bool all_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      return false;
  }
  return true;
}

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// number of atoms for a register-form state (labels over {e,g}, dim = 2^n);
// throws if psi is not of that shape
int register_size(const StateVector& psi) {
  if (psi.dim() == 0 || psi.basis.empty())
    throw std::invalid_argument("empty state");
  const std::size_t n = psi.basis.front().size();
  if (psi.dim() != Eigen::Index(1) << n)
    throw std::invalid_argument("state is not a full 2^n register");
  for (const auto& label : psi.basis) {
    if (label.size() != n)
      throw std::invalid_argument("inconsistent label lengths in basis");
    for (char c : label)
      if (c != 'e' && c != 'g')
        throw std::invalid_argument("basis label contains characters outside {e,g}");
  }
  return static_cast<int>(n);
}

void check_site(int site, int n_atoms) {
  if (site < 1 || site > n_atoms)
    throw std::invalid_argument("site index out of range (sites are 1-based)");
}

}  // namespace

char to_char(Level level) { return level == Level::e ? 'e' : 'g'; }

Level level_from_char(char c) {
  if (c == 'e') return Level::e;
  if (c == 'g') return Level::g;
  throw std::invalid_argument("level character must be 'e' or 'g'");
}

double QubitState::norm() const {
  return std::sqrt(std::norm(alpha) + std::norm(beta));
}

bool is_normalized(const QubitState& q, double tolerance) {
  const double n2 = std::norm(q.alpha) + std::norm(q.beta);
  return std::isfinite(n2) && std::abs(n2 - 1.0) <= tolerance;
}

std::vector<std::string> register_labels(int n_atoms) {
  if (n_atoms < 1 || n_atoms > 20)
    throw std::invalid_argument("register size out of range");
  const Eigen::Index dim = Eigen::Index(1) << n_atoms;
  std::vector<std::string> labels;
  labels.reserve(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    std::string label(n_atoms, 'g');
    for (int a = 0; a < n_atoms; ++a)
      if ((i >> (n_atoms - 1 - a)) & 1) label[a] = 'e';
    labels.push_back(std::move(label));
  }
  return labels;
}

StateVector StateVector::from_amplitudes(Vector amplitudes,
                                         std::vector<std::string> basis) {
  if (amplitudes.size() == 0)
    throw std::invalid_argument("state must have at least one amplitude");
  if (static_cast<std::size_t>(amplitudes.size()) != basis.size())
    throw std::invalid_argument("amplitude/basis size mismatch");
  if (!all_finite(amplitudes))
    throw std::invalid_argument("state contains non-finite amplitudes");
  std::unordered_set<std::string_view> seen;
  for (const auto& label : basis) {
    if (label.empty()) throw std::invalid_argument("empty basis label");
    if (!seen.insert(label).second)
      throw std::invalid_argument("duplicate basis label: " + label);
  }
  const double n2 = amplitudes.squaredNorm();
  if (std::abs(n2 - 1.0) > tol::algebra)
    throw std::invalid_argument("state is not normalized");
  return StateVector{std::move(amplitudes), std::move(basis)};
}

StateVector StateVector::normalized(Vector amplitudes,
                                    std::vector<std::string> basis) {
  if (!all_finite(amplitudes))
    throw std::invalid_argument("state contains non-finite amplitudes");
  const double n = amplitudes.norm();
  if (n <= 0.0)
    throw std::invalid_argument("cannot normalize the zero vector");
  return from_amplitudes(amplitudes / n, std::move(basis));
}

StateVector StateVector::basis_state(int n_atoms, std::string_view label) {
  auto labels = register_labels(n_atoms);
  Vector amps = Vector::Zero(labels.size());
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end())
    throw std::invalid_argument("label does not name a register basis state");
  amps[it - labels.begin()] = 1.0;
  return StateVector{std::move(amps), std::move(labels)};
}

double StateVector::norm() const { return amplitudes.norm(); }

Eigen::Index StateVector::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == label) return static_cast<Eigen::Index>(i);
  throw std::invalid_argument("label not present in basis");
}

Complex StateVector::amplitude(std::string_view label) const {
  return amplitudes[index_of(label)];
}

DenseOperator DenseOperator::make(Matrix entries, bool hermitian_claim) {
  if (entries.rows() == 0 || entries.rows() != entries.cols())
    throw std::invalid_argument("operator must be square and nonempty");
  if (!all_finite(entries))
    throw std::invalid_argument("operator contains non-finite entries");
  if (hermitian_claim) {
    const double residue = max_abs(entries - entries.adjoint().eval());
    if (residue > tol::algebra)
      throw std::invalid_argument("hermiticity claim violated");
  }
  return DenseOperator{std::move(entries), hermitian_claim};
}

DenseOperator DenseOperator::identity(Eigen::Index dim) {
  return DenseOperator{Matrix::Identity(dim, dim), true};
}

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("operator dimension mismatch");
  return DenseOperator{a.entries + b.entries, a.hermitian && b.hermitian};
}

DenseOperator operator*(double scale, const DenseOperator& op) {
  if (!std::isfinite(scale))
    throw std::invalid_argument("non-finite scale");
  return DenseOperator{scale * op.entries, op.hermitian};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DenseOperator pauli(PauliAxis axis, int site, int n_atoms) {
  check_site(site, n_atoms);
  const Complex i1(0.0, 1.0);
  Matrix op(2, 2);
  bool hermitian = true;
  switch (axis) {  // component order (g, e)
    case PauliAxis::x:
      op << 0, 1, 1, 0;
      break;
    case PauliAxis::y:
      op << 0, i1, -i1, 0;
      break;
    case PauliAxis::z:
      op << -1, 0, 0, 1;
      break;
    case PauliAxis::plus:  // |e><g|
      op << 0, 0, 1, 0;
      hermitian = false;
      break;
    case PauliAxis::minus:  // |g><e|
      op << 0, 1, 0, 0;
      hermitian = false;
      break;
  }
  Matrix full = Matrix::Identity(1, 1);
  for (int a = 1; a <= n_atoms; ++a)
    full = kron(full, a == site ? op : Matrix::Identity(2, 2).eval());
  return DenseOperator{std::move(full), hermitian};
}

namespace {

// rotate the eigenvector's largest-magnitude component (first such index on
// ties) onto the positive real axis
void fix_phase(Eigen::Ref<Vector> v) {
  Eigen::Index pivot = 0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      pivot = i;
    }
  }
  if (best == 0.0) return;
  v *= std::conj(v[pivot]) / best;
}

// replace the columns [begin, end) of v (an orthonormal basis of a degenerate
// eigenspace) with a canonical one: project the computational axes onto the
// cluster subspace and run Gram-Schmidt, always pivoting on the candidate
// with the largest residual norm (smallest index on ties)
void canonicalize_cluster(Matrix& v, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index d = v.rows();
  const Eigen::Index m = end - begin;
  Matrix projector = v.middleCols(begin, m) * v.middleCols(begin, m).adjoint();
  Matrix candidates = projector;  // column j is the projection of axis j
  Matrix chosen(d, m);
  std::vector<bool> used(d, false);
  for (Eigen::Index step = 0; step < m; ++step) {
    Eigen::Index pivot = -1;
    double best = -1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (used[j]) continue;
      const double n = candidates.col(j).norm();
      if (n > best) {
        best = n;
        pivot = j;
      }
    }
    if (pivot < 0 || best <= 1e-8)
      throw std::runtime_error("degenerate cluster canonicalization failed");
    used[pivot] = true;
    Vector u = candidates.col(pivot) / best;
    chosen.col(step) = u;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (used[j]) continue;
      candidates.col(j) -= u * u.dot(candidates.col(j));
    }
  }
  v.middleCols(begin, m) = chosen;
}

}  // namespace

EigenSystem hermitian_eigensystem(const DenseOperator& h) {
  if (!h.hermitian)
    throw std::invalid_argument("eigendecomposition requires a hermitian operator");
  if (max_abs(h.entries - h.entries.adjoint().eval()) > tol::algebra)
    throw std::invalid_argument("operator entries are not hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition did not converge");

  RealVector evals = solver.eigenvalues();  // ascending
  Matrix v = solver.eigenvectors();         // columns

  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  const double cluster_gap = tol::eigen * scale;

  Eigen::Index begin = 0;
  while (begin < evals.size()) {
    Eigen::Index end = begin + 1;
    while (end < evals.size() && evals[end] - evals[end - 1] <= cluster_gap)
      ++end;
    if (end - begin > 1) canonicalize_cluster(v, begin, end);
    begin = end;
  }
  for (Eigen::Index k = 0; k < v.cols(); ++k) fix_phase(v.col(k));

  Matrix s = v.adjoint();  // rows are eigenvectors

  const Eigen::Index d = s.rows();
  if (max_abs(s * s.adjoint() - Matrix::Identity(d, d)) > tol::eigen)
    throw std::runtime_error("eigenbasis failed the unitarity check");
  Matrix recon = s * h.entries * s.adjoint();
  recon.diagonal() -= evals.cast<Complex>();
  if (max_abs(recon) > tol::eigen * scale)
    throw std::runtime_error("eigenbasis failed to diagonalize the operator");

  return EigenSystem{std::move(evals), std::move(s)};
}

StateVector propagate(const DenseOperator& h, double t,
                      const StateVector& psi0) {
  return propagate(hermitian_eigensystem(h), t, psi0);
}

StateVector propagate(const EigenSystem& h_eigen, double t,
                      const StateVector& psi0) {
  if (!std::isfinite(t)) throw std::invalid_argument("non-finite time");
  if (h_eigen.transform.rows() != psi0.dim())
    throw std::invalid_argument("dimension mismatch between operator and state");
  const Complex minus_i(0.0, -1.0);
  Vector c = h_eigen.transform * psi0.amplitudes;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    c[k] *= std::exp(minus_i * h_eigen.eigenvalues[k] * t);
  Vector out = h_eigen.transform.adjoint() * c;
  if (std::abs(out.squaredNorm() - 1.0) > tol::algebra)
    throw std::runtime_error("propagation failed to preserve the norm");
  return StateVector{std::move(out), psi0.basis};
}

double outcome_probability(const StateVector& psi, int site, Level outcome) {
  const int n = register_size(psi);
  check_site(site, n);
  const char want = to_char(outcome);
  double p = 0.0;
  for (Eigen::Index i = 0; i < psi.dim(); ++i)
    if (psi.basis[i][site - 1] == want) p += std::norm(psi.amplitudes[i]);
  return p;
}

MeasurementResult measure_qubit(const StateVector& psi, int site,
                                Level outcome) {
  const double p = outcome_probability(psi, site, outcome);
  if (p < tol::zero_branch)
    throw std::domain_error("cannot project onto a zero-probability branch");
  const char want = to_char(outcome);
  Vector post = psi.amplitudes;
  for (Eigen::Index i = 0; i < psi.dim(); ++i)
    if (psi.basis[i][site - 1] != want) post[i] = 0.0;
  post /= std::sqrt(p);
  return MeasurementResult{p, StateVector{std::move(post), psi.basis}};
}

QubitState extract_qubit(const StateVector& psi, int site) {
  const int n = register_size(psi);
  check_site(site, n);

  // reduced density matrix of the site, in (e, g) component order
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  for (Eigen::Index i = 0; i < psi.dim(); ++i) {
    for (Eigen::Index j = 0; j < psi.dim(); ++j) {
      std::string rest_i = psi.basis[i];
      std::string rest_j = psi.basis[j];
      const char ci = rest_i[site - 1];
      const char cj = rest_j[site - 1];
      rest_i.erase(site - 1, 1);
      rest_j.erase(site - 1, 1);
      if (rest_i != rest_j) continue;
      const int a = ci == 'e' ? 0 : 1;
      const int b = cj == 'e' ? 0 : 1;
      rho(a, b) += psi.amplitudes[i] * std::conj(psi.amplitudes[j]);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(rho);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("reduced density matrix eigendecomposition failed");
  const double dominant = solver.eigenvalues()[1];  // ascending order
  if (dominant < 1.0 - tol::purity)
    throw std::domain_error(
        "site is still entangled with the rest of the register");

  Eigen::Vector2cd v = solver.eigenvectors().col(1);
  const Eigen::Index pivot = std::abs(v[1]) > std::abs(v[0]) ? 1 : 0;
  v *= std::conj(v[pivot]) / std::abs(v[pivot]);
  v.normalize();
  return QubitState{v[0], v[1]};
}

double qubit_fidelity(const QubitState& a, const QubitState& b) {
  if (!is_normalized(a) || !is_normalized(b))
    throw std::invalid_argument("fidelity requires normalized qubit states");
  return std::abs(std::conj(a.alpha) * b.alpha + std::conj(a.beta) * b.beta);
}

}  // namespace aqst
