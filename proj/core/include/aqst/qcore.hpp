// Dense state-vector toolkit for small atomic registers: computational basis
// conventions, Pauli operators, exact spectral propagation, projective
// single-qubit measurement and qubit extraction.
//
// Conventions used throughout:
//   - sigma_z |e> = +|e>,  sigma_z |g> = -|g>
//   - basis labels are strings like "egg"; atom 1 is the leftmost character
//     and the most significant digit of the basis index (e = 1, g = 0),
//     so for three atoms |ggg> = index 0, |gge> = 1, ..., |eee> = 7
//   - sites are numbered from 1

#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace aqst {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
// algebraic identities: norms, hermiticity, unitarity of small factors
inline constexpr double algebra = 1e-12;
// residuals of eigendecompositions (unitarity of the transform, diagonality)
inline constexpr double eigen = 1e-10;
// agreement between independent numerical routes to the same quantity
inline constexpr double oracle = 1e-8;
// measurement branches below this probability cannot be projected onto
inline constexpr double zero_branch = 1e-15;
// dominant-eigenvalue threshold when a qubit is pulled out of a register
inline constexpr double purity = 1e-10;
}  // namespace tol

// single-atom level; 'e' is the excited state, 'g' the ground state
enum class Level { e, g };

char to_char(Level level);
Level level_from_char(char c);

// amplitudes of a lone qubit; alpha multiplies |e>, beta multiplies |g>
struct QubitState {
  Complex alpha;
  Complex beta;

  double norm() const;
};

bool is_normalized(const QubitState& q, double tolerance = tol::algebra);

// all 2^n labels in index order ("ggg", "gge", ..., "eee" for n = 3)
std::vector<std::string> register_labels(int n_atoms);

// normalized pure state with named basis labels; amplitudes[i] belongs to
// basis[i]. Construction goes through the factories, which validate.
struct StateVector {
  Vector amplitudes;
  std::vector<std::string> basis;

  // requires matching sizes, unique labels, finite entries, unit norm
  static StateVector from_amplitudes(Vector amplitudes,
                                     std::vector<std::string> basis);
  // same checks but rescales to unit norm first (norm must be nonzero)
  static StateVector normalized(Vector amplitudes,
                                std::vector<std::string> basis);
  // |label> in the full 2^n register basis
  static StateVector basis_state(int n_atoms, std::string_view label);

  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const;
  Eigen::Index index_of(std::string_view label) const;
  Complex amplitude(std::string_view label) const;
};

// dense operator with an explicit hermiticity claim, verified on construction
struct DenseOperator {
  Matrix entries;
  bool hermitian = false;

  // verifies finiteness, squareness, and the hermiticity claim
  static DenseOperator make(Matrix entries, bool hermitian_claim);
  static DenseOperator identity(Eigen::Index dim);

  Eigen::Index dim() const { return entries.rows(); }
};

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator*(double scale, const DenseOperator& op);

Matrix kron(const Matrix& a, const Matrix& b);

enum class PauliAxis { x, y, z, plus, minus };

// single-site Pauli operator embedded in the n-atom register; in the (g, e)
// component ordering sigma_x = [[0,1],[1,0]], sigma_z = [[-1,0],[0,1]],
// sigma_plus = |e><g|, sigma_minus = |g><e|
DenseOperator pauli(PauliAxis axis, int site, int n_atoms);

// spectral decomposition H = S^dagger diag(E) S with eigenvalues ascending;
// rows of transform are the eigenvectors expressed in the computational basis
struct EigenSystem {
  RealVector eigenvalues;
  Matrix transform;
};

// eigendecomposition with a deterministic choice of eigenbasis: degenerate
// blocks are re-orthonormalized against the computational axes (pivoted
// Gram-Schmidt over cluster projections) and every eigenvector's
// largest-magnitude component is rotated to the positive real axis
EigenSystem hermitian_eigensystem(const DenseOperator& h);

// exact evolution exp(-i H t) |psi0> through the spectral decomposition
StateVector propagate(const DenseOperator& h, double t,
                      const StateVector& psi0);
StateVector propagate(const EigenSystem& h_eigen, double t,
                      const StateVector& psi0);

// probability of finding the given site at the given level (no projection)
double outcome_probability(const StateVector& psi, int site, Level outcome);

struct MeasurementResult {
  double probability;
  StateVector post;
};

// projective measurement of one site; throws on branches with probability
// below tol::zero_branch
MeasurementResult measure_qubit(const StateVector& psi, int site,
                                Level outcome);

// pulls one site out of a product state; throws if the reduced 2x2 density
// matrix has no dominant eigenvalue >= 1 - tol::purity (residual
// entanglement). The returned state has its largest component made real
// and nonnegative.
QubitState extract_qubit(const StateVector& psi, int site);

// |<a|b>| for normalized single-qubit states
double qubit_fidelity(const QubitState& a, const QubitState& b);

}  // namespace aqst
