#include "aqst/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace aqst {

namespace {

constexpr double pi = std::numbers::pi;

void check_gamma(const std::array<double, 3>& gamma) {
  for (double g : gamma)
    if (!std::isfinite(g) || g < 0.0)
      throw std::invalid_argument("drive strengths must be nonnegative");
}

void check_unitary2(const DenseOperator& u) {
  if (u.dim() != 2)
    throw std::invalid_argument("correction must be a 2x2 operator");
  const Matrix res = u.entries.adjoint() * u.entries - Matrix::Identity(2, 2);
  if (res.cwiseAbs().maxCoeff() > tol::algebra)
    throw std::invalid_argument("correction must be unitary");
}

// SplitMix64 finalizer; decorrelates consecutive batch seeds
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

PartyRoles make_roles(int sender, int receiver) {
  if (sender < 1 || sender > 3 || receiver < 1 || receiver > 3)
    throw std::invalid_argument("parties are numbered 1 to 3");
  if (sender == receiver)
    throw std::invalid_argument("sender and receiver must differ");
  return PartyRoles{sender, receiver, 6 - sender - receiver};
}

DenseOperator phase_correction(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("non-finite phase");
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(Complex(0.0, phi));
  return DenseOperator{std::move(u), phi == 0.0};
}

DenseOperator default_correction(int k1) {
  return phase_correction(k1 % 2 == 0 ? 0.0 : pi);
}

ProtocolSchedule make_schedule(const PartyRoles& roles,
                               const std::array<double, 3>& gamma, double tau,
                               int k1) {
  return make_schedule(roles, gamma, tau, k1, default_correction(k1));
}

ProtocolSchedule make_schedule(const PartyRoles& roles,
                               const std::array<double, 3>& gamma, double tau,
                               int k1, DenseOperator correction) {
  make_roles(roles.sender, roles.receiver);  // re-validate
  check_gamma(gamma);
  if (k1 < 0) throw std::invalid_argument("k1 must be nonnegative");
  if (!std::isfinite(tau)) throw std::invalid_argument("non-finite tau");
  const double gamma_r = gamma[roles.receiver - 1];
  if (gamma_r <= 0.0)
    throw std::invalid_argument("receiver drive must be positive");
  check_unitary2(correction);
  ProtocolSchedule s;
  s.roles = roles;
  s.k1 = k1;
  s.t1 = (k1 * pi + pi / 2.0) / gamma_r;
  s.tau = tau;
  s.correction = std::move(correction);
  return s;
}

StateVector initial_state(const QubitState& target, const PartyRoles& roles) {
  if (!is_normalized(target))
    throw std::invalid_argument("target state must be normalized");
  make_roles(roles.sender, roles.receiver);
  auto labels = register_labels(3);
  Vector amps = Vector::Zero(8);
  std::string excited = "ggg";
  excited[roles.sender - 1] = 'e';
  amps[0] = target.beta;  // |ggg>
  const auto it = std::find(labels.begin(), labels.end(), excited);
  amps[it - labels.begin()] = target.alpha;
  return StateVector::from_amplitudes(std::move(amps), std::move(labels));
}

StateVector stage1_entangle(const StateVector& psi, int receiver,
                            double gamma_receiver, double t1) {
  if (gamma_receiver <= 0.0 || !std::isfinite(gamma_receiver))
    throw std::invalid_argument("receiver drive must be positive");
  if (!std::isfinite(t1) || t1 < 0.0)
    throw std::invalid_argument("stage-1 duration must be nonnegative");
  std::array<double, 3> gamma{0.0, 0.0, 0.0};
  gamma[receiver - 1] = gamma_receiver;
  return propagate(build_h_secular(gamma), t1, psi);
}

StateVector stage2_local_rabi(const StateVector& psi, int sender,
                              double gamma_sender, double tau) {
  if (gamma_sender <= 0.0 || !std::isfinite(gamma_sender))
    throw std::invalid_argument("sender drive must be positive");
  if (!std::isfinite(tau)) throw std::invalid_argument("non-finite tau");
  // Gamma sigma_x for time tau / Gamma is sigma_x for time tau
  return propagate(pauli(PauliAxis::x, sender, 3), tau, psi);
}

QubitState apply_correction(const DenseOperator& u, const QubitState& q) {
  check_unitary2(u);
  Eigen::Vector2cd v;
  v << q.alpha, q.beta;
  v = u.entries * v;
  return QubitState{v[0], v[1]};
}

TransferOutcomes run_transfer(const ProtocolSchedule& schedule,
                              const QubitState& target,
                              const std::array<double, 3>& gamma) {
  if (!is_normalized(target))
    throw std::invalid_argument("target state must be normalized");
  check_gamma(gamma);
  const PartyRoles roles = schedule.roles;
  const double gamma_r = gamma[roles.receiver - 1];
  const double gamma_s = gamma[roles.sender - 1];
  if (gamma_r <= 0.0)
    throw std::invalid_argument("receiver drive must be positive");
  if (gamma_s <= 0.0)
    throw std::invalid_argument("sender drive must be positive");
  check_unitary2(schedule.correction);

  StateVector psi = initial_state(target, roles);
  psi = stage1_entangle(psi, roles.receiver, gamma_r, schedule.t1);
  psi = stage2_local_rabi(psi, roles.sender, gamma_s, schedule.tau);

  auto resolve = [&](Level level) {
    TransferOutcome out;
    out.measured = level;
    out.success = level == Level::e;
    out.branch_probability = outcome_probability(psi, roles.sender, level);
    if (out.branch_probability < tol::zero_branch) return out;
    const auto projected = measure_qubit(psi, roles.sender, level);
    QubitState q = extract_qubit(projected.post, roles.receiver);
    q = apply_correction(schedule.correction, q);
    out.receiver_state = q;
    out.fidelity = qubit_fidelity(q, target);
    return out;
  };

  TransferOutcomes outcomes{resolve(Level::e), resolve(Level::g)};
  const double total = outcomes.success_branch.branch_probability +
                       outcomes.failure_branch.branch_probability;
  if (std::abs(total - 1.0) > tol::algebra)
    throw std::runtime_error("measurement branch probabilities do not sum to 1");
  return outcomes;
}

DenseOperator fit_phase_correction(const PartyRoles& roles,
                                   const std::array<double, 3>& gamma,
                                   int k1) {
  // probe at theta = pi/4, tau = pi/4: both target amplitudes are nonzero,
  // so the relative phase of the uncorrected receiver state is visible
  const QubitState probe{std::cos(pi / 4), std::sin(pi / 4)};
  const auto schedule =
      make_schedule(roles, gamma, pi / 4, k1, DenseOperator::identity(2));
  const auto outcomes = run_transfer(schedule, probe, gamma);
  if (!outcomes.success_branch.receiver_state)
    throw std::domain_error("probe transfer produced an empty success branch");
  const QubitState q = *outcomes.success_branch.receiver_state;
  const Complex a = std::conj(probe.alpha) * q.alpha;
  const Complex b = std::conj(probe.beta) * q.beta;
  if (std::abs(a) < tol::zero_branch || std::abs(b) < tol::zero_branch)
    throw std::domain_error("probe amplitudes too small to fit a phase");
  return phase_correction(std::arg(a) - std::arg(b));
}

double p_theta(double theta, double tau) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double ct = std::cos(tau), st = std::sin(tau);
  return c * c * ct * ct + s * s * st * st;
}

double f_theta(double theta, double tau) {
  const double p = p_theta(theta, tau);
  if (p < tol::zero_branch)
    throw std::domain_error("fidelity undefined where the success probability vanishes");
  const double c = std::cos(theta), s = std::sin(theta);
  return (c * c * std::cos(tau) + s * s * std::sin(tau)) / std::sqrt(p);
}

double average_success(double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("non-finite tau");
  // cos^2 and sin^2 both average to 1/2 over a full period of theta
  return 0.5;
}

double average_success_quadrature(double tau, int n) {
  if (n < 2) throw std::invalid_argument("quadrature needs at least 2 intervals");
  const double h = 2.0 * pi / n;
  double sum = 0.5 * (p_theta(0.0, tau) + p_theta(2.0 * pi, tau));
  for (int i = 1; i < n; ++i) sum += p_theta(i * h, tau);
  return sum * h / (2.0 * pi);
}

double average_fidelity_grid(double tau, int n) {
  if (n < 2) throw std::invalid_argument("quadrature needs at least 2 intervals");
  const double h = 2.0 * pi / n;
  auto integrand = [&](double theta) {
    const double p = p_theta(theta, tau);
    if (p < 1e-12)
      throw std::domain_error("fidelity average is singular on this grid");
    return std::abs(f_theta(theta, tau));
  };
  double sum = 0.5 * (integrand(0.0) + integrand(2.0 * pi));
  for (int i = 1; i < n; ++i) sum += integrand(i * h);
  return sum * h / (2.0 * pi);
}

double average_fidelity(double tau) {
  int n = 4096;
  double prev = average_fidelity_grid(tau, n);
  for (int round = 0; round < 8; ++round) {
    n *= 2;
    const double next = average_fidelity_grid(tau, n);
    if (std::abs(next - prev) <= 1e-10) return next;
    prev = next;
  }
  return prev;
}

double sample_outcomes(const ProtocolSchedule& schedule,
                       const QubitState& target,
                       const std::array<double, 3>& gamma, std::int64_t n,
                       std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("sample count must be positive");
  const double p =
      run_transfer(schedule, target, gamma).success_branch.branch_probability;

  // fixed-size batches, each with its own engine seeded by a SplitMix64
  // stream split; the result is a pure function of (seed, n), whatever order
  // the batches run in
  constexpr std::int64_t batch = 4096;
  std::int64_t successes = 0;
  const std::int64_t n_batches = (n + batch - 1) / batch;
  for (std::int64_t b = 0; b < n_batches; ++b) {
    std::mt19937_64 engine(splitmix64(seed + static_cast<std::uint64_t>(b)));
    const std::int64_t count = std::min(batch, n - b * batch);
    for (std::int64_t i = 0; i < count; ++i) {
      // top 53 bits to a double in [0, 1)
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      if (u < p) ++successes;
    }
  }
  return static_cast<double>(successes) / static_cast<double>(n);
}

}  // namespace aqst
