#include "aqst/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aqst {

namespace {

Complex phase(double angle) { return std::exp(Complex(0.0, angle)); }

}  // namespace

void validate(const PhysicalParams& p) {
  if (!std::isfinite(p.kappa) || p.kappa <= 0.0)
    throw std::invalid_argument("kappa must be positive");
  if (!std::isfinite(p.g) || p.g <= 0.0)
    throw std::invalid_argument("g must be positive");
  if (!std::isfinite(p.delta) || p.delta == 0.0)
    throw std::invalid_argument("delta must be nonzero");
  for (const auto& e : p.epsilon)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw std::invalid_argument("non-finite drive amplitude");
  for (double f : p.phi)
    if (!std::isfinite(f))
      throw std::invalid_argument("non-finite fiber phase");
  for (double gm : p.gamma)
    if (!std::isfinite(gm) || gm < 0.0)
      throw std::invalid_argument("gamma must be nonnegative");
}

EffectiveCouplings derive_couplings(const PhysicalParams& p) {
  validate(p);

  EffectiveCouplings out;
  out.chi = p.g * p.g / p.delta;
  out.m = Complex(p.kappa, p.delta);  // i delta + kappa
  out.w3 = p.kappa * p.kappa * p.kappa * phase(p.phi[0] + p.phi[1] + p.phi[2]);

  const Complex m = out.m;
  const Complex denom = m * m * m - out.w3;
  if (std::abs(denom) < 1e-15 * std::abs(m * m * m))
    throw std::domain_error("singular loop denominator M^3 - W^3");

  // alpha_i mixes its own drive with the two neighbours, each picking up the
  // fiber phases along the path around the ring
  for (int i = 0; i < 3; ++i) {
    const int n1 = (i + 1) % 3;
    const int n2 = (i + 2) % 3;
    out.alpha[i] = (m * m * p.epsilon[i] +
                    p.kappa * p.kappa * phase(p.phi[n1] + p.phi[n2]) *
                        p.epsilon[n1] +
                    m * p.kappa * phase(p.phi[n2]) * p.epsilon[n2]) /
                   denom;
  }

  // pair couplings: J for the pair (i, i+1) takes the direct one-hop path
  // with phase phi[i] plus the two-hop path around the back of the ring
  for (int i = 0; i < 3; ++i) {
    const int n1 = (i + 1) % 3;
    const int n2 = (i + 2) % 3;
    const Complex hop =
        (m * phase(p.phi[i]) + p.kappa * phase(p.phi[n1] + p.phi[n2])) / denom;
    out.j[i] = 2.0 * p.kappa * out.chi * out.chi *
               std::imag(out.alpha[i] * std::conj(out.alpha[n1]) * hop);
  }
  return out;
}

RegimeReport validate_regime(const PhysicalParams& p,
                             const EffectiveCouplings& c) {
  RegimeReport r;
  r.detuning_balance = std::abs(p.delta / p.kappa - 1.0);
  r.cavity_over_atom = p.kappa / p.g;

  const double max_gamma = std::max({p.gamma[0], p.gamma[1], p.gamma[2]});
  const double min_j =
      std::min({std::abs(c.j[0]), std::abs(c.j[1]), std::abs(c.j[2])});
  if (max_gamma == 0.0)
    r.drive_over_ising = 0.0;
  else if (min_j == 0.0)
    r.drive_over_ising = std::numeric_limits<double>::infinity();
  else
    r.drive_over_ising = max_gamma / min_j;

  r.detuning_ok = r.detuning_balance <= RegimeReport::max_detuning_balance;
  r.coupling_ok = r.cavity_over_atom >= RegimeReport::min_cavity_over_atom;
  r.secular_ok = r.drive_over_ising <= RegimeReport::max_drive_over_ising;
  return r;
}

PhysicalParams symmetric_params(Complex eps0, double phi0, double kappa,
                                double g, double delta,
                                std::array<double, 3> gamma) {
  PhysicalParams p;
  p.kappa = kappa;
  p.g = g;
  p.delta = delta;
  p.epsilon = {eps0, eps0, eps0};
  p.phi = {phi0, phi0, phi0};
  p.gamma = gamma;
  validate(p);
  return p;
}

}  // namespace aqst
