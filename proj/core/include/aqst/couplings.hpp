// Physical cavity/fiber parameters and the adiabatic elimination that turns
// them into effective Ising couplings J and drive strengths Gamma.
//
// All rates are expressed in units of the cavity linewidth kappa. Index
// conventions for the three-element arrays:
//   epsilon[i]  drive amplitude on cavity i+1
//   phi[0..2]   fiber phase delays phi_21, phi_32, phi_13
//   j[0..2]     pair couplings J_12, J_23, J_31
//   gamma[i]    local laser strength Gamma_{i+1}

#pragma once

#include <array>

#include "aqst/qcore.hpp"

namespace aqst {

struct PhysicalParams {
  double kappa = 1.0;  // cavity decay rate
  double g = 0.0;      // atom-cavity coupling
  double delta = 0.0;  // atom-cavity detuning
  std::array<Complex, 3> epsilon{};
  std::array<double, 3> phi{};
  std::array<double, 3> gamma{};
};

// throws invalid_argument on kappa <= 0, g <= 0, delta == 0, gamma < 0,
// or non-finite entries
void validate(const PhysicalParams& p);

struct EffectiveCouplings {
  double chi = 0.0;  // dispersive shift g^2 / delta
  Complex m;         // i delta + kappa
  Complex w3;        // kappa^3 e^{i(phi_21 + phi_32 + phi_13)}
  std::array<Complex, 3> alpha{};  // steady cavity field amplitudes
  std::array<double, 3> j{};       // Ising pair couplings
};

// steady-state cavity amplitudes and the resulting Ising couplings; throws
// domain_error when the loop denominator M^3 - W^3 is singular
EffectiveCouplings derive_couplings(const PhysicalParams& p);

// checks that the parameters sit inside the operating regime the effective
// model is derived for
struct RegimeReport {
  double detuning_balance = 0.0;  // |delta/kappa - 1|
  double cavity_over_atom = 0.0;  // kappa / g
  double drive_over_ising = 0.0;  // max gamma / min |J|
  bool detuning_ok = false;
  bool coupling_ok = false;
  bool secular_ok = false;

  bool all_ok() const { return detuning_ok && coupling_ok && secular_ok; }

  static constexpr double max_detuning_balance = 0.2;
  static constexpr double min_cavity_over_atom = 20.0;
  static constexpr double max_drive_over_ising = 0.05;
};

RegimeReport validate_regime(const PhysicalParams& p,
                             const EffectiveCouplings& c);

// convenience constructor for the fully symmetric arrangement: equal drives,
// equal fiber phases
PhysicalParams symmetric_params(Complex eps0, double phi0, double kappa,
                                double g, double delta,
                                std::array<double, 3> gamma);

}  // namespace aqst
