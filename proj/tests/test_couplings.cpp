#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <aqst/couplings.hpp>
#include <cmath>
#include <numbers>
#include <random>

using namespace aqst;
using Complex = aqst::Complex;
constexpr double pi = std::numbers::pi;
const Complex i1(0.0, 1.0);

namespace {

// literal transcription of the coupling formulas with every cyclic case
// unrolled by hand; deliberately shares no code with the library
struct HandCouplings {
  Complex a1, a2, a3;
  double j12, j23, j31;
};

HandCouplings hand_couplings(double kappa, double g, double delta,
                             Complex e1, Complex e2, Complex e3, double p21,
                             double p32, double p13) {
  const double chi = g * g / delta;
  const Complex m = i1 * delta + kappa;
  const Complex w3 = kappa * kappa * kappa * std::exp(i1 * (p21 + p32 + p13));
  const Complex d = m * m * m - w3;
  const double k = kappa;

  HandCouplings out;
  out.a1 = (m * m * e1 + k * k * std::exp(i1 * (p32 + p13)) * e2 +
            m * k * std::exp(i1 * p13) * e3) /
           d;
  out.a2 = (m * m * e2 + k * k * std::exp(i1 * (p13 + p21)) * e3 +
            m * k * std::exp(i1 * p21) * e1) /
           d;
  out.a3 = (m * m * e3 + k * k * std::exp(i1 * (p21 + p32)) * e1 +
            m * k * std::exp(i1 * p32) * e2) /
           d;
  const double pref = 2.0 * k * chi * chi;
  out.j12 = pref * std::imag(out.a1 * std::conj(out.a2) *
                             (m * std::exp(i1 * p21) +
                              k * std::exp(i1 * (p32 + p13))) /
                             d);
  out.j23 = pref * std::imag(out.a2 * std::conj(out.a3) *
                             (m * std::exp(i1 * p32) +
                              k * std::exp(i1 * (p13 + p21))) /
                             d);
  out.j31 = pref * std::imag(out.a3 * std::conj(out.a1) *
                             (m * std::exp(i1 * p13) +
                              k * std::exp(i1 * (p21 + p32))) /
                             d);
  return out;
}

}  // namespace

TEST_CASE("parameter validation rejects out-of-range physics") {
  PhysicalParams p = symmetric_params(1.0, 0.0, 1.0, 0.02, 1.0, {0, 0, 0});
  CHECK_NOTHROW(validate(p));

  auto bad = p;
  bad.kappa = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.g = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.delta = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.gamma[1] = -0.1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("derived couplings match the hand-unrolled transcription") {
  // deliberately asymmetric inputs so every cyclic index is exercised
  PhysicalParams p;
  p.kappa = 1.3;
  p.g = 0.05;
  p.delta = 1.1;
  p.epsilon = {Complex(0.7, 0.2), Complex(-0.4, 0.9), Complex(1.1, -0.3)};
  p.phi = {0.3, 1.9, 4.4};
  p.gamma = {0.0, 0.0, 0.0};

  const auto c = derive_couplings(p);
  const auto h = hand_couplings(p.kappa, p.g, p.delta, p.epsilon[0],
                                p.epsilon[1], p.epsilon[2], p.phi[0], p.phi[1],
                                p.phi[2]);

  CHECK(std::abs(c.alpha[0] - h.a1) < 1e-12);
  CHECK(std::abs(c.alpha[1] - h.a2) < 1e-12);
  CHECK(std::abs(c.alpha[2] - h.a3) < 1e-12);
  CHECK(std::abs(c.j[0] - h.j12) < 1e-12);
  CHECK(std::abs(c.j[1] - h.j23) < 1e-12);
  CHECK(std::abs(c.j[2] - h.j31) < 1e-12);

  CHECK(c.chi == doctest::Approx(p.g * p.g / p.delta));
  CHECK(std::abs(c.m - (i1 * p.delta + p.kappa)) < 1e-15);
}

TEST_CASE("single-drive configuration reads off the propagation paths") {
  PhysicalParams p;
  p.kappa = 1.0;
  p.g = 0.03;
  p.delta = 0.9;
  p.epsilon = {Complex(0.8, 0.0), 0.0, 0.0};
  p.phi = {0.5, 1.1, 2.3};
  p.gamma = {0.0, 0.0, 0.0};

  const auto c = derive_couplings(p);
  const Complex m = i1 * p.delta + p.kappa;
  const Complex denom = m * m * m - c.w3;
  const Complex e0 = p.epsilon[0];

  CHECK(std::abs(c.alpha[0] - m * m * e0 / denom) < 1e-12);
  CHECK(std::abs(c.alpha[1] -
                 m * p.kappa * std::exp(i1 * p.phi[0]) * e0 / denom) < 1e-12);
  CHECK(std::abs(c.alpha[2] - p.kappa * p.kappa *
                                  std::exp(i1 * (p.phi[0] + p.phi[1])) * e0 /
                                  denom) < 1e-12);
}

TEST_CASE("symmetric drives collapse to equal alphas and couplings") {
  const auto p = symmetric_params(Complex(0.6, 0.3), 0.8, 1.2, 0.04, 1.0,
                                  {0, 0, 0});
  const auto c = derive_couplings(p);

  CHECK(std::abs(c.alpha[0] - c.alpha[1]) < 1e-12 * std::abs(c.alpha[0]));
  CHECK(std::abs(c.alpha[1] - c.alpha[2]) < 1e-12 * std::abs(c.alpha[0]));
  CHECK(std::abs(c.j[0] - c.j[1]) <= 1e-12 * std::abs(c.j[0]));
  CHECK(std::abs(c.j[1] - c.j[2]) <= 1e-12 * std::abs(c.j[0]));

  // zero phases: the loop denominator factorizes and alpha = eps / (i delta)
  const auto flat = symmetric_params(1.0, 0.0, 1.0, 0.02, 1.0, {0, 0, 0});
  const auto cf = derive_couplings(flat);
  CHECK(std::abs(cf.alpha[0] - Complex(1.0) / (i1 * flat.delta)) < 1e-12);

  // no drive, no coupling
  const auto dark = symmetric_params(0.0, 0.0, 1.0, 0.02, 1.0, {0, 0, 0});
  const auto cd = derive_couplings(dark);
  CHECK(std::abs(cd.alpha[0]) == 0.0);
  CHECK(cd.j[0] == 0.0);
}

TEST_CASE("cyclic permutation of the inputs permutes the outputs") {
  PhysicalParams p;
  p.kappa = 1.0;
  p.g = 0.05;
  p.delta = 1.05;
  p.epsilon = {Complex(0.2, 0.5), Complex(0.9, -0.1), Complex(-0.3, 0.4)};
  p.phi = {0.7, 2.1, 5.0};
  p.gamma = {0.0, 0.0, 0.0};

  PhysicalParams q = p;
  q.epsilon = {p.epsilon[1], p.epsilon[2], p.epsilon[0]};
  q.phi = {p.phi[1], p.phi[2], p.phi[0]};

  const auto cp = derive_couplings(p);
  const auto cq = derive_couplings(q);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(cq.alpha[i] - cp.alpha[(i + 1) % 3]) < 1e-12);
    CHECK(std::abs(cq.j[i] - cp.j[(i + 1) % 3]) < 1e-12);
  }
}

TEST_CASE("alpha scales linearly and J quadratically with the drive") {
  PhysicalParams p;
  p.kappa = 1.0;
  p.g = 0.05;
  p.delta = 0.95;
  p.epsilon = {Complex(0.4, 0.1), Complex(0.2, -0.6), Complex(0.8, 0.3)};
  p.phi = {1.2, 0.4, 3.3};
  p.gamma = {0.0, 0.0, 0.0};

  const double s = 2.5;
  PhysicalParams scaled = p;
  for (auto& e : scaled.epsilon) e *= s;

  const auto c1 = derive_couplings(p);
  const auto c2 = derive_couplings(scaled);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(c2.alpha[i] - s * c1.alpha[i]) <
          1e-12 * std::abs(s * c1.alpha[i]) + 1e-15);
    CHECK(std::abs(c2.j[i] - s * s * c1.j[i]) <
          1e-12 * std::abs(s * s * c1.j[i]) + 1e-15);
  }
}

TEST_CASE("singular loop denominator is reported") {
  // delta so small that M^3 is within machine epsilon of kappa^3 = W^3
  PhysicalParams p = symmetric_params(1.0, 0.0, 1.0, 0.02, 1e-18, {0, 0, 0});
  CHECK_THROWS_AS(derive_couplings(p), std::domain_error);

  // a 2pi/3 phase also closes the loop (W^3 = kappa^3) but delta keeps
  // the denominator finite
  const auto open =
      symmetric_params(1.0, 2.0 * pi / 3.0, 1.0, 0.02, 1.0, {0, 0, 0});
  CHECK_NOTHROW(derive_couplings(open));
}

TEST_CASE("regime report flags each validity condition") {
  // reference set: delta = kappa, kappa/g = 50, gamma = 0.01 |J0|
  auto p = symmetric_params(1.0, 0.0, 1.0, 0.02, 1.0, {0, 0, 0});
  auto c = derive_couplings(p);
  const double j0 = std::abs(c.j[0]);
  REQUIRE(j0 > 0.0);
  p.gamma = {0.01 * j0, 0.01 * j0, 0.01 * j0};
  c = derive_couplings(p);

  const auto r = validate_regime(p, c);
  CHECK(r.detuning_ok);
  CHECK(r.coupling_ok);
  CHECK(r.secular_ok);
  CHECK(r.all_ok());
  CHECK(r.detuning_balance == doctest::Approx(0.0));
  CHECK(r.cavity_over_atom == doctest::Approx(50.0));
  CHECK(r.drive_over_ising == doctest::Approx(0.01));

  // no drive lasers: the secular ratio degenerates to 0 and passes
  auto quiet = p;
  quiet.gamma = {0, 0, 0};
  CHECK(validate_regime(quiet, derive_couplings(quiet)).secular_ok);

  // g = kappa violates the strong-cavity assumption
  auto strong = p;
  strong.g = strong.kappa;
  CHECK_FALSE(validate_regime(strong, derive_couplings(strong)).coupling_ok);

  // oversized laser drives violate the secular assumption
  auto loud = p;
  loud.gamma = {j0, j0, j0};
  CHECK_FALSE(validate_regime(loud, derive_couplings(loud)).secular_ok);
}
