// end-to-end acceptance suite: ten numbered criteria, one pass/fail line
// each. Run all with no arguments or a single one with --criterion N.
// Criterion 10 drives the installed command-line binary (path baked in via
// AQST_CLI_PATH) through two identical runs and compares bytes.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <aqst/couplings.hpp>
#include <aqst/hamiltonians.hpp>
#include <aqst/protocol.hpp>
#include <aqst/qcore.hpp>

#include "cli/config.hpp"
#include "oracles.hpp"

using namespace aqst;

namespace {

constexpr double pi = std::numbers::pi;

int checks_failed = 0;

#define EXPECT(cond, msg)                                                 \
  do {                                                                    \
    if (!(cond)) {                                                        \
      ++checks_failed;                                                    \
      std::cerr << "  check failed (" << __FILE__ << ":" << __LINE__      \
                << "): " << msg << "\n";                                  \
    }                                                                     \
  } while (0)

std::string fmt(double x) { return aqst::cli::format_sci17(x); }

// ---- criterion 1: spectrum of the restricted stage-1 generator
// asserted spectrum {-sqrt(2), 0, 0, 0, 0, +sqrt(2)} at unit drive
void criterion_1() {
  const Matrix m = restrict_to_subspace(build_h_secular({0.0, 1.0, 0.0}),
                                        single_double_excitation_basis());
  const EigenSystem sys = hermitian_eigensystem(DenseOperator::make(m, true));
  const double root2 = std::sqrt(2.0);
  const std::array<double, 6> want{-root2, 0.0, 0.0, 0.0, 0.0, root2};
  for (int i = 0; i < 6; ++i)
    EXPECT(std::abs(sys.eigenvalues[i] - want[i]) <= 1e-12,
           "eigenvalue " << i << " is " << fmt(sys.eigenvalues[i])
                         << ", expected " << fmt(want[i]));
}

// ---- criterion 2: the restricted receiver-drive matrix reproduces the
// reference 6x6 pattern entry for entry
void criterion_2() {
  for (double gamma2 : {1.0, 0.37}) {
    const Matrix got =
        restrict_to_subspace(build_h_secular({0.0, gamma2, 0.0}),
                             single_double_excitation_basis());
    const Matrix want = oracles::stage1_pattern(gamma2);
    const double dev = (got - want).cwiseAbs().maxCoeff();
    EXPECT(dev <= 1e-14, "max entry deviation " << fmt(dev)
                                                << " at gamma2 = " << gamma2);
  }
}

// ---- criterion 3: quarter-period entangling pulse moves |egg> fully onto
// |eeg> for k = 0 and k = 1, |ggg> stays put, phases match the
// matrix-exponential oracle
void criterion_3() {
  const double gamma2 = 0.05;
  const StateVector egg = StateVector::basis_state(3, "egg");
  const DenseOperator h = build_h_secular({0.0, gamma2, 0.0});

  for (int k : {0, 1}) {
    const double t1 = (k * pi + pi / 2) / gamma2;
    const StateVector psi = stage1_entangle(egg, 2, gamma2, t1);
    const double population = std::norm(psi.amplitude("eeg"));
    EXPECT(std::abs(population - 1.0) <= 1e-12,
           "population on eeg is " << fmt(population) << " at k = " << k);
    const Vector want = oracles::evolve(h.entries, t1, egg.amplitudes);
    const double dev = (psi.amplitudes - want).cwiseAbs().maxCoeff();
    EXPECT(dev <= 1e-10,
           "state deviates from the expm oracle by " << fmt(dev));
  }

  const StateVector ggg = StateVector::basis_state(3, "ggg");
  for (double t : {0.3, 1.7, 8.0, 40.0, 200.0}) {
    const StateVector psi = stage1_entangle(ggg, 2, gamma2, t);
    const double stay = std::norm(psi.amplitude("ggg"));
    EXPECT(std::abs(stay - 1.0) <= 1e-12,
           "ggg population drifted to " << fmt(stay) << " at t = " << t);
  }
}

// ---- criterion 4: theta-averaged success probability is exactly one half;
// quadrature and seeded Monte Carlo agree
void criterion_4() {
  for (double tau : {0.0, pi / 8, pi / 4, 1.0, 3 * pi / 4}) {
    EXPECT(average_success(tau) == 0.5,
           "analytic average is not one half at tau = " << fmt(tau));
    const double quad = average_success_quadrature(tau, 10000);
    EXPECT(std::abs(quad - 0.5) <= 1e-9,
           "quadrature average " << fmt(quad) << " at tau = " << fmt(tau));
  }

  // at tau = pi/4 every target angle succeeds with probability one half, so
  // a fixed-angle run is an exact binomial(n, 1/2) experiment
  const std::array<double, 3> gamma{0.05, 0.05, 0.05};
  const PartyRoles roles = make_roles(1, 2);
  const ProtocolSchedule schedule =
      make_schedule(roles, gamma, pi / 4, 0, fit_phase_correction(roles, gamma));
  const QubitState target{std::cos(0.7), std::sin(0.7)};
  const double rate =
      sample_outcomes(schedule, target, gamma, 100000, 424242);
  EXPECT(std::abs(rate - 0.5) <= 0.0063,
         "seeded rate " << fmt(rate) << " outside the four-sigma band");
}

// ---- criterion 5: with the numerically derived correction the transferred
// state is exact at tau = pi/4 for every target angle and role assignment
void criterion_5() {
  const std::array<double, 3> gamma{0.05, 0.05, 0.05};
  for (const auto& [s, r] :
       {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
    const PartyRoles roles = make_roles(s, r);
    const DenseOperator correction = fit_phase_correction(roles, gamma);
    const ProtocolSchedule schedule =
        make_schedule(roles, gamma, pi / 4, 0, correction);
    double worst = 1.0;
    for (double theta : aqst::cli::linspace(0.0, 2 * pi, 64)) {
      const QubitState target{std::cos(theta), std::sin(theta)};
      const TransferOutcomes outcomes = run_transfer(schedule, target, gamma);
      worst = std::min(worst, outcomes.success_branch.fidelity);
    }
    EXPECT(std::abs(worst - 1.0) <= 1e-10,
           "worst fidelity " << fmt(worst) << " for roles " << s << "->" << r);
  }
}

// ---- criterion 6: closed forms against the simulation on a 64x64 grid
void criterion_6() {
  const std::array<double, 3> gamma{0.05, 0.05, 0.05};
  const PartyRoles roles = make_roles(1, 2);
  const DenseOperator correction = fit_phase_correction(roles, gamma);

  double worst_p = 0.0;
  double worst_f = 0.0;
  int compared = 0;
  for (double tau : aqst::cli::linspace(0.0, pi, 64)) {
    const ProtocolSchedule schedule =
        make_schedule(roles, gamma, tau, 0, correction);
    for (double theta : aqst::cli::linspace(0.0, 2 * pi, 64)) {
      const double p = p_theta(theta, tau);
      if (p <= 1e-6) continue;
      const QubitState target{std::cos(theta), std::sin(theta)};
      const TransferOutcomes outcomes = run_transfer(schedule, target, gamma);
      ++compared;
      worst_p = std::max(
          worst_p, std::abs(p - outcomes.success_branch.branch_probability));
      worst_f = std::max(worst_f, std::abs(std::abs(f_theta(theta, tau)) -
                                           outcomes.success_branch.fidelity));
    }
  }
  EXPECT(compared > 3000, "grid mask left only " << compared << " points");
  EXPECT(worst_p <= 1e-12,
         "worst probability mismatch " << fmt(worst_p));
  EXPECT(worst_f <= 1e-10, "worst fidelity mismatch " << fmt(worst_f));
}

// ---- criterion 7: the secular picture improves monotonically as the
// drives shrink against the ring coupling; ceilings frozen ~1.5x above the
// measured maxima of the convergence study
void criterion_7() {
  const auto t_start = std::chrono::steady_clock::now();

  const StateVector egg = StateVector::basis_state(3, "egg");
  const std::array<double, 4> ratios{0.1, 0.03, 0.01, 0.003};
  const std::array<double, 4> ceilings{4e-3, 4e-4, 4e-5, 4e-6};
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double r = ratios[i];
    const auto grid = aqst::cli::linspace(0.0, pi / (2.0 * r), 400);
    const double error = secular_error(1.0, {r, r, r}, egg, grid);
    EXPECT(error < prev, "error " << fmt(error) << " did not shrink at ratio "
                                  << fmt(r));
    EXPECT(error <= ceilings[i], "error " << fmt(error)
                                          << " above the ceiling "
                                          << fmt(ceilings[i]) << " at ratio "
                                          << fmt(r));
    prev = error;
  }

  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
  EXPECT(elapsed <= 10.0, "sweep took " << elapsed << " s");
}

// ---- criterion 8: fully symmetric parameters give equal couplings and
// equal cavity amplitudes over 100 random draws
void criterion_8() {
  std::mt19937_64 rng(0x5eedu);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int draw = 0; draw < 100; ++draw) {
    const double kappa = 0.5 + 1.5 * unit(rng);
    const double delta = kappa * (0.8 + 0.4 * unit(rng));
    const double g = kappa / (25.0 + 25.0 * unit(rng));
    const double mag = 0.1 + 0.9 * unit(rng);
    const double arg = 2 * pi * unit(rng);
    const Complex eps0 = std::polar(mag, arg);
    const double phi0 = 2 * pi * unit(rng);

    const auto c = derive_couplings(
        symmetric_params(eps0, phi0, kappa, g, delta, {0, 0, 0}));

    const double j_scale = std::abs(c.j[0]);
    const double j_spread =
        std::max({std::abs(c.j[0] - c.j[1]), std::abs(c.j[1] - c.j[2]),
                  std::abs(c.j[2] - c.j[0])});
    EXPECT(j_spread <= 1e-12 * j_scale,
           "coupling spread " << fmt(j_spread) << " at draw " << draw);

    const double a_scale = std::abs(c.alpha[0]);
    const double a_spread = std::max({std::abs(c.alpha[0] - c.alpha[1]),
                                      std::abs(c.alpha[1] - c.alpha[2]),
                                      std::abs(c.alpha[2] - c.alpha[0])});
    EXPECT(a_spread <= 1e-12 * a_scale,
           "amplitude spread " << fmt(a_spread) << " at draw " << draw);
  }
}

// ---- criterion 9: spectral propagator against the Taylor expm oracle
void criterion_9() {
  std::mt19937_64 rng(0xacce97ed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 7;  // 2..8
    const Matrix h = oracles::random_hermitian(rng, dim);
    const Vector v0 = oracles::random_unit_vector(rng, dim);
    const double t = 10.0 * unit(rng);

    std::vector<std::string> labels(dim);
    for (int i = 0; i < dim; ++i) labels[i] = "s" + std::to_string(i);
    const StateVector psi0 = StateVector::from_amplitudes(v0, labels);
    const StateVector psi =
        propagate(DenseOperator::make(h, true), t, psi0);
    const Vector want = oracles::evolve(h, t, v0);
    const double dev = (psi.amplitudes - want).cwiseAbs().maxCoeff();
    EXPECT(dev <= 1e-8, "trial " << trial << " deviates by " << fmt(dev));
  }
}

// ---- criterion 10: the curve command is byte-deterministic end to end
void criterion_10() {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() /
      ("aqst-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path config = dir / "curve.ini";
  {
    std::ofstream out(config);
    out << "[direct]\n"
           "j0 = 1.0\n"
           "gamma1 = 0.05\n"
           "gamma2 = 0.05\n"
           "gamma3 = 0.05\n"
           "\n"
           "[protocol]\n"
           "theta = 7.853981633974483e-01\n"
           "tau = sweep\n"
           "seed = 20260816\n"
           "\n"
           "[sweep]\n"
           "tau_start = 0.0\n"
           "tau_stop = 3.141592653589793e+00\n"
           "tau_count = 33\n"
           "\n"
           "[output]\n"
           "format = csv\n";
  }

  const auto read_all = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const auto run_once = [&](const fs::path& out_file) {
    const std::string cmd = std::string(AQST_CLI_PATH) +
                            " fidelity-curve --config " + config.string() +
                            " --out " + out_file.string();
    return std::system(cmd.c_str());
  };

  const fs::path out1 = dir / "run1.csv";
  const fs::path out2 = dir / "run2.csv";
  const int rc1 = run_once(out1);
  const int rc2 = run_once(out2);
  EXPECT(rc1 == 0, "first run exited with " << rc1);
  EXPECT(rc2 == 0, "second run exited with " << rc2);

  const std::string bytes1 = read_all(out1);
  const std::string bytes2 = read_all(out2);
  EXPECT(!bytes1.empty(), "first run produced no output");
  EXPECT(bytes1 == bytes2, "the two runs differ");
  EXPECT(bytes1.rfind("tau,theta,p_theta,f_theta,sim_probability,"
                      "sim_fidelity\n", 0) == 0,
         "unexpected header");

  std::error_code ignore;
  fs::remove_all(dir, ignore);
}

struct Criterion {
  int id;
  const char* title;
  void (*run)();
};

const Criterion criteria[] = {
    {1, "stage-1 spectrum", criterion_1},
    {2, "stage-1 matrix reproduction", criterion_2},
    {3, "quarter-period transfer", criterion_3},
    {4, "success probability one half", criterion_4},
    {5, "unit fidelity with derived correction", criterion_5},
    {6, "closed forms match simulation", criterion_6},
    {7, "secular error shrinks with the drives", criterion_7},
    {8, "symmetric couplings", criterion_8},
    {9, "propagator matches the expm oracle", criterion_9},
    {10, "byte-identical curve output", criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    selected = std::atoi(argv[2]);
    if (selected < 1 || selected > 10) {
      std::cerr << "usage: " << argv[0] << " [--criterion 1..10]\n";
      return 2;
    }
  } else if (argc != 1) {
    std::cerr << "usage: " << argv[0] << " [--criterion 1..10]\n";
    return 2;
  }

  int failed = 0;
  for (const auto& c : criteria) {
    if (selected != 0 && c.id != selected) continue;
    checks_failed = 0;
    c.run();
    if (checks_failed == 0) {
      std::cout << "[PASS] criterion " << c.id << ": " << c.title << "\n";
    } else {
      std::cout << "[FAIL] criterion " << c.id << ": " << c.title << " ("
                << checks_failed << " failed check"
                << (checks_failed == 1 ? "" : "s") << ")\n";
      ++failed;
    }
  }
  return failed == 0 ? 0 : 1;
}
