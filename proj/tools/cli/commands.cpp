#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>
#include <vector>

#include <aqst/protocol.hpp>

#include "json.hpp"

namespace aqst::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double pi = std::numbers::pi;

// effective-model inputs after resolving the [physical] / [direct] choice
struct Model {
  std::array<double, 3> j{};
  std::array<double, 3> gamma{};
  std::optional<EffectiveCouplings> couplings;
  std::optional<RegimeReport> regime;
};

Model resolve_model(const RunConfig& config) {
  Model m;
  if (config.direct) {
    m.j = {config.direct->j0, config.direct->j0, config.direct->j0};
    m.gamma = config.direct->gamma;
  } else {
    const auto& p = *config.physical;
    auto c = derive_couplings(p);
    m.j = c.j;
    m.gamma = p.gamma;
    m.regime = validate_regime(p, c);
    m.couplings = std::move(c);
  }
  return m;
}

DenseOperator pick_correction(const CorrectionChoice& choice,
                              const PartyRoles& roles,
                              const std::array<double, 3>& gamma, int k1) {
  switch (choice.kind) {
    case CorrectionKind::identity:
      return DenseOperator::identity(2);
    case CorrectionKind::phase:
      return phase_correction(choice.phi);
    case CorrectionKind::derived:
      break;
  }
  return fit_phase_correction(roles, gamma, k1);
}

std::string correction_label(const CorrectionChoice& c) {
  switch (c.kind) {
    case CorrectionKind::identity:
      return "identity";
    case CorrectionKind::phase:
      return "phase:" + format_sci17(c.phi);
    case CorrectionKind::derived:
      break;
  }
  return "derived";
}

double require_scalar(const std::optional<double>& value, const char* key) {
  if (!value)
    throw ConfigError("config", 0, std::string("protocol.") + key,
                      "this command needs a single angle, not a sweep");
  return *value;
}

// run f(0..n-1) on a small worker pool; each call writes only its own slot,
// so the caller can emit results in index order afterwards
void parallel_index_map(std::size_t n,
                        const std::function<void(std::size_t)>& f) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(hw > 0 ? hw : 1, n);
  if (workers < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_lock;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        const std::scoped_lock lock(error_lock);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// maps failures onto the shared exit codes: bad inputs are usage errors,
// everything else is a check failure
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_check_failed;
  }
}

ordered_json complex_json(const Complex& z) {
  return {{"re", z.real()}, {"im", z.imag()}};
}

ordered_json qubit_json(const QubitState& q) {
  return {{"alpha", complex_json(q.alpha)}, {"beta", complex_json(q.beta)}};
}

ordered_json outcome_json(const TransferOutcome& o) {
  ordered_json j;
  j["measured"] = o.measured == Level::e ? "e" : "g";
  j["probability"] = o.branch_probability;
  j["fidelity"] = o.fidelity;
  j["receiver_state"] =
      o.receiver_state ? qubit_json(*o.receiver_state) : ordered_json(nullptr);
  return j;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json couplings_json(const EffectiveCouplings& c) {
  ordered_json j;
  j["chi"] = c.chi;
  j["m"] = complex_json(c.m);
  j["w3"] = complex_json(c.w3);
  j["alpha"] = ordered_json::array();
  for (const auto& a : c.alpha) j["alpha"].push_back(complex_json(a));
  j["j"] = {c.j[0], c.j[1], c.j[2]};
  return j;
}

ordered_json regime_json(const RegimeReport& r) {
  return {{"detuning_balance", r.detuning_balance},
          {"cavity_over_atom", r.cavity_over_atom},
          {"drive_over_ising", r.drive_over_ising},
          {"detuning_ok", r.detuning_ok},
          {"coupling_ok", r.coupling_ok},
          {"secular_ok", r.secular_ok},
          {"all_ok", r.all_ok()}};
}

}  // namespace

int cmd_transfer(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&]() -> int {
    const double theta = require_scalar(config.protocol.theta, "theta");
    const double tau = require_scalar(config.protocol.tau, "tau");
    const Model model = resolve_model(config);
    const PartyRoles roles =
        make_roles(config.protocol.sender, config.protocol.receiver);
    const DenseOperator correction = pick_correction(
        config.protocol.correction, roles, model.gamma, config.protocol.k1);
    const ProtocolSchedule schedule = make_schedule(
        roles, model.gamma, tau, config.protocol.k1, correction);
    const QubitState target{std::cos(theta), std::sin(theta)};
    const TransferOutcomes outcomes =
        run_transfer(schedule, target, model.gamma);

    const double p = p_theta(theta, tau);
    const bool zero_success = p < tol::zero_branch;

    ordered_json report;
    report["inputs"] = {
        {"sender", roles.sender},
        {"receiver", roles.receiver},
        {"bystander", roles.bystander},
        {"theta", theta},
        {"tau", tau},
        {"k1", config.protocol.k1},
        {"gamma", {model.gamma[0], model.gamma[1], model.gamma[2]}},
        {"correction", correction_label(config.protocol.correction)},
        {"units", config.units}};
    if (model.couplings) {
      report["couplings"] = couplings_json(*model.couplings);
      report["regime"] = regime_json(*model.regime);
    }
    report["schedule"] = {{"t1", schedule.t1},
                          {"tau", schedule.tau},
                          {"k1", schedule.k1},
                          {"correction", matrix_json(schedule.correction.entries)}};
    report["closed_form"] = {
        {"p_theta", p},
        {"f_theta", zero_success ? ordered_json(nullptr)
                                 : ordered_json(std::abs(f_theta(theta, tau)))}};
    report["branches"] = {{"success", outcome_json(outcomes.success_branch)},
                          {"failure", outcome_json(outcomes.failure_branch)}};

    ordered_json notes = ordered_json::array();
    if (zero_success)
      notes.push_back(
          "success branch has zero probability; post-selection cannot "
          "succeed at this working point");
    const bool at_working_point = std::abs(tau - pi / 4) <= 1e-12;
    const bool ok =
        !at_working_point || outcomes.success_branch.fidelity >= 1.0 - 1e-8;
    if (!ok)
      notes.push_back("success fidelity misses 1 - 1e-8 at tau = pi/4");
    report["notes"] = notes;
    report["status"] = ok ? "ok" : "fidelity-below-threshold";
    out << report.dump(2) << "\n";
    return ok ? exit_ok : exit_check_failed;
  });
}

namespace {

struct CurveRow {
  double tau = 0;
  double theta = 0;
  double p = 0;
  double f = 0;
  double sim_p = 0;
  double sim_f = 0;
  bool zero = false;
};

}  // namespace

int cmd_fidelity_curve(const RunConfig& config, std::ostream& out,
                       std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (config.protocol.tau.has_value())
      throw ConfigError("config", 0, "protocol.tau",
                        "fidelity-curve needs 'tau = sweep'");
    const Model model = resolve_model(config);
    const PartyRoles roles =
        make_roles(config.protocol.sender, config.protocol.receiver);
    // the correction does not depend on tau, so fit it once for all rows
    const DenseOperator correction = pick_correction(
        config.protocol.correction, roles, model.gamma, config.protocol.k1);

    const std::vector<double> taus = linspace(
        config.sweep.tau.start, config.sweep.tau.stop, config.sweep.tau.count);
    const std::vector<double> thetas =
        config.protocol.theta
            ? std::vector<double>{*config.protocol.theta}
            : linspace(config.sweep.theta.start, config.sweep.theta.stop,
                       config.sweep.theta.count);

    std::vector<CurveRow> rows(taus.size() * thetas.size());
    parallel_index_map(rows.size(), [&](std::size_t i) {
      CurveRow& row = rows[i];
      row.tau = taus[i / thetas.size()];
      row.theta = thetas[i % thetas.size()];
      const ProtocolSchedule schedule = make_schedule(
          roles, model.gamma, row.tau, config.protocol.k1, correction);
      const QubitState target{std::cos(row.theta), std::sin(row.theta)};
      const TransferOutcomes outcomes =
          run_transfer(schedule, target, model.gamma);
      row.sim_p = outcomes.success_branch.branch_probability;
      row.sim_f = outcomes.success_branch.fidelity;
      row.p = p_theta(row.theta, row.tau);
      row.zero = row.p < tol::zero_branch;
      row.f = row.zero ? std::numeric_limits<double>::quiet_NaN()
                       : std::abs(f_theta(row.theta, row.tau));
    });

    if (config.output.format == OutputFormat::csv) {
      out << "tau,theta,p_theta,f_theta,sim_probability,sim_fidelity\n";
      for (const auto& r : rows)
        out << format_sci17(r.tau) << ',' << format_sci17(r.theta) << ','
            << format_sci17(r.p) << ',' << format_sci17(r.f) << ','
            << format_sci17(r.sim_p) << ',' << format_sci17(r.sim_f) << "\n";
    } else {
      ordered_json doc = ordered_json::array();
      for (const auto& r : rows) {
        ordered_json row;
        row["tau"] = r.tau;
        row["theta"] = r.theta;
        row["p_theta"] = r.p;
        row["f_theta"] = r.zero ? ordered_json(nullptr) : ordered_json(r.f);
        row["sim_probability"] = r.sim_p;
        row["sim_fidelity"] = r.sim_f;
        doc.push_back(std::move(row));
      }
      out << doc.dump(2) << "\n";
    }

    int violations = 0;
    for (const auto& r : rows) {
      if (r.zero)
        err << "warning: success probability vanishes at tau = "
            << format_sci17(r.tau) << ", theta = " << format_sci17(r.theta)
            << "; f_theta is nan\n";
      if (std::abs(r.p - r.sim_p) > 1e-10) ++violations;
    }
    if (violations > 0) {
      err << "error: " << violations
          << " row(s) break |p_theta - sim_probability| <= 1e-10\n";
      return exit_check_failed;
    }
    return exit_ok;
  });
}

int cmd_couplings(const RunConfig& config, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (!config.physical)
      throw ConfigError("config", 0, "physical",
                        "couplings needs a [physical] section");
    try {
      const EffectiveCouplings c = derive_couplings(*config.physical);
      ordered_json report = couplings_json(c);
      report["regime"] = regime_json(validate_regime(*config.physical, c));
      report["units"] = config.units;
      out << report.dump(2) << "\n";
      return exit_ok;
    } catch (const std::domain_error& e) {
      ordered_json failure;
      failure["error"] = {{"kind", "singular-denominator"},
                          {"message", e.what()}};
      err << failure.dump(2) << "\n";
      return exit_check_failed;
    }
  });
}

namespace {

struct RatioRow {
  double ratio = 0;
  double gamma = 0;
  double t_max = 0;
  double error = 0;
};

}  // namespace

int cmd_secular_sweep(const RunConfig& config, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Model model = resolve_model(config);
    const double j_spread =
        std::max({std::abs(model.j[0] - model.j[1]),
                  std::abs(model.j[1] - model.j[2]),
                  std::abs(model.j[2] - model.j[0])});
    const double j_scale = std::max(
        {std::abs(model.j[0]), std::abs(model.j[1]), std::abs(model.j[2])});
    if (j_scale <= 0.0)
      throw std::domain_error("secular sweep needs a nonzero ring coupling");
    if (j_spread > 1e-9 * j_scale)
      throw std::domain_error(
          "secular sweep needs a symmetric ring (equal couplings)");
    const double j0 = std::abs(model.j[0]);
    const StateVector psi0 = StateVector::basis_state(3, "egg");

    const auto& ratios = config.sweep.ratios;
    std::vector<RatioRow> rows(ratios.size());
    parallel_index_map(rows.size(), [&](std::size_t i) {
      RatioRow& row = rows[i];
      row.ratio = ratios[i];
      row.gamma = row.ratio * j0;
      row.t_max = pi / (2.0 * row.gamma);
      const auto grid = linspace(0.0, row.t_max, config.sweep.t_count);
      row.error = secular_error(j0, {row.gamma, row.gamma, row.gamma}, psi0,
                                grid);
    });

    if (config.output.format == OutputFormat::csv) {
      out << "ratio,j0,gamma,t_max,secular_error\n";
      for (const auto& r : rows)
        out << format_sci17(r.ratio) << ',' << format_sci17(j0) << ','
            << format_sci17(r.gamma) << ',' << format_sci17(r.t_max) << ','
            << format_sci17(r.error) << "\n";
    } else {
      ordered_json doc = ordered_json::array();
      for (const auto& r : rows) {
        ordered_json row;
        row["ratio"] = r.ratio;
        row["j0"] = j0;
        row["gamma"] = r.gamma;
        row["t_max"] = r.t_max;
        row["secular_error"] = r.error;
        doc.push_back(std::move(row));
      }
      out << doc.dump(2) << "\n";
    }
    return exit_ok;
  });
}

namespace {

struct CheckOutcome {
  std::string name;
  bool ok = false;
  std::string detail;
};

// the restricted single-receiver drive must reproduce the two-swap pattern
CheckOutcome check_secular_matrix(SecularForm form) {
  try {
    const Matrix got = restrict_to_subspace(
        build_h_secular({0.0, 1.0, 0.0}, form),
        single_double_excitation_basis());
    Matrix want = Matrix::Zero(6, 6);
    want(0, 1) = want(1, 0) = 1.0;
    want(3, 4) = want(4, 3) = 1.0;
    const double dev = (got - want).cwiseAbs().maxCoeff();
    if (dev > 1e-14)
      return {"secular-matrix", false,
              "max entry deviation " + format_sci17(dev)};
    return {"secular-matrix", true, ""};
  } catch (const std::domain_error& e) {
    return {"secular-matrix", false, e.what()};
  }
}

// two uncoupled swap pairs: spectrum {-1, -1, 0, 0, 1, 1}
CheckOutcome check_eigenvalues() {
  const Matrix m = restrict_to_subspace(build_h_secular({0.0, 1.0, 0.0}),
                                        single_double_excitation_basis());
  const EigenSystem sys = hermitian_eigensystem(DenseOperator::make(m, true));
  const std::array<double, 6> want{-1.0, -1.0, 0.0, 0.0, 1.0, 1.0};
  double dev = 0.0;
  for (int i = 0; i < 6; ++i)
    dev = std::max(dev, std::abs(sys.eigenvalues[i] - want[i]));
  if (dev > 1e-12)
    return {"eigenvalues", false, "max deviation " + format_sci17(dev)};
  return {"eigenvalues", true, ""};
}

CheckOutcome check_average_success() {
  for (double tau : {0.0, pi / 8, pi / 4, 1.0, 3 * pi / 4}) {
    if (average_success(tau) != 0.5)
      return {"average-success", false,
              "analytic average is not 1/2 at tau = " + format_sci17(tau)};
    const double quad = average_success_quadrature(tau, 10000);
    if (std::abs(quad - 0.5) > 1e-9)
      return {"average-success", false,
              "quadrature drifts to " + format_sci17(quad) + " at tau = " +
                  format_sci17(tau)};
  }
  return {"average-success", true, ""};
}

CheckOutcome check_fidelity() {
  const std::array<double, 3> gamma{0.05, 0.05, 0.05};
  double worst = 1.0;
  for (const auto& [s, r] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
    const PartyRoles roles = make_roles(s, r);
    const DenseOperator correction = fit_phase_correction(roles, gamma);
    const ProtocolSchedule schedule =
        make_schedule(roles, gamma, pi / 4, 0, correction);
    for (double theta : linspace(0.0, 2 * pi, 16)) {
      const QubitState target{std::cos(theta), std::sin(theta)};
      const TransferOutcomes outcomes = run_transfer(schedule, target, gamma);
      worst = std::min(worst, outcomes.success_branch.fidelity);
    }
  }
  if (worst < 1.0 - 1e-10)
    return {"fidelity", false,
            "worst success fidelity " + format_sci17(worst)};
  return {"fidelity", true, ""};
}

CheckOutcome check_secular_monotone() {
  const StateVector psi0 = StateVector::basis_state(3, "egg");
  double prev = std::numeric_limits<double>::infinity();
  std::array<double, 3> errors{};
  const std::array<double, 3> ratios{0.1, 0.03, 0.01};
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double r = ratios[i];
    const auto grid = linspace(0.0, pi / (2.0 * r), 400);
    errors[i] = secular_error(1.0, {r, r, r}, psi0, grid);
    if (errors[i] >= prev)
      return {"secular-monotone", false,
              "error did not shrink from ratio " +
                  format_sci17(ratios[i - 1]) + " to " + format_sci17(r)};
    prev = errors[i];
  }
  if (errors[0] > 4e-3 || errors[2] > 4e-5)
    return {"secular-monotone", false,
            "errors above the frozen ceilings: " + format_sci17(errors[0]) +
                ", " + format_sci17(errors[2])};
  return {"secular-monotone", true, ""};
}

}  // namespace

int cmd_validate(const RunConfig& config, const std::string& only,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const std::vector<std::string> known = {"secular-matrix", "eigenvalues",
                                            "average-success", "fidelity",
                                            "secular-monotone"};
    if (!only.empty() &&
        std::find(known.begin(), known.end(), only) == known.end()) {
      err << "error: unknown check '" << only << "'; known checks:";
      for (const auto& name : known) err << " " << name;
      err << "\n";
      return exit_usage;
    }
    const auto wanted = [&](const char* name) {
      return only.empty() || only == name;
    };

    std::vector<CheckOutcome> results;
    if (wanted("secular-matrix"))
      results.push_back(check_secular_matrix(config.protocol.secular_form));
    if (wanted("eigenvalues")) results.push_back(check_eigenvalues());
    if (wanted("average-success")) results.push_back(check_average_success());
    if (wanted("fidelity")) results.push_back(check_fidelity());
    if (wanted("secular-monotone"))
      results.push_back(check_secular_monotone());

    std::vector<std::string> failed;
    for (const auto& r : results) {
      if (r.ok) {
        out << "ok " << r.name << "\n";
      } else {
        out << "FAIL " << r.name << ": " << r.detail << "\n";
        failed.push_back(r.name);
      }
    }
    if (!failed.empty()) {
      err << "failed checks:";
      for (const auto& name : failed) err << " " << name;
      err << "\n";
      return exit_check_failed;
    }
    return exit_ok;
  });
}

int cmd_sample(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const double theta = require_scalar(config.protocol.theta, "theta");
    const double tau = require_scalar(config.protocol.tau, "tau");
    const Model model = resolve_model(config);
    const PartyRoles roles =
        make_roles(config.protocol.sender, config.protocol.receiver);
    const DenseOperator correction = pick_correction(
        config.protocol.correction, roles, model.gamma, config.protocol.k1);
    const ProtocolSchedule schedule = make_schedule(
        roles, model.gamma, tau, config.protocol.k1, correction);
    const QubitState target{std::cos(theta), std::sin(theta)};

    const std::int64_t n = config.protocol.samples;
    const double rate = sample_outcomes(schedule, target, model.gamma, n,
                                        config.protocol.seed);
    const double p = p_theta(theta, tau);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    const double band = 4.0 * sigma;
    const bool within = std::abs(rate - p) <= band;

    ordered_json report;
    report["theta"] = theta;
    report["tau"] = tau;
    report["samples"] = n;
    report["seed"] = config.protocol.seed;
    report["p_theta"] = p;
    report["empirical_rate"] = rate;
    report["abs_error"] = std::abs(rate - p);
    report["four_sigma_band"] = band;
    report["within_band"] = within;
    out << report.dump(2) << "\n";
    return within ? exit_ok : exit_check_failed;
  });
}

}  // namespace aqst::cli
