// Command implementations behind the CLI verbs. Each takes a parsed config
// plus explicit data/diagnostic streams so tests can drive them directly.
// Data goes to `out`, warnings and errors to `err`, never mixed.
//
// Shared exit convention: 0 ok, 1 check failure, 2 usage or config error.

#pragma once

#include <iosfwd>
#include <string>

#include "cli/config.hpp"

namespace aqst::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;

// one transfer run; JSON report with both measurement branches. Exits 1
// when tau = pi/4 was requested but the success branch misses fidelity
// 1 - 1e-8.
int cmd_transfer(const RunConfig& config, std::ostream& out,
                 std::ostream& err);

// sweep rows over the configured tau grid (theta fixed or swept):
// tau,theta,p_theta,f_theta,sim_probability,sim_fidelity. The f_theta
// column carries the physical overlap (magnitude); rows where the success
// probability vanishes report it as nan with a warning on `err`.
int cmd_fidelity_curve(const RunConfig& config, std::ostream& out,
                       std::ostream& err);

// effective couplings and the regime report for a [physical] config
int cmd_couplings(const RunConfig& config, std::ostream& out,
                  std::ostream& err);

// secular-approximation error across the configured drive/coupling ratios
int cmd_secular_sweep(const RunConfig& config, std::ostream& out,
                      std::ostream& err);

// named self-checks; `only` restricts to a single check (empty = all)
int cmd_validate(const RunConfig& config, const std::string& only,
                 std::ostream& out, std::ostream& err);

// Monte Carlo success-rate estimate against the closed form, with a
// four-sigma binomial acceptance band
int cmd_sample(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace aqst::cli
