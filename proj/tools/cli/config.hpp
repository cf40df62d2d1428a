// Line-oriented configuration for the command-line front end.
//
// Format: `[section]` headers followed by `key = value` lines; `#` starts a
// comment anywhere on a line. Sections: physical, direct, protocol, sweep,
// output. Exactly one of [physical] / [direct] must be present. Angles are
// radians; all rates are in units of the cavity linewidth kappa unless
// `units = SI` marks them as explicit angular frequencies (a bookkeeping
// label carried through untouched, since the dynamics only depends on
// ratios).

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <aqst/couplings.hpp>
#include <aqst/hamiltonians.hpp>

namespace aqst::cli {

// parse or validation failure; line is 0 when no source line applies and
// field names the offending key when one is known
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& origin, int line, const std::string& field,
              const std::string& message);

  int line = 0;
  std::string field;
};

// effective-model inputs given directly: one ring coupling, three drives
struct DirectParams {
  double j0 = 1.0;
  std::array<double, 3> gamma{};
};

// endpoint-inclusive grid: count points from start to stop
struct SweepAxis {
  double start = 0.0;
  double stop = 0.0;
  int count = 2;
};

enum class CorrectionKind { derived, identity, phase };

struct CorrectionChoice {
  CorrectionKind kind = CorrectionKind::derived;
  double phi = 0.0;  // only used by CorrectionKind::phase
};

struct ProtocolBlock {
  int sender = 1;
  int receiver = 2;
  // nullopt means "sweep": the value comes from the [sweep] grids
  std::optional<double> theta{std::numbers::pi / 4};
  std::optional<double> tau{std::numbers::pi / 4};
  int k1 = 0;
  CorrectionChoice correction{};
  SecularForm secular_form = SecularForm::projector;
  std::uint64_t seed = 0;
  std::int64_t samples = 100000;
};

struct SweepBlock {
  SweepAxis theta{0.0, 2 * std::numbers::pi, 64};
  SweepAxis tau{0.0, std::numbers::pi, 64};
  // drive-to-coupling ratios for the secular sweep
  std::vector<double> ratios{0.1, 0.03, 0.01, 0.003};
  int t_count = 400;
};

enum class OutputFormat { csv, json };

struct OutputBlock {
  std::string path;  // empty means standard output
  OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
  std::optional<PhysicalParams> physical;
  std::optional<DirectParams> direct;
  std::string units = "kappa";
  ProtocolBlock protocol;
  SweepBlock sweep;
  OutputBlock output;
};

// cross-field invariants: exactly one parameter block, distinct roles in
// 1..3, grid counts at least 2, positive ratios, nonnegative k1, at least
// one sample; throws ConfigError
void validate_config(const RunConfig& config,
                     const std::string& origin = "config");

RunConfig parse_config(std::istream& in, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

// canonical echo; the output re-parses to an equivalent config
void dump_config(const RunConfig& config, std::ostream& out);

// fixed 17-significant-digit scientific form, byte-identical across
// platforms; non-finite values print as nan / inf / -inf
std::string format_sci17(double value);

// inclusive grid of `count` points from start to stop; count must be >= 2
std::vector<double> linspace(double start, double stop, int count);

}  // namespace aqst::cli
