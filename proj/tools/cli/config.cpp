#include "cli/config.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace aqst::cli {

namespace {

std::string build_message(const std::string& origin, int line,
                          const std::string& field,
                          const std::string& message) {
  std::ostringstream s;
  s << origin;
  if (line > 0) s << ":" << line;
  s << ": ";
  if (!field.empty()) s << field << ": ";
  s << message;
  return s.str();
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& s) {
  std::vector<std::string> fields;
  std::string cleaned = s;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::string field;
  while (in >> field) fields.push_back(field);
  return fields;
}

// parse context threaded through the key handlers so every failure carries
// the source location
struct Cursor {
  const std::string& origin;
  int line = 0;
  std::string field;

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(origin, line, field, message);
  }
};

double to_double(const Cursor& c, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') c.fail("expected a number, got '" + value + "'");
  if (!std::isfinite(x)) c.fail("value out of range: '" + value + "'");
  return x;
}

long long to_ll(const Cursor& c, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0') c.fail("expected an integer, got '" + value + "'");
  if (errno == ERANGE) c.fail("integer out of range: '" + value + "'");
  return x;
}

int to_int(const Cursor& c, const std::string& value) {
  const long long x = to_ll(c, value);
  if (x < INT_MIN || x > INT_MAX) c.fail("integer out of range: '" + value + "'");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const Cursor& c, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || value.front() == '-')
    c.fail("expected an unsigned integer, got '" + value + "'");
  if (errno == ERANGE) c.fail("integer out of range: '" + value + "'");
  return x;
}

// "re" or "re im"
Complex to_complex(const Cursor& c, const std::string& value) {
  const auto fields = split_fields(value);
  if (fields.empty() || fields.size() > 2)
    c.fail("expected 're' or 're im', got '" + value + "'");
  const double re = to_double(c, fields[0]);
  const double im = fields.size() == 2 ? to_double(c, fields[1]) : 0.0;
  return {re, im};
}

std::vector<double> to_list(const Cursor& c, const std::string& value) {
  const auto fields = split_fields(value);
  if (fields.empty()) c.fail("expected at least one number");
  std::vector<double> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(to_double(c, f));
  return out;
}

std::optional<double> to_angle_or_sweep(const Cursor& c,
                                        const std::string& value) {
  if (value == "sweep") return std::nullopt;
  return to_double(c, value);
}

CorrectionChoice to_correction(const Cursor& c, const std::string& value) {
  if (value == "derived") return {CorrectionKind::derived, 0.0};
  if (value == "identity") return {CorrectionKind::identity, 0.0};
  if (value.rfind("phase:", 0) == 0)
    return {CorrectionKind::phase, to_double(c, value.substr(6))};
  c.fail("expected derived, identity, or phase:<radians>, got '" + value + "'");
}

SecularForm to_secular_form(const Cursor& c, const std::string& value) {
  if (value == "projector") return SecularForm::projector;
  if (value == "literal") return SecularForm::literal;
  c.fail("expected projector or literal, got '" + value + "'");
}

OutputFormat to_format(const Cursor& c, const std::string& value) {
  if (value == "csv") return OutputFormat::csv;
  if (value == "json") return OutputFormat::json;
  c.fail("expected csv or json, got '" + value + "'");
}

// returns the index 0..2 encoded by a key like gamma1 / epsilon3
int key_index(const Cursor& c, const std::string& key,
              const std::string& stem) {
  const std::string digits = key.substr(stem.size());
  if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '3')
    return digits[0] - '1';
  c.fail("unknown key '" + key + "'");
}

}  // namespace

ConfigError::ConfigError(const std::string& origin, int line,
                         const std::string& field, const std::string& message)
    : std::runtime_error(build_message(origin, line, field, message)),
      line(line),
      field(field) {}

std::string format_sci17(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

std::vector<double> linspace(double start, double stop, int count) {
  if (count < 2) throw std::invalid_argument("grid needs at least 2 points");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i)
    grid[i] = start + (stop - start) * i / (count - 1);
  grid.back() = stop;
  return grid;
}

void validate_config(const RunConfig& config, const std::string& origin) {
  const Cursor c{origin, 0, ""};

  if (config.physical.has_value() == config.direct.has_value())
    throw ConfigError(origin, 0, "physical/direct",
                      "exactly one of the [physical] and [direct] sections "
                      "must be present");

  if (config.physical) {
    try {
      validate(*config.physical);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(origin, 0, "physical", e.what());
    }
  }
  if (config.direct) {
    if (!std::isfinite(config.direct->j0) || config.direct->j0 <= 0.0)
      throw ConfigError(origin, 0, "direct.j0",
                        "ring coupling must be positive");
    for (double g : config.direct->gamma)
      if (!std::isfinite(g) || g < 0.0)
        throw ConfigError(origin, 0, "direct.gamma",
                          "drive strengths must be nonnegative");
  }

  const auto& p = config.protocol;
  const bool roles_ok = p.sender >= 1 && p.sender <= 3 && p.receiver >= 1 &&
                        p.receiver <= 3 && p.sender != p.receiver;
  if (!roles_ok)
    throw ConfigError(origin, 0, "protocol.sender/receiver",
                      "sender and receiver must be distinct members of "
                      "{1, 2, 3}");
  if (p.k1 < 0)
    throw ConfigError(origin, 0, "protocol.k1", "k1 must be nonnegative");
  if (p.samples < 1)
    throw ConfigError(origin, 0, "protocol.samples",
                      "needs at least one sample");

  const auto& s = config.sweep;
  if (s.theta.count < 2)
    throw ConfigError(origin, 0, "sweep.theta_count",
                      "sweep grids need at least 2 points");
  if (s.tau.count < 2)
    throw ConfigError(origin, 0, "sweep.tau_count",
                      "sweep grids need at least 2 points");
  if (s.t_count < 2)
    throw ConfigError(origin, 0, "sweep.t_count",
                      "time grids need at least 2 points");
  if (s.ratios.empty())
    throw ConfigError(origin, 0, "sweep.ratios",
                      "needs at least one ratio");
  for (double r : s.ratios)
    if (!std::isfinite(r) || r <= 0.0)
      throw ConfigError(origin, 0, "sweep.ratios",
                        "ratios must be positive");

  if (config.units != "kappa" && config.units != "SI")
    throw ConfigError(origin, 0, "physical.units",
                      "expected kappa or SI, got '" + config.units + "'");
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig config;
  PhysicalParams physical{};
  DirectParams direct{};
  bool physical_seen = false;
  bool direct_seen = false;

  std::set<std::string> seen;
  std::string section;
  std::string raw;
  Cursor c{origin, 0, ""};

  while (std::getline(in, raw)) {
    ++c.line;
    c.field.clear();
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos
                                      ? raw
                                      : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') c.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "physical")
        physical_seen = true;
      else if (section == "direct")
        direct_seen = true;
      else if (section != "protocol" && section != "sweep" &&
               section != "output")
        c.fail("unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) c.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) c.fail("missing key before '='");
    if (section.empty()) c.fail("key '" + key + "' outside any [section]");
    c.field = section + "." + key;
    if (!seen.insert(c.field).second) c.fail("duplicate key");

    if (section == "physical") {
      if (key == "kappa")
        physical.kappa = to_double(c, value);
      else if (key == "g")
        physical.g = to_double(c, value);
      else if (key == "delta")
        physical.delta = to_double(c, value);
      else if (key.rfind("epsilon", 0) == 0)
        physical.epsilon[key_index(c, key, "epsilon")] = to_complex(c, value);
      else if (key == "phi21")
        physical.phi[0] = to_double(c, value);
      else if (key == "phi32")
        physical.phi[1] = to_double(c, value);
      else if (key == "phi13")
        physical.phi[2] = to_double(c, value);
      else if (key.rfind("gamma", 0) == 0)
        physical.gamma[key_index(c, key, "gamma")] = to_double(c, value);
      else if (key == "units")
        config.units = value;
      else
        c.fail("unknown key '" + key + "'");
    } else if (section == "direct") {
      if (key == "j0")
        direct.j0 = to_double(c, value);
      else if (key.rfind("gamma", 0) == 0)
        direct.gamma[key_index(c, key, "gamma")] = to_double(c, value);
      else
        c.fail("unknown key '" + key + "'");
    } else if (section == "protocol") {
      if (key == "sender")
        config.protocol.sender = to_int(c, value);
      else if (key == "receiver")
        config.protocol.receiver = to_int(c, value);
      else if (key == "theta")
        config.protocol.theta = to_angle_or_sweep(c, value);
      else if (key == "tau")
        config.protocol.tau = to_angle_or_sweep(c, value);
      else if (key == "k1")
        config.protocol.k1 = to_int(c, value);
      else if (key == "correction")
        config.protocol.correction = to_correction(c, value);
      else if (key == "secular_form")
        config.protocol.secular_form = to_secular_form(c, value);
      else if (key == "seed")
        config.protocol.seed = to_u64(c, value);
      else if (key == "samples")
        config.protocol.samples = to_ll(c, value);
      else
        c.fail("unknown key '" + key + "'");
    } else if (section == "sweep") {
      if (key == "theta_start")
        config.sweep.theta.start = to_double(c, value);
      else if (key == "theta_stop")
        config.sweep.theta.stop = to_double(c, value);
      else if (key == "theta_count")
        config.sweep.theta.count = to_int(c, value);
      else if (key == "tau_start")
        config.sweep.tau.start = to_double(c, value);
      else if (key == "tau_stop")
        config.sweep.tau.stop = to_double(c, value);
      else if (key == "tau_count")
        config.sweep.tau.count = to_int(c, value);
      else if (key == "ratios")
        config.sweep.ratios = to_list(c, value);
      else if (key == "t_count")
        config.sweep.t_count = to_int(c, value);
      else
        c.fail("unknown key '" + key + "'");
    } else {  // output
      if (key == "path")
        config.output.path = value;
      else if (key == "format")
        config.output.format = to_format(c, value);
      else
        c.fail("unknown key '" + key + "'");
    }
  }

  if (physical_seen) config.physical = physical;
  if (direct_seen) config.direct = direct;
  validate_config(config, origin);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open file");
  return parse_config(in, path);
}

void dump_config(const RunConfig& config, std::ostream& out) {
  const auto num = [](double x) { return format_sci17(x); };

  if (config.physical) {
    const auto& p = *config.physical;
    out << "[physical]\n";
    out << "kappa = " << num(p.kappa) << "\n";
    out << "g = " << num(p.g) << "\n";
    out << "delta = " << num(p.delta) << "\n";
    for (int i = 0; i < 3; ++i)
      out << "epsilon" << i + 1 << " = " << num(p.epsilon[i].real()) << " "
          << num(p.epsilon[i].imag()) << "\n";
    out << "phi21 = " << num(p.phi[0]) << "\n";
    out << "phi32 = " << num(p.phi[1]) << "\n";
    out << "phi13 = " << num(p.phi[2]) << "\n";
    for (int i = 0; i < 3; ++i)
      out << "gamma" << i + 1 << " = " << num(p.gamma[i]) << "\n";
    out << "units = " << config.units << "\n";
    out << "\n";
  }
  if (config.direct) {
    out << "[direct]\n";
    out << "j0 = " << num(config.direct->j0) << "\n";
    for (int i = 0; i < 3; ++i)
      out << "gamma" << i + 1 << " = " << num(config.direct->gamma[i]) << "\n";
    out << "\n";
  }

  const auto& p = config.protocol;
  out << "[protocol]\n";
  out << "sender = " << p.sender << "\n";
  out << "receiver = " << p.receiver << "\n";
  out << "theta = " << (p.theta ? num(*p.theta) : "sweep") << "\n";
  out << "tau = " << (p.tau ? num(*p.tau) : "sweep") << "\n";
  out << "k1 = " << p.k1 << "\n";
  switch (p.correction.kind) {
    case CorrectionKind::derived:
      out << "correction = derived\n";
      break;
    case CorrectionKind::identity:
      out << "correction = identity\n";
      break;
    case CorrectionKind::phase:
      out << "correction = phase:" << num(p.correction.phi) << "\n";
      break;
  }
  out << "secular_form = "
      << (p.secular_form == SecularForm::projector ? "projector" : "literal")
      << "\n";
  out << "seed = " << p.seed << "\n";
  out << "samples = " << p.samples << "\n";
  out << "\n";

  const auto& s = config.sweep;
  out << "[sweep]\n";
  out << "theta_start = " << num(s.theta.start) << "\n";
  out << "theta_stop = " << num(s.theta.stop) << "\n";
  out << "theta_count = " << s.theta.count << "\n";
  out << "tau_start = " << num(s.tau.start) << "\n";
  out << "tau_stop = " << num(s.tau.stop) << "\n";
  out << "tau_count = " << s.tau.count << "\n";
  out << "ratios =";
  for (double r : s.ratios) out << " " << num(r);
  out << "\n";
  out << "t_count = " << s.t_count << "\n";
  out << "\n";

  out << "[output]\n";
  if (!config.output.path.empty()) out << "path = " << config.output.path << "\n";
  out << "format = "
      << (config.output.format == OutputFormat::csv ? "csv" : "json") << "\n";
}

}  // namespace aqst::cli
