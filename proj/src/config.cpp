#include "ve2d/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ve2d/error.hpp"

namespace ve2d {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream msg;
  msg << "config line " << line << ": " << what;
  throw ConfigError(msg.str());
}

double to_double(const std::string& v, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) fail(line, "not a number: '" + v + "'");
  return out;
}

long long to_int(const std::string& v, int line) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) fail(line, "not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, int line) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  fail(line, "not a boolean: '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
  try {
    (void)grid();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(initial.amplitude >= 0.0)) throw ConfigError("amplitude must be >= 0");
  if (!(initial.support_radius > 0.0) || initial.support_radius >= initial.box_len / 4.0) {
    throw ConfigError("support_radius must lie in (0, L/4)");
  }
  if (mu.empty()) throw ConfigError("mu list is empty");
  for (double m : mu) {
    if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("every mu must lie in [0, 1]");
  }
  if (!(t_final > 0.0) || t_final > initial.box_len / 4.0 * (1.0 + 1e-12)) {
    throw ConfigError("t_final must lie in (0, L/4]");
  }
  if (!(sample_interval > 0.0) || sample_interval > t_final) {
    throw ConfigError("sample_interval must lie in (0, t_final]");
  }
  if (k_max < 2 || k_max > 3) throw ConfigError("k_max must be 2 or 3");
  try {
    stepper.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = lower(trim(std::string_view(s).substr(1, s.size() - 2)));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = lower(trim(std::string_view(s).substr(0, eq)));
    const std::string val = trim(std::string_view(s).substr(eq + 1));
    const std::string full = section + "." + key;

    if (full == "grid.n") {
      cfg.initial.n = static_cast<int>(to_int(val, line));
    } else if (full == "grid.l") {
      cfg.initial.box_len = to_double(val, line);
    } else if (full == "initial.amplitude") {
      cfg.initial.amplitude = to_double(val, line);
    } else if (full == "initial.profile") {
      const std::string p = lower(val);
      if (p == "gaussian") cfg.initial.profile = ProfileKind::GaussianBump;
      else if (p == "ring") cfg.initial.profile = ProfileKind::Ring;
      else if (p == "seed") cfg.initial.profile = ProfileKind::SpectralSeed;
      else fail(line, "unknown profile '" + val + "'");
    } else if (full == "initial.support_radius") {
      cfg.initial.support_radius = to_double(val, line);
    } else if (full == "initial.seed") {
      const long long seed = to_int(val, line);
      if (seed < 0) fail(line, "seed must be non-negative");
      cfg.initial.seed = static_cast<std::uint64_t>(seed);
    } else if (full == "run.mu") {
      cfg.mu.clear();
      std::istringstream list(val);
      std::string item;
      while (std::getline(list, item, ',')) cfg.mu.push_back(to_double(trim(item), line));
    } else if (full == "run.t_final") {
      cfg.t_final = to_double(val, line);
    } else if (full == "run.sample_interval") {
      cfg.sample_interval = to_double(val, line);
    } else if (full == "run.k_max") {
      cfg.k_max = static_cast<int>(to_int(val, line));
    } else if (full == "run.output_dir") {
      cfg.output_dir = val;
    } else if (full == "run.snapshots") {
      cfg.snapshots = to_bool(val, line);
    } else if (full == "stepper.dt") {
      cfg.stepper.dt = to_double(val, line);
    } else if (full == "stepper.cfl") {
      cfg.stepper.cfl_factor = to_double(val, line);
    } else if (full == "stepper.scheme") {
      const std::string p = lower(val);
      if (p == "if-rk4") cfg.stepper.scheme = Scheme::IntegratingFactorRK4;
      else if (p == "imex") cfg.stepper.scheme = Scheme::ImexRK;
      else fail(line, "unknown scheme '" + val + "'");
    } else if (full == "stepper.dealias") {
      cfg.stepper.dealias = to_bool(val, line);
    } else {
      fail(line, "unknown key '" + full + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

}  // namespace ve2d
