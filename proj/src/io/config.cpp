#include "nematorus/io/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nematorus/errors.hpp"
#include "nematorus/io/csv.hpp"

namespace nematorus::io {

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::constant_analysis, "constant-analysis"},
    {Command::flow, "flow"},
    {Command::sweep_mu, "sweep-mu"},
    {Command::winding_table, "winding-table"},
    {Command::geometry_dump, "geometry-dump"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  std::ostringstream os;
  os << "invalid value '" << value << "' for " << key << " (expected " << expected << ")";
  throw ConfigError(os.str());
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view v) {
  Int out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "an integer");
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  try {
    return parse_number(v);
  } catch (const ConfigError&) {
    bad_value(key, v, "a finite number");
  }
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommands)
    if (n == name) return cmd;
  bad_value("command", name, "constant-analysis, flow, sweep-mu, winding-table or geometry-dump");
}

std::string format_winding(WindingNumber h) { return std::to_string(h.h_theta) + "," + std::to_string(h.h_phi); }

WindingNumber parse_winding(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) bad_value("winding", text, "H,K");
  return {parse_integer<int>("winding", trim(text.substr(0, comma))),
          parse_integer<int>("winding", trim(text.substr(comma + 1)))};
}

std::string format_windings(const std::vector<WindingNumber>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) out += (i ? ";" : "") + format_winding(list[i]);
  return out;
}

std::vector<WindingNumber> parse_windings(std::string_view text) {
  std::vector<WindingNumber> out;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const auto item = trim(text.substr(0, semi));
    if (!item.empty()) out.push_back(parse_winding(item));
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  if (out.empty()) bad_value("table.windings", text, "a list H,K;H,K;...");
  return out;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (key == "command") c.command = parse_command(v);
  else if (key == "geometry.mu") c.mu = parse_real(key, v);
  else if (key == "geometry.R") c.R = parse_real(key, v);
  else if (key == "geometry.r") c.r = parse_real(key, v);
  else if (key == "constants.k") c.k = parse_real(key, v);
  else if (key == "constants.k1") c.k1 = parse_real(key, v);
  else if (key == "constants.k2") c.k2 = parse_real(key, v);
  else if (key == "constants.k3") c.k3 = parse_real(key, v);
  else if (key == "grid.n_theta") c.n_theta = parse_integer<int>(key, v);
  else if (key == "grid.n_phi") c.n_phi = parse_integer<int>(key, v);
  else if (key == "flow.dt") c.dt = v == "auto" ? std::nullopt : std::optional<double>(parse_real(key, v));
  else if (key == "flow.tol") c.tol = parse_real(key, v);
  else if (key == "flow.max_steps") c.max_steps = parse_integer<long>(key, v);
  else if (key == "flow.snapshot_every") c.snapshot_every = parse_integer<long>(key, v);
  else if (key == "flow.history_every") c.history_every = parse_integer<long>(key, v);
  else if (key == "flow.flat_energy_stop") c.flat_energy_stop = parse_bool(key, v);
  else if (key == "seed.winding") c.winding = parse_winding(v);
  else if (key == "seed.alpha0") c.alpha0 = parse_real(key, v);
  else if (key == "seed.noise") c.noise = parse_real(key, v);
  else if (key == "seed.rng_seed") c.rng_seed = parse_integer<std::uint64_t>(key, v);
  else if (key == "sweep.mu_lo") c.mu_lo = parse_real(key, v);
  else if (key == "sweep.mu_hi") c.mu_hi = parse_real(key, v);
  else if (key == "sweep.mu_tol") c.mu_tol = parse_real(key, v);
  else if (key == "table.windings") c.windings = parse_windings(v);
  else if (key == "output.dir") c.output_dir = std::string(v);
  else if (key == "jobs") c.jobs = parse_integer<unsigned>(key, v);
  else throw ConfigError("unknown key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
  RunConfig cfg = base;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'");
      const auto key = trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError("empty key");
      apply_setting(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize(const RunConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).push_back('\n');
  };
  auto put_opt = [&](std::string_view key, const std::optional<double>& v) {
    if (v) put(key, format_number(*v));
  };
  put("command", std::string(to_string(c.command)));
  put_opt("geometry.mu", c.mu);
  put_opt("geometry.R", c.R);
  put_opt("geometry.r", c.r);
  put_opt("constants.k", c.k);
  put_opt("constants.k1", c.k1);
  put_opt("constants.k2", c.k2);
  put_opt("constants.k3", c.k3);
  put("grid.n_theta", std::to_string(c.n_theta));
  put("grid.n_phi", std::to_string(c.n_phi));
  put("flow.dt", c.dt ? format_number(*c.dt) : "auto");
  put("flow.tol", format_number(c.tol));
  put("flow.max_steps", std::to_string(c.max_steps));
  put("flow.snapshot_every", std::to_string(c.snapshot_every));
  put("flow.history_every", std::to_string(c.history_every));
  put("flow.flat_energy_stop", c.flat_energy_stop ? "true" : "false");
  put("seed.winding", format_winding(c.winding));
  put("seed.alpha0", format_number(c.alpha0));
  put_opt("seed.noise", c.noise);
  put("seed.rng_seed", std::to_string(c.rng_seed));
  put("sweep.mu_lo", format_number(c.mu_lo));
  put("sweep.mu_hi", format_number(c.mu_hi));
  put("sweep.mu_tol", format_number(c.mu_tol));
  put("table.windings", format_windings(c.windings));
  if (!c.output_dir.empty()) put("output.dir", c.output_dir);
  put("jobs", std::to_string(c.jobs));
  return out;
}

std::string stamp(const RunConfig& c) {
  std::string out = "nematorus " NEMATORUS_VERSION;
  std::istringstream lines(serialize(c));
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("output.dir", 0) == 0 || line.rfind("jobs", 0) == 0) continue;  // do not affect results
    out += "; " + line;
  }
  out += "; resolved.mu = " + format_number(c.ratio());
  out += "; rng_seed = " + std::to_string(c.rng_seed);
  return out;
}

double RunConfig::ratio() const {
  if (R && r) return *R / *r;
  return mu.value_or(1.4);
}

TorusGeometry<double> RunConfig::geometry() const {
  if (R && r) return TorusGeometry<double>(*R, *r);
  return TorusGeometry<double>::from_ratio(ratio());
}

bool RunConfig::general_constants() const { return k1.has_value(); }

ElasticConstants<double> RunConfig::constants() const {
  if (general_constants()) return {*k1, *k2, *k3};
  return ElasticConstants<double>::one_constant(k.value_or(1.0));
}

Grid RunConfig::grid() const { return Grid(n_theta, n_phi); }

double RunConfig::seed_noise() const {
  if (noise) return *noise;
  return command == Command::winding_table ? 0.05 : 0.0;
}

FlowParams<double> RunConfig::flow_params() const {
  FlowParams<double> p;
  p.k = constants().max();
  p.dt = dt;
  p.tol = tol;
  p.max_steps = max_steps;
  p.snapshot_every = snapshot_every;
  p.history_every = history_every;
  p.flat_energy_stop = flat_energy_stop;
  p.rng_seed = rng_seed;
  return p;
}

std::filesystem::path RunConfig::resolved_output_dir() const {
  if (!output_dir.empty()) return output_dir;
  if (const char* env = std::getenv("NEMATORUS_OUT"); env && *env) return env;
  return ".";
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (mu && (R || r)) fail("give either geometry.mu or geometry.R and geometry.r, not both");
  if (R.has_value() != r.has_value()) fail("geometry.R and geometry.r must be given together");
  const bool any_general = k1 || k2 || k3;
  if (any_general && !(k1 && k2 && k3)) fail("constants.k1, k2 and k3 must be given together");
  if (any_general && k) fail("give either constants.k or constants.k1..k3, not both");
  try {
    (void)geometry();
    constants().validate();
    (void)grid();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(e.what());
  }
  if (dt && !(*dt > 0)) fail("flow.dt must be positive or auto");
  if (!(tol > 0)) fail("flow.tol must be positive");
  if (max_steps < 1) fail("flow.max_steps must be >= 1");
  if (snapshot_every < 0) fail("flow.snapshot_every must be >= 0");
  if (history_every < 1) fail("flow.history_every must be >= 1");
  if (noise && !(*noise >= 0)) fail("seed.noise must be >= 0");
  if (!(mu_lo < mu_hi)) fail("sweep.mu_lo must be below sweep.mu_hi");
  if (!(mu_tol > 0)) fail("sweep.mu_tol must be positive");
  if (jobs < 1) fail("jobs must be >= 1");
}

}  // namespace nematorus::io
