#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "plap/cli.hpp"

namespace plap::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last)
    throw ConfigError("key '" + key + "': expected a real number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const auto v = parse_int(key, text);
  if (v < 0) throw ConfigError("key '" + key + "': must be non-negative");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': expected a comma-separated list of reals");
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

struct KeySpec {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"N", [](RunConfig& c, const std::string& v) { c.N = static_cast<int>(parse_int("N", v)); },
       [](const RunConfig& c) { return std::to_string(c.N); }},
      {"p", [](RunConfig& c, const std::string& v) { c.p = parse_double("p", v); },
       [](const RunConfig& c) { return num(c.p); }},
      {"q", [](RunConfig& c, const std::string& v) { c.q = parse_double("q", v); },
       [](const RunConfig& c) { return c.q ? num(*c.q) : std::string(); }},
      {"q_list", [](RunConfig& c, const std::string& v) { c.q_list = parse_list("q_list", v); },
       [](const RunConfig& c) { return list(c.q_list); }},
      {"eps0", [](RunConfig& c, const std::string& v) { c.controls.eps0 = parse_double("eps0", v); },
       [](const RunConfig& c) { return num(c.controls.eps0); }},
      {"rel_tol", [](RunConfig& c, const std::string& v) { c.controls.rel_tol = parse_double("rel_tol", v); },
       [](const RunConfig& c) { return num(c.controls.rel_tol); }},
      {"abs_tol", [](RunConfig& c, const std::string& v) { c.controls.abs_tol = parse_double("abs_tol", v); },
       [](const RunConfig& c) { return num(c.controls.abs_tol); }},
      {"u_cap", [](RunConfig& c, const std::string& v) { c.controls.u_cap = parse_double("u_cap", v); },
       [](const RunConfig& c) { return num(c.controls.u_cap); }},
      {"max_steps", [](RunConfig& c, const std::string& v) { c.controls.max_steps = parse_count("max_steps", v); },
       [](const RunConfig& c) { return std::to_string(c.controls.max_steps); }},
      {"grid", [](RunConfig& c, const std::string& v) { c.controls.report_intervals = parse_count("grid", v); },
       [](const RunConfig& c) { return std::to_string(c.controls.report_intervals); }},
      {"scan_points", [](RunConfig& c, const std::string& v) { c.scan.log_points = parse_count("scan_points", v); },
       [](const RunConfig& c) { return std::to_string(c.scan.log_points); }},
      {"d_min", [](RunConfig& c, const std::string& v) { c.scan.d_min = parse_double("d_min", v); },
       [](const RunConfig& c) { return num(c.scan.d_min); }},
      {"min_gap", [](RunConfig& c, const std::string& v) { c.scan.min_gap = parse_double("min_gap", v); },
       [](const RunConfig& c) { return num(c.scan.min_gap); }},
      {"ladder_spread",
       [](RunConfig& c, const std::string& v) { c.scan.ladder_spread = parse_double("ladder_spread", v); },
       [](const RunConfig& c) { return num(c.scan.ladder_spread); }},
      {"ladder_per_octave",
       [](RunConfig& c, const std::string& v) { c.scan.ladder_per_octave = parse_count("ladder_per_octave", v); },
       [](const RunConfig& c) { return std::to_string(c.scan.ladder_per_octave); }},
      {"exclusion_radius",
       [](RunConfig& c, const std::string& v) { c.scan.exclusion_radius = parse_double("exclusion_radius", v); },
       [](const RunConfig& c) { return num(c.scan.exclusion_radius); }},
      {"d_tol", [](RunConfig& c, const std::string& v) { c.scan.d_tol = parse_double("d_tol", v); },
       [](const RunConfig& c) { return num(c.scan.d_tol); }},
      {"s0", [](RunConfig& c, const std::string& v) { c.s0 = parse_double("s0", v); },
       [](const RunConfig& c) { return c.s0 ? num(*c.s0) : std::string(); }},
      {"ell", [](RunConfig& c, const std::string& v) { c.ell = parse_double("ell", v); },
       [](const RunConfig& c) { return c.ell ? num(*c.ell) : std::string(); }},
      {"workers", [](RunConfig& c, const std::string& v) { c.workers = parse_count("workers", v); },
       [](const RunConfig& c) { return std::to_string(c.workers); }},
      {"margin_factor",
       [](RunConfig& c, const std::string& v) { c.margin_factor = parse_double("margin_factor", v); },
       [](const RunConfig& c) { return num(c.margin_factor); }},
      {"tol_neumann",
       [](RunConfig& c, const std::string& v) { c.certificate.tol_neumann = parse_double("tol_neumann", v); },
       [](const RunConfig& c) { return num(c.certificate.tol_neumann); }},
      {"tol_cone", [](RunConfig& c, const std::string& v) { c.certificate.tol_cone = parse_double("tol_cone", v); },
       [](const RunConfig& c) { return num(c.certificate.tol_cone); }},
      {"tol_bounds",
       [](RunConfig& c, const std::string& v) { c.certificate.tol_bounds = parse_double("tol_bounds", v); },
       [](const RunConfig& c) { return num(c.certificate.tol_bounds); }},
      {"tol_lyapunov",
       [](RunConfig& c, const std::string& v) { c.certificate.tol_lyapunov = parse_double("tol_lyapunov", v); },
       [](const RunConfig& c) { return num(c.certificate.tol_lyapunov); }},
      {"tol_nehari",
       [](RunConfig& c, const std::string& v) { c.certificate.tol_nehari = parse_double("tol_nehari", v); },
       [](const RunConfig& c) { return num(c.certificate.tol_nehari); }},
      {"tol_residual",
       [](RunConfig& c, const std::string& v) { c.certificate.tol_residual = parse_double("tol_residual", v); },
       [](const RunConfig& c) { return num(c.certificate.tol_residual); }},
      {"tol_slack", [](RunConfig& c, const std::string& v) { c.certificate.tol_slack = parse_double("tol_slack", v); },
       [](const RunConfig& c) { return num(c.certificate.tol_slack); }},
      {"holder_exponent",
       [](RunConfig& c, const std::string& v) {
         c.certificate.holder_exponent = parse_double("holder_exponent", v);
       },
       [](const RunConfig& c) { return num(c.certificate.holder_exponent); }},
      {"derivative_window",
       [](RunConfig& c, const std::string& v) { c.derivative_window = parse_double("derivative_window", v); },
       [](const RunConfig& c) { return num(c.derivative_window); }},
      {"probe_eps", [](RunConfig& c, const std::string& v) { c.probe_eps = parse_list("probe_eps", v); },
       [](const RunConfig& c) { return list(c.probe_eps); }},
      {"delta_probe", [](RunConfig& c, const std::string& v) { c.delta_probe = parse_double("delta_probe", v); },
       [](const RunConfig& c) { return num(c.delta_probe); }},
      {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
       [](const RunConfig& c) { return c.output_dir.string(); }},
      {"formats",
       [](RunConfig& c, const std::string& v) {
         c.write_json = c.write_csv = false;
         std::istringstream is(v);
         std::string item;
         while (std::getline(is, item, ',')) {
           const auto t = trim(item);
           if (t == "json")
             c.write_json = true;
           else if (t == "csv")
             c.write_csv = true;
           else if (!t.empty())
             throw ConfigError("key 'formats': unknown format '" + t + "' (expected json, csv)");
         }
       },
       [](const RunConfig& c) {
         std::string s;
         if (c.write_json) s += "json";
         if (c.write_csv) s += s.empty() ? "csv" : ",csv";
         return s;
       }},
      {"timestamp", [](RunConfig& c, const std::string& v) { c.timestamp = parse_bool("timestamp", v); },
       [](const RunConfig& c) { return std::string(c.timestamp ? "true" : "false"); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.key);
    return out;
  }();
  return names;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& k : key_table()) {
    if (k.key == key) {
      k.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : key_table()) out.emplace_back(k.key, k.get(*this));
  return out;
}

ProblemParams RunConfig::problem() const {
  if (!q) throw ConfigError("invariant q > p violated: q is not set");
  try {
    return ProblemParams(N, p, *q);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
}

TruncationParams RunConfig::truncation(const ProblemParams& params) const {
  auto t = TruncationParams::defaults(params);
  if (s0) t.s0 = *s0;
  if (ell) t.ell = *ell;
  try {
    t.validate(params);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  return t;
}

ShootingOptions RunConfig::shooting() const {
  ShootingOptions opt;
  opt.scan = scan;
  opt.controls = controls;
  opt.workers = workers;
  opt.tol_cone = certificate.tol_cone;
  opt.tol_neumann = certificate.tol_neumann;
  opt.margin_factor = margin_factor;
  return opt;
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ConfigError& ex) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path.string());
}

}  // namespace plap::cli
