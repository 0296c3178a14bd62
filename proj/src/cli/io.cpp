#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "plap/cli.hpp"

namespace plap::cli {

namespace {

void append_g17(std::string& out, double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

void append_opt(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v)
    append_g17(out, *v);
  else
    out += "NA";
}

double parse_field(const std::string& field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end)
    throw ConfigError("profile line " + std::to_string(line) + ": malformed number '" + field + "'");
  return v;
}

}  // namespace

std::string profile_csv(const RadialProfile& profile) {
  std::string out = "r,u,du\n";
  out.reserve(64 * profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    append_g17(out, profile.r[i]);
    out += ',';
    append_g17(out, profile.u[i]);
    out += ',';
    append_g17(out, profile.du[i]);
    out += '\n';
  }
  return out;
}

RadialProfile parse_profile_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("profile: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "r,u,du") throw ConfigError("profile: expected header 'r,u,du', got '" + line + "'");
  RadialProfile p;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw ConfigError("profile line " + std::to_string(lineno) + ": expected three columns");
    p.r.push_back(parse_field(line.substr(0, c1), lineno));
    p.u.push_back(parse_field(line.substr(c1 + 1, c2 - c1 - 1), lineno));
    p.du.push_back(parse_field(line.substr(c2 + 1), lineno));
  }
  if (p.size() < 3) throw ConfigError("profile: fewer than three nodes");
  return p;
}

RadialProfile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open profile '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile_csv(ss.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out =
      "q,d_u,d_v,I_u,I_v,I_const,sup_dist_v,sup_dist_u,w1p_dist_v,w1p_dist_u,holder_dist_v,"
      "energy_ratio,q_term_v,accepted_roots,high_energy_roots,status\n";
  for (const auto& r : records) {
    append_g17(out, r.q);
    append_opt(out, r.d_u);
    append_opt(out, r.d_v);
    append_opt(out, r.I_u);
    append_opt(out, r.I_v);
    out += ',';
    append_g17(out, r.I_const);
    append_opt(out, r.sup_dist_v);
    append_opt(out, r.sup_dist_u);
    append_opt(out, r.w1p_dist_v);
    append_opt(out, r.w1p_dist_u);
    append_opt(out, r.holder_dist_v);
    append_opt(out, r.energy_ratio);
    append_opt(out, r.q_term_v);
    out += ',' + std::to_string(r.accepted_roots) + ',' + std::to_string(r.high_energy_roots);
    out += r.failure ? ",failed\n" : ",ok\n";
  }
  return out;
}

}  // namespace plap::cli
