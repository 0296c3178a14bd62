#pragma once

// Command-line front end. Commands are library functions so tests can drive
// them without spawning processes; tools/plap.cpp only forwards argv.
//
// Exit codes: 0 ok, 2 configuration error, 3 certificate failure,
// 4 insufficient data for trend verdicts.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/asymptotics.hpp"
#include "plap/functionals.hpp"
#include "plap/shooting.hpp"

namespace plap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCertificate = 3;
inline constexpr int kExitInsufficient = 4;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutputDirEnv = "PLAP_OUTPUT_DIR";

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int N = 1;
  double p = 1.5;
  std::optional<double> q;
  std::vector<double> q_list{20, 40, 80, 160, 320};

  IntegratorControls controls{.eps0 = 1e-6, .rel_tol = 1e-9, .abs_tol = 1e-12};
  ScanSpec scan;
  std::optional<double> s0;
  std::optional<double> ell;
  std::size_t workers = 0;
  double margin_factor = 10.0;
  CertificateOptions certificate;
  double derivative_window = 0.5;
  std::vector<double> probe_eps{0.01, 0.05, 0.1};
  double delta_probe = 0.5;

  std::filesystem::path output_dir = "plap_out";
  bool write_json = true;
  bool write_csv = true;
  bool timestamp = true;

  /// Throws ConfigError naming the violated invariant.
  ProblemParams problem() const;
  TruncationParams truncation(const ProblemParams& params) const;
  ShootingOptions shooting() const;

  /// Sets one documented key from its textual value; throws ConfigError on an
  /// unknown key or malformed value.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in documentation order.
  std::vector<std::pair<std::string, std::string>> echo() const;
  static const std::vector<std::string>& keys();
};

/// Parses `key = value` lines ('#' starts a comment) into cfg.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "config");
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Profile CSV: header "r,u,du", one node per line, 17 significant digits.
std::string profile_csv(const RadialProfile& profile);
RadialProfile parse_profile_csv(const std::string& text);
RadialProfile read_profile_csv(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string sweep_csv(const std::vector<SweepRecord>& records);

struct CommandResult {
  int exit_code = kExitOk;
  std::string report_json;
  std::vector<std::filesystem::path> files;
};

CommandResult cmd_solve(const RunConfig& cfg, std::ostream& out);
CommandResult cmd_sweep(const RunConfig& cfg, std::ostream& out);
CommandResult cmd_limit(const RunConfig& cfg, std::ostream& out);
CommandResult cmd_verify(const RunConfig& cfg, const std::filesystem::path& profile_path, std::ostream& out);

/// Full argv entry point (subcommands solve | sweep | limit | verify).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace plap::cli
