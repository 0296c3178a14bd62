#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>

#include "plap/cli.hpp"

namespace plap::cli {

namespace {

struct SubcommandArgs {
  explicit SubcommandArgs(CLI::App* a) : app(a) {}
  CLI::App* app;
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::string profile_path;
};

void add_key_options(SubcommandArgs& args) {
  args.app->add_option("--config", args.config_path, "key = value config file");
  for (const auto& key : RunConfig::keys())
    args.app->add_option("--" + key, args.flags[key], "override config key '" + key + "'");
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial Neumann p-Laplacian solver: shooting, certificates, q-sweeps and the limit profile"};
  app.set_version_flag("--version", std::string("plap ") + kVersion);
  app.require_subcommand(1);

  SubcommandArgs solve{app.add_subcommand("solve", "find and certify the non-constant solutions for one q")};
  SubcommandArgs sweep{app.add_subcommand("sweep", "solve over q_list and report trend verdicts")};
  SubcommandArgs limit{app.add_subcommand("limit", "compute the limit profile G for N, p")};
  SubcommandArgs verify{app.add_subcommand("verify", "run the certificate battery on a profile CSV")};
  for (auto* s : {&solve, &sweep, &limit, &verify}) add_key_options(*s);
  verify.app->add_option("profile", verify.profile_path, "profile CSV with header r,u,du")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "plap " << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitConfig;
  }

  SubcommandArgs* chosen = nullptr;
  for (auto* s : {&solve, &sweep, &limit, &verify})
    if (s->app->parsed()) chosen = s;

  RunConfig cfg;
  try {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) cfg.output_dir = dir;
    if (!chosen->config_path.empty()) apply_config_file(cfg, chosen->config_path);
    for (const auto& key : RunConfig::keys())
      if (chosen->app->count("--" + key) > 0) cfg.set(key, chosen->flags[key]);
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << '\n';
    return kExitConfig;
  }

  try {
    CommandResult res;
    if (chosen == &solve)
      res = cmd_solve(cfg, out);
    else if (chosen == &sweep)
      res = cmd_sweep(cfg, out);
    else if (chosen == &limit)
      res = cmd_limit(cfg, out);
    else
      res = cmd_verify(cfg, verify.profile_path, out);
    for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
    return res.exit_code;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace plap::cli
