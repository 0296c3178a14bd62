#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "plap/cli.hpp"

namespace plap::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num_tag(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json header(const RunConfig& cfg, const std::string& command) {
  json j;
  j["tool"] = "plap";
  j["version"] = kVersion;
  j["command"] = command;
  j["timestamp"] = cfg.timestamp ? json(utc_now()) : json(nullptr);
  json echo = json::object();
  for (const auto& [k, v] : cfg.echo()) echo[k] = v;
  j["config"] = echo;
  return j;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json problem_json(const ProblemParams& params, const TruncationParams& trunc) {
  json j;
  j["N"] = params.N();
  j["p"] = params.p();
  j["q"] = params.q();
  j["conjugate_exponent"] = params.conjugate_exponent();
  j["ball_volume"] = params.ball_volume();
  j["constant_energy"] = constant_energy(params);
  j["value_bound"] = params.value_bound();
  j["derivative_bound"] = params.derivative_bound();
  j["s0"] = trunc.s0;
  j["ell"] = trunc.ell;
  return j;
}

json energy_json(const EnergyReport& e) {
  json j;
  j["energy"] = e.energy;
  j["w1p_p"] = e.w1p_p;
  j["sup"] = e.sup;
  j["holder"] = e.holder;
  j["holder_exponent"] = e.holder_exponent;
  j["nehari_residual"] = e.nehari_residual;
  j["q_term"] = e.q_term;
  j["quadrature_error"] = e.quadrature_error;
  j["truncated"] = e.truncated;
  return j;
}

json certificate_json(const Certificate& cert) {
  json checks = json::array();
  for (const auto& c : cert.checks) {
    json row;
    row["name"] = c.name;
    row["value"] = c.value;
    row["threshold"] = c.threshold;
    row["passed"] = c.passed;
    row["detail"] = c.detail;
    checks.push_back(row);
  }
  json j;
  j["passed"] = cert.passed();
  j["checks"] = checks;
  return j;
}

void print_certificate(const Certificate& cert, std::ostream& out, const std::string& indent) {
  for (const auto& c : cert.checks) {
    out << indent << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
        << "  threshold=" << c.threshold;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << '\n';
  }
}

RadialProfile minus_one(const RadialProfile& g) {
  RadialProfile d = g;
  for (double& x : d.u) x -= 1.0;
  return d;
}

RadialProfile r_minus_one(std::span<const double> grid) {
  RadialProfile d = one_minus_r(grid);
  for (double& x : d.u) x = -x;
  for (double& x : d.du) x = -x;
  return d;
}

void finish(CommandResult& res, const RunConfig& cfg, const json& report, const std::string& tag) {
  res.report_json = report.dump(2) + "\n";
  if (cfg.write_json) {
    const auto path = cfg.output_dir / (tag + ".json");
    write_file_atomic(path, res.report_json);
    res.files.push_back(path);
  }
}

template <typename Fn>
CommandResult guarded(std::ostream& out, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& ex) {
    out << "config error: " << ex.what() << '\n';
    return CommandResult{kExitConfig, {}, {}};
  }
}

}  // namespace

CommandResult cmd_solve(const RunConfig& cfg, std::ostream& out) {
  return guarded(out, [&] {
    const auto params = cfg.problem();
    const auto trunc = cfg.truncation(params);
    CommandResult res;
    const std::string tag =
        "solve_N" + std::to_string(params.N()) + "_p" + num_tag(params.p()) + "_q" + num_tag(params.q());

    const auto G = compute_G(params, cfg.controls);
    auto opt = cfg.shooting();
    opt.trunc = trunc;
    const auto set = find_solutions(params, opt);

    json report = header(cfg, "solve");
    report["problem"] = problem_json(params, trunc);
    report["scan"] = {{"points", set.scan_d.size()}, {"duplicates_collapsed", set.duplicates_collapsed}};

    out << "solve N=" << params.N() << " p=" << params.p() << " q=" << params.q()
        << "  I_q(1)=" << set.constant_energy << '\n';

    bool cert_failed = false;
    json roots = json::array();
    std::vector<std::string> failures;
    std::size_t k = 0;
    for (const auto& root : set.roots) {
      json row;
      row["index"] = k;
      row["d"] = root.d;
      row["bracket"] = {root.bracket_lo, root.bracket_hi};
      row["status"] = root.accepted() ? "accepted" : "rejected";
      row["rejection"] = root.rejection ? json(*root.rejection) : json(nullptr);
      row["label"] = to_string(root.label);
      row["energy_gap"] = root.energy_gap;
      row["margin_tol"] = root.margin_tol;
      row["energy"] = energy_json(root.energy);
      const auto& prof = root.profile();
      if (!prof.empty()) {
        row["u0"] = prof.u.front();
        row["u1"] = prof.u.back();
        row["du1"] = prof.du.back();
      }
      out << "  root " << k << ": d=" << root.d << "  " << (root.accepted() ? "accepted" : "rejected") << "  "
          << to_string(root.label) << "  I=" << root.energy.energy << "  gap=" << root.energy_gap;
      if (root.rejection) out << "  (" << *root.rejection << ")";
      out << '\n';
      if (root.accepted()) {
        const auto cert = certify_solution(prof, params, trunc, &G.profile, cfg.certificate);
        row["certificate"] = certificate_json(cert);
        print_certificate(cert, out, "    ");
        if (!cert.passed()) {
          cert_failed = true;
          failures.push_back("root " + std::to_string(k) + " (d = " + num_tag(root.d) + "): certificate failed");
        }
        if (cfg.write_csv) {
          const auto path = cfg.output_dir / (tag + "_root" + std::to_string(k) + ".csv");
          write_file_atomic(path, profile_csv(prof));
          res.files.push_back(path);
          row["profile_csv"] = path.filename().string();
        }
      }
      roots.push_back(row);
      ++k;
    }
    report["roots"] = roots;

    json summary;
    const auto accepted = set.accepted();
    summary["accepted"] = accepted.size();
    summary["low_energy"] = set.count(RootLabel::LowEnergy);
    summary["high_energy"] = set.count(RootLabel::HighEnergy);
    summary["ambiguous"] = set.count(RootLabel::Ambiguous);
    const auto* lo = set.low_energy();
    const auto* hi = set.high_energy();
    summary["energy_ordering"] = lo && hi && lo->energy.energy < set.constant_energy &&
                                 set.constant_energy < hi->energy.energy;
    if (accepted.empty()) {
      summary["message"] = "no non-constant solutions found";
      out << "no non-constant solutions found\n";
    }
    report["summary"] = summary;

    std::vector<NamedDirection> dirs{{"G - 1", minus_one(G.profile)},
                                     {"r - 1", r_minus_one(G.profile.r)},
                                     {"1 - r", one_minus_r(G.profile.r)}};
    json probe = json::array();
    for (const auto& row : local_min_probe(params, trunc, dirs, cfg.probe_eps, cfg.delta_probe)) {
      json j;
      j["direction"] = row.direction;
      j["eps"] = row.eps;
      j["scale"] = row.scale;
      j["distance"] = row.distance;
      j["energy_gap"] = row.energy_gap;
      j["in_cone"] = row.in_cone;
      j["error"] = row.error ? json(*row.error) : json(nullptr);
      probe.push_back(j);
    }
    report["local_min_probe"] = probe;
    report["failures"] = failures;

    res.exit_code = cert_failed ? kExitCertificate : kExitOk;
    finish(res, cfg, report, tag);
    return res;
  });
}

CommandResult cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  return guarded(out, [&]() -> CommandResult {
    if (cfg.q_list.size() < 2) {
      out << "insufficient data: q_list needs at least two entries for trend verdicts\n";
      return CommandResult{kExitInsufficient, {}, {}};
    }
    RunConfig base_cfg = cfg;
    base_cfg.q = cfg.q_list.front();
    const auto base = base_cfg.problem();
    for (std::size_t i = 0; i < cfg.q_list.size(); ++i) {
      if (!(cfg.q_list[i] > base.p()))
        throw ConfigError("invariant q > p violated in q_list (p = " + num_tag(base.p()) +
                          ", q = " + num_tag(cfg.q_list[i]) + ")");
      if (i > 0 && !(cfg.q_list[i] > cfg.q_list[i - 1]))
        throw ConfigError("q_list must be strictly increasing");
    }
    for (double q : cfg.q_list) cfg.truncation(base.with_q(q));

    const auto G = compute_G(base, cfg.controls);
    SweepOptions sopt;
    sopt.shooting = cfg.shooting();
    if (cfg.s0 || cfg.ell) sopt.shooting.trunc = cfg.truncation(base);
    sopt.workers = cfg.workers;
    const auto entries = sweep(base, cfg.q_list, G, sopt);

    std::vector<SweepRecord> records;
    for (const auto& e : entries) records.push_back(e.record);
    const auto deriv = derivative_convergence_check(entries, G, cfg.derivative_window);

    CommandResult res;
    const std::string tag = "sweep_N" + std::to_string(base.N()) + "_p" + num_tag(base.p());

    auto series = [&](auto get) {
      std::vector<std::optional<double>> s;
      for (const auto& r : records) s.push_back(get(r));
      return s;
    };
    const auto sup_v = series([](const SweepRecord& r) { return r.sup_dist_v; });
    const auto w1p_v = series([](const SweepRecord& r) { return r.w1p_dist_v; });
    const auto gap_v = series([](const SweepRecord& r) {
      return r.energy_ratio ? std::optional<double>(std::abs(*r.energy_ratio - 1.0)) : std::nullopt;
    });
    const auto qterm_v = series([](const SweepRecord& r) { return r.q_term_v; });
    const auto sup_u = series([](const SweepRecord& r) { return r.sup_dist_u; });
    std::vector<std::optional<double>> dev_u;
    for (const auto& d : deriv) dev_u.push_back(d.u_dev);

    auto halved = [](const std::vector<std::optional<double>>& s) {
      return s.size() >= 2 && s.front() && s.back() && *s.back() < 0.5 * *s.front();
    };
    bool ordering = true;
    for (const auto& r : records)
      ordering = ordering && r.I_u && r.I_v && *r.I_u < r.I_const && r.I_const < *r.I_v;

    json verdicts;
    auto verdict = [&](const std::string& name, const std::vector<std::optional<double>>& s, bool with_half) {
      json v;
      v["strictly_decreasing"] = strictly_decreasing(s);
      if (with_half) v["final_below_half"] = halved(s);
      verdicts[name] = v;
      out << "  " << name << ": strictly_decreasing=" << (strictly_decreasing(s) ? "true" : "false");
      if (with_half) out << " final_below_half=" << (halved(s) ? "true" : "false");
      out << '\n';
    };
    out << "sweep N=" << base.N() << " p=" << base.p() << " over " << records.size() << " q values\n";
    verdict("sup_dist_v", sup_v, true);
    verdict("w1p_dist_v", w1p_v, true);
    verdict("energy_ratio_gap", gap_v, true);
    verdict("q_term_v", qterm_v, true);
    verdict("sup_dist_u", sup_u, false);
    verdict("derivative_dev_u", dev_u, false);
    verdicts["energy_ordering"] = ordering;
    out << "  energy_ordering: " << (ordering ? "true" : "false") << '\n';

    // Same verdicts restricted to the records that found both branches.
    json subset;
    {
      auto keep = [&](const std::vector<std::optional<double>>& s) {
        std::vector<std::optional<double>> k;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (!records[i].failure) k.push_back(s[i]);
        return k;
      };
      auto sub = [&](const std::string& name, const std::vector<std::optional<double>>& s, bool with_half) {
        const auto k = keep(s);
        json v;
        v["strictly_decreasing"] = strictly_decreasing(k);
        if (with_half) v["final_below_half"] = halved(k);
        subset[name] = v;
      };
      sub("sup_dist_v", sup_v, true);
      sub("w1p_dist_v", w1p_v, true);
      sub("energy_ratio_gap", gap_v, true);
      sub("q_term_v", qterm_v, true);
      sub("sup_dist_u", sup_u, false);
      sub("derivative_dev_u", dev_u, false);
      bool sub_order = true;
      for (const auto& r : records)
        if (!r.failure) sub_order = sub_order && *r.I_u < r.I_const && r.I_const < *r.I_v;
      subset["energy_ordering"] = sub_order;
    }

    bool all_true = ordering;
    for (const auto& [name, v] : verdicts.items())
      if (v.is_object())
        for (const auto& [k, b] : v.items()) all_true = all_true && b.get<bool>();

    json fits = json::object();
    auto fit = [&](const std::string& name, const std::vector<std::optional<double>>& s) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) pts.emplace_back(records[i].q, *s[i]);
      try {
        const auto f = rate_fit(pts);
        fits[name] = {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"used", f.used}};
      } catch (const std::invalid_argument&) {
        fits[name] = nullptr;
      }
    };
    fit("sup_dist_v", sup_v);
    fit("w1p_dist_v", w1p_v);
    fit("energy_ratio_gap", gap_v);
    fit("q_term_v", qterm_v);
    fit("sup_dist_u", sup_u);

    json rows = json::array();
    std::vector<std::string> failures;
    std::size_t ok = 0;
    for (const auto& r : records) {
      json j;
      j["q"] = r.q;
      j["d_u"] = opt_json(r.d_u);
      j["d_v"] = opt_json(r.d_v);
      j["I_u"] = opt_json(r.I_u);
      j["I_v"] = opt_json(r.I_v);
      j["I_const"] = r.I_const;
      j["sup_dist_v"] = opt_json(r.sup_dist_v);
      j["sup_dist_u"] = opt_json(r.sup_dist_u);
      j["w1p_dist_v"] = opt_json(r.w1p_dist_v);
      j["w1p_dist_u"] = opt_json(r.w1p_dist_u);
      j["holder_dist_v"] = opt_json(r.holder_dist_v);
      j["energy_ratio"] = opt_json(r.energy_ratio);
      j["q_term_v"] = opt_json(r.q_term_v);
      j["accepted_roots"] = r.accepted_roots;
      j["high_energy_roots"] = r.high_energy_roots;
      j["failure"] = r.failure ? json(*r.failure) : json(nullptr);
      rows.push_back(j);
      if (r.failure) {
        failures.push_back(*r.failure);
        out << "  failed: " << *r.failure << '\n';
      } else {
        ++ok;
      }
    }
    json drows = json::array();
    for (const auto& d : deriv) drows.push_back({{"q", d.q}, {"u_dev", opt_json(d.u_dev)}, {"v_dev", opt_json(d.v_dev)}});

    json report = header(cfg, "sweep");
    report["limit_profile"] = {{"G0", G.profile.u.front()}, {"norm_p", G.norm_p}};
    report["records"] = rows;
    report["verdicts"] = verdicts;
    report["all_verdicts_true"] = all_true;
    report["verdicts_successful_records"] = subset;
    report["derivative_check"] = {{"window", cfg.derivative_window}, {"rows", drows}};
    report["rate_fits"] = fits;
    report["failures"] = failures;

    if (cfg.write_csv) {
      const auto path = cfg.output_dir / (tag + ".csv");
      write_file_atomic(path, sweep_csv(records));
      res.files.push_back(path);
    }
    res.exit_code = ok >= 2 ? kExitOk : kExitInsufficient;
    if (ok < 2) out << "insufficient data: " << ok << " successful records\n";
    finish(res, cfg, report, tag);
    return res;
  });
}

CommandResult cmd_limit(const RunConfig& cfg, std::ostream& out) {
  return guarded(out, [&] {
    // The limit equation has no q; any admissible q builds the parameters.
    RunConfig lim = cfg;
    lim.q = cfg.p + 1.0;
    const auto params = lim.problem();
    const auto G = compute_G(params, cfg.controls);
    const auto& g = G.profile;

    Certificate cert;
    auto add = [&](std::string name, double value, double threshold, bool ok, std::string detail) {
      cert.checks.push_back({std::move(name), value, threshold, ok, std::move(detail)});
    };
    add("positive", g.u.front(), 0.0, g.u.front() > 0.0, "G(0)");
    add("dirichlet", std::abs(g.u.back() - 1.0), 0.0, g.u.back() == 1.0, "|G(1) - 1|");
    add("norm_below_volume", G.norm_p, params.ball_volume(), G.norm_p < params.ball_volume(),
        "|G|^p_{W^{1,p}} < |B|");
    double worst_drop = 0.0;
    double min_du = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i > 0) worst_drop = std::max(worst_drop, g.u[i - 1] - g.u[i]);
      min_du = std::min(min_du, g.du[i]);
    }
    const bool mono = worst_drop <= cfg.certificate.tol_cone && min_du >= -cfg.certificate.tol_cone;
    add("monotone", std::max(worst_drop, -min_du), cfg.certificate.tol_cone, mono, "largest decrease of G or -G'");
    const double resid = limit_residual_worst(G, params);
    add("residual", resid, cfg.certificate.tol_residual, resid <= cfg.certificate.tol_residual,
        "weak residual against test functions vanishing at r = 1");
    if (params.N() == 1 && params.p() == 2.0) {
      double err = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(g.u[i] - std::cosh(g.r[i]) / std::cosh(1.0)));
      add("analytic_profile", err, 1e-6, err <= 1e-6, "sup |G - cosh(r)/cosh(1)|");
      const double nerr = std::abs(G.norm_p - 2.0 * std::tanh(1.0));
      add("analytic_norm", nerr, 1e-6, nerr <= 1e-6, "| |G|^2 - 2 tanh(1) |");
    }

    out << "limit N=" << params.N() << " p=" << params.p() << "  G(0)=" << g.u.front() << "  norm_p=" << G.norm_p
        << "  |B|=" << params.ball_volume() << '\n';
    print_certificate(cert, out, "  ");

    CommandResult res;
    const std::string tag = "limit_N" + std::to_string(params.N()) + "_p" + num_tag(params.p());
    if (cfg.write_csv) {
      const auto path = cfg.output_dir / (tag + ".csv");
      write_file_atomic(path, profile_csv(g));
      res.files.push_back(path);
    }
    json report = header(cfg, "limit");
    report["limit_profile"] = {{"N", params.N()},
                               {"p", params.p()},
                               {"G0", g.u.front()},
                               {"norm_p", G.norm_p},
                               {"ball_volume", params.ball_volume()},
                               {"raw_endpoint", G.raw_endpoint}};
    report["certificate"] = certificate_json(cert);
    std::vector<std::string> failures;
    for (const auto& c : cert.checks)
      if (!c.passed) failures.push_back(c.name);
    report["failures"] = failures;
    res.exit_code = cert.passed() ? kExitOk : kExitCertificate;
    finish(res, cfg, report, tag);
    return res;
  });
}

CommandResult cmd_verify(const RunConfig& cfg, const std::filesystem::path& profile_path, std::ostream& out) {
  return guarded(out, [&] {
    const auto params = cfg.problem();
    const auto trunc = cfg.truncation(params);
    const auto profile = read_profile_csv(profile_path);
    const auto G = compute_G(params, cfg.controls);
    const RadialProfile* gp = G.profile.r == profile.r ? &G.profile : nullptr;
    const auto cert = certify_solution(profile, params, trunc, gp, cfg.certificate);

    std::string label = "unclassified";
    if (!cert.find("grid") || cert.find("grid")->passed) label = to_string(classify(profile, params, trunc));

    out << "verify " << profile_path.string() << "  N=" << params.N() << " p=" << params.p() << " q=" << params.q()
        << '\n';
    print_certificate(cert, out, "  ");
    out << "classification: " << label << '\n';

    json report = header(cfg, "verify");
    report["problem"] = problem_json(params, trunc);
    report["profile"] = profile_path.string();
    report["classification"] = label;
    report["energy"] = energy_json(cert.energy);
    report["certificate"] = certificate_json(cert);
    std::vector<std::string> failures;
    for (const auto& c : cert.checks)
      if (!c.passed) failures.push_back(c.name);
    report["failures"] = failures;

    CommandResult res;
    res.exit_code = cert.passed() ? kExitOk : kExitCertificate;
    finish(res, cfg, report, "verify_" + profile_path.stem().string());
    return res;
  });
}

}  // namespace plap::cli
