#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include "windlab/verify.hpp"

using namespace windlab;

namespace {

std::vector<Vec> parse_ray_list(const std::string& text) {
  std::vector<Vec> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::vector<double> vals;
    std::stringstream ps(part);
    std::string tok;
    while (std::getline(ps, tok, ',')) {
      if (tok.find_first_not_of(" \t") == std::string::npos) continue;
      vals.push_back(std::stod(tok));
    }
    if (!vals.empty()) {
      Vec v(int64_t(vals.size()));
      for (size_t i = 0; i < vals.size(); ++i) v[int64_t(i)] = vals[i];
      out.push_back(v);
    }
  }
  return out;
}

struct CommonOpts {
  std::string scenario;
  std::string config;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  double tol_scale = 1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario, "built-in scenario name (S1, S2, S3, S4, flat-constant, shear)");
  cmd->add_option("--config", o.config, "scenario config file");
  cmd->add_option("--out", o.out_dir, "output directory (default $WINDLAB_OUT or .)");
  cmd->add_option("--seed", o.seed, "master seed override")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--tol-scale", o.tol_scale, "scales the reversibility-flag tolerance");
}

Scenario resolve_scenario(const CommonOpts& o) {
  Scenario s;
  if (!o.config.empty()) s = load_scenario_file(o.config);
  else if (!o.scenario.empty()) s = builtin_scenario(o.scenario);
  else throw Error("need --scenario or --config");
  if (o.seed_set) s.mc.seed = o.seed;
  s.solver.tol_scale = o.tol_scale;
  if (o.threads > 0) s.solver.threads = o.threads;
  return s;
}

std::string out_dir(const CommonOpts& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("WINDLAB_OUT")) return env;
  return ".";
}

int effective_threads(const Scenario& s) {
  if (s.solver.threads > 0) return s.solver.threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

void print_checks(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    std::printf("%s %-42s value=%-13.6g tol=%-10.4g %s\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.value, c.tol, c.note.c_str());
  }
}

int cmd_hodge(const CommonOpts& o) {
  Scenario s = resolve_scenario(o);
  Lab lab = build_lab(s);
  Json j = full_report(lab, nullptr, nullptr, nullptr, 0.0, nullptr);
  std::cout << j["hodge"].dump(2) << "\n";
  write_text_file(out_dir(o) + "/" + s.name + "_report.json", j.dump(2) + "\n");
  return 0;
}

int cmd_scgf(const CommonOpts& o) {
  Scenario s = resolve_scenario(o);
  Lab lab = build_lab(s);
  std::vector<double> lambdas;
  for (const auto& c : s.rate.tilts) {
    lab.scgf->reset_warm_start();
    lambdas.push_back(lab.scgf->evaluate(c).lambda);
  }
  std::string csv = scgf_csv(s.rate.tilts, lambdas);
  std::cout << csv;
  write_text_file(out_dir(o) + "/" + s.name + "_scgf.csv", csv);
  return 0;
}

int cmd_rate(const CommonOpts& o, const std::string& ray, int points, double h_max) {
  Scenario s = resolve_scenario(o);
  Lab lab = build_lab(s);
  std::vector<RateRow> rows;
  if (!ray.empty()) {
    auto dirs = parse_ray_list(ray);
    for (const auto& dir : dirs) {
      auto part = compute_rate_rows(lab, dir, points > 0 ? points : s.rate.points,
                                    h_max > 0 ? h_max : s.rate.h_max);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  } else {
    rows = compute_rate_rows(lab);
  }
  std::string csv = rate_csv(rows);
  std::cout << csv;
  write_text_file(out_dir(o) + "/" + s.name + "_rate.csv", csv);
  auto gc = compute_gc_rows(lab);
  Json j = full_report(lab, &rows, &gc, nullptr, 0.0, nullptr);
  write_text_file(out_dir(o) + "/" + s.name + "_report.json", j.dump(2) + "\n");
  return 0;
}

int cmd_simulate(const CommonOpts& o) {
  Scenario s = resolve_scenario(o);
  Lab lab = build_lab(s);
  McStatistics st = mc_batch(s.metric, s.drift, s.dim, s.mc.n_paths, s.mc.T, s.mc.dt, s.mc.seed,
                             s.mc.x0, s.mc.hist_bins, effective_threads(s));
  Vec pm = binned_invariant_measure(lab, s.mc.hist_bins);
  double tv = tv_distance(histogram_probabilities(st), pm);
  std::cout << "mean h: " << st.mean.transpose() << "\n";
  std::cout << "cov*T:\n" << st.cov_T << "\n";
  std::cout << "TV(empirical, m) = " << tv << "\n";
  write_text_file(out_dir(o) + "/" + s.name + "_samples.csv", samples_csv(st));
  write_text_file(out_dir(o) + "/" + s.name + "_hist.csv", histogram_csv(st));
  Json j = full_report(lab, nullptr, nullptr, &st, tv, nullptr);
  write_text_file(out_dir(o) + "/" + s.name + "_report.json", j.dump(2) + "\n");
  return 0;
}

int cmd_compare(const CommonOpts& o, const std::string& a, const std::string& b) {
  Scenario sa = is_builtin_scenario(a) ? builtin_scenario(a) : load_scenario_file(a);
  Scenario sb = is_builtin_scenario(b) ? builtin_scenario(b) : load_scenario_file(b);
  if (sa.dim != sb.dim) throw Error("compare: scenario dimensions differ");
  uint64_t seed = o.seed_set ? o.seed : sa.mc.seed;
  int threads = o.threads > 0 ? o.threads : effective_threads(sa);
  // common random numbers: both batches draw from the same per-path streams
  McStatistics A = mc_batch(sa.metric, sa.drift, sa.dim, sa.mc.n_paths, sa.mc.T, sa.mc.dt, seed,
                            Vec::Zero(sa.dim), sa.mc.hist_bins, threads);
  McStatistics B = mc_batch(sb.metric, sb.drift, sb.dim, sa.mc.n_paths, sa.mc.T, sa.mc.dt, seed,
                            Vec::Zero(sb.dim), sa.mc.hist_bins, threads);
  std::cout << "scenario A = " << sa.name << ": mean " << A.mean.transpose() << ", cov*T(1,1) "
            << A.cov_T(0, 0) << " (se " << A.se_cov_T(0, 0) << ")\n";
  std::cout << "scenario B = " << sb.name << ": mean " << B.mean.transpose() << ", cov*T(1,1) "
            << B.cov_T(0, 0) << " (se " << B.se_cov_T(0, 0) << ")\n";
  PairedGap gap = paired_covariance_gap(A, B, 0);
  std::cout << "paired covariance gap (B - A, axis 1): " << gap.gap << " +- " << gap.se << "\n";
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["compare"] = {{"a", sa.name},
                  {"b", sb.name},
                  {"seed", seed},
                  {"gap", gap.gap},
                  {"gap_se", gap.se}};
  write_text_file(out_dir(o) + "/compare_" + sa.name + "_" + sb.name + ".json", j.dump(2) + "\n");
  return 0;
}

int cmd_verify(const CommonOpts& o, int acceptance_only) {
  if (acceptance_only > 0) {
    Scenario dummy;
    int threads = o.threads > 0 ? o.threads : effective_threads(dummy);
    auto checks = acceptance_criterion(acceptance_only, threads);
    print_checks(checks);
    return all_pass(checks) ? 0 : 2;
  }
  Scenario s = resolve_scenario(o);
  auto checks = verify_scenario(s);
  print_checks(checks);
  if (!all_pass(checks)) return 2;
  return 0;
}

int cmd_report(const CommonOpts& o) {
  Scenario s = resolve_scenario(o);
  Lab lab = build_lab(s);
  auto rows = compute_rate_rows(lab);
  auto gc = compute_gc_rows(lab);
  McStatistics st = mc_batch(s.metric, s.drift, s.dim, std::min<int64_t>(s.mc.n_paths, 500),
                             std::min(s.mc.T, 50.0), s.mc.dt, s.mc.seed, s.mc.x0, s.mc.hist_bins,
                             effective_threads(s));
  Vec pm = binned_invariant_measure(lab, s.mc.hist_bins);
  double tv = tv_distance(histogram_probabilities(st), pm);
  auto checks = verify_scenario(s);
  Json j = full_report(lab, &rows, &gc, &st, tv, &checks);
  std::string why;
  if (!validate_report(j, &why)) throw Error("report failed schema validation: " + why);
  std::string path = out_dir(o) + "/" + s.name + "_report.json";
  write_text_file(path, j.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return all_pass(checks) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"windlab: winding statistics of torus diffusions"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string ray;
  int points = 0;
  double h_max = 0.0;
  std::string cmp_a, cmp_b;
  int acceptance_only = 0;

  auto* hodge = app.add_subcommand("hodge", "harmonic bases, Gram matrices, reversibility flags");
  add_common(hodge, o);
  auto* scgf = app.add_subcommand("scgf", "cumulant generating function on the tilt grid");
  add_common(scgf, o);
  auto* rate = app.add_subcommand("rate", "rate function G and bound Q along homology rays");
  add_common(rate, o);
  rate->add_option("--ray", ray, "ray directions, e.g. \"1,0 ; 0,1\"");
  rate->add_option("--points", points, "points per ray");
  rate->add_option("--h-max", h_max, "ray extent");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo winding batch");
  add_common(simulate, o);
  auto* compare = app.add_subcommand("compare", "paired winding comparison of two scenarios");
  add_common(compare, o);
  compare->add_option("--a", cmp_a, "first scenario (built-in name or config path)")->required();
  compare->add_option("--b", cmp_b, "second scenario")->required();
  auto* verify = app.add_subcommand("verify", "invariant and acceptance checks");
  add_common(verify, o);
  verify->add_option("--acceptance", acceptance_only, "run one acceptance criterion (1..8)");
  auto* report = app.add_subcommand("report", "aggregate JSON report");
  add_common(report, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (hodge->parsed()) return cmd_hodge(o);
    if (scgf->parsed()) return cmd_scgf(o);
    if (rate->parsed()) return cmd_rate(o, ray, points, h_max);
    if (simulate->parsed()) return cmd_simulate(o);
    if (compare->parsed()) return cmd_compare(o, cmp_a, cmp_b);
    if (verify->parsed()) return cmd_verify(o, acceptance_only);
    if (report->parsed()) return cmd_report(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
