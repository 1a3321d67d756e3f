#include "windlab/report.hpp"

#include <cstdio>
#include <fstream>

namespace windlab {

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int64_t i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (int64_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int64_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

}  // namespace

std::vector<RateRow> compute_rate_rows(const Lab& lab, const Vec& direction, int points,
                                       double h_max) {
  std::vector<RateRow> rows;
  Vec dir = direction;
  if (dir.norm() == 0.0) throw Error("rate ray: zero direction");
  for (int j = 0; j <= points; ++j) {
    Vec h = lab.basis.hbar + (h_max * double(j) / double(points)) * dir;
    RateRow row;
    row.h = h;
    if (j == 0) lab.scgf->reset_warm_start();
    RateResult rr = lab.scgf->legendre_rate(h, lab.basis);
    row.G = rr.G;
    row.Q = q_rate(h, lab.basis);
    row.gap = row.Q - row.G;
    row.c_star = rr.c_star;
    row.iterations = rr.iterations;
    rows.push_back(row);
  }
  return rows;
}

std::vector<RateRow> compute_rate_rows(const Lab& lab) {
  std::vector<RateRow> rows;
  for (const auto& dir : lab.scenario.rate.rays) {
    auto part = compute_rate_rows(lab, dir, lab.scenario.rate.points, lab.scenario.rate.h_max);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::vector<GcRow> compute_gc_rows(const Lab& lab) {
  std::vector<GcRow> rows;
  for (const auto& c : lab.scenario.rate.tilts) {
    GcRow row;
    row.c = c;
    row.defect = lab.scgf->gc_defect(c, lab.cbar);
    rows.push_back(row);
  }
  return rows;
}

Json scenario_json(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["dim"] = s.dim;
  j["resolution"] = {s.resolution[0], s.resolution[1], s.resolution[2]};
  j["metric"] = s.metric.describe();
  j["drift"] = s.drift.describe();
  j["solver"] = {{"tol_scale", s.solver.tol_scale},
                 {"c_max", s.solver.c_max},
                 {"flag_tol", s.solver.flag_tol}};
  j["mc"] = {{"n_paths", s.mc.n_paths}, {"T", s.mc.T},         {"dt", s.mc.dt},
             {"seed", s.mc.seed},       {"hist_bins", s.mc.hist_bins}};
  return j;
}

Json hodge_json(const Lab& lab) {
  Json j;
  j["A"] = mat_json(lab.basis.A);
  j["B"] = mat_json(lab.basis.B);
  j["hbar"] = vec_json(lab.basis.hbar);
  auto flags = classify_reversibility(*lab.calc, lab.gen, lab.inv, lab.basis,
                                      lab.scenario.solver.flag_tol * lab.scenario.solver.tol_scale);
  j["flags"] = {{"reversible", flags.reversible},
                {"quasi_reversible", flags.quasi_reversible},
                {"homologically_reversible", flags.homologically_reversible},
                {"typically_reversible", flags.typically_reversible}};
  auto diag = constant_length_diagnostic(*lab.calc, lab.inv, lab.basis);
  j["diagnostics"] = {{"stationarity_residual", lab.inv.stationarity_residual},
                      {"rr_residual", lab.inv.rr_residual},
                      {"m_harmonic_residual", lab.basis.m_harmonic_residual},
                      {"l_constancy_residual", lab.basis.l_constancy_residual},
                      {"var_length", vec_json(diag.var_length)},
                      {"var_pairing", vec_json(diag.var_pairing)},
                      {"nonexact_gr_norm", flags.nonexact_gr_norm},
                      {"gb_curl", flags.gb_curl},
                      {"peclet", lab.gen.diagnostics.peclet},
                      {"peclet_warning", lab.gen.diagnostics.peclet_warning}};
  return j;
}

Json rate_json(const std::vector<RateRow>& rows, const std::vector<GcRow>& gc) {
  Json j;
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back({{"h", vec_json(r.h)},
                   {"G", r.G},
                   {"Q", r.Q},
                   {"gap", r.gap},
                   {"c_star", vec_json(r.c_star)},
                   {"iterations", r.iterations}});
  j["rows"] = arr;
  Json g = Json::array();
  for (const auto& r : gc) g.push_back({{"c", vec_json(r.c)}, {"defect", r.defect}});
  j["gc"] = g;
  return j;
}

Json mc_json(const McStatistics& stats, double tv_to_m) {
  Json j;
  j["n_paths"] = stats.n_paths;
  j["T"] = stats.T;
  j["dt"] = stats.dt;
  j["seed"] = stats.master_seed;
  j["mean"] = vec_json(stats.mean);
  j["cov_T"] = mat_json(stats.cov_T);
  j["se_mean"] = vec_json(stats.se_mean);
  j["se_cov_T"] = mat_json(stats.se_cov_T);
  j["tv_to_m"] = tv_to_m;
  j["hist_bins"] = stats.hist_bins;
  return j;
}

Json checks_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) {
    Json j = {{"name", c.name}, {"value", c.value}, {"tolerance", c.tol}, {"pass", c.pass}};
    if (!c.note.empty()) j["note"] = c.note;
    a.push_back(j);
  }
  return a;
}

Json full_report(const Lab& lab, const std::vector<RateRow>* rate_rows,
                 const std::vector<GcRow>* gc_rows, const McStatistics* mc, double tv_to_m,
                 const std::vector<Check>* checks) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = scenario_json(lab.scenario);
  j["hodge"] = hodge_json(lab);
  if (rate_rows) {
    static const std::vector<GcRow> empty;
    j["rate"] = rate_json(*rate_rows, gc_rows ? *gc_rows : empty);
  }
  if (mc) j["mc"] = mc_json(*mc, tv_to_m);
  if (checks) j["verdicts"] = checks_json(*checks);
  return j;
}

namespace {
bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}
bool is_num_array(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (!e.is_number()) return false;
  return true;
}
bool is_num_matrix(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (!is_num_array(e)) return false;
  return true;
}
}  // namespace

bool validate_report(const Json& j, std::string* why) {
  if (!j.is_object()) return fail(why, "report is not an object");
  if (!j.contains("schema_version") || j["schema_version"] != kReportSchemaVersion)
    return fail(why, "missing or unexpected schema_version");
  if (!j.contains("scenario") || !j["scenario"].is_object())
    return fail(why, "missing scenario block");
  const Json& s = j["scenario"];
  if (!s.contains("name") || !s["name"].is_string()) return fail(why, "scenario.name missing");
  if (!s.contains("dim") || !s["dim"].is_number_integer()) return fail(why, "scenario.dim missing");
  if (j.contains("hodge")) {
    const Json& h = j["hodge"];
    for (const char* key : {"A", "B"})
      if (!h.contains(key) || !is_num_matrix(h[key]))
        return fail(why, std::string("hodge.") + key + " malformed");
    if (!h.contains("hbar") || !is_num_array(h["hbar"])) return fail(why, "hodge.hbar malformed");
    if (!h.contains("flags") || !h["flags"].is_object()) return fail(why, "hodge.flags malformed");
  }
  if (j.contains("rate")) {
    const Json& r = j["rate"];
    if (!r.contains("rows") || !r["rows"].is_array()) return fail(why, "rate.rows malformed");
    for (const auto& row : r["rows"]) {
      if (!row.contains("h") || !is_num_array(row["h"])) return fail(why, "rate row h malformed");
      for (const char* key : {"G", "Q", "gap"})
        if (!row.contains(key) || !row[key].is_number())
          return fail(why, std::string("rate row ") + key + " malformed");
    }
  }
  if (j.contains("verdicts")) {
    if (!j["verdicts"].is_array()) return fail(why, "verdicts malformed");
    for (const auto& v : j["verdicts"]) {
      if (!v.contains("name") || !v["name"].is_string()) return fail(why, "verdict name missing");
      for (const char* key : {"value", "tolerance"})
        if (!v.contains(key) || !v[key].is_number())
          return fail(why, std::string("verdict ") + key + " missing");
      if (!v.contains("pass") || !v["pass"].is_boolean()) return fail(why, "verdict pass missing");
    }
  }
  return true;
}

std::string rate_csv(const std::vector<RateRow>& rows) {
  if (rows.empty()) return "";
  std::string out;
  int d = int(rows[0].h.size());
  for (int k = 0; k < d; ++k) out += "h" + std::to_string(k + 1) + ",";
  out += "G,Q,gap,";
  for (int k = 0; k < d; ++k) out += "c" + std::to_string(k + 1) + ",";
  out += "iterations\n";
  for (const auto& r : rows) {
    for (int k = 0; k < d; ++k) out += num17(r.h[k]) + ",";
    out += num17(r.G) + "," + num17(r.Q) + "," + num17(r.gap) + ",";
    for (int k = 0; k < d; ++k) out += num17(r.c_star[k]) + ",";
    out += std::to_string(r.iterations) + "\n";
  }
  return out;
}

std::string scgf_csv(const std::vector<Vec>& tilts, const std::vector<double>& lambdas) {
  if (tilts.empty()) return "";
  std::string out;
  int d = int(tilts[0].size());
  for (int k = 0; k < d; ++k) out += "c" + std::to_string(k + 1) + ",";
  out += "lambda\n";
  for (size_t i = 0; i < tilts.size(); ++i) {
    for (int k = 0; k < d; ++k) out += num17(tilts[i][k]) + ",";
    out += num17(lambdas[i]) + "\n";
  }
  return out;
}

std::string samples_csv(const McStatistics& stats) {
  std::string out = "seed";
  int d = int(stats.samples.cols());
  for (int k = 0; k < d; ++k) out += ",h" + std::to_string(k + 1);
  out += "\n";
  for (int64_t p = 0; p < stats.n_paths; ++p) {
    out += std::to_string(stats.seeds[size_t(p)]);
    for (int k = 0; k < d; ++k) out += "," + num17(stats.samples(p, k));
    out += "\n";
  }
  return out;
}

std::string histogram_csv(const McStatistics& stats) {
  const int B = stats.hist_bins;
  std::string out;
  int64_t cells = int64_t(stats.histogram.size());
  int64_t per_row = B;
  for (int64_t c = 0; c < cells; ++c) {
    out += std::to_string(stats.histogram[size_t(c)]);
    out += ((c + 1) % per_row == 0) ? "\n" : ",";
  }
  return out;
}

Vec binned_invariant_measure(const Lab& lab, int hist_bins) {
  const auto& dom = lab.calc->domain();
  const int d = dom.dim();
  int64_t cells = 1;
  for (int k = 0; k < d; ++k) cells *= hist_bins;
  Vec p = Vec::Zero(cells);
  for (int64_t i = 0; i < dom.nodes(); ++i) {
    auto pos = dom.node_pos(i);
    int64_t cell = 0;
    for (int k = d - 1; k >= 0; --k) {
      int bk = int(pos[k] * hist_bins);
      if (bk >= hist_bins) bk = hist_bins - 1;
      cell = cell * hist_bins + bk;
    }
    p[cell] += lab.inv.m[i];
  }
  return p;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file '" + path + "'");
  out << content;
}

}  // namespace windlab
