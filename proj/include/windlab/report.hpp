#pragma once

#include <json.hpp>

#include "windlab/scenario.hpp"

namespace windlab {

using Json = nlohmann::json;

inline constexpr const char* kReportSchemaVersion = "1.0";

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct RateRow {
  Vec h;
  double G = 0.0;
  double Q = 0.0;
  double gap = 0.0;
  Vec c_star;
  int iterations = 0;
};

// G and Q along the scenario's homology rays through hbar.
std::vector<RateRow> compute_rate_rows(const Lab& lab);
std::vector<RateRow> compute_rate_rows(const Lab& lab, const Vec& direction, int points,
                                       double h_max);

struct GcRow {
  Vec c;
  double defect = 0.0;
};
std::vector<GcRow> compute_gc_rows(const Lab& lab);

Json scenario_json(const Scenario& s);
Json hodge_json(const Lab& lab);
Json rate_json(const std::vector<RateRow>& rows, const std::vector<GcRow>& gc);
Json mc_json(const McStatistics& stats, double tv_to_m);
Json checks_json(const std::vector<Check>& checks);

Json full_report(const Lab& lab, const std::vector<RateRow>* rate_rows,
                 const std::vector<GcRow>* gc_rows, const McStatistics* mc, double tv_to_m,
                 const std::vector<Check>* checks);

// Schema validation for round-tripping reports.
bool validate_report(const Json& j, std::string* why = nullptr);

std::string rate_csv(const std::vector<RateRow>& rows);
std::string scgf_csv(const std::vector<Vec>& tilts, const std::vector<double>& lambdas);
std::string samples_csv(const McStatistics& stats);
std::string histogram_csv(const McStatistics& stats);

// Aggregated occupation of the invariant measure on the same histogram bins.
Vec binned_invariant_measure(const Lab& lab, int hist_bins);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace windlab
