#pragma once

#include <cstdint>
#include <vector>

#include "windlab/drift.hpp"

namespace windlab {

/// Deterministic random streams: per-path seeds are derived from the master
/// seed by splitmix64(master ^ (index+1)*0x9E3779B97F4A7C15), the stream is
/// xoshiro256++, and normals come from Box-Muller. Replay is bitwise exact
/// and independent of the number of worker threads.
uint64_t derive_path_seed(uint64_t master_seed, uint64_t path_index);

class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed);
  double next();           // standard normal
  double uniform();        // (0,1)
 private:
  uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
  uint64_t next_u64();
};

struct Trajectory {
  Mat lift;      // (steps+1) x d lifted positions in R^d
  double dt = 0.0;
  uint64_t seed = 0;
  double T() const { return dt * double(lift.rows() - 1); }
};

// Stratonovich Heun predictor-corrector on the drift with exact Gaussian
// increments; constant (flat) metrics only.
Trajectory simulate_path(const MetricField& metric, const DriftField& drift, int dim, double T,
                         double dt, const Vec& x0, uint64_t seed);

// h_T = (lift_T - lift_0)/T
Vec winding(const Trajectory& traj);

// Midpoint (Stratonovich-consistent) line integral of a closed-form 1-form
// given by per-axis expressions, along the lifted path.
double stratonovich_line_integral(const std::vector<ExprPtr>& omega, const Trajectory& traj);

struct McStatistics {
  int64_t n_paths = 0;
  double T = 0.0, dt = 0.0;
  uint64_t master_seed = 0;
  Mat samples;         // n_paths x dim winding vectors, in path order
  std::vector<uint64_t> seeds;
  Vec mean;            // sample mean of h_T
  Mat cov_T;           // sample covariance * T
  Vec se_mean;
  Mat se_cov_T;        // plug-in standard errors for the diagonal blocks
  std::vector<int64_t> histogram;  // occupation counts on hist_bins^d cells
  int hist_bins = 0;
};

McStatistics mc_batch(const MetricField& metric, const DriftField& drift, int dim,
                      int64_t n_paths, double T, double dt, uint64_t master_seed, const Vec& x0,
                      int hist_bins, int threads);

Vec histogram_probabilities(const McStatistics& stats);

// Paired comparison of winding covariance along one axis under common random
// numbers: D_i = T[(y_i - ybar)^2 - (x_i - xbar)^2].
struct PairedGap {
  double gap = 0.0;
  double se = 0.0;
};
PairedGap paired_covariance_gap(const McStatistics& a, const McStatistics& b, int axis);

double tv_distance(const Vec& p, const Vec& q);

}  // namespace windlab
