#include "windlab/mc.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>
#include <thread>

namespace windlab {

namespace {

inline uint64_t splitmix64(uint64_t& x) {
  uint64_t z = (x += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline double frac(double x) {
  double f = x - std::floor(x);
  return f < 1.0 ? f : 0.0;
}

}  // namespace

uint64_t derive_path_seed(uint64_t master_seed, uint64_t path_index) {
  uint64_t s = master_seed ^ ((path_index + 1) * 0x9E3779B97F4A7C15ull);
  return splitmix64(s);
}

GaussianStream::GaussianStream(uint64_t seed) {
  uint64_t x = seed;
  for (auto& si : s_) si = splitmix64(x);
}

uint64_t GaussianStream::next_u64() {
  // xoshiro256++
  uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double GaussianStream::uniform() {
  return double(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;  // (0,1)
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  have_spare_ = true;
  return rad * std::cos(ang);
}

namespace {

struct FlatSde {
  int d;
  Mat gram_inv;
  Mat noise;  // Sigma with Sigma Sigma^T = g^-1
  const DriftField* drift;
};

FlatSde make_sde(const MetricField& metric, const DriftField& drift, int dim) {
  if (!metric.constant())
    throw Error("simulate_path: pathwise simulation supports constant metrics only; "
                "curved scenarios are handled by the spectral route");
  FlatSde sde;
  sde.d = dim;
  sde.gram_inv = metric.gram_inv();
  Eigen::LLT<Mat> llt(sde.gram_inv);
  if (llt.info() != Eigen::Success) throw Error("simulate_path: inverse metric not SPD");
  sde.noise = llt.matrixL();
  sde.drift = &drift;
  return sde;
}

inline Vec drift_at(const FlatSde& sde, const Vec& x) {
  std::array<double, 3> p{0, 0, 0};
  for (int k = 0; k < sde.d; ++k) p[size_t(k)] = frac(x[k]);
  return sde.drift->at_point(p, sde.gram_inv);
}

}  // namespace

Trajectory simulate_path(const MetricField& metric, const DriftField& drift, int dim, double T,
                         double dt, const Vec& x0, uint64_t seed) {
  if (dt <= 0.0 || dt > 1e-2) throw Error("simulate_path: require 0 < dt <= 1e-2");
  double steps_real = T / dt;
  auto steps = int64_t(std::llround(steps_real));
  if (steps < 1 || std::abs(steps_real - double(steps)) > 1e-9)
    throw Error("simulate_path: T/dt must be a positive integer");

  FlatSde sde = make_sde(metric, drift, dim);
  GaussianStream rng(seed);
  const double sq = std::sqrt(dt);

  Trajectory traj;
  traj.dt = dt;
  traj.seed = seed;
  traj.lift.resize(steps + 1, dim);
  Vec x = x0;
  traj.lift.row(0) = x.transpose();
  Vec xi(dim);
  for (int64_t s = 0; s < steps; ++s) {
    for (int k = 0; k < dim; ++k) xi[k] = rng.next();
    Vec noise = sq * (sde.noise * xi);
    Vec b1 = drift_at(sde, x);
    Vec xp = x + dt * b1 + noise;
    Vec b2 = drift_at(sde, xp);
    x += 0.5 * dt * (b1 + b2) + noise;
    traj.lift.row(s + 1) = x.transpose();
  }
  return traj;
}

Vec winding(const Trajectory& traj) {
  double T = traj.T();
  if (!(T > 0.0)) throw Error("winding: path has zero duration");
  return (traj.lift.row(traj.lift.rows() - 1) - traj.lift.row(0)).transpose() / T;
}

double stratonovich_line_integral(const std::vector<ExprPtr>& omega, const Trajectory& traj) {
  const int d = int(traj.lift.cols());
  if (int(omega.size()) != d) throw Error("stratonovich_line_integral: component count mismatch");
  double acc = 0.0;
  for (int64_t s = 0; s + 1 < traj.lift.rows(); ++s) {
    std::array<double, 3> mid{0, 0, 0};
    for (int k = 0; k < d; ++k) mid[size_t(k)] = frac(0.5 * (traj.lift(s, k) + traj.lift(s + 1, k)));
    for (int k = 0; k < d; ++k)
      acc += omega[size_t(k)]->eval(mid) * (traj.lift(s + 1, k) - traj.lift(s, k));
  }
  return acc;
}

McStatistics mc_batch(const MetricField& metric, const DriftField& drift, int dim,
                      int64_t n_paths, double T, double dt, uint64_t master_seed, const Vec& x0,
                      int hist_bins, int threads) {
  if (n_paths < 1) throw Error("mc_batch: need at least one path");
  FlatSde sde = make_sde(metric, drift, dim);

  double steps_real = T / dt;
  auto steps = int64_t(std::llround(steps_real));
  if (steps < 1 || std::abs(steps_real - double(steps)) > 1e-9)
    throw Error("mc_batch: T/dt must be a positive integer");
  if (dt > 1e-2) throw Error("mc_batch: require dt <= 1e-2");

  McStatistics st;
  st.n_paths = n_paths;
  st.T = T;
  st.dt = dt;
  st.master_seed = master_seed;
  st.hist_bins = hist_bins;
  st.samples.resize(n_paths, dim);
  st.seeds.resize(size_t(n_paths));

  int64_t n_cells = 1;
  for (int k = 0; k < dim; ++k) n_cells *= hist_bins;

  int n_workers = std::max(1, threads);
  std::vector<std::vector<int64_t>> hist(size_t(n_workers),
                                         std::vector<int64_t>(size_t(n_cells), 0));

  const double sq = std::sqrt(dt);
  auto worker = [&](int w, int64_t lo, int64_t hi) {
    Vec x(dim), xi(dim), b1(dim), b2(dim), xp(dim), noise(dim);
    auto& h = hist[size_t(w)];
    for (int64_t p = lo; p < hi; ++p) {
      uint64_t seed = derive_path_seed(master_seed, uint64_t(p));
      st.seeds[size_t(p)] = seed;
      GaussianStream rng(seed);
      x = x0;
      Vec start = x;
      for (int64_t s = 0; s < steps; ++s) {
        // occupation sampled at the step start
        int64_t cell = 0;
        for (int k = dim - 1; k >= 0; --k) {
          int bk = int(frac(x[k]) * hist_bins);
          if (bk >= hist_bins) bk = hist_bins - 1;
          cell = cell * hist_bins + bk;
        }
        ++h[size_t(cell)];
        for (int k = 0; k < dim; ++k) xi[k] = rng.next();
        noise = sq * (sde.noise * xi);
        b1 = drift_at(sde, x);
        xp = x + dt * b1 + noise;
        b2 = drift_at(sde, xp);
        x += 0.5 * dt * (b1 + b2) + noise;
      }
      st.samples.row(p) = ((x - start) / T).transpose();
    }
  };

  if (n_workers == 1) {
    worker(0, 0, n_paths);
  } else {
    std::vector<std::thread> pool;
    int64_t chunk = (n_paths + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      int64_t lo = w * chunk, hi = std::min(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, w, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  // reductions in path-index order; histogram counts are integers
  st.histogram.assign(size_t(n_cells), 0);
  for (auto& h : hist)
    for (int64_t c = 0; c < n_cells; ++c) st.histogram[size_t(c)] += h[size_t(c)];

  st.mean = Vec::Zero(dim);
  for (int64_t p = 0; p < n_paths; ++p) st.mean += st.samples.row(p).transpose();
  st.mean /= double(n_paths);

  st.cov_T = Mat::Zero(dim, dim);
  for (int64_t p = 0; p < n_paths; ++p) {
    Vec d = st.samples.row(p).transpose() - st.mean;
    st.cov_T += d * d.transpose();
  }
  st.cov_T *= T / double(std::max<int64_t>(1, n_paths - 1));

  st.se_mean.resize(dim);
  st.se_cov_T = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    double var = st.cov_T(k, k) / T;
    st.se_mean[k] = std::sqrt(var / double(n_paths));
    double m4 = 0.0;
    for (int64_t p = 0; p < n_paths; ++p) {
      double d = st.samples(p, k) - st.mean[k];
      double sq2 = T * d * d - st.cov_T(k, k);
      m4 += sq2 * sq2;
    }
    st.se_cov_T(k, k) = std::sqrt(m4 / double(n_paths)) / std::sqrt(double(n_paths));
  }
  return st;
}

Vec histogram_probabilities(const McStatistics& stats) {
  int64_t total = 0;
  for (auto c : stats.histogram) total += c;
  Vec p(stats.histogram.size());
  for (size_t i = 0; i < stats.histogram.size(); ++i)
    p[int64_t(i)] = double(stats.histogram[i]) / double(total);
  return p;
}

PairedGap paired_covariance_gap(const McStatistics& a, const McStatistics& b, int axis) {
  if (a.n_paths != b.n_paths) throw Error("paired_covariance_gap: sample sizes differ");
  const int64_t n = a.n_paths;
  double ma = a.mean[axis], mb = b.mean[axis];
  Vec D(n);
  for (int64_t p = 0; p < n; ++p) {
    double da = a.samples(p, axis) - ma;
    double db = b.samples(p, axis) - mb;
    D[p] = a.T * (db * db - da * da);
  }
  PairedGap g;
  g.gap = D.mean();
  double var = (D.array() - g.gap).square().sum() / double(n - 1);
  g.se = std::sqrt(var / double(n));
  return g;
}

double tv_distance(const Vec& p, const Vec& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace windlab
