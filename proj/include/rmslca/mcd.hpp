#pragma once

// Raw minimum covariance determinant estimation: exhaustive search for small n and
// a randomized concentration-step search otherwise.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rmslca/blocks.hpp"
#include "rmslca/elliptical.hpp"
#include "rmslca/errors.hpp"

namespace rmslca {

using Subset = std::vector<int>;

struct McdFit {
  Vector location;     // mean of the optimal subset
  Matrix raw_scatter;  // estimates sigma_gamma^2 V
  Subset subset;       // sorted
  double objective = std::numeric_limits<double>::infinity();  // logdet(raw_scatter)
  int h = 0;
  int n = 0;
};

struct McdOptions {
  int restarts = 500;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  // Restarts first run this many C-steps; only the best `keep` candidates are iterated
  // to convergence. Set keep >= restarts to iterate every start fully.
  int initial_steps = 2;
  int keep = 10;
};

/// h_n = ceil(n * gamma).
inline int subset_size(int n, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("subset_size: gamma must lie in (0,1]");
  const int h = static_cast<int>(std::ceil(n * gamma - 1e-12));
  return std::clamp(h, 1, n);
}

/// Mean and 1/h-normalized scatter of the rows in `subset`.
inline std::pair<Vector, Matrix> subset_stats(const Matrix& data, const Subset& subset) {
  if (subset.empty()) throw EmptySubset("subset_stats: empty subset");
  const int n = static_cast<int>(data.rows());
  const int q = static_cast<int>(data.cols());
  Vector mean = Vector::Zero(q);
  for (int i : subset) {
    if (i < 0 || i >= n) throw InvalidArgument("subset_stats: index out of range");
    mean += data.row(i).transpose();
  }
  const double h = static_cast<double>(subset.size());
  mean /= h;
  Matrix centered(subset.size(), q);
  for (std::size_t r = 0; r < subset.size(); ++r) {
    centered.row(static_cast<Eigen::Index>(r)) = data.row(subset[r]) - mean.transpose();
  }
  Matrix scatter = (centered.transpose() * centered) / h;
  return {std::move(mean), symmetrize(scatter)};
}

/// log det of an SPD matrix; +inf when the Cholesky factorization fails or a pivot is
/// negligible relative to the mean diagonal entry (numerically singular).
inline double logdet_spd(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const auto& l = llt.matrixL();
  const double floor = 1e-13 * s.trace() / static_cast<double>(s.rows());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double d = l(i, i);
    if (!(d * d > floor) || !std::isfinite(d)) return std::numeric_limits<double>::infinity();
    acc += std::log(d);
  }
  return 2.0 * acc;
}

namespace detail {

inline McdFit make_fit(const Matrix& data, Subset subset) {
  std::sort(subset.begin(), subset.end());
  McdFit fit;
  auto [m, s] = subset_stats(data, subset);
  fit.location = std::move(m);
  fit.raw_scatter = std::move(s);
  fit.objective = logdet_spd(fit.raw_scatter);
  fit.h = static_cast<int>(subset.size());
  fit.n = static_cast<int>(data.rows());
  fit.subset = std::move(subset);
  return fit;
}

// Indices of the h smallest squared Mahalanobis distances; ties resolved by index.
inline Subset closest(const Matrix& data, const Vector& loc, const Eigen::LLT<Matrix>& llt, int h) {
  const int n = static_cast<int>(data.rows());
  Matrix centered = data.rowwise() - loc.transpose();
  Matrix z = llt.matrixL().solve(centered.transpose());
  Vector d2 = z.colwise().squaredNorm().transpose();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](int a, int b) { return d2(a) < d2(b) || (d2(a) == d2(b) && a < b); };
  std::nth_element(idx.begin(), idx.begin() + (h - 1), idx.end(), less);
  Subset out(idx.begin(), idx.begin() + h);
  std::sort(out.begin(), out.end());
  return out;
}

inline void check_data(const Matrix& data, int h) {
  if (data.rows() < 1 || data.cols() < 1) throw InvalidArgument("mcd: empty data");
  if (!data.allFinite()) throw InvalidArgument("mcd: data contains non-finite values");
  if (h < 1 || h > data.rows()) {
    throw InvalidArgument("mcd: subset size " + std::to_string(h) + " outside [1, n]");
  }
}

inline double binomial(int n, int k) {
  double acc = 1.0;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

// SplitMix64 finalizer; per-restart seeds are a pure function of (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(seed) ^ (index + 1) * 0xD1B54A32D192ED03ULL);
}

/// One concentration step: keeps the h points closest to the current fit.
inline Subset c_step(const Matrix& data, const Subset& subset) {
  auto [loc, s] = subset_stats(data, subset);
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success || !std::isfinite(logdet_spd(s))) {
    throw SingularScatter("c_step: subset scatter is singular");
  }
  return detail::closest(data, loc, llt, static_cast<int>(subset.size()));
}

/// Global minimizer over all subsets of size h. Ties keep the lexicographically
/// smallest subset.
inline McdFit exhaustive_mcd(const Matrix& data, int h, double cap = 2e6) {
  detail::check_data(data, h);
  const int n = static_cast<int>(data.rows());
  const int q = static_cast<int>(data.cols());
  if (h <= q && h != n) {
    throw InvalidArgument("exhaustive_mcd: need h > q, got h = " + std::to_string(h));
  }
  if (detail::binomial(n, h) > cap) {
    throw TooManySubsets("exhaustive_mcd: C(" + std::to_string(n) + "," + std::to_string(h) +
                         ") exceeds the enumeration cap");
  }
  Subset cur(h);
  std::iota(cur.begin(), cur.end(), 0);
  Subset best;
  double best_obj = std::numeric_limits<double>::infinity();
  while (true) {
    const double obj = logdet_spd(subset_stats(data, cur).second);
    if (obj < best_obj) {
      best_obj = obj;
      best = cur;
    }
    int i = h - 1;
    while (i >= 0 && cur[i] == n - h + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < h; ++j) cur[j] = cur[j - 1] + 1;
  }
  if (best.empty()) throw SingularAllSubsets("exhaustive_mcd: every subset scatter is singular");
  return detail::make_fit(data, std::move(best));
}

namespace detail {

struct Candidate {
  Subset subset;
  double objective;
  int restart;
};

inline bool better(const Candidate& a, const Candidate& b) {
  return a.objective < b.objective || (a.objective == b.objective && a.restart < b.restart);
}

// Random (q+1)-subset, enlarged until nonsingular, then inflated to h points.
template <class Rng>
bool initial_subset(const Matrix& data, int h, Rng& rng, Subset& out) {
  const int n = static_cast<int>(data.rows());
  const int q = static_cast<int>(data.cols());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int take = std::min(q + 1, n);
  for (int i = 0; i < take; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  while (true) {
    Subset start(perm.begin(), perm.begin() + take);
    auto [loc, s] = subset_stats(data, start);
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() == Eigen::Success && std::isfinite(logdet_spd(s))) {
      out = closest(data, loc, llt, h);
      return true;
    }
    if (take >= n) return false;
    std::uniform_int_distribution<int> pick(take, n - 1);
    std::swap(perm[take], perm[pick(rng)]);
    ++take;
  }
}

// Applies up to `steps` C-steps; stops early at a fixed point or a singular scatter.
inline Candidate concentrate(const Matrix& data, Candidate c, int steps) {
  for (int it = 0; it < steps; ++it) {
    auto [loc, s] = subset_stats(data, c.subset);
    Eigen::LLT<Matrix> llt(s);
    const double obj = logdet_spd(s);
    c.objective = obj;
    if (!std::isfinite(obj)) return c;
    Subset next = closest(data, loc, llt, static_cast<int>(c.subset.size()));
    if (next == c.subset) return c;
    const double next_obj = logdet_spd(subset_stats(data, next).second);
    if (!(next_obj < obj)) {
      if (next_obj == obj && next < c.subset) c.subset = std::move(next);
      return c;
    }
    c.subset = std::move(next);
    c.objective = next_obj;
  }
  c.objective = logdet_spd(subset_stats(data, c.subset).second);
  return c;
}

}  // namespace detail

/// Best-of-restarts concentration search; deterministic given options.seed.
inline McdFit fast_mcd(const Matrix& data, int h, const McdOptions& opt = {}) {
  detail::check_data(data, h);
  const int n = static_cast<int>(data.rows());
  const int q = static_cast<int>(data.cols());
  if (opt.restarts < 1) throw InvalidArgument("fast_mcd: restarts must be >= 1");
  if (h == n) {
    Subset all(n);
    std::iota(all.begin(), all.end(), 0);
    McdFit fit = detail::make_fit(data, std::move(all));
    if (!std::isfinite(fit.objective)) throw SingularScatter("fast_mcd: sample scatter is singular");
    return fit;
  }
  if (h <= q) throw InvalidArgument("fast_mcd: need h > q, got h = " + std::to_string(h));

  const int first = std::max(1, opt.initial_steps);
  std::vector<detail::Candidate> pool;
  pool.reserve(opt.restarts);
  for (int r = 0; r < opt.restarts; ++r) {
    std::mt19937_64 rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    Subset start;
    if (!detail::initial_subset(data, h, rng, start)) continue;
    auto c = detail::concentrate(data, {std::move(start), 0.0, r}, first);
    if (std::isfinite(c.objective)) pool.push_back(std::move(c));
  }
  if (pool.empty()) throw SingularScatter("fast_mcd: every restart produced a singular scatter");

  std::sort(pool.begin(), pool.end(), detail::better);
  const std::size_t keep = std::min<std::size_t>(pool.size(), std::max(1, opt.keep));
  pool.resize(keep);
  for (auto& c : pool) c = detail::concentrate(data, std::move(c), opt.max_iterations);
  const auto best = std::min_element(pool.begin(), pool.end(), detail::better);
  return detail::make_fit(data, best->subset);
}

/// Raw scatter divided by sigma_gamma^2; estimates V under the elliptical model.
inline Matrix consistency_correct(const McdFit& fit, const RobustConstants& c) {
  if (fit.raw_scatter.rows() != c.q) {
    throw InvalidArgument("consistency_correct: constants computed for q = " + std::to_string(c.q) +
                          ", scatter has q = " + std::to_string(fit.raw_scatter.rows()));
  }
  return fit.raw_scatter / c.sigma2_gamma;
}

}  // namespace rmslca
