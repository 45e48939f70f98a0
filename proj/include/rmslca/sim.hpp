#pragma once

// Monte Carlo harness: finite-difference oracle for the classical influence functions,
// draws of the limiting random operator of sqrt(n)(T_n - T), and size/power runs of the
// non-correlation test.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rmslca/blocks.hpp"
#include "rmslca/elliptical.hpp"
#include "rmslca/errors.hpp"
#include "rmslca/influence.hpp"
#include "rmslca/mcd.hpp"
#include "rmslca/mslca.hpp"
#include "rmslca/noncorr.hpp"

namespace rmslca {

// ---------------------------------------------------------------------------
// Finite differences along the mixture covariance (1-e)V + e(1-e) x x'.

enum class FdTarget { T, rho, alpha };

inline Matrix mixture_covariance(const Matrix& v, const Vector& x, double eps) {
  return (1.0 - eps) * v + eps * (1.0 - eps) * (x * x.transpose());
}

namespace detail {

// Eigenpair of T(V_e) matched to beta_ref by maximal overlap, sign aligned.
inline std::pair<double, Vector> tracked_eigenpair(const Matrix& T, const Vector& beta_ref) {
  auto es = symmetric_eigen(T);
  Eigen::Index best = 0;
  double overlap = -1.0;
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    const double o = std::fabs(es.eigenvectors().col(i).dot(beta_ref));
    if (o > overlap) {
      overlap = o;
      best = i;
    }
  }
  if (overlap < 0.5) throw DegenerateSpectrum("fd_oracle: eigenvector tracking lost (near crossing)");
  Vector b = es.eigenvectors().col(best);
  if (b.dot(beta_ref) < 0.0) b = -b;
  return {es.eigenvalues()(best), b};
}

template <class Fn>
Matrix central_difference(Fn eval, double eps) {
  return (eval(eps) - eval(-eps)) / (2.0 * eps);
}

}  // namespace detail

/// Central difference of T, rho_j or alpha^(j) at e = 0 along the exact mixture path.
/// The result is q x q for T, q x 1 for alpha and 1 x 1 for rho.
inline Matrix fd_oracle(const Vector& x, const ScatterMatrix& v, FdTarget which, int j = 0,
                        double eps = 1e-6) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw InvalidArgument("fd_oracle: eps must lie in (0, 1e-3]");
  const auto& bs = v.structure();
  if (x.size() != bs.q()) throw InvalidArgument("fd_oracle: point dimension mismatch");
  const MslcaFit base = fit_from_scatter(v, Estimator::classical);
  if (j < 0 || j >= bs.q()) throw InvalidArgument("fd_oracle: eigen index out of range");
  const Vector beta_ref = base.beta.col(j);
  auto scatter_at = [&](double e) { return ScatterMatrix(mixture_covariance(v.entries(), x, e), bs); };
  switch (which) {
    case FdTarget::T:
      return detail::central_difference([&](double e) { return build_T(scatter_at(e)); }, eps);
    case FdTarget::rho:
      return detail::central_difference(
          [&](double e) {
            Matrix out(1, 1);
            out(0, 0) = detail::tracked_eigenpair(build_T(scatter_at(e)), beta_ref).first;
            return out;
          },
          eps);
    case FdTarget::alpha:
      return detail::central_difference(
          [&](double e) {
            const ScatterMatrix s = scatter_at(e);
            const Vector b = detail::tracked_eigenpair(build_T(s), beta_ref).second;
            return Matrix(inv_sqrt_psd(f_map(s.entries(), bs)) * b);
          },
          eps);
  }
  throw InvalidArgument("fd_oracle: unknown target");
}

// ---------------------------------------------------------------------------
// Limiting random operator.

/// linearized: sigma^{-2} kappa3 1_E(X) IF(X; T), the first-order expansion of T at
/// sigma^2 V applied to the MCD scatter's asymptotic summand (mean zero).
/// as_printed: additionally carries (sigma^{-2} - 1) w(||V^{-1/2}X||) g(V).
enum class ZForm { linearized, as_printed };

inline Matrix z_gamma_draw(const Vector& X, const IfContext& ctx, ZForm form = ZForm::linearized) {
  const auto& c = ctx.constants();
  const double s2inv = 1.0 / c.sigma2_gamma;
  Matrix z = Matrix::Zero(X.size(), X.size());
  if (ctx.inside(X)) z = s2inv * c.kappa3 * if_T(X, ctx);
  if (form == ZForm::as_printed) {
    z += (s2inv - 1.0) * weight_w(ctx.mahalanobis(X), c) * g_map(ctx.V(), ctx.structure());
  }
  return z;
}

/// E(Z_gamma) in closed form for the selected form.
inline Matrix z_gamma_mean(const IfContext& ctx, ZForm form = ZForm::linearized) {
  const auto& c = ctx.constants();
  const int q = ctx.structure().q();
  if (form == ZForm::linearized) return Matrix::Zero(q, q);
  const double ew = c.kappa1 * c.gamma + c.kappa2 * c.mu + c.kappa4;
  return (1.0 / c.sigma2_gamma - 1.0) * ew * g_map(ctx.V(), ctx.structure());
}

/// Y_{m,r} written out coordinate-wise in the eigenbasis of T.
inline double y_mr(const Vector& X, const IfContext& ctx, int m, int r, ZForm form = ZForm::linearized) {
  const auto& c = ctx.constants();
  const auto& bs = ctx.structure();
  const auto& beta = ctx.fit().beta;
  if (m < 0 || r < 0 || m >= bs.q() || r >= bs.q()) throw InvalidArgument("y_mr: index out of range");
  const Vector bm = beta.col(m), br = beta.col(r);
  const bool in = ctx.inside(X);
  double w_dev = 0.0;
  if (form == ZForm::as_printed) {
    w_dev = weight_w(ctx.mahalanobis(X), c) - c.kappa1 * c.gamma - c.kappa2 * c.mu - c.kappa4;
  }
  double acc = 0.0;
  for (int k = 0; k < bs.num_blocks(); ++k) {
    const Vector xk = extract(k, X, bs);
    for (int l = 0; l < bs.num_blocks(); ++l) {
      if (l == k) continue;
      const Matrix vlk = ctx.scatter().block(l, k);
      if (in) {
        const Vector vx = vlk * xk;
        const double bracket =
            -0.5 * (extract(l, bm, bs).dot(vx) * extract(k, br, bs).dot(xk) +
                    extract(l, br, bs).dot(vx) * extract(k, bm, bs).dot(xk)) +
            extract(l, bm, bs).dot(extract(l, X, bs)) * extract(k, br, bs).dot(xk);
        acc += c.kappa3 / c.sigma2_gamma * bracket;
      }
      if (form == ZForm::as_printed) {
        acc -= (1.0 / c.sigma2_gamma - 1.0) * w_dev *
               extract(k, br, bs).dot(ctx.scatter().block(k, l) * extract(l, bm, bs));
      }
    }
  }
  return acc;
}

struct SigmaTheory {
  Matrix moments;  // E(Y_{m,r} Y_{u,t}) at row m*q+r, column u*q+t
  Matrix sigma;    // sigma_ij = E(Y_ii Y_jj)
  int draws = 0;
};

/// Monte Carlo moments of Y in the eigenbasis of T. Requires distinct eigenvalues.
inline SigmaTheory sigma_theory(const IfContext& ctx, const EllipticalSampler& sampler, int draws,
                                std::uint64_t seed, ZForm form = ZForm::linearized) {
  const int q = ctx.structure().q();
  const Vector& rho = ctx.fit().rho;
  for (int i = 0; i + 1 < q; ++i) {
    if (!(rho(i) - rho(i + 1) > 1e-8)) throw DegenerateSpectrum("sigma_theory: repeated eigenvalue");
  }
  std::mt19937_64 rng(seed);
  Matrix acc = Matrix::Zero(q * q, q * q);
  Vector y(q * q);
  for (int d = 0; d < draws; ++d) {
    const Vector X = sampler.draw(rng);
    for (int m = 0; m < q; ++m) {
      for (int r = 0; r < q; ++r) y(m * q + r) = y_mr(X, ctx, m, r, form);
    }
    acc.selfadjointView<Eigen::Lower>().rankUpdate(y);
  }
  SigmaTheory out;
  out.moments = acc.selfadjointView<Eigen::Lower>();
  out.moments /= static_cast<double>(draws);
  out.sigma.resize(q, q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) out.sigma(i, j) = out.moments(i * q + i, j * q + j);
  }
  out.draws = draws;
  return out;
}

// ---------------------------------------------------------------------------
// Replicated experiments.

namespace detail {

/// Runs body(r) for r in [0, count) on `threads` workers; each index is handled once.
template <class Body>
void parallel_for(int count, int threads, Body body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int r = 0; r < count; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int r = t; r < count; r += threads) body(r);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Pairwise summation over a fixed tree.
inline double tree_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : tree_sum(v, 0, v.size()) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return tree_sum(sq, 0, sq.size()) / static_cast<double>(v.size() - 1);
}

inline Matrix covariance_rows(const Matrix& rows) {
  const Vector m = rows.colwise().mean().transpose();
  const Matrix c = rows.rowwise() - m.transpose();
  return c.transpose() * c / static_cast<double>(rows.rows() - 1);
}

}  // namespace detail

struct CovarianceOptions {
  Estimator estimator = Estimator::mcd;
  McdOptions mcd;
  int z_draws = 200000;
  ZForm form = ZForm::linearized;
  int top_entries = 20;
  int threads = 1;
};

struct CovarianceReport {
  int n = 0;
  int replicates = 0;
  Matrix empirical;  // covariance of sqrt(n) vec(T_n - T)
  Matrix theory;     // covariance of vec(Z)
  double max_rel_dev = 0.0;  // over the top_entries largest |theory| entries
  double rho1_empirical_var = 0.0;
  double rho1_theory_var = 0.0;  // sigma_11
  double rho1_rel_dev = 0.0;
  double rho1_bias = 0.0;  // mean of rho_1 estimates minus rho_1
  double runtime_seconds = 0.0;
};

/// Empirical covariance of sqrt(n) vec(T_n - T) over replicates versus the Monte Carlo
/// covariance of vec(Z_gamma). V must have identity diagonal blocks and T a simple leading eigenvalue.
inline CovarianceReport mc_estimator_covariance(const EllipticalModel& model, const BlockStructure& bs,
                                                double gamma, int n, int replicates, std::uint64_t seed,
                                                const CovarianceOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const int q = bs.q();
  if (model.q != q) throw InvalidArgument("mc_estimator_covariance: model dimension mismatch");
  const ScatterMatrix v(model.scatter, bs);
  const bool robust = opt.estimator == Estimator::mcd;
  const IfContext ctx = robust ? IfContext(v, compute_constants(gamma, model)) : IfContext(v);
  const Matrix T = ctx.fit().T;
  const double rho1 = ctx.fit().rho(0);
  if (!(rho1 - ctx.fit().rho(1) > 1e-8)) {
    throw DegenerateSpectrum("mc_estimator_covariance: leading eigenvalue of T is repeated");
  }
  const EllipticalSampler sampler(model);

  Matrix vecs(replicates, q * q);
  std::vector<double> rho_dev(replicates);
  detail::parallel_for(replicates, opt.threads, [&](int r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    const Matrix data = sampler.draw(n, rng);
    MslcaFit fit;
    if (opt.estimator == Estimator::mcd) {
      RobustOptions ro;
      ro.gamma = gamma;
      ro.mcd = opt.mcd;
      ro.mcd.seed = derive_seed(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(r));
      fit = robust_fit(data, bs, ro);
    } else {
      fit = classical_fit(data, bs);
    }
    const Matrix dev = std::sqrt(static_cast<double>(n)) * (fit.T - T);
    vecs.row(r) = Eigen::Map<const Eigen::RowVectorXd>(dev.data(), q * q);
    rho_dev[r] = fit.rho(0) - rho1;
  });

  CovarianceReport rep;
  rep.n = n;
  rep.replicates = replicates;
  rep.empirical = detail::covariance_rows(vecs);

  std::mt19937_64 zrng(derive_seed(seed, 0xFFFFFFFFULL));
  Matrix zsum = Matrix::Zero(q * q, q * q);
  Vector zmean = Vector::Zero(q * q);
  Vector y(q * q);
  for (int d = 0; d < opt.z_draws; ++d) {
    const Vector X = sampler.draw(zrng);
    const Matrix z = robust ? z_gamma_draw(X, ctx, opt.form) : if_T(X, ctx);
    y = Eigen::Map<const Vector>(z.data(), q * q);
    zmean += y;
    zsum.selfadjointView<Eigen::Lower>().rankUpdate(y);
  }
  zmean /= opt.z_draws;
  Matrix second = zsum.selfadjointView<Eigen::Lower>();
  rep.theory = second / opt.z_draws - zmean * zmean.transpose();

  std::vector<std::pair<double, Eigen::Index>> order;
  for (Eigen::Index i = 0; i < rep.theory.size(); ++i) order.emplace_back(std::fabs(rep.theory(i)), i);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  const int top = std::min<int>(opt.top_entries, static_cast<int>(order.size()));
  for (int i = 0; i < top; ++i) {
    const Eigen::Index idx = order[i].second;
    const double th = rep.theory(idx);
    rep.max_rel_dev = std::max(rep.max_rel_dev, std::fabs(rep.empirical(idx) - th) / std::fabs(th));
  }

  std::vector<double> scaled(rho_dev.size());
  for (std::size_t i = 0; i < rho_dev.size(); ++i) scaled[i] = std::sqrt(static_cast<double>(n)) * rho_dev[i];
  rep.rho1_empirical_var = detail::variance(scaled);
  rep.rho1_bias = detail::mean(rho_dev);
  // sigma_11 = Var(beta1' Z beta1).
  {
    std::mt19937_64 yrng(derive_seed(seed, 0xFFFFFFFEULL));
    std::vector<double> ys(opt.z_draws);
    for (int d = 0; d < opt.z_draws; ++d) {
      const Vector X = sampler.draw(yrng);
      ys[d] = robust ? y_mr(X, ctx, 0, 0, opt.form) : if_rho(X, ctx, 0);
    }
    const double m = detail::mean(ys);
    std::vector<double> sq(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) sq[i] = (ys[i] - m) * (ys[i] - m);
    rep.rho1_theory_var = detail::mean(sq);
  }
  rep.rho1_rel_dev = std::fabs(rep.rho1_empirical_var - rep.rho1_theory_var) / rep.rho1_theory_var;
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

enum class ContaminationMode { none, point_mass, cluster };

struct ContaminationSpec {
  double eps = 0.0;
  ContaminationMode mode = ContaminationMode::none;
  Vector x0;             // point mass location, or cluster center
  double cov_scale = 0.0;  // cluster spread (standard deviation per coordinate)
  std::uint64_t seed = 0;

  void validate(int q) const {
    if (!(eps >= 0.0 && eps < 0.5)) throw InvalidArgument("ContaminationSpec: eps must lie in [0, 0.5)");
    if (mode != ContaminationMode::none && eps > 0.0 && x0.size() != q) {
      throw InvalidArgument("ContaminationSpec: x0 has the wrong dimension");
    }
  }
};

/// Replaces the last floor(eps n) rows. Uses its own random stream so that eps = 0 leaves
/// the data untouched.
inline void contaminate(Matrix& data, const ContaminationSpec& spec, std::uint64_t replicate) {
  spec.validate(static_cast<int>(data.cols()));
  const int n = static_cast<int>(data.rows());
  const int m = static_cast<int>(std::floor(spec.eps * n));
  if (m == 0 || spec.mode == ContaminationMode::none) return;
  std::mt19937_64 rng(derive_seed(spec.seed ^ 0xC0A7A11ULL, replicate));
  std::normal_distribution<double> normal;
  for (int i = n - m; i < n; ++i) {
    Vector row = spec.x0;
    if (spec.mode == ContaminationMode::cluster) {
      for (Eigen::Index j = 0; j < row.size(); ++j) row(j) += spec.cov_scale * normal(rng);
    }
    data.row(i) = row.transpose();
  }
}

struct EstimateSummary {
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
};

inline EstimateSummary summarize(const std::vector<double>& estimates, double truth) {
  EstimateSummary out;
  if (estimates.empty()) return out;
  const double m = detail::mean(estimates);
  out.bias = m - truth;
  std::vector<double> sq(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) sq[i] = (estimates[i] - m) * (estimates[i] - m);
  out.variance = detail::mean(sq);
  out.mse = out.variance + out.bias * out.bias;
  return out;
}

struct ExperimentReport {
  int replicates = 0;
  int n = 0;
  std::vector<double> levels{0.10, 0.05, 0.01};
  std::vector<double> robust_rates;
  std::vector<double> classical_rates;
  std::vector<double> robust_qq1_rates;  // same statistic scaled with the q(q+1) divisor
  double robust_stat_mean = 0.0;
  double robust_stat_var = 0.0;
  double classical_stat_mean = 0.0;
  double classical_stat_var = 0.0;
  double rho1 = 0.0;  // population leading coefficient
  EstimateSummary robust_rho1;
  EstimateSummary classical_rho1;
  int dof = 0;
  double runtime_seconds = 0.0;
};

struct SizePowerOptions {
  McdOptions mcd;
  std::vector<double> levels{0.10, 0.05, 0.01};
  bool classical = true;
  int threads = 1;
};

inline ExperimentReport size_power(const EllipticalModel& model, const BlockStructure& bs, double gamma,
                                   int n, int replicates, const ContaminationSpec& contamination,
                                   std::uint64_t seed, const SizePowerOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (model.q != bs.q()) throw InvalidArgument("size_power: model dimension mismatch");
  contamination.validate(bs.q());
  const EllipticalSampler sampler(model);
  const int q = bs.q();
  std::vector<double> robust_p(replicates), robust_p_qq1(replicates), classical_p(replicates, 1.0);
  std::vector<double> robust_stat(replicates), classical_stat(replicates, 0.0);
  std::vector<double> robust_rho(replicates), classical_rho(opt.classical ? replicates : 0);
  TestOptions topt;
  topt.gamma = gamma;
  topt.mcd = opt.mcd;
  detail::parallel_for(replicates, opt.threads, [&](int r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Matrix data = sampler.draw(n, rng);
    contaminate(data, contamination, static_cast<std::uint64_t>(r));
    TestOptions local = topt;
    local.mcd.seed = derive_seed(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(r));
    RobustOptions ro;
    ro.gamma = gamma;
    ro.mcd = local.mcd;
    const MslcaFit fit = robust_fit(data, bs, ro);
    const TestResult res = finish_test(s_stat(fit.T, bs), tau_hat(data, *fit.mcd, gamma, local.tau), n, gamma, bs);
    robust_rho[r] = fit.rho(0);
    robust_p[r] = res.p_value;
    robust_stat[r] = res.statistic;
    const double stat_qq1 = res.statistic * (q + 1.0) / (q + 2.0);
    robust_p_qq1[r] = chi2_sf(stat_qq1, res.dof);
    if (opt.classical) {
      const MslcaFit cfit = classical_fit(data, bs);
      classical_rho[r] = cfit.rho(0);
      const TestResult cl = finish_test(s_stat(cfit.T, bs), 1.0, n, 1.0, bs);
      classical_p[r] = cl.p_value;
      classical_stat[r] = cl.statistic;
    }
  });
  ExperimentReport rep;
  rep.replicates = replicates;
  rep.n = n;
  rep.dof = dof(bs);
  rep.levels = opt.levels;
  for (double level : rep.levels) {
    auto rate = [&](const std::vector<double>& p) {
      const auto hits = std::count_if(p.begin(), p.end(), [&](double v) { return v < level; });
      return static_cast<double>(hits) / static_cast<double>(p.size());
    };
    rep.robust_rates.push_back(rate(robust_p));
    rep.robust_qq1_rates.push_back(rate(robust_p_qq1));
    rep.classical_rates.push_back(opt.classical ? rate(classical_p) : 0.0);
  }
  rep.robust_stat_mean = detail::mean(robust_stat);
  rep.robust_stat_var = detail::variance(robust_stat);
  rep.classical_stat_mean = detail::mean(classical_stat);
  rep.classical_stat_var = detail::variance(classical_stat);
  rep.rho1 = fit_from_scatter(ScatterMatrix(model.scatter, bs), Estimator::classical).rho(0);
  rep.robust_rho1 = summarize(robust_rho, rep.rho1);
  rep.classical_rho1 = summarize(classical_rho, rep.rho1);
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline nlohmann::json to_json(const EstimateSummary& e) {
  return nlohmann::json{{"bias", e.bias}, {"variance", e.variance}, {"mse", e.mse}};
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json rates = nlohmann::json::array();
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    rates.push_back({{"level", r.levels[i]},
                     {"robust", r.robust_rates[i]},
                     {"classical", r.classical_rates[i]},
                     {"robust_qq1", r.robust_qq1_rates[i]}});
  }
  return nlohmann::json{{"experiment", "size_power"},
                        {"replicates", r.replicates},
                        {"n", r.n},
                        {"dof", r.dof},
                        {"rejection_rates", rates},
                        {"robust_statistic", {{"mean", r.robust_stat_mean}, {"variance", r.robust_stat_var}}},
                        {"classical_statistic",
                         {{"mean", r.classical_stat_mean}, {"variance", r.classical_stat_var}}},
                        {"rho1", r.rho1},
                        {"rho1_estimates",
                         {{"robust", to_json(r.robust_rho1)}, {"classical", to_json(r.classical_rho1)}}},
                        {"runtime_seconds", r.runtime_seconds}};
}

inline nlohmann::json to_json(const CovarianceReport& r) {
  return nlohmann::json{{"experiment", "covariance"},
                        {"replicates", r.replicates},
                        {"n", r.n},
                        {"max_rel_dev_top_entries", r.max_rel_dev},
                        {"rho1_empirical_var", r.rho1_empirical_var},
                        {"rho1_theory_var", r.rho1_theory_var},
                        {"rho1_rel_dev", r.rho1_rel_dev},
                        {"rho1_bias", r.rho1_bias},
                        {"runtime_seconds", r.runtime_seconds}};
}

}  // namespace rmslca
