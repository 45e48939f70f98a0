// Acceptance run: one PASS/FAIL line per criterion, plus informational lines.

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "rmslca/influence.hpp"
#include "rmslca/sim.hpp"
#include "support.hpp"

using namespace rmslca;
using rmslca::testing::random_structure;
using rmslca::testing::random_vector;
using rmslca::testing::random_whitened_scatter;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double min_gap(const Vector& rho) {
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < rho.size(); ++i) g = std::min(g, rho(i) - rho(i + 1));
  return g;
}

IfContext robust_context(const ScatterMatrix& v, double gamma = 0.75) {
  return IfContext(v, compute_constants(gamma, EllipticalModel::gaussian(v.structure().q())));
}

// Point with Mahalanobis radius t in a uniformly random direction.
Vector at_radius(const Matrix& root, double t, std::mt19937_64& rng) {
  Vector u = random_vector(static_cast<int>(root.rows()), rng);
  return root * (t / u.norm() * u);
}

Outcome gaussian_constants() {
  double worst_r = 0.0, worst_s = 0.0;
  for (int q : {2, 4, 6}) {
    boost::math::chi_squared_distribution<double> chi_q(q), chi_q2(q + 2);
    for (double g : {0.5, 0.75, 0.9}) {
      const auto c = compute_constants(g, EllipticalModel::gaussian(q));
      const double r2 = boost::math::quantile(chi_q, g);
      worst_r = std::max(worst_r, std::fabs(c.r_gamma * c.r_gamma - r2));
      worst_s = std::max(worst_s, std::fabs(c.sigma2_gamma - boost::math::cdf(chi_q2, r2) / g));
    }
  }
  return {worst_r < 1e-8 && worst_s < 1e-8, fmt("max |r^2 - oracle| = %.2e, max |sigma^2 - oracle| = %.2e", worst_r, worst_s)};
}

Outcome proportionality() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif;
  double worst = 0.0;
  int inside = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto bs = random_structure(rng);
    const IfContext ctx = robust_context(random_whitened_scatter(bs, rng, 2.0 * unif(rng)));
    const auto& c = ctx.constants();
    const Vector x = at_radius(sqrt_psd(ctx.V()), 1.5 * c.r_gamma * unif(rng), rng);
    const double ind = ctx.inside(x) ? 1.0 : 0.0;
    inside += ctx.inside(x);
    const Matrix lhs = if_T_robust(x, ctx) + (ind / (c.sigma2_gamma * 2.0 * c.kappa0)) * if_T(x, ctx);
    worst = std::max(worst, lhs.norm());
  }
  return {worst < 1e-12, fmt("max residual %.2e over 1000 cases (%d inside E)", worst, inside)};
}

Outcome bounds() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unif;
  const BlockStructure bs({2, 1, 2});
  const IfContext ctx = robust_context(random_whitened_scatter(bs, rng, 1.5));
  const IfContext null = robust_context(ScatterMatrix(Matrix::Identity(5, 5), bs));
  const double r = ctx.constants().r_gamma;
  const Matrix root = sqrt_psd(ctx.V());
  const Matrix id = Matrix::Identity(5, 5);
  double sup1 = 0.0, sup2 = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double t = 1.2 * r * std::pow(unif(rng), 0.2);
    sup1 = std::max(sup1, spectral_norm(if_T_robust(at_radius(root, t, rng), ctx)));
    sup2 = std::max(sup2, if2_S(at_radius(id, t, rng), null));
  }
  const double b1 = bound_if_T_robust(ctx), b2 = bound_if2(null);
  return {sup1 <= b1 && sup2 <= b2,
          fmt("sup ||IF_T robust|| = %.4g <= %.4g; sup IF2 = %.4g <= %.4g", sup1, b1, sup2, b2)};
}

Outcome witness() {
  std::mt19937_64 rng(303);
  const BlockStructure bs({2, 3, 1});
  const IfContext ctx(random_whitened_scatter(bs, rng, 1.5));
  const auto rep = unbounded_witness(ctx, {10.0, 100.0, 1000.0});
  const auto [lo, hi] = std::minmax_element(rep.norm_by_t2.begin(), rep.norm_by_t2.end());
  const double spread = *hi / *lo - 1.0;
  return {*lo > 0.0 && spread < 0.05, fmt("||IF(t x0)||/t^2 = %.6g, %.6g, %.6g (spread %.1e)", rep.norm_by_t2[0],
                                          rep.norm_by_t2[1], rep.norm_by_t2[2], spread)};
}

Outcome two_set() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> pd(1, 3);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const BlockStructure bs({pd(rng), pd(rng)});
    const IfContext ctx = robust_context(random_whitened_scatter(bs, rng, 2.0));
    const Vector x = random_vector(bs.q(), rng);
    std::uniform_int_distribution<int> jd(0, std::min(bs.dim(0), bs.dim(1)) - 1);
    const int j = jd(rng);
    const double rho = ctx.fit().rho(j);
    worst = std::max(worst, std::fabs(2.0 * rho * if_rho(x, ctx, j) - two_set_if_rho2(x, ctx, j)));
    worst = std::max(worst, std::fabs(2.0 * rho * if_rho_robust(x, ctx, j) - two_set_if_rho2_robust(x, ctx, j)));
  }
  return {worst < 1e-10, fmt("max |difference| %.2e over 100 cases (classical and robust)", worst)};
}

Outcome finite_differences() {
  std::mt19937_64 rng(505);
  double wT = 0.0, wr = 0.0, wa = 0.0;
  int configs = 0;
  while (configs < 50) {
    const auto bs = random_structure(rng);
    const auto v = random_whitened_scatter(bs, rng, 2.0);
    const IfContext ctx(v);
    if (min_gap(ctx.fit().rho) <= 0.05) continue;
    ++configs;
    const Vector x = random_vector(bs.q(), rng);
    const Matrix an = if_T(x, ctx);
    wT = std::max(wT, (fd_oracle(x, v, FdTarget::T) - an).norm() / an.norm());
    Vector fr(bs.q()), ar(bs.q());
    for (int j = 0; j < bs.q(); ++j) {
      fr(j) = fd_oracle(x, v, FdTarget::rho, j)(0, 0);
      ar(j) = if_rho(x, ctx, j);
      const Vector aa = if_alpha(x, ctx, j);
      wa = std::max(wa, (fd_oracle(x, v, FdTarget::alpha, j).col(0) - aa).norm() / aa.norm());
    }
    wr = std::max(wr, (fr - ar).norm() / ar.norm());
  }
  return {wT < 1e-4 && wr < 1e-4 && wa < 1e-4,
          fmt("max relative error T %.2e, rho %.2e, alpha %.2e over 50 configurations", wT, wr, wa)};
}

Outcome null_calibration() {
  const BlockStructure bs({2, 2, 2});
  SizePowerOptions opt;
  opt.mcd.restarts = 50;
  opt.threads = threads();
  const auto rep = size_power(EllipticalModel::gaussian(6), bs, 0.75, 500, 2000, ContaminationSpec{}, 2024, opt);
  const double rate = rep.robust_rates[1];
  std::printf("  info: rejection at 10%%/5%%/1%%: robust %.4f/%.4f/%.4f, classical %.4f/%.4f/%.4f\n",
              rep.robust_rates[0], rep.robust_rates[1], rep.robust_rates[2], rep.classical_rates[0],
              rep.classical_rates[1], rep.classical_rates[2]);
  std::printf("  info: with the q(q+1) divisor for tau: %.4f/%.4f/%.4f\n", rep.robust_qq1_rates[0],
              rep.robust_qq1_rates[1], rep.robust_qq1_rates[2]);
  std::printf("  info: robust statistic mean %.3f, variance %.3f (chi2_%d: %d, %d)\n", rep.robust_stat_mean,
              rep.robust_stat_var, rep.dof, rep.dof, 2 * rep.dof);
  return {rate >= 0.035 && rate <= 0.065,
          fmt("rejection at 5%% = %.4f over 2000 replicates (n = 500, 50 MCD restarts)", rate)};
}

Outcome norm_identity() {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto bs = random_structure(rng);
    const IfContext ctx(random_whitened_scatter(bs, rng, 2.0));
    const Vector x = random_vector(bs.q(), rng);
    worst = std::max(worst, std::fabs(if_T(x, ctx).squaredNorm() - if_T_norm_sq(x, ctx)));
  }
  return {worst < 1e-10, fmt("max |direct - closed form| %.2e over 1000 cases", worst)};
}

Outcome mcd_equivalence() {
  int agree = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix x = sample(EllipticalModel::gaussian(4), 20, 9000 + static_cast<std::uint64_t>(t));
    const double exact = std::exp(exhaustive_mcd(x, 15).objective);
    McdOptions opt;
    opt.seed = static_cast<std::uint64_t>(t);
    const double fast = std::exp(fast_mcd(x, 15, opt).objective);
    worst_gap = std::max(worst_gap, (fast - exact) / exact);
    agree += std::fabs(fast - exact) <= 1e-12;
  }
  return {agree >= 95, fmt("%d/100 trials reach the exhaustive optimum (worst relative excess %.2e)", agree, worst_gap)};
}

// Top-entry relative deviation between an empirical covariance and a theory covariance.
double top_deviation(const Matrix& emp, const Matrix& th, int top) {
  std::vector<std::pair<double, Eigen::Index>> order;
  for (Eigen::Index i = 0; i < th.size(); ++i) order.emplace_back(std::fabs(th(i)), i);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  double worst = 0.0;
  for (int i = 0; i < top; ++i) {
    const auto idx = order[i].second;
    worst = std::max(worst, std::fabs(emp(idx) - th(idx)) / std::fabs(th(idx)));
  }
  return worst;
}

Outcome covariance() {
  const BlockStructure bs({2, 2});
  Matrix v = Matrix::Identity(4, 4);
  Matrix v12(2, 2);
  v12 << 0.47, 0.43, 0.43, 0.47;
  v.topRightCorner(2, 2) = v12;
  v.bottomLeftCorner(2, 2) = v12.transpose();
  const auto model = EllipticalModel::gaussian(v);
  CovarianceOptions opt;
  opt.mcd.restarts = 50;
  opt.z_draws = 400000;
  opt.threads = threads();
  const auto rep = mc_estimator_covariance(model, bs, 0.75, 2000, 1000, 7, opt);

  const IfContext ctx(ScatterMatrix(v, bs), compute_constants(0.75, model));
  const EllipticalSampler sampler(model);
  std::mt19937_64 rng(8);
  Matrix second = Matrix::Zero(16, 16);
  Vector mean = Vector::Zero(16);
  const int draws = 200000;
  for (int d = 0; d < draws; ++d) {
    const Matrix z = z_gamma_draw(sampler.draw(rng), ctx, ZForm::as_printed);
    const Vector y = Eigen::Map<const Vector>(z.data(), 16);
    mean += y;
    second += y * y.transpose();
  }
  mean /= draws;
  const Matrix printed = second / draws - mean * mean.transpose();
  std::printf("  info: rho_1 var empirical %.4f vs sigma_11 %.4f; as-printed Z top-20 deviation %.3f\n",
              rep.rho1_empirical_var, rep.rho1_theory_var, top_deviation(rep.empirical, printed, 20));
  return {rep.max_rel_dev < 0.15 && rep.rho1_rel_dev < 0.15,
          fmt("top-20 max relative deviation %.3f, sigma_11 relative deviation %.3f (n = 2000, 1000 replicates)",
              rep.max_rel_dev, rep.rho1_rel_dev)};
}

Outcome second_order() {
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> unif;
  const BlockStructure bs({2, 3, 1});
  const IfContext ctx = robust_context(ScatterMatrix(Matrix::Identity(6, 6), bs));
  const Matrix id = Matrix::Identity(6, 6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vector x = at_radius(id, 1.3 * ctx.constants().r_gamma * unif(rng), rng);
    worst = std::max(worst, std::fabs(if2_S(x, ctx) - if2_S_consistency(x, ctx)));
  }
  return {worst < 1e-10, fmt("max |IF2 - 2 sum tr(pi pi')| %.2e over 1000 points", worst)};
}

Outcome scale_invariance() {
  std::mt19937_64 rng(1212);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto bs = random_structure(rng);
    const Matrix v = rmslca::testing::random_spd(bs.q(), rng);
    const Matrix T = build_T(ScatterMatrix(v, bs));
    for (double c : {1e-3, 1.0, 1e3}) {
      worst = std::max(worst, (build_T(ScatterMatrix(c * v, bs)) - T).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-12, fmt("max entrywise difference %.2e over 100 scatters", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0: no limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Gaussian constants vs chi-square oracle", 5, gaussian_constants},
      {2, "robust/classical IF proportionality", 10, proportionality},
      {3, "robust IF and second-order IF bounds", 60, bounds},
      {4, "quadratic growth along the witness ray", 1, witness},
      {5, "two-set reductions of the rho^2 IF", 5, two_set},
      {6, "classical IFs vs finite differences", 30, finite_differences},
      {7, "null calibration of the robust test", 0, null_calibration},
      {8, "Frobenius norm identity for IF(T)", 10, norm_identity},
      {9, "fast MCD reaches exhaustive optimum", 60, mcd_equivalence},
      {10, "covariance of sqrt(n)(T_n - T)", 0, covariance},
      {11, "second-order IF consistency", 10, second_order},
      {12, "scale invariance of T", 1, scale_invariance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %d: %s  %s: %s [%.2f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
