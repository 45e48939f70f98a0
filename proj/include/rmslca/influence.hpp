#pragma once

// Influence functions of T, rho_j and alpha^(j) for the classical and the MCD-based
// functionals, the second-order influence function of the test statistic, and the
// associated sup-norm bounds. Every formula assumes V_k = I_k for all k.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rmslca/blocks.hpp"
#include "rmslca/elliptical.hpp"
#include "rmslca/errors.hpp"
#include "rmslca/mslca.hpp"

namespace rmslca {

class IfContext {
 public:
  explicit IfContext(const ScatterMatrix& v, std::optional<RobustConstants> constants = std::nullopt,
                     double tol = 1e-8)
      : v_(v), constants_(std::move(constants)) {
    const auto& bs = v_.structure();
    for (int k = 0; k < bs.num_blocks(); ++k) {
      const double dev = (v_.block(k, k) - Matrix::Identity(bs.dim(k), bs.dim(k))).norm();
      if (!(dev < tol)) {
        throw AssumptionViolated("IfContext: diagonal block " + std::to_string(k) +
                                 " differs from the identity by " + std::to_string(dev) +
                                 "; whiten the blocks first");
      }
    }
    if (constants_ && constants_->q != bs.q()) {
      throw InvalidArgument("IfContext: constants computed for a different dimension");
    }
    fit_ = fit_from_scatter(v_, Estimator::classical);
    g_norm_ = g_map(v_.entries(), bs).norm();
  }

  const ScatterMatrix& scatter() const noexcept { return v_; }
  const Matrix& V() const noexcept { return v_.entries(); }
  const BlockStructure& structure() const noexcept { return v_.structure(); }
  const MslcaFit& fit() const noexcept { return fit_; }
  bool has_constants() const noexcept { return constants_.has_value(); }

  const RobustConstants& constants() const {
    if (!constants_) throw MissingConstants("robust influence functions need RobustConstants");
    return *constants_;
  }

  /// ||V^{-1/2} x||, cached factors computed on first use.
  double mahalanobis(const Vector& x) const {
    if (!v_inv_sqrt_) v_inv_sqrt_ = inv_sqrt_psd(V());
    return (*v_inv_sqrt_ * x).norm();
  }

  /// 1_{E_gamma}(x); the boundary counts as inside.
  bool inside(const Vector& x) const {
    const double r = constants().r_gamma;
    if (!v_inv_) v_inv_ = inv_sqrt_psd(V()) * inv_sqrt_psd(V());
    return in_ellipsoid(x, *v_inv_, r);
  }

  double g_norm() const noexcept { return g_norm_; }

 private:
  ScatterMatrix v_;
  std::optional<RobustConstants> constants_;
  MslcaFit fit_;
  double g_norm_ = 0.0;
  mutable std::optional<Matrix> v_inv_sqrt_;
  mutable std::optional<Matrix> v_inv_;
};

namespace detail {

inline void check_point(const Vector& x, const IfContext& ctx) {
  if (x.size() != ctx.structure().q()) {
    throw InvalidArgument("influence: point has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(ctx.structure().q()));
  }
}

inline void check_index(int j, const IfContext& ctx) {
  if (j < 0 || j >= ctx.structure().q()) throw InvalidArgument("influence: eigen index out of range");
}

inline void check_gaps(int j, const IfContext& ctx, double gap_tol) {
  const Vector& rho = ctx.fit().rho;
  for (int m = 0; m < rho.size(); ++m) {
    if (m != j && !(std::fabs(rho(j) - rho(m)) > gap_tol)) {
      throw DegenerateSpectrum("eigenvalue gap |rho_" + std::to_string(j) + " - rho_" +
                               std::to_string(m) + "| below tolerance");
    }
  }
}

inline double sigma(const IfContext& ctx) { return ctx.constants().sigma_gamma(); }

}  // namespace detail

/// x x' - V.
inline Matrix if_scatter(const Vector& x, const IfContext& ctx) {
  detail::check_point(x, ctx);
  return x * x.transpose() - ctx.V();
}

/// -1/(2 kappa0) 1_E(x) x x' + w(||V^{-1/2} x||) V.
inline Matrix if_scatter_robust(const Vector& x, const IfContext& ctx) {
  detail::check_point(x, ctx);
  const auto& c = ctx.constants();
  const double w = weight_w(ctx.mahalanobis(x), c);
  Matrix out = w * ctx.V();
  if (ctx.inside(x)) out += (-0.5 / c.kappa0) * (x * x.transpose());
  return out;
}

/// Double sum over k != l of -1/2 tau_k*(x_k x_k') V_kl tau_l - 1/2 tau_l* V_lk (x_k x_k') tau_k
/// + tau_k* (x_k x_l') tau_l.
inline Matrix if_T(const Vector& x, const IfContext& ctx) {
  detail::check_point(x, ctx);
  const auto& bs = ctx.structure();
  const int K = bs.num_blocks();
  Matrix out = Matrix::Zero(bs.q(), bs.q());
  for (int k = 0; k < K; ++k) {
    const Vector xk = extract(k, x, bs);
    const Matrix xxk = xk * xk.transpose();
    for (int l = 0; l < K; ++l) {
      if (l == k) continue;
      const Vector xl = extract(l, x, bs);
      const Matrix vkl = ctx.scatter().block(k, l);
      out.block(bs.offset(k), bs.offset(l), bs.dim(k), bs.dim(l)) +=
          -0.5 * xxk * vkl + xk * xl.transpose();
      out.block(bs.offset(l), bs.offset(k), bs.dim(l), bs.dim(k)) += -0.5 * vkl.transpose() * xxk;
    }
  }
  return out;
}

/// ||IF(x; T)||_F^2 from block inner products, without forming the matrix:
/// sum_{k != l} 1/2 ||V_lk x_k||^2 ||x_k||^2 - 2 <V_lk x_k, x_l> ||x_k||^2
///   + 1/2 <V_lk x_k, x_l>^2 + ||x_k||^2 ||x_l||^2.
inline double if_T_norm_sq(const Vector& x, const IfContext& ctx) {
  detail::check_point(x, ctx);
  const auto& bs = ctx.structure();
  double acc = 0.0;
  for (int k = 0; k < bs.num_blocks(); ++k) {
    const Vector xk = extract(k, x, bs);
    const double nk = xk.squaredNorm();
    for (int l = 0; l < bs.num_blocks(); ++l) {
      if (l == k) continue;
      const Vector xl = extract(l, x, bs);
      const Vector a = ctx.scatter().block(l, k) * xk;
      const double ip = a.dot(xl);
      acc += 0.5 * a.squaredNorm() * nk - 2.0 * ip * nk + 0.5 * ip * ip + nk * xl.squaredNorm();
    }
  }
  return acc;
}

struct WitnessReport {
  Vector x0;
  std::vector<double> t;
  std::vector<double> norm;        // ||IF(t x0)||_F
  std::vector<double> norm_by_t2;  // ||IF(t x0)||_F / t^2
};

/// Ray along which the classical IF of T grows without bound.
inline WitnessReport unbounded_witness(const IfContext& ctx,
                                       std::vector<double> ts = {1.0, 10.0, 100.0, 1000.0}) {
  const auto& bs = ctx.structure();
  const int K = bs.num_blocks();
  double best = 0.0;
  int bk = -1, bl = -1;
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      if (l == k) continue;
      const double nrm = ctx.scatter().block(l, k).norm();
      if (nrm > best) {
        best = nrm;
        bk = k;
        bl = l;
      }
    }
  }
  WitnessReport rep;
  if (bk >= 0 && best > 0.0) {
    Eigen::JacobiSVD<Matrix> svd(ctx.scatter().block(bl, bk), Eigen::ComputeFullV);
    rep.x0 = embed(bk, svd.matrixV().col(0), bs);
  } else {
    rep.x0 = Vector::Ones(bs.q());
  }
  rep.t = std::move(ts);
  for (double t : rep.t) {
    const double nrm = if_T(t * rep.x0, ctx).norm();
    rep.norm.push_back(nrm);
    rep.norm_by_t2.push_back(t == 0.0 ? 0.0 : nrm / (t * t));
  }
  return rep;
}

/// sum_{k != l} <beta_k, x_k> <x_l - V_lk x_k, beta_l>.
inline double if_rho(const Vector& x, const IfContext& ctx, int j) {
  detail::check_point(x, ctx);
  detail::check_index(j, ctx);
  const auto& bs = ctx.structure();
  const Vector beta = ctx.fit().beta.col(j);
  double acc = 0.0;
  for (int k = 0; k < bs.num_blocks(); ++k) {
    const Vector xk = extract(k, x, bs);
    const double bx = extract(k, beta, bs).dot(xk);
    for (int l = 0; l < bs.num_blocks(); ++l) {
      if (l == k) continue;
      const Vector r = extract(l, x, bs) - ctx.scatter().block(l, k) * xk;
      acc += bx * r.dot(extract(l, beta, bs));
    }
  }
  return acc;
}

namespace detail {

// The m != j expansion shared by both forms of the alpha IF.
inline Vector alpha_rotation(const Vector& x, const IfContext& ctx, int j) {
  const auto& bs = ctx.structure();
  const auto& fit = ctx.fit();
  const Vector bj = fit.beta.col(j);
  Vector out = Vector::Zero(bs.q());
  for (int m = 0; m < bs.q(); ++m) {
    if (m == j) continue;
    const Vector bm = fit.beta.col(m);
    double coef = 0.0;
    for (int k = 0; k < bs.num_blocks(); ++k) {
      const Vector xk = extract(k, x, bs);
      for (int l = 0; l < bs.num_blocks(); ++l) {
        if (l == k) continue;
        const Matrix vkl = ctx.scatter().block(k, l);
        const Vector xl = extract(l, x, bs);
        coef += extract(k, bm, bs).dot(xk) * xl.dot(extract(l, bj, bs)) -
                0.5 * extract(k, bm, bs).dot(xk) * xk.dot(vkl * extract(l, bj, bs)) -
                0.5 * xk.dot(vkl * extract(l, bm, bs)) * xk.dot(extract(k, bj, bs));
      }
    }
    out += coef / (fit.rho(j) - fit.rho(m)) * bm;
  }
  return out;
}

inline double block_projection_sq(const Vector& x, const Vector& beta, const BlockStructure& bs) {
  double acc = 0.0;
  for (int k = 0; k < bs.num_blocks(); ++k) {
    const double d = extract(k, beta, bs).dot(extract(k, x, bs));
    acc += d * d;
  }
  return acc;
}

}  // namespace detail

/// IF of alpha^(j) = f(V)^{-1/2} beta^(j):
/// sum_{m != j} <beta^m, IF_T beta^j>/(rho_j - rho_m) beta^m - 1/2 (f(x x') - I) beta^j.
inline Vector if_alpha(const Vector& x, const IfContext& ctx, int j, double gap_tol = 1e-8) {
  detail::check_point(x, ctx);
  detail::check_index(j, ctx);
  detail::check_gaps(j, ctx, gap_tol);
  const auto& bs = ctx.structure();
  const Vector bj = ctx.fit().beta.col(j);
  const Matrix fx = f_map(x * x.transpose(), bs);
  return detail::alpha_rotation(x, ctx, j) - 0.5 * (fx * bj - bj);
}

/// Literal transcription of the published alpha IF; its last term carries an extra
/// -1/2 (sum_k <beta_k, x_k>^2 - 1) beta^j relative to if_alpha.
inline Vector if_alpha_as_printed(const Vector& x, const IfContext& ctx, int j,
                                  double gap_tol = 1e-8) {
  detail::check_point(x, ctx);
  detail::check_index(j, ctx);
  detail::check_gaps(j, ctx, gap_tol);
  const auto& bs = ctx.structure();
  const Vector bj = ctx.fit().beta.col(j);
  const Matrix fx = f_map(x * x.transpose(), bs);
  const double c = detail::block_projection_sq(x, bj, bs);
  return detail::alpha_rotation(x, ctx, j) - 0.5 * (fx * bj + c * bj - 2.0 * bj);
}

/// -sigma^{-2}/(2 kappa0) 1_E(x) IF(x; T).
inline Matrix if_T_robust(const Vector& x, const IfContext& ctx) {
  detail::check_point(x, ctx);
  const auto& c = ctx.constants();
  if (!ctx.inside(x)) return Matrix::Zero(x.size(), x.size());
  return (-1.0 / (c.sigma2_gamma * 2.0 * c.kappa0)) * if_T(x, ctx);
}

inline double if_rho_robust(const Vector& x, const IfContext& ctx, int j) {
  const auto& c = ctx.constants();
  detail::check_point(x, ctx);
  if (!ctx.inside(x)) return 0.0;
  return (-1.0 / (c.sigma2_gamma * 2.0 * c.kappa0)) * if_rho(x, ctx, j);
}

/// Chain rule through the MCD scatter IF:
/// -sigma^{-3}/(2 kappa0) 1_E IF_alpha
///   + sigma^{-3} {(1/(4 kappa0) - kappa1/2 - kappa2/2 ||V^{-1/2}x||^2) 1_E - kappa4/2} beta^j.
inline Vector if_alpha_robust(const Vector& x, const IfContext& ctx, int j, double gap_tol = 1e-8) {
  const auto& c = ctx.constants();
  detail::check_point(x, ctx);
  detail::check_index(j, ctx);
  detail::check_gaps(j, ctx, gap_tol);
  const double s3 = std::pow(detail::sigma(ctx), -3.0);
  const Vector bj = ctx.fit().beta.col(j);
  if (!ctx.inside(x)) return (-0.5 * s3 * c.kappa4) * bj;
  const double t = ctx.mahalanobis(x);
  const double scal = 0.25 / c.kappa0 - 0.5 * c.kappa1 - 0.5 * c.kappa2 * t * t - 0.5 * c.kappa4;
  return (-s3 / (2.0 * c.kappa0)) * if_alpha(x, ctx, j, gap_tol) + s3 * scal * bj;
}

/// Literal transcription of the published robust alpha IF (built on if_alpha_as_printed).
inline Vector if_alpha_robust_as_printed(const Vector& x, const IfContext& ctx, int j,
                                         double gap_tol = 1e-8) {
  const auto& c = ctx.constants();
  detail::check_point(x, ctx);
  detail::check_index(j, ctx);
  detail::check_gaps(j, ctx, gap_tol);
  const double s3 = std::pow(detail::sigma(ctx), -3.0);
  const Vector bj = ctx.fit().beta.col(j);
  if (!ctx.inside(x)) return (-s3 * c.kappa4) * bj;
  const double t = ctx.mahalanobis(x);
  const double scal = 0.5 / c.kappa0 - c.kappa1 - c.kappa2 * t * t - c.kappa4;
  return (-s3 / (2.0 * c.kappa0)) * if_alpha_as_printed(x, ctx, j, gap_tol) + s3 * scal * bj;
}

namespace detail {

inline void require_null(const IfContext& ctx) {
  if (ctx.g_norm() > 1e-8) {
    throw NotNullHypothesis("second-order IF needs uncorrelated blocks; ||g(V)||_F = " +
                            std::to_string(ctx.g_norm()));
  }
}

inline double cross_block_norms(const Vector& x, const BlockStructure& bs) {
  double acc = 0.0;
  for (int k = 1; k < bs.num_blocks(); ++k) {
    const double nk = extract(k, x, bs).squaredNorm();
    for (int l = 0; l < k; ++l) acc += nk * extract(l, x, bs).squaredNorm();
  }
  return acc;
}

}  // namespace detail

/// Second derivative of S_gamma along the contamination path under H0:
/// sigma^{-4}/(2 kappa0^2) 1_E(x) sum_{k > l} ||x_k||^2 ||x_l||^2.
inline double if2_S(const Vector& x, const IfContext& ctx) {
  detail::check_point(x, ctx);
  detail::require_null(ctx);
  const auto& c = ctx.constants();
  if (!ctx.inside(x)) return 0.0;
  const double s4 = c.sigma2_gamma * c.sigma2_gamma;
  return detail::cross_block_norms(x, ctx.structure()) / (2.0 * s4 * c.kappa0 * c.kappa0);
}

/// Published closed form, sigma^{-4}/(4 kappa0^2) 1_E(x) sum ||x_k||^2 ||x_l||^2 (half of if2_S).
inline double if2_S_as_printed(const Vector& x, const IfContext& ctx) {
  detail::check_point(x, ctx);
  detail::require_null(ctx);
  const auto& c = ctx.constants();
  if (!ctx.inside(x)) return 0.0;
  const double s4 = c.sigma2_gamma * c.sigma2_gamma;
  return detail::cross_block_norms(x, ctx.structure()) / (4.0 * s4 * c.kappa0 * c.kappa0);
}

/// 2 sum_{k > l} tr(pi_kl(IF_T_gamma) pi_kl(IF_T_gamma)').
inline double if2_S_consistency(const Vector& x, const IfContext& ctx) {
  detail::require_null(ctx);
  const auto& bs = ctx.structure();
  const Matrix a = if_T_robust(x, ctx);
  double acc = 0.0;
  for (int k = 1; k < bs.num_blocks(); ++k) {
    for (int l = 0; l < k; ++l) acc += pi_block(a, k, l, bs).squaredNorm();
  }
  return 2.0 * acc;
}

/// sigma^{-2}/(2|kappa0|) K(K-1) (||V|| + 1) ||V^{1/2}||^2 r^2, spectral norms.
inline double bound_if_T_robust(const IfContext& ctx) {
  const auto& c = ctx.constants();
  const double K = ctx.structure().num_blocks();
  const double nv = spectral_norm(ctx.V());
  const double nroot = spectral_norm(sqrt_psd(ctx.V()));
  return K * (K - 1.0) * (nv + 1.0) * nroot * nroot * c.r_gamma * c.r_gamma /
         (2.0 * c.sigma2_gamma * std::fabs(c.kappa0));
}

/// sigma^{-4}/(4 kappa0^2) (K-1)^2 ||V^{1/2}||^4 r^4.
inline double bound_if2(const IfContext& ctx) {
  const auto& c = ctx.constants();
  const double K = ctx.structure().num_blocks();
  const double nroot = spectral_norm(sqrt_psd(ctx.V()));
  const double r2 = c.r_gamma * c.r_gamma;
  return (K - 1.0) * (K - 1.0) * std::pow(nroot, 4) * r2 * r2 /
         (4.0 * c.sigma2_gamma * c.sigma2_gamma * c.kappa0 * c.kappa0);
}

/// Two-set form of IF(rho_j^2): 2 rho u v - rho^2 u^2 - rho^2 v^2 with u = <x_1, sqrt2 beta_1>,
/// v = <x_2, sqrt2 beta_2>.
inline double two_set_if_rho2(const Vector& x, const IfContext& ctx, int j) {
  const auto& bs = ctx.structure();
  if (bs.num_blocks() != 2) throw InvalidArgument("two_set_if_rho2: needs K = 2");
  detail::check_point(x, ctx);
  detail::check_index(j, ctx);
  const Vector b = ctx.fit().beta.col(j);
  const double rho = ctx.fit().rho(j);
  const double u = std::sqrt(2.0) * extract(0, b, bs).dot(extract(0, x, bs));
  const double v = std::sqrt(2.0) * extract(1, b, bs).dot(extract(1, x, bs));
  return 2.0 * rho * u * v - rho * rho * u * u - rho * rho * v * v;
}

inline double two_set_if_rho2_robust(const Vector& x, const IfContext& ctx, int j) {
  const auto& c = ctx.constants();
  if (!ctx.inside(x)) return 0.0;
  return (-1.0 / (c.sigma2_gamma * 2.0 * c.kappa0)) * two_set_if_rho2(x, ctx, j);
}

struct IfDiagnostic {
  double if_T_robust_norm = 0.0;
  double if_T_norm = 0.0;
  double if_rho = 0.0;
  double if_rho_robust = 0.0;
  bool inside = false;
};

/// Per-row diagnostics for a (whitened, centered) data matrix.
inline std::vector<IfDiagnostic> if_diagnostics(const Matrix& data, const IfContext& ctx, int j) {
  std::vector<IfDiagnostic> out;
  out.reserve(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Vector x = data.row(i).transpose();
    IfDiagnostic d;
    d.inside = ctx.inside(x);
    d.if_T_norm = if_T(x, ctx).norm();
    d.if_T_robust_norm = if_T_robust(x, ctx).norm();
    d.if_rho = if_rho(x, ctx, j);
    d.if_rho_robust = if_rho_robust(x, ctx, j);
    out.push_back(d);
  }
  return out;
}

}  // namespace rmslca
