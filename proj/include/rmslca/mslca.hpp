#pragma once

// Multiple-set linear canonical analysis: T = f(V)^{-1/2} g(V) f(V)^{-1/2} and its
// spectral decomposition, from the sample covariance or the raw MCD scatter.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <optional>
#include <random>
#include <string>

#include "rmslca/blocks.hpp"
#include "rmslca/errors.hpp"
#include "rmslca/mcd.hpp"

namespace rmslca {

enum class Estimator { classical, mcd };

inline std::string to_string(Estimator e) { return e == Estimator::classical ? "classical" : "mcd"; }

struct Spectrum {
  Vector rho;   // non-increasing
  Matrix beta;  // orthonormal columns
  Matrix alpha; // Phi^{-1/2} beta
};

struct MslcaFit {
  Matrix T;
  Vector rho;
  Matrix beta;
  Matrix alpha;
  Matrix phi;  // f(V)
  ScatterMatrix scatter_used;
  Estimator estimator = Estimator::classical;
  std::optional<double> gamma;
  std::optional<McdFit> mcd;

  const BlockStructure& structure() const { return scatter_used.structure(); }
};

inline Matrix build_T(const ScatterMatrix& v) {
  const auto& bs = v.structure();
  const Matrix w = inv_sqrt_psd(f_map(v.entries(), bs));
  return symmetrize(w * g_map(v.entries(), bs) * w);
}

/// Eigen-decomposition of T sorted non-increasing. Each beta column has its
/// largest-magnitude entry positive (first such entry on ties).
inline Spectrum spectral(const Matrix& T, const Matrix& phi) {
  if (T.rows() != T.cols() || phi.rows() != T.rows() || phi.cols() != T.cols()) {
    throw InvalidArgument("spectral: shape mismatch");
  }
  const Eigen::Index q = T.rows();
  Spectrum s;
  if (T.cwiseAbs().maxCoeff() == 0.0) {
    s.rho = Vector::Zero(q);
    s.beta = Matrix::Identity(q, q);
  } else {
    auto es = symmetric_eigen(T);
    s.rho = es.eigenvalues().reverse();
    s.beta = es.eigenvectors().rowwise().reverse();
    for (Eigen::Index j = 0; j < q; ++j) {
      Eigen::Index arg = 0;
      double best = -1.0;
      for (Eigen::Index i = 0; i < q; ++i) {
        const double a = std::fabs(s.beta(i, j));
        if (a > best * (1.0 + 1e-12)) {
          best = a;
          arg = i;
        }
      }
      if (s.beta(arg, j) < 0.0) s.beta.col(j) *= -1.0;
    }
  }
  s.alpha = inv_sqrt_psd(phi) * s.beta;
  return s;
}

inline MslcaFit fit_from_scatter(const ScatterMatrix& v, Estimator e) {
  MslcaFit fit;
  fit.scatter_used = v;
  fit.phi = f_map(v.entries(), v.structure());
  fit.T = build_T(v);
  auto s = spectral(fit.T, fit.phi);
  fit.rho = std::move(s.rho);
  fit.beta = std::move(s.beta);
  fit.alpha = std::move(s.alpha);
  fit.estimator = e;
  return fit;
}

/// Centered covariance with divisor n.
inline Matrix sample_covariance(const Matrix& data) {
  if (data.rows() < 1) throw InvalidArgument("sample_covariance: empty data");
  const Vector mean = data.colwise().mean().transpose();
  const Matrix c = data.rowwise() - mean.transpose();
  return symmetrize(c.transpose() * c / static_cast<double>(data.rows()));
}

inline MslcaFit classical_fit(const Matrix& data, const BlockStructure& bs) {
  if (data.cols() != bs.q()) {
    throw InvalidArgument("classical_fit: data has " + std::to_string(data.cols()) +
                          " columns, block structure needs " + std::to_string(bs.q()));
  }
  return fit_from_scatter(ScatterMatrix(sample_covariance(data), bs), Estimator::classical);
}

enum class McdMethod { fast, exhaustive };

struct RobustOptions {
  double gamma = 0.75;
  McdMethod method = McdMethod::fast;
  McdOptions mcd;
};

/// T built from the raw MCD scatter; the sigma_gamma^2 correction cancels in T.
inline MslcaFit robust_fit(const Matrix& data, const BlockStructure& bs, const RobustOptions& opt = {}) {
  if (data.cols() != bs.q()) {
    throw InvalidArgument("robust_fit: data has " + std::to_string(data.cols()) +
                          " columns, block structure needs " + std::to_string(bs.q()));
  }
  const int h = subset_size(static_cast<int>(data.rows()), opt.gamma);
  McdFit m = opt.method == McdMethod::exhaustive ? exhaustive_mcd(data, h) : fast_mcd(data, h, opt.mcd);
  MslcaFit fit = fit_from_scatter(ScatterMatrix(m.raw_scatter, bs), Estimator::mcd);
  fit.gamma = opt.gamma;
  fit.mcd = std::move(m);
  return fit;
}

struct MaximizationReport {
  int trials = 0;
  double alpha_objective = 0.0;        // empirical E<alpha1, X>^2 under the constraint
  double best_random_objective = 0.0;  // largest over the random directions
  bool passed = true;
};

/// Random directions in the empirical constraint set sum_k var(<a_k, X_k>) = 1 never beat
/// alpha^(1). Uses the centered sample covariance of `data`, so it targets classical fits.
inline MaximizationReport maximization_check(const MslcaFit& fit, const Matrix& data, int trials,
                                             std::uint64_t seed, double tol = 1e-8) {
  const auto& bs = fit.structure();
  const Matrix v = sample_covariance(data);
  const Matrix phi = f_map(v, bs);
  auto objective = [&](const Vector& a) {
    const double scale = a.dot(phi * a);
    return a.dot(v * a) / scale;
  };
  MaximizationReport rep;
  rep.trials = trials;
  rep.alpha_objective = objective(fit.alpha.col(0));
  rep.best_random_objective = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int t = 0; t < trials; ++t) {
    Vector a(bs.q());
    for (int i = 0; i < bs.q(); ++i) a(i) = normal(rng);
    if (a.norm() == 0.0) continue;
    const double obj = objective(a);
    rep.best_random_objective = std::max(rep.best_random_objective, obj);
    if (obj > rep.alpha_objective + tol) rep.passed = false;
  }
  return rep;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

/// beta and alpha are emitted as lists of columns (one direction per entry).
inline nlohmann::json to_json(const MslcaFit& fit) {
  nlohmann::json j;
  j["estimator"] = to_string(fit.estimator);
  if (fit.gamma) j["gamma"] = *fit.gamma;
  j["rho"] = vector_to_json(fit.rho);
  j["beta"] = matrix_to_json(fit.beta.transpose());
  j["alpha"] = matrix_to_json(fit.alpha.transpose());
  j["dims"] = fit.structure().dims();
  return j;
}

}  // namespace rmslca
