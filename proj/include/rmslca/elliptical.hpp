#pragma once

// Elliptical model machinery: radial generator, truncation radius, consistency
// factor and the constants entering the robust influence functions.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rmslca/blocks.hpp"
#include "rmslca/errors.hpp"

namespace rmslca {

enum class Family { gaussian, custom };

inline std::string to_string(Family f) { return f == Family::gaussian ? "gaussian" : "custom"; }

/// Density f(x) = det(V)^{-1/2} h(x' V^{-1} x), centered at zero.
struct EllipticalModel {
  int q = 0;
  std::function<double(double)> generator;             // h(u), u >= 0
  std::function<double(double)> generator_derivative;  // h'(u)
  Family family = Family::custom;
  Matrix scatter;  // V

  /// h(u) = (2 pi)^{-q/2} exp(-u/2).
  static EllipticalModel gaussian(int q) { return gaussian(Matrix::Identity(q, q)); }

  static EllipticalModel gaussian(const Matrix& v) {
    if (v.rows() != v.cols() || v.rows() < 1) throw InvalidArgument("gaussian: bad scatter shape");
    EllipticalModel m;
    m.q = static_cast<int>(v.rows());
    const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * m.q);
    m.generator = [norm](double u) { return norm * std::exp(-0.5 * u); };
    m.generator_derivative = [norm](double u) { return -0.5 * norm * std::exp(-0.5 * u); };
    m.family = Family::gaussian;
    m.scatter = v;
    return m;
  }

  /// Multivariate t with nu degrees of freedom:
  /// h(u) = Gamma((nu+q)/2) / (Gamma(nu/2) (nu pi)^{q/2}) (1 + u/nu)^{-(nu+q)/2}.
  static EllipticalModel student_t(const Matrix& v, double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("student_t: nu must be positive");
    if (v.rows() != v.cols() || v.rows() < 1) throw InvalidArgument("student_t: bad scatter shape");
    const double q = static_cast<double>(v.rows());
    const double c = std::exp(std::lgamma(0.5 * (nu + q)) - std::lgamma(0.5 * nu) - 0.5 * q * std::log(nu * std::numbers::pi));
    const double e = -0.5 * (nu + q);
    return custom(
        v, [=](double u) { return c * std::pow(1.0 + u / nu, e); },
        [=](double u) { return c * e / nu * std::pow(1.0 + u / nu, e - 1.0); });
  }

  /// User-supplied generator. h' must be given analytically; it enters kappa0.
  static EllipticalModel custom(const Matrix& v, std::function<double(double)> h,
                                std::function<double(double)> h_prime) {
    if (v.rows() != v.cols() || v.rows() < 1) throw InvalidArgument("custom: bad scatter shape");
    if (!h || !h_prime) throw InvalidArgument("custom: generator and derivative are required");
    EllipticalModel m;
    m.q = static_cast<int>(v.rows());
    m.generator = std::move(h);
    m.generator_derivative = std::move(h_prime);
    m.family = Family::custom;
    m.scatter = v;
    return m;
  }
};

struct RobustConstants {
  double gamma = 0.0;
  int q = 0;
  Family family = Family::gaussian;
  double r_gamma = 0.0;
  double sigma2_gamma = 0.0;
  double nu0 = 0.0, nu1 = 0.0, nu2 = 0.0;
  double kappa0 = 0.0, kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0, kappa4 = 0.0;
  double mu = 0.0;  // E(1_E ||V^{-1/2} X||^2)
  double m4 = 0.0;  // E(1_E ||V^{-1/2} X||^4)
  double tau = 0.0;
  // Same scaling constant with a q(q+1) divisor instead of q(q+2); kept for comparison.
  double tau_qq1 = 0.0;

  double sigma_gamma() const { return std::sqrt(sigma2_gamma); }
};

namespace detail {

inline double sphere_area(int q) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * q) / std::tgamma(0.5 * q);
}

/// Adaptive Gauss-Kronrod (7/15) over [a, b].
template <class F>
double integrate(F f, double a, double b) {
  if (b <= a) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 15, 1e-14, &err, &l1);
  if (!(err <= 1e-10 * l1 + 1e-300)) {
    throw NonConvergence("quadrature error estimate " + std::to_string(err) +
                         " exceeds tolerance");
  }
  return val;
}

// c_q * int_a^b t^{q-1+power} h(t^2) dt.
inline double radial_moment_between(const EllipticalModel& m, double a, double b, int power) {
  const auto& h = m.generator;
  const int e = m.q - 1 + power;
  return sphere_area(m.q) * integrate([&](double t) { return std::pow(t, e) * h(t * t); }, a, b);
}

// Fixed 20-point Gauss rule, for short intervals where the integrand is smooth.
inline double radial_moment_cell(const EllipticalModel& m, double a, double b) {
  const auto& h = m.generator;
  const int e = m.q - 1;
  return sphere_area(m.q) *
         boost::math::quadrature::gauss<double, 20>::integrate(
             [&](double t) { return std::pow(t, e) * h(t * t); }, a, b);
}

inline double radial_moment(const EllipticalModel& m, double r, int power) {
  return radial_moment_between(m, 0.0, r, power);
}

}  // namespace detail

/// Probability mass of the ball of (Mahalanobis) radius r.
inline double radial_mass(const EllipticalModel& m, double r) {
  return detail::radial_moment(m, r, 0);
}

/// r(gamma): radius of the ellipsoid holding mass gamma. Bisection on the
/// quadrature mass.
inline double solve_radius(double gamma, const EllipticalModel& m) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("solve_radius: gamma must lie in (0,1)");
  double lo = 0.0, hi = 1.0;
  while (radial_mass(m, hi) < gamma) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw NonConvergence("solve_radius: no bracket for the requested mass");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double mass = radial_mass(m, mid);
    if (mass < gamma) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

inline RobustConstants compute_constants(double gamma, const EllipticalModel& m) {
  RobustConstants c;
  c.gamma = gamma;
  c.q = m.q;
  c.family = m.family;
  const double q = m.q;
  const double r = solve_radius(gamma, m);
  const double r2 = r * r;
  c.r_gamma = r;
  c.mu = detail::radial_moment(m, r, 2);
  c.sigma2_gamma = c.mu / (gamma * q);
  const double s = std::sqrt(c.sigma2_gamma);
  c.m4 = detail::radial_moment(m, r, 4);

  c.nu0 = detail::sphere_area(m.q) * m.generator(r2) * std::pow(r, q - 1.0) * s;
  c.nu1 = r / s;
  c.nu2 = 2.0 * c.nu0 * std::pow(c.nu1, 3) / (s * q * (q + 2.0)) - 2.0 * gamma / s;
  if (std::fabs(c.nu2) < 1e-14) throw DegenerateConstant("nu2 vanishes; kappa3 undefined");

  const auto& hp = m.generator_derivative;
  const double k0_scale =
      std::pow(std::numbers::pi, 0.5 * q) / ((q + 2.0) * std::tgamma(0.5 * q + 1.0));
  c.kappa0 = k0_scale * detail::integrate(
                            [&](double t) { return std::pow(t, q + 3.0) * hp(t * t); }, 0.0, r);
  c.kappa1 = -r2 / (q * gamma);
  c.kappa2 = (s * c.nu2 + 2.0 * gamma) / (q * gamma * s * c.nu2);
  c.kappa3 = -2.0 / (s * c.nu2);
  c.kappa4 = (r2 - q * c.sigma2_gamma) / q;

  const double s4 = c.sigma2_gamma * c.sigma2_gamma;
  c.tau = c.kappa3 * c.kappa3 * c.m4 / (s4 * q * (q + 2.0));
  c.tau_qq1 = c.kappa3 * c.kappa3 * c.m4 / (s4 * q * (q + 1.0));
  return c;
}

/// w(t) = 1_[0,r](t) (kappa1 + kappa2 t^2) + kappa4; the indicator is closed at r.
inline double weight_w(double t, const RobustConstants& c) {
  const double inside = (t <= c.r_gamma) ? (c.kappa1 + c.kappa2 * t * t) : 0.0;
  return inside + c.kappa4;
}

/// v(t) = kappa3 1_[0,r](t) t^2.
inline double weight_v(double t, const RobustConstants& c) {
  return (t <= c.r_gamma) ? c.kappa3 * t * t : 0.0;
}

/// 1_{E_gamma}(x): x' V^{-1} x <= r^2, with V^{-1} supplied.
inline bool in_ellipsoid(const Vector& x, const Matrix& v_inv, double r) {
  return x.dot(v_inv * x) <= r * r;
}

/// Draws X = V^{1/2} R U with U uniform on the sphere and R from the radial law,
/// inverted on a tabulated CDF.
class EllipticalSampler {
 public:
  explicit EllipticalSampler(const EllipticalModel& m, int cells = 4096)
      : q_(m.q), root_(sqrt_psd(m.scatter)), gaussian_(m.family == Family::gaussian) {
    if (gaussian_) return;
    // Support radius: the mass on [rmax, 2 rmax] is negligible.
    double rmax = 1.0;
    while (detail::radial_moment_between(m, rmax, 2.0 * rmax, 0) > 1e-16) {
      rmax *= 1.5;
      if (rmax > 1e6) throw NonConvergence("EllipticalSampler: radial law has no usable support");
    }
    grid_.resize(cells + 1);
    cdf_.resize(cells + 1);
    grid_[0] = 0.0;
    cdf_[0] = 0.0;
    const double step = rmax / cells;
    for (int i = 1; i <= cells; ++i) {
      grid_[i] = i * step;
      cdf_[i] = cdf_[i - 1] + detail::radial_moment_cell(m, grid_[i - 1], grid_[i]);
    }
  }

  template <class Rng>
  double draw_radius(Rng& rng) const {
    if (gaussian_) {
      std::chi_squared_distribution<double> chi2(q_);
      return std::sqrt(chi2(rng));
    }
    std::uniform_real_distribution<double> unif(0.0, cdf_.back());
    const double u = unif(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    if (i == 0) i = 1;
    if (i >= cdf_.size()) i = cdf_.size() - 1;
    const double width = cdf_[i] - cdf_[i - 1];
    const double frac = width > 0.0 ? (u - cdf_[i - 1]) / width : 0.0;
    return grid_[i - 1] + frac * (grid_[i] - grid_[i - 1]);
  }

  template <class Rng>
  Vector draw(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector u(q_);
    double nrm = 0.0;
    do {
      for (int j = 0; j < q_; ++j) u(j) = normal(rng);
      nrm = u.norm();
    } while (nrm == 0.0);
    if (gaussian_) return root_ * u;
    return root_ * (draw_radius(rng) / nrm * u);
  }

  /// n x q matrix of i.i.d. rows.
  template <class Rng>
  Matrix draw(int n, Rng& rng) const {
    if (n < 1) throw InvalidArgument("sample: n must be >= 1");
    Matrix out(n, q_);
    for (int i = 0; i < n; ++i) out.row(i) = draw(rng).transpose();
    return out;
  }

  int q() const noexcept { return q_; }

 private:
  int q_;
  Matrix root_;
  bool gaussian_;
  std::vector<double> grid_;
  std::vector<double> cdf_;
};

template <class Rng>
Matrix sample(const EllipticalModel& m, int n, Rng& rng) {
  return EllipticalSampler(m).draw(n, rng);
}

inline Matrix sample(const EllipticalModel& m, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample(m, n, rng);
}

inline nlohmann::json to_json(const RobustConstants& c) {
  return nlohmann::json{{"gamma", c.gamma},   {"q", c.q},
                        {"family", to_string(c.family)},
                        {"r_gamma", c.r_gamma}, {"sigma2_gamma", c.sigma2_gamma},
                        {"nu0", c.nu0},       {"nu1", c.nu1},
                        {"nu2", c.nu2},       {"kappa0", c.kappa0},
                        {"kappa1", c.kappa1}, {"kappa2", c.kappa2},
                        {"kappa3", c.kappa3}, {"kappa4", c.kappa4},
                        {"mu", c.mu},         {"m4", c.m4},
                        {"tau", c.tau}};
}

}  // namespace rmslca
