#pragma once

// Block-structured linear algebra on the product space X = X_1 x ... x X_K.
// Block indices are 0-based throughout the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rmslca/errors.hpp"

namespace rmslca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dimensions (p_1, ..., p_K) of the component spaces.
class BlockStructure {
 public:
  BlockStructure() = default;

  explicit BlockStructure(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) {
      throw InvalidArgument("BlockStructure: need at least two blocks, got " +
                            std::to_string(dims_.size()));
    }
    offsets_.reserve(dims_.size());
    int acc = 0;
    for (int p : dims_) {
      if (p < 1) throw InvalidArgument("BlockStructure: block dimension must be >= 1");
      offsets_.push_back(acc);
      acc += p;
    }
    q_ = acc;
  }

  int num_blocks() const noexcept { return static_cast<int>(dims_.size()); }
  int q() const noexcept { return q_; }
  int dim(int k) const { return dims_.at(checked(k)); }
  int offset(int k) const { return offsets_.at(checked(k)); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const std::vector<int>& offsets() const noexcept { return offsets_; }

  /// Block index owning coordinate i.
  int block_of(int i) const {
    if (i < 0 || i >= q_) throw InvalidArgument("coordinate index out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
    return static_cast<int>(it - offsets_.begin()) - 1;
  }

  int checked(int k) const {
    if (k < 0 || k >= num_blocks()) {
      throw InvalidArgument("block index " + std::to_string(k) + " out of range [0," +
                            std::to_string(num_blocks()) + ")");
    }
    return k;
  }

  friend bool operator==(const BlockStructure& a, const BlockStructure& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int q_ = 0;
};

inline void require_square(const Matrix& a, const BlockStructure& bs, const char* who) {
  if (a.rows() != bs.q() || a.cols() != bs.q()) {
    throw InvalidArgument(std::string(who) + ": expected a " + std::to_string(bs.q()) + "x" +
                          std::to_string(bs.q()) + " matrix, got " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()));
  }
}

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Symmetric q x q matrix together with its block layout.
class ScatterMatrix {
 public:
  ScatterMatrix() = default;

  /// Rejects inputs whose asymmetry exceeds 1e-12 relative to the largest entry;
  /// the stored matrix is the exact symmetric part.
  ScatterMatrix(Matrix entries, BlockStructure bs) : bs_(std::move(bs)) {
    require_square(entries, bs_, "ScatterMatrix");
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidArgument("ScatterMatrix: input is not symmetric");
    }
    entries_ = symmetrize(entries);
  }

  const Matrix& entries() const noexcept { return entries_; }
  const BlockStructure& structure() const noexcept { return bs_; }
  int q() const noexcept { return bs_.q(); }

  /// Block (k, l), i.e. V_{kl}.
  Matrix block(int k, int l) const {
    return entries_.block(bs_.offset(k), bs_.offset(l), bs_.dim(k), bs_.dim(l));
  }

  ScatterMatrix scaled(double c) const { return ScatterMatrix(c * entries_, bs_); }

 private:
  Matrix entries_;
  BlockStructure bs_;
};

/// tau_k^*: places v in block k of a zero q-vector.
inline Vector embed(int k, const Vector& v, const BlockStructure& bs) {
  bs.checked(k);
  if (v.size() != bs.dim(k)) {
    throw InvalidArgument("embed: vector length " + std::to_string(v.size()) +
                          " does not match block dimension " + std::to_string(bs.dim(k)));
  }
  Vector out = Vector::Zero(bs.q());
  out.segment(bs.offset(k), bs.dim(k)) = v;
  return out;
}

/// tau_k: block k of x.
inline Vector extract(int k, const Vector& x, const BlockStructure& bs) {
  bs.checked(k);
  if (x.size() != bs.q()) {
    throw InvalidArgument("extract: vector length " + std::to_string(x.size()) +
                          " does not match q = " + std::to_string(bs.q()));
  }
  return x.segment(bs.offset(k), bs.dim(k));
}

/// Keeps the diagonal blocks of a, zeroes the rest.
inline Matrix f_map(const Matrix& a, const BlockStructure& bs) {
  require_square(a, bs, "f_map");
  Matrix out = Matrix::Zero(bs.q(), bs.q());
  for (int k = 0; k < bs.num_blocks(); ++k) {
    const int o = bs.offset(k), p = bs.dim(k);
    out.block(o, o, p, p) = a.block(o, o, p, p);
  }
  return out;
}

/// Keeps the off-diagonal blocks of a, zeroes the diagonal blocks.
inline Matrix g_map(const Matrix& a, const BlockStructure& bs) {
  require_square(a, bs, "g_map");
  Matrix out = a;
  for (int k = 0; k < bs.num_blocks(); ++k) {
    const int o = bs.offset(k), p = bs.dim(k);
    out.block(o, o, p, p).setZero();
  }
  return out;
}

/// pi_{kl}(A) = tau_k A tau_l^*, a p_k x p_l matrix.
inline Matrix pi_block(const Matrix& a, int k, int l, const BlockStructure& bs) {
  require_square(a, bs, "pi_block");
  return a.block(bs.offset(k), bs.offset(l), bs.dim(k), bs.dim(l));
}

/// Eigen-decomposition of the symmetric part of a, eigenvalues ascending.
inline Eigen::SelfAdjointEigenSolver<Matrix> symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("symmetric_eigen: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  if (es.info() != Eigen::Success) throw NonConvergence("symmetric eigensolver failed");
  return es;
}

namespace detail {

template <class Fn>
Matrix psd_function(const Matrix& a, double rel_tol, Fn fn, const char* who) {
  auto es = symmetric_eigen(a);
  const Vector& lam = es.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  if (!(lam.minCoeff() > rel_tol * lmax) || !(lmax > 0.0)) {
    throw NotPositiveDefinite(std::string(who) + ": smallest eigenvalue " +
                              std::to_string(lam.minCoeff()) + " below tolerance " +
                              std::to_string(rel_tol * lmax));
  }
  const Matrix& u = es.eigenvectors();
  Vector d = lam.unaryExpr(fn);
  return symmetrize(u * d.asDiagonal() * u.transpose());
}

}  // namespace detail

/// Symmetric B with B A B = I. The positive-definiteness threshold is relative
/// to the largest eigenvalue.
inline Matrix inv_sqrt_psd(const Matrix& a, double rel_tol = 1e-10) {
  return detail::psd_function(a, rel_tol, [](double v) { return 1.0 / std::sqrt(v); },
                              "inv_sqrt_psd");
}

inline Matrix sqrt_psd(const Matrix& a, double rel_tol = 1e-10) {
  return detail::psd_function(a, rel_tol, [](double v) { return std::sqrt(v); }, "sqrt_psd");
}

/// Operator (spectral) norm ||A||_inf = sup ||Ax|| / ||x||.
inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// f(V)^{-1/2} V f(V)^{-1/2}: rescales a scatter so every diagonal block is the identity.
inline ScatterMatrix standardize_blocks(const ScatterMatrix& v) {
  const Matrix w = inv_sqrt_psd(f_map(v.entries(), v.structure()));
  return ScatterMatrix(symmetrize(w * v.entries() * w), v.structure());
}

}  // namespace rmslca
