#pragma once

#include <random>
#include <vector>

#include "rmslca/blocks.hpp"

namespace rmslca::testing {

inline Matrix random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

inline Vector random_vector(int q, std::mt19937_64& rng, double scale = 1.0) {
  return scale * random_matrix(q, 1, rng).col(0);
}

inline Matrix random_spd(int q, std::mt19937_64& rng, double ridge = 0.5) {
  const Matrix a = random_matrix(q, q, rng);
  return symmetrize(a * a.transpose() / q + ridge * Matrix::Identity(q, q));
}

// Scatter with identity diagonal blocks; `strength` scales the cross-block coupling.
inline ScatterMatrix random_whitened_scatter(const BlockStructure& bs, std::mt19937_64& rng,
                                             double strength = 1.0) {
  const Matrix a = random_matrix(bs.q(), bs.q(), rng);
  const Matrix m = Matrix::Identity(bs.q(), bs.q()) + strength * a * a.transpose() / bs.q();
  return standardize_blocks(ScatterMatrix(symmetrize(m), bs));
}

inline BlockStructure random_structure(std::mt19937_64& rng, int kmax = 4, int pmax = 3) {
  std::uniform_int_distribution<int> kd(2, kmax), pd(1, pmax);
  std::vector<int> dims(kd(rng));
  for (auto& p : dims) p = pd(rng);
  return BlockStructure(dims);
}

}  // namespace rmslca::testing
