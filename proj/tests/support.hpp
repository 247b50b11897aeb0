#pragma once

#include <random>
#include <vector>

#include "sflab/bulk.hpp"
#include "sflab/models.hpp"

namespace sflab::testing {

inline Matrix random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = cplx(g(rng), g(rng));
  }
  return m;
}

inline Matrix random_hermitian(int d, std::mt19937_64& rng) { return symmetrized(random_matrix(d, rng)); }

inline Matrix random_unitary(int d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(d, rng));
  return qr.householderQ() * Matrix::Identity(d, d);
}

/// Model with a single on-site term.
inline BlochModel constant_model(const Matrix& onsite) {
  return validate_model({static_cast<int>(onsite.rows()), "constant", {{{0, 0}, onsite}}});
}

/// qwz(m) plus random nearest and next-nearest hoppings, halved until the gap at 0 exceeds min_gap.
inline BlochModel perturbed_qwz(double m, std::mt19937_64& rng, double scale = 0.15, double min_gap = 0.4) {
  const BlochModel base = qwz_model(m);
  const std::vector<LatticeVector> shifts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 0}};
  std::vector<Matrix> noise;
  for (std::size_t i = 0; i < shifts.size(); ++i) noise.push_back(random_matrix(2, rng));
  for (;;) {
    std::map<LatticeVector, Matrix> hop = base.hoppings();
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      const LatticeVector s = shifts[i];
      const LatticeVector r{-s.a, -s.b};
      Matrix h = scale * noise[i];
      if (s == LatticeVector{0, 0}) h = symmetrized(h);
      if (!hop.count(s)) hop[s] = Matrix::Zero(2, 2);
      if (!hop.count(r)) hop[r] = Matrix::Zero(2, 2);
      hop[s] += h;
      if (!(s == r)) hop[r] += h.adjoint();
    }
    RawModel raw{2, "perturbed", {}};
    for (auto& [shift, matrix] : hop) raw.hoppings.push_back({shift, matrix});
    BlochModel model = validate_model(raw);
    if (spectral_gap(model, 0.0, 64) > min_gap) return model;
    scale *= 0.5;
  }
}

}  // namespace sflab::testing
