#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sflab/models.hpp"
#include "sflab/spectral_flow.hpp"

namespace sflab {

/// Inner product on the span of z^j dz, j = 0..N-1, fixed by radial moments
/// c_p = integral_0^1 r^p w(r) dr. Hardy is the boundary L^2 norm; Bergman is the
/// area norm, w(r) = r, for which c_p = 1/(p+2) and ||z^j dz||^2 ~ 1/(j+1).
class DiscWeight {
public:
  enum class Kind { hardy, bergman, custom };

  static DiscWeight hardy();
  static DiscWeight bergman();
  /// Moments c_0, c_1, ... given directly.
  static DiscWeight from_moments(std::vector<double> moments);
  /// Moments of a radial density by 64-node Gauss-Legendre quadrature on [0,1].
  static DiscWeight radial(const std::function<double(double)>& density, int count);

  Kind kind() const { return kind_; }
  double moment(int p) const;

  /// gamma_(m,n) = c_(m+n) / sqrt(c_2m c_2n); identically 1 for Hardy.
  double coupling(int m, int n) const;

  /// Throws BadWeight unless c_0..c_(2 degree - 2) exist and are positive.
  void check(int degree) const;

private:
  DiscWeight(Kind kind, std::vector<double> moments) : kind_(kind), moments_(std::move(moments)) {}
  Kind kind_;
  std::vector<double> moments_;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [0,1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre_unit(int n);

/// Compression of a radially constant symbol to the span of z^0 dz .. z^(N-1) dz.
struct DiscToeplitz {
  int degree = 0;
  int k = 0;
  DiscWeight::Kind weight = DiscWeight::Kind::hardy;
  Matrix matrix;
};

/// Block (m,n) = fourier[m - n] * gamma_(m,n), where fourier holds the Fourier
/// coefficients of the boundary function a(e^(is)). Throws BadWeight, TooFewSites.
DiscToeplitz disc_toeplitz(const SymbolBlocks& fourier, int degree, const DiscWeight& weight);

/// Disc realization of H#(t). The monomial map u_j -> u_j z^j dz turns H(t) into
/// multiplication by sum_a h_a(t) exp(-i a s), so the boundary coefficients are
/// h_(-c)(t); with the Hardy weight the matrix equals build_halfspace entrywise.
DiscToeplitz disc_toeplitz(const EdgeSymbolFamily& family, double t, int degree, const DiscWeight& weight);

struct DiscFlowParams {
  double mu = 0.0;
  int degree = 60;
  int steps = 200;
  double theta = 0.7;
  std::optional<double> window;
};

/// Spectral flow of the disc Toeplitz loop, counting branches with most of their
/// mass in the low-degree half. Throws SymbolNotInvertible when H(s,t) - mu is
/// singular on the 64 x 64 check grid.
SpectralFlowResult disc_spectral_flow(const EdgeSymbolFamily& family, const DiscFlowParams& params,
                                      const DiscWeight& weight);

/// Descending singular values of disc_toeplitz(weight) - disc_toeplitz(hardy).
RealVector coburn_decay(const SymbolBlocks& fourier, int degree, const DiscWeight& weight);
RealVector coburn_decay(const EdgeSymbolFamily& family, double t, int degree, const DiscWeight& weight);

}  // namespace sflab
