#include "sflab/disc.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "sflab/bulk.hpp"
#include "sflab/edge.hpp"
#include "sflab/error.hpp"

namespace sflab {
namespace {

constexpr int kQuadratureNodes = 64;

Matrix apply_coupling(Matrix m, int degree, int k, const DiscWeight& weight) {
  if (weight.kind() == DiscWeight::Kind::hardy) return m;
  for (int row = 0; row < degree; ++row) {
    for (int col = 0; col < degree; ++col) m.block(row * k, col * k, k, k) *= weight.coupling(row, col);
  }
  return m;
}

}  // namespace

DiscWeight DiscWeight::hardy() { return DiscWeight(Kind::hardy, {}); }
DiscWeight DiscWeight::bergman() { return DiscWeight(Kind::bergman, {}); }

DiscWeight DiscWeight::from_moments(std::vector<double> moments) {
  return DiscWeight(Kind::custom, std::move(moments));
}

DiscWeight DiscWeight::radial(const std::function<double(double)>& density, int count) {
  const QuadratureRule rule = gauss_legendre_unit(kQuadratureNodes);
  std::vector<double> moments(count, 0.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double r = rule.nodes[q];
    const double wq = rule.weights[q] * density(r);
    double power = 1.0;
    for (int p = 0; p < count; ++p) {
      moments[p] += wq * power;
      power *= r;
    }
  }
  return from_moments(std::move(moments));
}

double DiscWeight::moment(int p) const {
  switch (kind_) {
    case Kind::hardy: return 1.0;
    case Kind::bergman: return 1.0 / (p + 2.0);
    case Kind::custom: return moments_.at(p);
  }
  return 0.0;
}

double DiscWeight::coupling(int m, int n) const {
  if (kind_ == Kind::hardy) return 1.0;
  if (kind_ == Kind::bergman) {
    // c_(m+n) / sqrt(c_2m c_2n) with c_p = 1/(p+2)
    return 2.0 * std::sqrt((m + 1.0) * (n + 1.0)) / (m + n + 2.0);
  }
  return moment(m + n) / std::sqrt(moment(2 * m) * moment(2 * n));
}

void DiscWeight::check(int degree) const {
  if (kind_ != Kind::custom) return;
  const std::size_t needed = 2 * static_cast<std::size_t>(degree) - 1;
  if (moments_.size() < needed) {
    throw Error(ErrorCode::BadWeight, "need " + std::to_string(needed) + " radial moments");
  }
  for (std::size_t p = 0; p < needed; ++p) {
    if (!(moments_[p] > 0.0) || !std::isfinite(moments_[p])) {
      throw Error(ErrorCode::BadWeight, "radial moment c_" + std::to_string(p) + " is not positive");
    }
  }
}

QuadratureRule gauss_legendre_unit(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guesses, then map [-1,1] -> [0,1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int order = 2; order <= n; ++order) {
        const double p2 = ((2.0 * order - 1.0) * x * p1 - (order - 1.0) * p0) / order;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

DiscToeplitz disc_toeplitz(const SymbolBlocks& fourier, int degree, const DiscWeight& weight) {
  if (degree < 2) throw Error(ErrorCode::TooFewSites, "disc degree must be at least 2");
  weight.check(degree);
  return {degree, fourier.dim(), weight.kind(),
          apply_coupling(block_toeplitz(fourier, degree), degree, fourier.dim(), weight)};
}

DiscToeplitz disc_toeplitz(const EdgeSymbolFamily& family, double t, int degree, const DiscWeight& weight) {
  DiscToeplitz out = disc_toeplitz(family.at(t).reflected(), degree, weight);
  out.matrix = symmetrized(out.matrix);
  return out;
}

SpectralFlowResult disc_spectral_flow(const EdgeSymbolFamily& family, const DiscFlowParams& params,
                                      const DiscWeight& weight) {
  if (symbol_gap(family, params.mu, kSymbolGapGrid) <= kGapTolerance) {
    throw Error(ErrorCode::SymbolNotInvertible, "boundary symbol minus mu is singular");
  }
  if (params.degree <= 2 * family.range() + 2) {
    throw Error(ErrorCode::TooFewSites, "disc degree too small for the symbol range");
  }
  weight.check(params.degree);
  const GapWindow gw = resolve_window(family, params.mu, params.window);
  const LoopEigenData data = truncated_loop(
      [&](double t) { return disc_toeplitz(family, t, params.degree, weight).matrix; }, params.degree,
      family.dim(), params.steps, params.mu, gw.window, params.theta);
  return spectral_flow(data, {params.mu, gw.window, params.theta, CrossingFilter::Mode::weight_above});
}

RealVector coburn_decay(const SymbolBlocks& fourier, int degree, const DiscWeight& weight) {
  if (degree < 16) throw Error(ErrorCode::TooFewSites, "Coburn diagnostics need degree >= 16");
  const Matrix diff = disc_toeplitz(fourier, degree, weight).matrix -
                      disc_toeplitz(fourier, degree, DiscWeight::hardy()).matrix;
  Eigen::BDCSVD<Matrix> svd(diff);
  return svd.singularValues();
}

RealVector coburn_decay(const EdgeSymbolFamily& family, double t, int degree, const DiscWeight& weight) {
  return coburn_decay(family.at(t).reflected(), degree, weight);
}

}  // namespace sflab
