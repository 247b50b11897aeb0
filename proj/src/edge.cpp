#include "sflab/edge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sflab/bulk.hpp"
#include "sflab/error.hpp"

namespace sflab {
namespace {

std::vector<double> loop_times(int steps) {
  if (steps < 16) throw Error(ErrorCode::InvalidParameter, "steps must be at least 16");
  const RealVector angles = uniform_angles(steps);
  return {angles.begin(), angles.end()};
}

void require_theta(double theta) {
  if (!(theta > 0.5 && theta < 1.0)) throw Error(ErrorCode::InvalidParameter, "theta must lie in (0.5, 1)");
}

int edge_flow_only(const EdgeSymbolFamily& family, const EdgeParams& params, double window) {
  const LoopEigenData data = truncated_loop(
      [&](double t) { return build_halfspace(family, t, params.sites).matrix; }, params.sites,
      family.dim(), params.steps, params.mu, window, params.theta);
  return spectral_flow(data, {params.mu, window, params.theta, CrossingFilter::Mode::weight_above}).flow;
}

}  // namespace

HalfSpaceOperator build_halfspace(const EdgeSymbolFamily& family, double t, int sites) {
  if (sites <= 2 * family.range() + 2) {
    throw Error(ErrorCode::TooFewSites,
                "need more than " + std::to_string(2 * family.range() + 2) + " sites");
  }
  // Block (m,n) = h_(n-m) is the Toeplitz matrix of the reflected coefficients.
  HalfSpaceOperator op{sites, family.dim(), block_toeplitz(family.at(t).reflected(), sites)};
  op.matrix = symmetrized(op.matrix);
  return op;
}

GapWindow resolve_window(const EdgeSymbolFamily& family, double mu, std::optional<double> window) {
  GapWindow out;
  out.gap = symbol_gap(family, mu, kSymbolGapGrid);
  if (out.gap <= kGapTolerance) throw Error(ErrorCode::Gapless, "symbol spectrum touches mu");
  out.window = window.value_or(std::min(0.4 * out.gap, 0.5));
  if (!(out.window > 0.0) || !(out.gap > 2.0 * out.window)) {
    std::ostringstream msg;
    msg << "window " << out.window << " must be positive and below half the gap " << out.gap;
    throw Error(ErrorCode::InvalidParameter, msg.str());
  }
  return out;
}

LoopEigenData truncated_loop(const std::function<Matrix(double)>& operator_at, int sites, int k,
                             int steps, double mu, double window, double theta) {
  require_theta(theta);
  const Eigen::Index half = static_cast<Eigen::Index>(sites / 2) * k;
  LoopEigenData data = sample_loop(loop_times(steps), operator_at, half);

  for (int j = 0; j < data.samples(); ++j) {
    for (Eigen::Index i = 0; i < data.eigenvalues[j].size(); ++i) {
      const double mass = data.weights[j][i];
      if (std::abs(data.eigenvalues[j][i] - mu) < window && mass > 1.0 - theta && mass < theta) {
        std::ostringstream msg;
        msg << "gap state at t=" << data.times[j] << " has left mass " << mass << "; increase the size";
        throw Error(ErrorCode::IndeterminateLocalization, msg.str());
      }
    }
  }
  return data;
}

EdgeIndexReport edge_spectral_flow(const EdgeSymbolFamily& family, const EdgeParams& params) {
  const GapWindow gw = resolve_window(family, params.mu, params.window);
  const LoopEigenData data = truncated_loop(
      [&](double t) { return build_halfspace(family, t, params.sites).matrix; }, params.sites,
      family.dim(), params.steps, params.mu, gw.window, params.theta);

  EdgeIndexReport report;
  report.sites = params.sites;
  report.steps = params.steps;
  report.theta = params.theta;
  report.window = gw.window;
  report.gap = gw.gap;
  report.flow = spectral_flow(data, {params.mu, gw.window, params.theta, CrossingFilter::Mode::weight_above});
  report.flow_right =
      spectral_flow(data, {params.mu, gw.window, params.theta, CrossingFilter::Mode::weight_below});

  if (params.sweep) {
    std::vector<EdgeParams> variants;
    for (int sites : {params.sites - 20, params.sites + 20}) {
      if (sites > 2 * family.range() + 2) {
        EdgeParams v = params;
        v.sites = sites;
        variants.push_back(v);
      }
    }
    EdgeParams doubled = params;
    doubled.steps *= 2;
    variants.push_back(doubled);
    for (double theta : {0.6, 0.7, 0.8, 0.9}) {
      if (theta == params.theta) continue;
      EdgeParams v = params;
      v.theta = theta;
      variants.push_back(v);
    }
    report.stability.push_back({params.sites, params.steps, params.theta, report.index()});
    for (const auto& v : variants) {
      report.stability.push_back({v.sites, v.steps, v.theta, edge_flow_only(family, v, gw.window)});
    }
  }
  return report;
}

std::vector<BandRow> edge_bands(const EdgeSymbolFamily& family, double mu, int sites, int steps) {
  const double gap = symbol_gap(family, mu, kSymbolGapGrid);
  const Eigen::Index half = static_cast<Eigen::Index>(sites / 2) * family.dim();
  const LoopEigenData data = sample_loop(
      loop_times(steps), [&](double t) { return build_halfspace(family, t, sites).matrix; }, half);

  std::vector<BandRow> rows;
  for (int j = 0; j < data.samples(); ++j) {
    for (Eigen::Index i = 0; i < data.eigenvalues[j].size(); ++i) {
      const double lambda = data.eigenvalues[j][i];
      if (std::abs(lambda - mu) < gap) rows.push_back({data.times[j], lambda, data.weights[j][i]});
    }
  }
  return rows;
}

}  // namespace sflab
