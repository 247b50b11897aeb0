#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sflab/models.hpp"
#include "sflab/spectral_flow.hpp"

namespace sflab {

/// Pi H(t) Pi restricted to sites 0..N-1: block (m,n) equals h_(n-m)(t).
struct HalfSpaceOperator {
  int sites = 0;
  int k = 0;
  Matrix matrix;
};

/// Throws TooFewSites unless sites > 2 * range + 2.
HalfSpaceOperator build_halfspace(const EdgeSymbolFamily& family, double t, int sites);

struct EdgeParams {
  double mu = 0.0;
  int sites = 60;
  int steps = 200;
  double theta = 0.7;
  /// Matching window; defaults to min(0.4 * gap, 0.5).
  std::optional<double> window;
  /// Also run the (sites, steps, theta) robustness sweep.
  bool sweep = false;
};

struct StabilityEntry {
  int sites = 0;
  int steps = 0;
  double theta = 0.0;
  int flow = 0;
};

struct EdgeIndexReport {
  SpectralFlowResult flow;        ///< left-localized crossings; flow.flow is the edge index
  SpectralFlowResult flow_right;  ///< right-localized crossings
  int sites = 0;
  int steps = 0;
  double theta = 0.0;
  double window = 0.0;
  double gap = 0.0;
  std::vector<StabilityEntry> stability;

  int index() const { return flow.flow; }
};

/// Grid used to certify the symbol gap before any edge or disc run.
inline constexpr int kSymbolGapGrid = 64;

/// Symbol gap at mu, the window it admits, and a Gapless / InvalidParameter check.
struct GapWindow {
  double gap = 0.0;
  double window = 0.0;
};
GapWindow resolve_window(const EdgeSymbolFamily& family, double mu, std::optional<double> window);

/// Eigendata of a truncated Toeplitz loop with left masses (first half of the
/// sites), checked for ambiguously localized states inside the window.
/// Throws IndeterminateLocalization.
LoopEigenData truncated_loop(const std::function<Matrix(double)>& operator_at, int sites, int k,
                             int steps, double mu, double window, double theta);

/// Edge index as the spectral flow of left-localized branches of H#(t).
EdgeIndexReport edge_spectral_flow(const EdgeSymbolFamily& family, const EdgeParams& params);

struct BandRow {
  double t = 0.0;
  double lambda = 0.0;
  double left_mass = 0.0;
};

/// Eigenvalues of H#(t) with |lambda - mu| below the symbol gap, ordered by t then lambda.
std::vector<BandRow> edge_bands(const EdgeSymbolFamily& family, double mu, int sites, int steps);

}  // namespace sflab
