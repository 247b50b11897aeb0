#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sflab/models.hpp"

namespace sflab {

enum class EdgeSide { left_edge, right_edge, ambiguous };
enum class NullRole { kernel, cokernel };

struct NearKernelVector {
  double sigma = 0.0;  ///< residual norm of the (rotated) vector
  EdgeSide side = EdgeSide::ambiguous;
  NullRole role = NullRole::kernel;
  double left_mass = 0.0;
};

/// Index of a half-infinite operator read off a finite truncation: near-kernel
/// vectors localized at the physical (left) edge are counted, those living at
/// the artificial truncation boundary are discarded.
struct IndexEstimate {
  int index = 0;  ///< #left-edge kernel - #left-edge cokernel
  std::vector<NearKernelVector> near_kernel;
  std::vector<double> cluster;  ///< singular values below the cut, ascending
  double tol_used = 0.0;
  double cut = 0.0;        ///< tol_used * sigma_max
  double sigma_max = 0.0;
  /// sigma_(r+1) / sigma_r at the cut (sigma_1 / cut for an empty cluster).
  double condition = 0.0;
};

/// Mass threshold for assigning a near-kernel vector to an edge.
inline constexpr double kSideThreshold = 0.7;
/// Required singular-value ratio across the cut.
inline constexpr double kClusterGapRatio = 10.0;

/// Samples g(s_j) = sum_c coeffs[c] exp(i c s_j) at `count` uniform angles.
std::vector<Matrix> sample_symbol(const SymbolBlocks& coeffs, int count);

/// Winding number of s -> det g(s) around the circle.
/// Throws SingularSymbol (|det| < 1e-10) or RefinementNeeded.
int det_winding(std::span<const Matrix> samples);

/// Fredholm index of the Toeplitz operator with (m,n) block symbol[m - n],
/// estimated from its sites x sites truncation. Equals minus the winding of det.
IndexEstimate toeplitz_index_estimate(const SymbolBlocks& symbol, int sites, double tol_rel = 1e-6);

/// Hermitian loop t -> A(t) acting on sites * k coordinates ordered site-major.
struct HalfSpaceLoop {
  std::function<Matrix(double)> at;
  int sites = 0;
  int k = 0;
};

/// Index of d/dt - A on the loop, discretized as
/// (L u)_j = (u_(j+1 mod T) - u_j) / dt - A(t_j) u_j with dt = 2pi / T.
IndexEstimate aps_index_estimate(const HalfSpaceLoop& family, int steps, double tol_rel = 1e-6);

/// aps_index_estimate for A(t) = H#(t) - mu.
IndexEstimate aps_edge_index(const EdgeSymbolFamily& family, double mu, int sites, int steps,
                             double tol_rel = 1e-6);

}  // namespace sflab
