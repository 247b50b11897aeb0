#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sflab/linalg.hpp"

namespace sflab {

/// Eigendata of a Hermitian family sampled at increasing angles in [0, 2pi).
///
/// Eigenvalues are ascending per sample; eigenvector columns are orthonormal.
/// weights[j][i] is the localization weight of eigenvector i at sample j (empty
/// when the family carries no localization data).
struct LoopEigenData {
  std::vector<double> times;
  std::vector<RealVector> eigenvalues;
  std::vector<Matrix> eigenvectors;
  std::vector<RealVector> weights;
  /// Loops pair the last sample with the first; paths do not.
  bool periodic = true;

  int samples() const { return static_cast<int>(times.size()); }
  int dim() const { return eigenvalues.empty() ? 0 : static_cast<int>(eigenvalues.front().size()); }
  bool has_weights() const { return !weights.empty(); }

  /// Throws InvalidParameter when an invariant fails.
  void validate() const;

  /// Data of the negated family: eigenvalues -lambda, order reversed.
  LoopEigenData negated() const;
};

/// Eigendecomposition of a Hermitian matrix where every degenerate cluster is
/// rotated to diagonalize the projector onto the first `left_dim` coordinates.
/// Fills weights with each eigenvector's mass on those coordinates.
struct LocalizedEigensystem {
  RealVector eigenvalues;
  Matrix eigenvectors;
  RealVector left_mass;
};
LocalizedEigensystem localized_eigensystem(const Matrix& hermitian, Eigen::Index left_dim,
                                           double degeneracy_tol = 1e-9);

/// Samples t -> family(t) at `times`; weights are left masses on the first
/// `left_dim` coordinates when left_dim is given.
LoopEigenData sample_loop(const std::vector<double>& times,
                          const std::function<Matrix(double)>& family,
                          std::optional<Eigen::Index> left_dim = std::nullopt);

struct CrossingFilter {
  enum class Mode { all, weight_above, weight_below };

  double level = 0.0;
  /// Half-width of the matching window around level.
  double window = 0.5;
  /// weight_above counts weight >= threshold; weight_below counts weight <= 1 - threshold.
  double threshold = 0.7;
  Mode mode = Mode::all;

  void validate() const;
  /// Filter for the negated family: level -> -level, same window and weight mode.
  CrossingFilter mirrored() const;
  bool accepts(double weight) const;
};

struct Crossing {
  double t0 = 0.0;
  double t1 = 0.0;
  int branch = 0;  ///< eigenvalue index at t0
  int direction = 0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double weight = 1.0;  ///< mean localization weight over the step
};

struct FlowDiagnostics {
  double max_step_movement = 0.0;
  double min_match_overlap = 1.0;
  /// Crossings of the level that the filter rejected.
  int rejected = 0;
  /// Rejected crossings whose weight lay strictly between 1 - threshold and threshold.
  int unclassified = 0;
};

/// Net count of eigenvalue branches crossing the level, downward crossings +1.
struct SpectralFlowResult {
  int flow = 0;
  std::vector<Crossing> crossings;
  FlowDiagnostics diagnostics;

  int signed_sum() const;
};

/// next[j][i] is the index at sample j+1 (mod samples) matched to index i at sample j.
struct BranchMatching {
  std::vector<std::vector<int>> next;
  double min_overlap = 1.0;
  double max_movement = 0.0;
};

/// Greedy maximum-overlap matching of eigenvectors in the window around
/// filter.level; identity outside. Throws RefinementNeeded on ambiguity, a
/// matched overlap below 0.5, or a step moving an eigenvalue by more than window/2.
BranchMatching match_branches(const LoopEigenData& data, const CrossingFilter& filter);

/// Counts matched branches crossing filter.level over each step (wraparound
/// included for loops). A branch with lambda(t_j) >= level > lambda(t_j+1)
/// contributes +1, one with lambda(t_j) < level <= lambda(t_j+1) contributes -1.
SpectralFlowResult spectral_flow(const LoopEigenData& data, const CrossingFilter& filter);

/// Winding of det((A - i)(A + i)^-1) around the loop.
int cayley_loop_winding(const LoopEigenData& data);

}  // namespace sflab
