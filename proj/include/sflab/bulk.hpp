#pragma once

#include <vector>

#include "sflab/linalg.hpp"
#include "sflab/models.hpp"

namespace sflab {

enum class Bundle { positive, negative };

/// Orthonormal frames of the positive (or negative) eigenspace of H(s,t) - mu on
/// a grid x grid sampling of the torus; frame(i, j) sits at (s_i, t_j).
struct EigenbundleFrames {
  int grid = 0;
  int rank = 0;
  Bundle bundle = Bundle::positive;
  double min_gap = 0.0;
  std::vector<Matrix> frames;

  const Matrix& at(int i, int j) const { return frames[static_cast<std::size_t>(i) * grid + j]; }
  Matrix& at(int i, int j) { return frames[static_cast<std::size_t>(i) * grid + j]; }
};

struct ChernReport {
  int chern = 0;
  double raw = 0.0;
  double residual = 0.0;
  double min_gap = 0.0;
  int grid = 0;
  /// Plaquette phases in (-pi, pi], row-major in (s, t).
  std::vector<double> fluxes;
  double max_abs_flux = 0.0;
  bool converged = false;   ///< residual < 1e-6
  bool admissible = false;  ///< every |flux| < pi/2
};

/// Below this the spectrum is treated as touching mu.
inline constexpr double kGapTolerance = 1e-8;

/// min over the grid of the smallest |eigenvalue of H(s,t) - mu|.
double spectral_gap(const BlochModel& model, double mu, int grid);

/// Throws RankJump when the eigenspace dimension is not constant over the grid.
EigenbundleFrames eigenbundle_frames(const BlochModel& model, double mu, Bundle bundle, int grid);

/// Lattice-gauge Chern number. Link variables are unit-modulus determinants of
/// frame overlaps; plaquettes are traversed in the ds^dt orientation and the
/// normalization matches (i/2pi) * integral of tr(P dP ^ dP).
/// Throws SingularLink when a link determinant falls below 1e-8.
ChernReport chern_plaquette(const EigenbundleFrames& frames);

/// (i/2pi) * integral of tr(P [dP/ds, dP/dt]) ds dt with fourth-order central
/// differences of the spectral projector and a periodic Riemann sum.
double berry_chern_oracle(const BlochModel& model, double mu, Bundle bundle, int grid);

/// Chern number of the positive eigenbundle (states above mu).
int bulk_index(const BlochModel& model, double mu, int grid);

}  // namespace sflab
