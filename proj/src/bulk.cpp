#include "sflab/bulk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "sflab/error.hpp"
#include "sflab/parallel.hpp"

namespace sflab {
namespace {

constexpr double kSingularLinkTol = 1e-8;

void require_grid(int grid) {
  if (grid < 8) throw Error(ErrorCode::InvalidParameter, "grid must be at least 8");
}

// Unit-modulus link from frame a to frame b; conjugate of det(a^dagger b).
cplx link(const Matrix& a, const Matrix& b) {
  const cplx det = (b.adjoint() * a).determinant();
  const double modulus = std::abs(det);
  if (modulus < kSingularLinkTol) {
    throw Error(ErrorCode::SingularLink, "degenerate frame overlap; refine the grid");
  }
  return det / modulus;
}

Matrix spectral_projector(const Matrix& h, double mu, Bundle bundle) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  const RealVector& values = solver.eigenvalues();
  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const bool keep = bundle == Bundle::positive ? values[i] > mu : values[i] < mu;
    if (keep) p += solver.eigenvectors().col(i) * solver.eigenvectors().col(i).adjoint();
  }
  return p;
}

}  // namespace

double spectral_gap(const BlochModel& model, double mu, int grid) {
  require_grid(grid);
  return symbol_gap(EdgeSymbolFamily::from_model(model), mu, grid);
}

EigenbundleFrames eigenbundle_frames(const BlochModel& model, double mu, Bundle bundle, int grid) {
  require_grid(grid);
  EigenbundleFrames out;
  out.grid = grid;
  out.bundle = bundle;
  out.frames.resize(static_cast<std::size_t>(grid) * grid);

  const RealVector angles = uniform_angles(grid);
  std::vector<int> ranks(out.frames.size(), -1);
  std::vector<double> gaps(out.frames.size(), std::numeric_limits<double>::infinity());

  parallel_for(out.frames.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx / grid);
    const int j = static_cast<int>(idx % grid);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(eval_bloch(model, angles[i], angles[j]));
    const RealVector shifted = solver.eigenvalues().array() - mu;
    gaps[idx] = shifted.cwiseAbs().minCoeff();
    if (gaps[idx] <= kGapTolerance) return;  // rank stays -1: gap closed here

    // Ascending eigenvalues: the negative eigenspace is a leading block, the positive a trailing one.
    const int below = static_cast<int>((shifted.array() < 0.0).count());
    const int dim = static_cast<int>(shifted.size());
    if (bundle == Bundle::positive) {
      out.frames[idx] = solver.eigenvectors().rightCols(dim - below);
      ranks[idx] = dim - below;
    } else {
      out.frames[idx] = solver.eigenvectors().leftCols(below);
      ranks[idx] = below;
    }
  });

  out.min_gap = *std::min_element(gaps.begin(), gaps.end());
  const auto [lo, hi] = std::minmax_element(ranks.begin(), ranks.end());
  if (*lo < 0 || *lo != *hi) {
    throw Error(ErrorCode::RankJump, "eigenspace rank varies over the grid; the gap at mu closes");
  }
  out.rank = *lo;
  return out;
}

ChernReport chern_plaquette(const EigenbundleFrames& frames) {
  const int g = frames.grid;
  if (g < 2 || frames.frames.size() != static_cast<std::size_t>(g) * g) {
    throw Error(ErrorCode::InvalidParameter, "frames do not cover a square grid");
  }
  ChernReport report;
  report.grid = g;
  report.min_gap = frames.min_gap;
  report.fluxes.assign(static_cast<std::size_t>(g) * g, 0.0);

  if (frames.rank > 0) {
    // u_s(i,j) links (i,j)->(i+1,j); u_t(i,j) links (i,j)->(i,j+1).
    std::vector<cplx> u_s(report.fluxes.size()), u_t(report.fluxes.size());
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * g + j;
        u_s[idx] = link(frames.at(i, j), frames.at((i + 1) % g, j));
        u_t[idx] = link(frames.at(i, j), frames.at(i, (j + 1) % g));
      }
    }
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * g + j;
        const std::size_t right = static_cast<std::size_t>((i + 1) % g) * g + j;
        const std::size_t up = static_cast<std::size_t>(i) * g + (j + 1) % g;
        const cplx loop = u_s[idx] * u_t[right] * std::conj(u_s[up]) * std::conj(u_t[idx]);
        report.fluxes[idx] = std::arg(loop);
      }
    }
  }

  double total = 0.0;
  for (double flux : report.fluxes) {
    total += flux;
    report.max_abs_flux = std::max(report.max_abs_flux, std::abs(flux));
  }
  report.raw = total / kTwoPi;
  report.chern = static_cast<int>(std::lround(report.raw));
  report.residual = std::abs(report.raw - report.chern);
  report.converged = report.residual < 1e-6;
  report.admissible = report.max_abs_flux < 0.5 * std::numbers::pi;
  return report;
}

double berry_chern_oracle(const BlochModel& model, double mu, Bundle bundle, int grid) {
  require_grid(grid);
  const RealVector angles = uniform_angles(grid);
  std::vector<Matrix> proj(static_cast<std::size_t>(grid) * grid);
  parallel_for(proj.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx / grid);
    const int j = static_cast<int>(idx % grid);
    proj[idx] = spectral_projector(eval_bloch(model, angles[i], angles[j]), mu, bundle);
  });

  const auto p = [&](int i, int j) -> const Matrix& {
    return proj[static_cast<std::size_t>((i + grid) % grid) * grid + (j + grid) % grid];
  };
  const double h = kTwoPi / grid;
  std::vector<double> partial(grid, 0.0);
  parallel_for(grid, [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = 0; j < grid; ++j) {
      const Matrix ds = (-p(i + 2, j) + 8.0 * p(i + 1, j) - 8.0 * p(i - 1, j) + p(i - 2, j)) / (12.0 * h);
      const Matrix dt = (-p(i, j + 2) + 8.0 * p(i, j + 1) - 8.0 * p(i, j - 1) + p(i, j - 2)) / (12.0 * h);
      const cplx trace = (p(i, j) * (ds * dt - dt * ds)).trace();
      partial[row] += (kI * trace).real();
    }
  });
  double total = 0.0;
  for (double value : partial) total += value;
  return total * h * h / kTwoPi;
}

int bulk_index(const BlochModel& model, double mu, int grid) {
  return chern_plaquette(eigenbundle_frames(model, mu, Bundle::positive, grid)).chern;
}

}  // namespace sflab
