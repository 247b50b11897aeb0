#include "sflab/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "sflab/edge.hpp"
#include "sflab/error.hpp"
#include "sflab/parallel.hpp"

namespace sflab {
namespace {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

constexpr double kSingularDetTol = 1e-10;
constexpr double kMaxPhaseStep = 0.9 * std::numbers::pi;
constexpr Eigen::Index kDenseLimit = 1200;
constexpr int kBlockSize = 10;
constexpr int kMaxIterations = 300;
constexpr std::uint64_t kSeed = 0x5f1ab;

// Singular triplets at the bottom of the spectrum, ascending.
struct BottomSpectrum {
  RealVector sigma;
  Matrix right;  // kernel candidates
  Matrix left;   // cokernel candidates
  double sigma_max = 0.0;
};

BottomSpectrum dense_bottom(const Matrix& op) {
  Eigen::BDCSVD<Matrix> svd(op, Eigen::ComputeFullU | Eigen::ComputeFullV);
  BottomSpectrum out;
  out.sigma = svd.singularValues().reverse();
  out.right = svd.matrixV().rowwise().reverse();
  out.left = svd.matrixU().rowwise().reverse();
  out.sigma_max = out.sigma.size() ? out.sigma.maxCoeff() : 0.0;
  return out;
}

Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix x(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) x(r, c) = cplx(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(x);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

double largest_singular_value(const SparseMatrix& op) {
  Vector v = random_orthonormal(op.cols(), 1, kSeed + 1).col(0);
  double estimate = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    Vector w = op.adjoint() * (op * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = std::sqrt(norm);
    v = w / norm;
    if (std::abs(next - estimate) < 1e-10 * next) return next;
    estimate = next;
  }
  return estimate;
}

// Inverse subspace iteration on op^dagger op (or op op^dagger for the left side).
void bottom_subspace(const SparseMatrix& op, bool left_side, double sigma_max, RealVector& sigma,
                     Matrix& vectors) {
  const SparseMatrix gram =
      (left_side ? SparseMatrix(op * op.adjoint()) : SparseMatrix(op.adjoint() * op)).pruned();
  SparseMatrix shifted = gram;
  SparseMatrix identity(gram.rows(), gram.cols());
  identity.setIdentity();
  const double shift = std::pow(1e-10 * sigma_max, 2);
  shifted += shift * identity;

  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::AmbiguousCluster, "factorization of the normal operator failed");
  }

  const Eigen::Index block = std::min<Eigen::Index>(kBlockSize, op.rows());
  Matrix x = random_orthonormal(op.rows(), block, kSeed + (left_side ? 2 : 3));
  RealVector previous = RealVector::Constant(block, -1.0);
  const Eigen::Index watched = block / 2;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Matrix y = solver.solve(x);
    Eigen::HouseholderQR<Matrix> qr(y);
    x = qr.householderQ() * Matrix::Identity(y.rows(), block);

    const Matrix image = left_side ? Matrix(op.adjoint() * x) : Matrix(op * x);
    Eigen::JacobiSVD<Matrix> ritz(image, Eigen::ComputeThinV);
    sigma = ritz.singularValues().reverse();
    x = x * ritz.matrixV().rowwise().reverse();

    const double change = (sigma.head(watched) - previous.head(watched)).cwiseAbs().maxCoeff();
    if (change < 1e-12 * sigma_max + 1e-9 * sigma.head(watched).maxCoeff()) break;
    previous = sigma;
  }
  vectors = std::move(x);
}

BottomSpectrum sparse_bottom(const SparseMatrix& op) {
  BottomSpectrum out;
  out.sigma_max = largest_singular_value(op);
  RealVector left_sigma;
  bottom_subspace(op, false, out.sigma_max, out.sigma, out.right);
  bottom_subspace(op, true, out.sigma_max, left_sigma, out.left);
  return out;
}

// Rotates a near-null subspace so that each basis vector has a definite left
// mass (eigenvectors of the compressed left projector), then classifies them.
void classify(const Matrix& subspace, const RealVector& left_mask, NullRole role,
              const std::function<double(const Vector&)>& residual, IndexEstimate& estimate) {
  if (subspace.cols() == 0) return;
  const Matrix masked = left_mask.asDiagonal() * subspace;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(subspace.adjoint() * masked));
  const Matrix rotated = subspace * solver.eigenvectors();
  for (Eigen::Index c = 0; c < rotated.cols(); ++c) {
    const double mass = std::clamp(solver.eigenvalues()[c], 0.0, 1.0);
    NearKernelVector v;
    v.role = role;
    v.left_mass = mass;
    v.sigma = residual(rotated.col(c));
    v.side = mass >= kSideThreshold       ? EdgeSide::left_edge
             : mass <= 1.0 - kSideThreshold ? EdgeSide::right_edge
                                            : EdgeSide::ambiguous;
    if (v.side == EdgeSide::ambiguous) {
      std::ostringstream msg;
      msg << (role == NullRole::kernel ? "kernel" : "cokernel") << " vector has left mass " << mass
          << "; it belongs to neither edge";
      throw Error(ErrorCode::AmbiguousSide, msg.str());
    }
    estimate.near_kernel.push_back(v);
  }
}

IndexEstimate estimate_from(const BottomSpectrum& spec, double tol_rel, const RealVector& left_mask,
                            const std::function<Vector(const Vector&)>& apply,
                            const std::function<Vector(const Vector&)>& apply_adjoint) {
  if (!(tol_rel > 0.0 && tol_rel < 1.0)) throw Error(ErrorCode::InvalidParameter, "tol_rel must lie in (0, 1)");

  IndexEstimate est;
  est.tol_used = tol_rel;
  est.sigma_max = spec.sigma_max;
  est.cut = tol_rel * spec.sigma_max;

  const Eigen::Index known = spec.sigma.size();
  Eigen::Index r = 0;
  while (r < known && spec.sigma[r] < est.cut) ++r;
  for (Eigen::Index i = 0; i < r; ++i) est.cluster.push_back(spec.sigma[i]);

  if (r == known) {
    throw Error(ErrorCode::AmbiguousCluster, "near-kernel cluster fills the computed spectrum");
  }
  // With an empty cluster the cut itself stands in for the largest discarded value.
  const double below = r == 0 ? est.cut : spec.sigma[r - 1];
  est.condition = spec.sigma[r] / std::max(below, std::numeric_limits<double>::min());
  if (est.condition < kClusterGapRatio) {
    std::ostringstream msg;
    msg << "singular values " << below << " and " << spec.sigma[r] << " straddle the cut without a 10x gap";
    throw Error(ErrorCode::AmbiguousCluster, msg.str());
  }

  classify(spec.right.leftCols(r), left_mask, NullRole::kernel,
           [&](const Vector& v) { return apply(v).norm(); }, est);
  classify(spec.left.leftCols(r), left_mask, NullRole::cokernel,
           [&](const Vector& u) { return apply_adjoint(u).norm(); }, est);

  for (const auto& v : est.near_kernel) {
    if (v.side != EdgeSide::left_edge) continue;
    est.index += v.role == NullRole::kernel ? 1 : -1;
  }
  return est;
}

}  // namespace

std::vector<Matrix> sample_symbol(const SymbolBlocks& coeffs, int count) {
  std::vector<Matrix> samples;
  samples.reserve(count);
  for (double s : uniform_angles(count)) samples.push_back(coeffs.evaluate(s));
  return samples;
}

int det_winding(std::span<const Matrix> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::InvalidParameter, "need at least two symbol samples");
  std::vector<cplx> det(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    det[j] = samples[j].determinant();
    if (std::abs(det[j]) < kSingularDetTol) {
      throw Error(ErrorCode::SingularSymbol, "symbol determinant vanishes at sample " + std::to_string(j));
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < det.size(); ++j) {
    const double step = std::arg(det[(j + 1) % det.size()] / det[j]);
    if (std::abs(step) > kMaxPhaseStep) {
      throw Error(ErrorCode::RefinementNeeded, "determinant phase step near pi; sample more densely");
    }
    total += step;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

IndexEstimate toeplitz_index_estimate(const SymbolBlocks& symbol, int sites, double tol_rel) {
  if (sites < 32) throw Error(ErrorCode::TooFewSites, "Toeplitz index estimate needs at least 32 sites");
  for (const Matrix& g : sample_symbol(symbol, 512)) {
    if (std::abs(g.determinant()) < kSingularDetTol) {
      throw Error(ErrorCode::SymbolNotInvertible, "symbol is singular on the circle");
    }
  }

  const Matrix op = block_toeplitz(symbol, sites);
  const Eigen::Index left = static_cast<Eigen::Index>(sites / 2) * symbol.dim();
  RealVector mask = RealVector::Zero(op.rows());
  mask.head(left).setOnes();
  return estimate_from(
      dense_bottom(op), tol_rel, mask, [&](const Vector& v) -> Vector { return op * v; },
      [&](const Vector& u) -> Vector { return op.adjoint() * u; });
}

IndexEstimate aps_index_estimate(const HalfSpaceLoop& family, int steps, double tol_rel) {
  if (steps < 2) throw Error(ErrorCode::InvalidParameter, "APS estimate needs at least two time steps");
  if (family.sites < 1 || family.k < 1) throw Error(ErrorCode::InvalidParameter, "empty half-space loop");
  const Eigen::Index n = static_cast<Eigen::Index>(family.sites) * family.k;
  const Eigen::Index dim = n * steps;
  const double dt = kTwoPi / steps;

  std::vector<Matrix> slices(steps);
  const RealVector times = uniform_angles(steps);
  parallel_for(steps, [&](std::size_t j) { slices[j] = family.at(times[j]); });
  for (const Matrix& a : slices) {
    if (a.rows() != n || a.cols() != n) throw Error(ErrorCode::DimensionMismatch, "A(t) has wrong size");
    if (hermitian_deviation(a) > 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::InvalidParameter, "A(t) is not Hermitian");
    }
  }

  std::vector<Eigen::Triplet<cplx>> triplets;
  for (int j = 0; j < steps; ++j) {
    const Eigen::Index row0 = j * n;
    const Eigen::Index next0 = ((j + 1) % steps) * n;
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        const cplx value = -slices[j](r, c) - (r == c ? 1.0 / dt : 0.0);
        if (value != 0.0) triplets.emplace_back(row0 + r, row0 + c, value);
      }
      triplets.emplace_back(row0 + c, next0 + c, 1.0 / dt);
    }
  }
  SparseMatrix op(dim, dim);
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.makeCompressed();

  const Eigen::Index left = static_cast<Eigen::Index>(family.sites / 2) * family.k;
  RealVector mask = RealVector::Zero(dim);
  for (int j = 0; j < steps; ++j) mask.segment(j * n, left).setOnes();

  const BottomSpectrum spec = dim <= kDenseLimit ? dense_bottom(Matrix(op)) : sparse_bottom(op);
  return estimate_from(
      spec, tol_rel, mask, [&](const Vector& v) -> Vector { return op * v; },
      [&](const Vector& u) -> Vector { return op.adjoint() * u; });
}

IndexEstimate aps_edge_index(const EdgeSymbolFamily& family, double mu, int sites, int steps, double tol_rel) {
  const HalfSpaceLoop loop{
      [&family, mu, sites](double t) {
        Matrix a = build_halfspace(family, t, sites).matrix;
        a.diagonal().array() -= mu;
        return a;
      },
      sites, family.dim()};
  return aps_index_estimate(loop, steps, tol_rel);
}

}  // namespace sflab
