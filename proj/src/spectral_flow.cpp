#include "sflab/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sflab/error.hpp"
#include "sflab/parallel.hpp"

namespace sflab {
namespace {

constexpr double kOrthonormalityTol = 1e-10;
constexpr double kMinOverlap = 0.5;
constexpr double kMinOverlapGap = 0.1;
// A principal-branch phase increment this close to pi may be aliased.
constexpr double kMaxPhaseStep = 0.9 * std::numbers::pi;

[[noreturn]] void refine(int step, double t, const std::string& why) {
  std::ostringstream msg;
  msg << "step " << step << " (t=" << t << "): " << why;
  throw Error(ErrorCode::RefinementNeeded, msg.str());
}

struct IndexRange {
  int lo = 0;
  int hi = -1;  // inclusive; empty when hi < lo
  bool empty() const { return hi < lo; }
};

IndexRange window_range(const RealVector& eigenvalues, double level, double window) {
  IndexRange range{static_cast<int>(eigenvalues.size()), -1};
  for (int i = 0; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues[i] - level) < window) {
      range.lo = std::min(range.lo, i);
      range.hi = std::max(range.hi, i);
    }
  }
  return range;
}

int next_sample(const LoopEigenData& data, int j) { return (j + 1) % data.samples(); }

int step_count(const LoopEigenData& data) {
  return data.periodic ? data.samples() : data.samples() - 1;
}

double step_end_time(const LoopEigenData& data, int j) {
  const int jn = next_sample(data, j);
  return jn == 0 ? data.times[0] + kTwoPi : data.times[jn];
}

}  // namespace

void LoopEigenData::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::InvalidParameter, "loop eigendata: " + what);
  };
  if (times.size() < 2) fail("need at least two samples");
  if (eigenvalues.size() != times.size() || eigenvectors.size() != times.size()) {
    fail("per-sample arrays differ in length");
  }
  if (has_weights() && weights.size() != times.size()) fail("weights differ in length");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (periodic && (times[j] < 0.0 || times[j] >= kTwoPi)) fail("loop times must lie in [0, 2pi)");
    if (j > 0 && !(times[j] > times[j - 1])) fail("times must be strictly increasing");
  }

  const Eigen::Index d = dim();
  if (d == 0) fail("empty spectrum");
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto& values = eigenvalues[j];
    const auto& vectors = eigenvectors[j];
    if (values.size() != d || vectors.rows() != d || vectors.cols() != d) {
      fail("eigenpair count differs from matrix dimension at sample " + std::to_string(j));
    }
    for (Eigen::Index i = 1; i < d; ++i) {
      if (values[i] < values[i - 1]) fail("eigenvalues not ascending at sample " + std::to_string(j));
    }
    const double err = (vectors.adjoint() * vectors - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (err > kOrthonormalityTol) fail("eigenvectors not orthonormal at sample " + std::to_string(j));
    if (has_weights()) {
      const auto& w = weights[j];
      if (w.size() != d) fail("weight count differs from dimension");
      if ((w.array() < -1e-12).any() || (w.array() > 1.0 + 1e-12).any()) fail("weights outside [0,1]");
    }
  }
}

LoopEigenData LoopEigenData::negated() const {
  LoopEigenData out = *this;
  for (std::size_t j = 0; j < times.size(); ++j) {
    out.eigenvalues[j] = -eigenvalues[j].reverse();
    out.eigenvectors[j] = eigenvectors[j].rowwise().reverse();
    if (has_weights()) out.weights[j] = weights[j].reverse();
  }
  return out;
}

LocalizedEigensystem localized_eigensystem(const Matrix& hermitian, Eigen::Index left_dim,
                                           double degeneracy_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(hermitian));
  LocalizedEigensystem out{solver.eigenvalues(), solver.eigenvectors(), {}};
  const Eigen::Index d = out.eigenvalues.size();
  const double scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());

  for (Eigen::Index start = 0; start < d;) {
    Eigen::Index stop = start + 1;
    while (stop < d && out.eigenvalues[stop] - out.eigenvalues[stop - 1] <= degeneracy_tol * scale) ++stop;
    const Eigen::Index size = stop - start;
    if (size > 1 && left_dim > 0) {
      const Matrix cluster = out.eigenvectors.middleCols(start, size);
      const Matrix top = cluster.topRows(left_dim);
      Eigen::SelfAdjointEigenSolver<Matrix> mass(symmetrized(top.adjoint() * top));
      out.eigenvectors.middleCols(start, size) = cluster * mass.eigenvectors();
    }
    start = stop;
  }
  out.left_mass = out.eigenvectors.topRows(left_dim).colwise().squaredNorm().transpose();
  return out;
}

LoopEigenData sample_loop(const std::vector<double>& times,
                          const std::function<Matrix(double)>& family,
                          std::optional<Eigen::Index> left_dim) {
  LoopEigenData data;
  data.times = times;
  data.eigenvalues.resize(times.size());
  data.eigenvectors.resize(times.size());
  if (left_dim) data.weights.resize(times.size());

  parallel_for(times.size(), [&](std::size_t j) {
    const Matrix h = family(times[j]);
    if (left_dim) {
      LocalizedEigensystem sys = localized_eigensystem(h, *left_dim);
      data.eigenvalues[j] = std::move(sys.eigenvalues);
      data.eigenvectors[j] = std::move(sys.eigenvectors);
      data.weights[j] = std::move(sys.left_mass);
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(h));
      data.eigenvalues[j] = solver.eigenvalues();
      data.eigenvectors[j] = solver.eigenvectors();
    }
  });
  return data;
}

void CrossingFilter::validate() const {
  if (!std::isfinite(level)) throw Error(ErrorCode::InvalidFilter, "level must be finite");
  if (!(window > 0.0) || !std::isfinite(window)) {
    throw Error(ErrorCode::InvalidFilter, "window must be positive");
  }
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidFilter, "threshold must lie in (0.5, 1]");
  }
}

CrossingFilter CrossingFilter::mirrored() const {
  CrossingFilter out = *this;
  out.level = -level;
  return out;
}

bool CrossingFilter::accepts(double weight) const {
  switch (mode) {
    case Mode::all: return true;
    case Mode::weight_above: return weight >= threshold;
    case Mode::weight_below: return weight <= 1.0 - threshold;
  }
  return false;
}

int SpectralFlowResult::signed_sum() const {
  return std::accumulate(crossings.begin(), crossings.end(), 0,
                         [](int acc, const Crossing& c) { return acc + c.direction; });
}

BranchMatching match_branches(const LoopEigenData& data, const CrossingFilter& filter) {
  data.validate();
  filter.validate();

  const int d = data.dim();
  BranchMatching out;
  std::vector<int> identity(d);
  std::iota(identity.begin(), identity.end(), 0);

  for (int j = 0; j < step_count(data); ++j) {
    const int jn = next_sample(data, j);
    std::vector<int> next = identity;

    const IndexRange a = window_range(data.eigenvalues[j], filter.level, filter.window);
    const IndexRange b = window_range(data.eigenvalues[jn], filter.level, filter.window);
    if (a.empty() && b.empty()) {
      out.next.push_back(std::move(next));
      continue;
    }
    const int lo = std::min(a.empty() ? b.lo : a.lo, b.empty() ? a.lo : b.lo);
    const int hi = std::max(a.hi, b.hi);
    const int n = hi - lo + 1;

    const Eigen::MatrixXd overlap =
        (data.eigenvectors[j].middleCols(lo, n).adjoint() * data.eigenvectors[jn].middleCols(lo, n))
            .cwiseAbs2();

    if (n > 1) {
      for (int r = 0; r < n; ++r) {
        std::vector<double> row(n);
        for (int c = 0; c < n; ++c) row[c] = overlap(r, c);
        std::partial_sort(row.begin(), row.begin() + 2, row.end(), std::greater<>());
        if (row[0] - row[1] < kMinOverlapGap) refine(j, data.times[j], "ambiguous eigenvector matching");
      }
    }

    struct Candidate {
      double overlap;
      int from;
      int to;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) candidates.push_back({overlap(r, c), r, c});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.overlap > y.overlap; });
    std::vector<bool> from_used(n, false), to_used(n, false);
    int assigned = 0;
    for (const auto& cand : candidates) {
      if (assigned == n) break;
      if (from_used[cand.from] || to_used[cand.to]) continue;
      from_used[cand.from] = to_used[cand.to] = true;
      ++assigned;
      next[lo + cand.from] = lo + cand.to;

      const double movement =
          std::abs(data.eigenvalues[jn][lo + cand.to] - data.eigenvalues[j][lo + cand.from]);
      out.min_overlap = std::min(out.min_overlap, cand.overlap);
      out.max_movement = std::max(out.max_movement, movement);
      if (cand.overlap < kMinOverlap) refine(j, data.times[j], "matched overlap below 0.5");
      if (movement > 0.5 * filter.window) refine(j, data.times[j], "eigenvalue moved more than window/2");
    }
    out.next.push_back(std::move(next));
  }
  return out;
}

SpectralFlowResult spectral_flow(const LoopEigenData& data, const CrossingFilter& filter) {
  filter.validate();
  if (filter.mode != CrossingFilter::Mode::all && !data.has_weights()) {
    throw Error(ErrorCode::InvalidFilter, "weight filter needs localization weights");
  }
  const BranchMatching matching = match_branches(data, filter);

  SpectralFlowResult result;
  result.diagnostics.max_step_movement = matching.max_movement;
  result.diagnostics.min_match_overlap = matching.min_overlap;
  const double mu = filter.level;

  for (int j = 0; j < step_count(data); ++j) {
    const int jn = next_sample(data, j);
    for (int i = 0; i < data.dim(); ++i) {
      const int k = matching.next[j][i];
      const double l0 = data.eigenvalues[j][i];
      const double l1 = data.eigenvalues[jn][k];
      int direction = 0;
      if (l0 >= mu && mu > l1) direction = +1;
      if (l0 < mu && mu <= l1) direction = -1;
      if (direction == 0) continue;

      const double weight = data.has_weights() ? 0.5 * (data.weights[j][i] + data.weights[jn][k]) : 1.0;
      if (!filter.accepts(weight)) {
        ++result.diagnostics.rejected;
        if (weight > 1.0 - filter.threshold && weight < filter.threshold) ++result.diagnostics.unclassified;
        continue;
      }
      result.crossings.push_back({data.times[j], step_end_time(data, j), i, direction, l0, l1, weight});
      result.flow += direction;
    }
  }
  return result;
}

int cayley_loop_winding(const LoopEigenData& data) {
  data.validate();
  if (!data.periodic) throw Error(ErrorCode::InvalidParameter, "winding needs a closed loop");

  std::vector<cplx> det(data.samples());
  for (int j = 0; j < data.samples(); ++j) {
    cplx value = 1.0;
    for (double lambda : data.eigenvalues[j]) value *= (lambda - kI) / (lambda + kI);
    det[j] = value;
  }
  double total = 0.0;
  for (int j = 0; j < data.samples(); ++j) {
    const double step = std::arg(det[next_sample(data, j)] / det[j]);
    if (std::abs(step) > kMaxPhaseStep) refine(j, data.times[j], "Cayley determinant phase step near pi");
    total += step;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace sflab
