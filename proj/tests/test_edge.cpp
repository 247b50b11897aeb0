#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "sflab/bulk.hpp"
#include "sflab/edge.hpp"
#include "sflab/error.hpp"
#include "support.hpp"

using namespace sflab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an sflab::Error");
  return ErrorCode::InvalidParameter;
}

EdgeSymbolFamily qwz_family(double m) { return EdgeSymbolFamily::from_model(qwz_model(m)); }

EdgeSymbolFamily constant_family(const Matrix& h0) {
  return EdgeSymbolFamily(static_cast<int>(h0.rows()), 0, [h0](double) {
    SymbolBlocks b(static_cast<int>(h0.rows()), 0);
    b[0] = h0;
    return b;
  });
}

// Hopping along s only, so the edge symbol does not depend on t.
EdgeSymbolFamily static_chain() {
  return EdgeSymbolFamily(2, 1, [](double) {
    SymbolBlocks b(2, 1);
    b[0] = 0.8 * pauli::z();
    b[1] = 0.25 * (pauli::z() - kI * pauli::x());
    b[-1] = b[1].adjoint();
    return b;
  });
}

}  // namespace

TEST_CASE("half-space operator of an on-site family") {
  const HalfSpaceOperator op = build_halfspace(constant_family(pauli::z()), 0.4, 6);
  CHECK(op.matrix.rows() == 12);
  for (int m = 0; m < 6; ++m) {
    for (int n = 0; n < 6; ++n) {
      const Matrix block = op.matrix.block(2 * m, 2 * n, 2, 2);
      CHECK((block - (m == n ? Matrix(pauli::z()) : Matrix::Zero(2, 2))).norm() == 0.0);
    }
  }
}

TEST_CASE("half-space operator of the scalar hopping chain") {
  const EdgeSymbolFamily chain(1, 1, [](double) {
    SymbolBlocks b(1, 1);
    b[1](0, 0) = 1.0;
    b[-1](0, 0) = 1.0;
    return b;
  });
  // Three sites do not clear the size precondition.
  CHECK(code_of([&] { build_halfspace(chain, 0.0, 3); }) == ErrorCode::TooFewSites);
  const HalfSpaceOperator op = build_halfspace(chain, 0.0, 5);
  for (int m = 0; m < 5; ++m) {
    for (int n = 0; n < 5; ++n) CHECK(op.matrix(m, n) == cplx(std::abs(m - n) == 1 ? 1.0 : 0.0));
  }
}

TEST_CASE("half-space operator of qwz: blocks, Hermiticity, Toeplitz structure") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  const EdgeSymbolFamily family = qwz_family(1.0);
  for (int i = 0; i < 10; ++i) {
    const double t = angle(rng);
    const Matrix h = build_halfspace(family, t, 40).matrix;
    CHECK(hermitian_deviation(h) == 0.0);
    const SymbolBlocks sym = family.at(t);
    for (int m = 0; m < 39; ++m) {
      for (int n = 0; n < 39; ++n) {
        CHECK((h.block(2 * m + 2, 2 * n + 2, 2, 2) - h.block(2 * m, 2 * n, 2, 2)).norm() == 0.0);
      }
      // Block (m, m+1) is h_1: the site to the right couples through the +1 hopping.
      CHECK((h.block(2 * m, 2 * m + 2, 2, 2) - sym[1]).norm() < 1e-15);
    }
  }
}

TEST_CASE("window resolution") {
  const GapWindow gw = resolve_window(qwz_family(1.0), 0.0, std::nullopt);
  CHECK(gw.gap == doctest::Approx(1.0));
  CHECK(gw.window == doctest::Approx(0.4));
  CHECK(resolve_window(qwz_family(5.0), 0.0, std::nullopt).window == doctest::Approx(0.5));
  CHECK(code_of([] { resolve_window(qwz_family(1.0), 0.0, 0.6); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { resolve_window(qwz_family(2.0), 0.0, std::nullopt); }) == ErrorCode::Gapless);
}

TEST_CASE("t-independent family has no flow") {
  const EdgeIndexReport r = edge_spectral_flow(static_chain(), {0.0, 40, 64, 0.7, std::nullopt, false});
  CHECK(r.index() == 0);
  CHECK(r.flow.crossings.empty());
  CHECK(r.flow_right.crossings.empty());
}

TEST_CASE("qwz edge index equals the bulk index") {
  std::map<double, int> expected{{-3.0, 0}, {-1.0, -1}, {1.0, 1}, {3.0, 0}};
  for (auto [m, index] : expected) {
    EdgeParams p;
    p.window = 0.3;
    const EdgeIndexReport r = edge_spectral_flow(qwz_family(m), p);
    CHECK(r.index() == index);
    CHECK(r.index() == bulk_index(qwz_model(m), 0.0, 40));
    CHECK(r.flow.flow + r.flow_right.flow == 0);
    CHECK(r.flow.diagnostics.unclassified == 0);
    CHECK(r.flow.signed_sum() == r.flow.flow);
    CHECK(r.sites == 60);
    CHECK(r.steps == 200);
    CHECK(r.window == 0.3);
  }
}

TEST_CASE("robustness sweep is constant") {
  for (double m : {1.0, -1.0, 3.0}) {
    EdgeParams p;
    p.sweep = true;
    const EdgeIndexReport r = edge_spectral_flow(qwz_family(m), p);
    CHECK(r.stability.size() == 7);
    for (const auto& entry : r.stability) CHECK(entry.flow == r.index());
  }
}

TEST_CASE("edge index on perturbed models") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 4; ++trial) {
    const BlochModel model = sflab::testing::perturbed_qwz(trial % 2 ? -1.0 : 1.0, rng);
    const EdgeIndexReport r = edge_spectral_flow(EdgeSymbolFamily::from_model(model), {});
    CHECK(r.index() == bulk_index(model, 0.0, 40));
    CHECK(r.flow.flow + r.flow_right.flow == 0);
  }
}

TEST_CASE("nonzero Fermi level inside the gap") {
  EdgeParams p;
  p.mu = 0.3;
  p.window = 0.2;
  CHECK(edge_spectral_flow(qwz_family(1.0), p).index() == 1);
}

TEST_CASE("ambiguous localization") {
  const auto delocalized = [](double) {
    Matrix h(2, 2);
    h << 0.0, 0.1, 0.1, 0.0;
    return h;
  };
  CHECK(code_of([&] { truncated_loop(delocalized, 2, 1, 16, 0.0, 0.4, 0.7); }) ==
        ErrorCode::IndeterminateLocalization);
  CHECK(code_of([&] { truncated_loop(delocalized, 2, 1, 16, 0.0, 0.4, 1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { truncated_loop(delocalized, 2, 1, 8, 0.0, 0.4, 0.7); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("edge bands") {
  const std::vector<BandRow> flat = edge_bands(static_chain(), 0.0, 30, 16);
  std::map<double, std::vector<double>> columns;
  for (const auto& row : flat) columns[row.t].push_back(row.lambda);
  for (const auto& [t, lambdas] : columns) CHECK(lambdas == columns.begin()->second);

  const std::vector<BandRow> rows = edge_bands(qwz_family(1.0), 0.0, 60, 200);
  REQUIRE_FALSE(rows.empty());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK((rows[i - 1].t < rows[i].t || (rows[i - 1].t == rows[i].t && rows[i - 1].lambda <= rows[i].lambda)));
  }
  // A left-localized branch passes through mu: rows of both signs with mass above 0.9.
  bool above = false, below = false;
  for (const auto& row : rows) {
    CHECK(std::abs(row.lambda) < 1.0);
    if (row.left_mass > 0.9 && row.lambda > 0) above = true;
    if (row.left_mass > 0.9 && row.lambda < 0) below = true;
  }
  CHECK(above);
  CHECK(below);

  CHECK(edge_bands(qwz_family(1.0), 10.0, 40, 32).empty());
}
