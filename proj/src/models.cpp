#include "sflab/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sflab/error.hpp"
#include "sflab/parallel.hpp"

namespace sflab {
namespace {

constexpr double kHermiticityTol = 1e-12;

std::string describe(LatticeVector v) {
  std::ostringstream out;
  out << "(" << v.a << "," << v.b << ")";
  return out.str();
}

Matrix matrix_from_json(const nlohmann::json& re, const nlohmann::json& im, int k) {
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != k ||
      static_cast<int>(im.size()) != k) {
    throw Error(ErrorCode::DimensionMismatch, "hopping matrix must have k rows");
  }
  Matrix m(k, k);
  for (int r = 0; r < k; ++r) {
    if (!re[r].is_array() || !im[r].is_array() || static_cast<int>(re[r].size()) != k ||
        static_cast<int>(im[r].size()) != k) {
      throw Error(ErrorCode::DimensionMismatch, "hopping matrix must have k columns");
    }
    for (int c = 0; c < k; ++c) m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
  }
  return m;
}

}  // namespace

int BlochModel::transverse_range() const {
  int range = 0;
  for (const auto& [shift, _] : hoppings_) range = std::max(range, std::abs(shift.a));
  return range;
}

BlochModel validate_model(const RawModel& raw) {
  if (raw.k <= 0) throw Error(ErrorCode::DimensionMismatch, "k must be positive");
  if (raw.hoppings.empty()) throw Error(ErrorCode::EmptyModel, "model has no hoppings");

  std::map<LatticeVector, Matrix> hoppings;
  for (const auto& h : raw.hoppings) {
    if (h.matrix.rows() != raw.k || h.matrix.cols() != raw.k) {
      throw Error(ErrorCode::DimensionMismatch,
                  "hopping " + describe(h.shift) + " is not " + std::to_string(raw.k) + "x" +
                      std::to_string(raw.k));
    }
    if (!h.matrix.allFinite()) {
      throw Error(ErrorCode::ParseError, "hopping " + describe(h.shift) + " has non-finite entries");
    }
    if (!hoppings.emplace(h.shift, h.matrix).second) {
      throw Error(ErrorCode::DuplicateHopping, "hopping " + describe(h.shift) + " listed twice");
    }
  }

  for (const auto& [shift, matrix] : hoppings) {
    const LatticeVector partner{-shift.a, -shift.b};
    auto it = hoppings.find(partner);
    if (it == hoppings.end()) {
      throw Error(ErrorCode::HermiticityViolation,
                  "hopping " + describe(shift) + " has no conjugate partner " + describe(partner));
    }
    const double deviation = (it->second - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (deviation > kHermiticityTol) {
      throw Error(ErrorCode::HermiticityViolation,
                  "h" + describe(partner) + " != h" + describe(shift) + "^dagger");
    }
  }
  return BlochModel(raw.k, raw.label, std::move(hoppings));
}

BlochModel qwz_model(double m) {
  const Matrix hs = 0.5 * (pauli::z() - kI * pauli::x());
  const Matrix ht = 0.5 * (pauli::z() - kI * pauli::y());
  std::ostringstream label;
  label.precision(17);
  label << "qwz:" << m;
  RawModel raw{2, label.str(),
               {{{0, 0}, m * pauli::z()},
                {{1, 0}, hs},
                {{-1, 0}, hs.adjoint()},
                {{0, 1}, ht},
                {{0, -1}, ht.adjoint()}}};
  return validate_model(raw);
}

Matrix eval_bloch(const BlochModel& model, double s, double t) {
  Matrix h = Matrix::Zero(model.dim(), model.dim());
  for (const auto& [shift, matrix] : model.hoppings()) {
    h += matrix * std::exp(kI * (shift.a * s + shift.b * t));
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermitian_deviation(h) > kHermiticityTol * scale) {
    throw std::logic_error("Bloch matrix of a validated model is not Hermitian");
  }
  return symmetrized(h);
}

SymbolBlocks::SymbolBlocks(int k, int range)
    : k_(k), range_(range), blocks_(2 * range + 1, Matrix::Zero(k, k)) {
  if (k <= 0 || range < 0) throw Error(ErrorCode::DimensionMismatch, "bad symbol dimensions");
}

Matrix SymbolBlocks::evaluate(double s) const {
  Matrix value = Matrix::Zero(k_, k_);
  for (int a = -range_; a <= range_; ++a) value += (*this)[a] * std::exp(kI * (a * s));
  return value;
}

SymbolBlocks SymbolBlocks::reflected() const {
  SymbolBlocks out(k_, range_);
  for (int a = -range_; a <= range_; ++a) out[-a] = (*this)[a];
  return out;
}

double SymbolBlocks::hermitian_deviation() const {
  double worst = 0.0;
  for (int a = -range_; a <= range_; ++a) {
    worst = std::max(worst, ((*this)[-a] - (*this)[a].adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

SymbolBlocks edge_symbol(const BlochModel& model, double t) {
  SymbolBlocks blocks(model.dim(), model.transverse_range());
  for (const auto& [shift, matrix] : model.hoppings()) {
    blocks[shift.a] += matrix * std::exp(kI * (shift.b * t));
  }
  return blocks;
}

EdgeSymbolFamily::EdgeSymbolFamily(int k, int range, Generator generator, std::string label)
    : k_(k), range_(range), generator_(std::move(generator)), label_(std::move(label)) {
  if (k <= 0 || range < 0) throw Error(ErrorCode::DimensionMismatch, "bad family dimensions");
}

EdgeSymbolFamily EdgeSymbolFamily::from_model(const BlochModel& model) {
  return EdgeSymbolFamily(
      model.dim(), model.transverse_range(),
      [model](double t) { return edge_symbol(model, t); }, model.label());
}

SymbolBlocks EdgeSymbolFamily::at(double t) const {
  SymbolBlocks blocks = generator_(t);
  if (blocks.dim() != k_ || blocks.range() != range_) {
    throw Error(ErrorCode::DimensionMismatch, "symbol generator returned wrong block shape");
  }
  return blocks;
}

Matrix EdgeSymbolFamily::bloch(double s, double t) const { return symmetrized(at(t).evaluate(s)); }

Matrix block_toeplitz(const SymbolBlocks& coeffs, int sites) {
  const int k = coeffs.dim();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(sites) * k, static_cast<Eigen::Index>(sites) * k);
  for (int row = 0; row < sites; ++row) {
    const int lo = std::max(0, row - coeffs.range());
    const int hi = std::min(sites - 1, row + coeffs.range());
    for (int col = lo; col <= hi; ++col) m.block(row * k, col * k, k, k) = coeffs[row - col];
  }
  return m;
}

double symbol_gap(const EdgeSymbolFamily& family, double mu, int grid) {
  const RealVector angles = uniform_angles(grid);
  std::vector<double> column_min(grid, std::numeric_limits<double>::infinity());
  parallel_for(grid, [&](std::size_t j) {
    const SymbolBlocks blocks = family.at(angles[j]);
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    for (int i = 0; i < grid; ++i) {
      solver.compute(symmetrized(blocks.evaluate(angles[i])), Eigen::EigenvaluesOnly);
      const double gap = (solver.eigenvalues().array() - mu).abs().minCoeff();
      column_min[j] = std::min(column_min[j], gap);
    }
  });
  return *std::min_element(column_min.begin(), column_min.end());
}

nlohmann::json model_to_json(const BlochModel& model) {
  nlohmann::json hoppings = nlohmann::json::array();
  for (const auto& [shift, matrix] : model.hoppings()) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (int r = 0; r < model.dim(); ++r) {
      nlohmann::json re_row = nlohmann::json::array();
      nlohmann::json im_row = nlohmann::json::array();
      for (int c = 0; c < model.dim(); ++c) {
        re_row.push_back(matrix(r, c).real());
        im_row.push_back(matrix(r, c).imag());
      }
      re.push_back(std::move(re_row));
      im.push_back(std::move(im_row));
    }
    hoppings.push_back({{"a", shift.a}, {"b", shift.b}, {"re", std::move(re)}, {"im", std::move(im)}});
  }
  return {{"k", model.dim()}, {"label", model.label()}, {"hoppings", std::move(hoppings)}};
}

RawModel raw_model_from_json(const nlohmann::json& doc) {
  try {
    RawModel raw;
    raw.k = doc.at("k").get<int>();
    raw.label = doc.value("label", std::string{});
    for (const auto& entry : doc.at("hoppings")) {
      const LatticeVector shift{entry.at("a").get<int>(), entry.at("b").get<int>()};
      raw.hoppings.push_back({shift, matrix_from_json(entry.at("re"), entry.at("im"), raw.k)});
    }
    return raw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model JSON: ") + e.what());
  }
}

BlochModel model_from_json(const nlohmann::json& doc) { return validate_model(raw_model_from_json(doc)); }

BlochModel load_model(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidParameter, "model spec must be qwz:<m> or file:<path>");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "qwz") {
    std::size_t used = 0;
    double m = 0.0;
    try {
      m = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size() || !std::isfinite(m)) {
      throw Error(ErrorCode::InvalidParameter, "bad qwz mass '" + arg + "'");
    }
    return qwz_model(m);
  }
  if (kind == "file") {
    std::ifstream in(arg);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open model file '" + arg + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
    }
    return model_from_json(doc);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown model kind '" + kind + "'");
}

}  // namespace sflab
