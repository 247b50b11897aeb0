#pragma once

#include <compare>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sflab/linalg.hpp"

namespace sflab {

/// Lattice translation (a, b): a is transverse to the edge (s), b runs along it (t).
struct LatticeVector {
  int a = 0;
  int b = 0;
  auto operator<=>(const LatticeVector&) const = default;
};

struct Hopping {
  LatticeVector shift;
  Matrix matrix;
};

/// Unvalidated model description, as read from JSON or assembled in code.
struct RawModel {
  int k = 0;
  std::string label;
  std::vector<Hopping> hoppings;
};

/// Finite-range periodic tight-binding Hamiltonian on Z^2 with k internal degrees.
///
/// Hoppings act as (H u)_(m,n) = sum_(a,b) h_(a,b) u_(m+a, n+b), so the Bloch
/// matrix is H(s,t) = sum h_(a,b) exp(i(a s + b t)). Every stored h_(a,b) has its
/// partner h_(-a,-b) = h_(a,b)^dagger stored explicitly. Instances only come out
/// of validate_model() and are immutable.
class BlochModel {
public:
  int dim() const { return k_; }
  const std::string& label() const { return label_; }
  const std::map<LatticeVector, Matrix>& hoppings() const { return hoppings_; }

  /// max |a| over stored hoppings (range of the edge symbol).
  int transverse_range() const;

private:
  friend BlochModel validate_model(const RawModel& raw);
  BlochModel(int k, std::string label, std::map<LatticeVector, Matrix> hoppings)
      : k_(k), label_(std::move(label)), hoppings_(std::move(hoppings)) {}

  int k_;
  std::string label_;
  std::map<LatticeVector, Matrix> hoppings_;
};

/// Throws DimensionMismatch, HermiticityViolation, EmptyModel or DuplicateHopping.
BlochModel validate_model(const RawModel& raw);

/// Two-band Qi-Wu-Zhang model:
/// H(s,t) = sin(s) sx + sin(t) sy + (m + cos s + cos t) sz.
BlochModel qwz_model(double m);

/// Hermitian Bloch matrix H(s,t).
Matrix eval_bloch(const BlochModel& model, double s, double t);

/// Fourier blocks c_a, |a| <= range, of a k x k matrix function on the circle.
class SymbolBlocks {
public:
  SymbolBlocks(int k, int range);

  int dim() const { return k_; }
  int range() const { return range_; }

  Matrix& operator[](int a) { return blocks_.at(a + range_); }
  const Matrix& operator[](int a) const { return blocks_.at(a + range_); }

  /// sum_a c_a exp(i a s)
  Matrix evaluate(double s) const;

  /// Blocks with a -> -a.
  SymbolBlocks reflected() const;

  /// max_a |c_(-a) - c_a^dagger|; zero for a Hermitian-valued function.
  double hermitian_deviation() const;

private:
  int k_;
  int range_;
  std::vector<Matrix> blocks_;
};

/// h_a(t) = sum_b h_(a,b) exp(i b t).
SymbolBlocks edge_symbol(const BlochModel& model, double t);

/// Periodic family t -> {h_a(t)} of Hermitian block Laurent symbols.
class EdgeSymbolFamily {
public:
  using Generator = std::function<SymbolBlocks(double)>;

  EdgeSymbolFamily(int k, int range, Generator generator, std::string label = {});

  static EdgeSymbolFamily from_model(const BlochModel& model);

  int dim() const { return k_; }
  int range() const { return range_; }
  const std::string& label() const { return label_; }

  SymbolBlocks at(double t) const;

  /// Full symbol H(s,t) = sum_a h_a(t) exp(i a s).
  Matrix bloch(double s, double t) const;

private:
  int k_;
  int range_;
  Generator generator_;
  std::string label_;
};

/// Block Toeplitz matrix with (m,n) block equal to coeffs[m - n], 0 <= m,n < sites.
Matrix block_toeplitz(const SymbolBlocks& coeffs, int sites);

/// min over a grid x grid torus of the smallest |eigenvalue of H(s,t) - mu|.
double symbol_gap(const EdgeSymbolFamily& family, double mu, int grid);

nlohmann::json model_to_json(const BlochModel& model);
RawModel raw_model_from_json(const nlohmann::json& doc);
/// raw_model_from_json followed by validate_model.
BlochModel model_from_json(const nlohmann::json& doc);

/// Resolves "qwz:<m>" or "file:<path>".
BlochModel load_model(const std::string& spec);

}  // namespace sflab
