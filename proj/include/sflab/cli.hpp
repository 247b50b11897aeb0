#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sflab/bulk.hpp"
#include "sflab/edge.hpp"
#include "sflab/report.hpp"

namespace sflab {

/// Parameters of one CLI invocation; echoed verbatim into every report.
struct RunConfig {
  std::string command;
  std::string model = "qwz:1.0";
  double mu = 0.0;
  int grid = 40;
  int sites = 60;
  int steps = 200;
  double theta = 0.7;
  std::optional<double> window;
  int degree = 60;
  std::string weight = "hardy";
  std::string bundle = "positive";
  double tol = 1e-6;
  double t = 0.0;
  std::string symbol;
  std::string out_path;
  std::string fluxes_path;
  bool sweep = false;
  bool json = false;

  /// Throws InvalidParameter for out-of-range values.
  void validate() const;
  ordered_json provenance() const;
};

struct BecReport {
  ChernReport bulk;
  EdgeIndexReport edge;
  bool match = false;
  RunConfig config;
};

BecReport verify_bec(const BlochModel& model, const RunConfig& config);
ordered_json to_json(const BecReport& report);

/// Parses a symbol spec: "winding:<w>" (scalar e^(iws)), "file:<path>", or inline JSON
/// {"k": int, "coefficients": [{"c": int, "re": [[..]], "im": [[..]]}]}.
SymbolBlocks load_symbol(const std::string& spec);

/// Exit codes: 0 success, 2 invalid input or failed correspondence check, 3 numerics
/// need refinement. Reports go to `out`; diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sflab
