#include "sflab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sflab {
namespace {

bool is_scalar(const ordered_json& node) { return !node.is_array() && !node.is_object(); }

void write(std::ostringstream& out, const ordered_json& node, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close_pad(2 * depth, ' ');
  switch (node.type()) {
    case ordered_json::value_t::number_float:
      out << format_double(node.get<double>());
      return;
    case ordered_json::value_t::object: {
      if (node.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : node.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << nlohmann::json(key).dump() << ": ";
        write(out, value, depth + 1);
      }
      out << "\n" << close_pad << "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (node.empty()) {
        out << "[]";
        return;
      }
      bool flat = true;
      for (const auto& item : node) flat = flat && is_scalar(item);
      if (flat) {
        out << "[";
        for (std::size_t i = 0; i < node.size(); ++i) {
          if (i) out << ", ";
          write(out, node[i], depth + 1);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write(out, node[i], depth + 1);
      }
      out << "\n" << close_pad << "]";
      return;
    }
    default:
      out << node.dump();
  }
}

const char* side_label(EdgeSide side) {
  switch (side) {
    case EdgeSide::left_edge: return "left-edge";
    case EdgeSide::right_edge: return "right-edge";
    case EdgeSide::ambiguous: return "ambiguous";
  }
  return "";
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string dump_json(const ordered_json& doc) {
  std::ostringstream out;
  write(out, doc, 0);
  out << "\n";
  return out.str();
}

ordered_json to_json(const SpectralFlowResult& result) {
  ordered_json crossings = ordered_json::array();
  for (const auto& c : result.crossings) {
    crossings.push_back({{"t0", c.t0},
                         {"t1", c.t1},
                         {"branch", c.branch},
                         {"dir", c.direction},
                         {"lambda0", c.lambda0},
                         {"lambda1", c.lambda1},
                         {"weight", c.weight}});
  }
  return {{"flow", result.flow},
          {"crossings", std::move(crossings)},
          {"diagnostics",
           {{"max_step_movement", result.diagnostics.max_step_movement},
            {"min_match_overlap", result.diagnostics.min_match_overlap},
            {"rejected", result.diagnostics.rejected},
            {"unclassified", result.diagnostics.unclassified}}}};
}

ordered_json to_json(const ChernReport& report, bool include_fluxes) {
  ordered_json doc = {{"chern", report.chern},
                      {"raw", report.raw},
                      {"residual", report.residual},
                      {"converged", report.converged},
                      {"min_gap", report.min_gap},
                      {"grid", report.grid},
                      {"max_abs_flux", report.max_abs_flux},
                      {"admissible", report.admissible}};
  if (include_fluxes) doc["fluxes"] = report.fluxes;
  return doc;
}

ordered_json to_json(const EdgeIndexReport& report) {
  ordered_json stability = ordered_json::array();
  for (const auto& entry : report.stability) {
    stability.push_back(
        {{"sites", entry.sites}, {"steps", entry.steps}, {"theta", entry.theta}, {"flow", entry.flow}});
  }
  return {{"index", report.index()},
          {"flow", to_json(report.flow)},
          {"flow_right", to_json(report.flow_right)},
          {"sites", report.sites},
          {"steps", report.steps},
          {"theta", report.theta},
          {"window", report.window},
          {"gap", report.gap},
          {"stability", std::move(stability)}};
}

ordered_json to_json(const IndexEstimate& estimate) {
  ordered_json near = ordered_json::array();
  for (const auto& v : estimate.near_kernel) {
    near.push_back({{"role", v.role == NullRole::kernel ? "kernel" : "cokernel"},
                    {"sigma", v.sigma},
                    {"side", side_label(v.side)},
                    {"left_mass", v.left_mass}});
  }
  return {{"index", estimate.index},
          {"near_kernel", std::move(near)},
          {"cluster", estimate.cluster},
          {"tol_used", estimate.tol_used},
          {"cut", estimate.cut},
          {"sigma_max", estimate.sigma_max},
          {"condition", estimate.condition}};
}

ordered_json version_info() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  return {{"sflab", kVersion}, {"eigen", eigen.str()}};
}

std::string fluxes_csv(const ChernReport& report) {
  std::ostringstream out;
  out << "s,t,flux\n";
  const RealVector angles = uniform_angles(report.grid);
  for (int i = 0; i < report.grid; ++i) {
    for (int j = 0; j < report.grid; ++j) {
      out << format_double(angles[i]) << "," << format_double(angles[j]) << ","
          << format_double(report.fluxes[static_cast<std::size_t>(i) * report.grid + j]) << "\n";
    }
  }
  return out.str();
}

std::string bands_csv(const std::vector<BandRow>& rows) {
  std::ostringstream out;
  out << "t,lambda,left_mass\n";
  for (const auto& row : rows) {
    out << format_double(row.t) << "," << format_double(row.lambda) << "," << format_double(row.left_mass)
        << "\n";
  }
  return out.str();
}

std::string singular_values_csv(const RealVector& sigma) {
  std::ostringstream out;
  out << "j,sigma\n";
  for (Eigen::Index j = 0; j < sigma.size(); ++j) out << j + 1 << "," << format_double(sigma[j]) << "\n";
  return out.str();
}

}  // namespace sflab
