#include "sflab/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sflab/disc.hpp"
#include "sflab/error.hpp"
#include "sflab/fredholm.hpp"

namespace sflab {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::FileNotFound, "cannot write '" + path + "'");
  file << contents;
}

void require_gap(const BlochModel& model, double mu, int grid) {
  const double gap = spectral_gap(model, mu, std::max(grid, kSymbolGapGrid));
  if (gap <= kGapTolerance) {
    std::ostringstream msg;
    msg << "spectrum of " << model.label() << " reaches mu = " << mu;
    throw Error(ErrorCode::Gapless, msg.str());
  }
}

Bundle parse_bundle(const std::string& name) { return name == "negative" ? Bundle::negative : Bundle::positive; }

DiscWeight parse_weight(const std::string& name) {
  return name == "bergman" ? DiscWeight::bergman() : DiscWeight::hardy();
}

ordered_json with_header(const RunConfig& config, ordered_json body) {
  ordered_json doc = {{"command", config.command}};
  for (auto& [key, value] : body.items()) doc[key] = value;
  doc["provenance"] = config.provenance();
  return doc;
}

ordered_json error_json(const RunConfig& config, std::string_view name, const std::string& message) {
  return {{"command", config.command}, {"error", name}, {"message", message}};
}

ordered_json run_chern(const RunConfig& config) {
  const BlochModel model = load_model(config.model);
  require_gap(model, config.mu, config.grid);
  const ChernReport report =
      chern_plaquette(eigenbundle_frames(model, config.mu, parse_bundle(config.bundle), config.grid));
  if (!config.fluxes_path.empty()) write_file(config.fluxes_path, fluxes_csv(report));
  ordered_json body = to_json(report);
  body["bundle"] = config.bundle;
  return body;
}

EdgeParams edge_params(const RunConfig& config) {
  EdgeParams params;
  params.mu = config.mu;
  params.sites = config.sites;
  params.steps = config.steps;
  params.theta = config.theta;
  params.window = config.window;
  params.sweep = config.sweep;
  return params;
}

ordered_json run_edge(const RunConfig& config) {
  const BlochModel model = load_model(config.model);
  require_gap(model, config.mu, config.grid);
  return to_json(edge_spectral_flow(EdgeSymbolFamily::from_model(model), edge_params(config)));
}

ordered_json run_disc(const RunConfig& config) {
  const BlochModel model = load_model(config.model);
  DiscFlowParams params;
  params.mu = config.mu;
  params.degree = config.degree;
  params.steps = config.steps;
  params.theta = config.theta;
  params.window = config.window;
  const SpectralFlowResult result =
      disc_spectral_flow(EdgeSymbolFamily::from_model(model), params, parse_weight(config.weight));
  return {{"weight", config.weight}, {"index", result.flow}, {"flow", to_json(result)}};
}

ordered_json run_aps(const RunConfig& config) {
  const BlochModel model = load_model(config.model);
  require_gap(model, config.mu, config.grid);
  return to_json(
      aps_edge_index(EdgeSymbolFamily::from_model(model), config.mu, config.sites, config.steps, config.tol));
}

ordered_json run_toeplitz(const RunConfig& config) {
  require(!config.symbol.empty(), "--symbol is required");
  const SymbolBlocks symbol = load_symbol(config.symbol);
  const IndexEstimate estimate = toeplitz_index_estimate(symbol, config.sites, config.tol);
  ordered_json body = to_json(estimate);
  body["det_winding"] = det_winding(sample_symbol(symbol, 1024));
  return body;
}

ordered_json run_coburn(const RunConfig& config) {
  const BlochModel model = load_model(config.model);
  const RealVector sigma =
      coburn_decay(EdgeSymbolFamily::from_model(model), config.t, config.degree, parse_weight(config.weight));
  if (!config.out_path.empty()) write_file(config.out_path, singular_values_csv(sigma));
  return {{"weight", config.weight},
          {"t", config.t},
          {"degree", config.degree},
          {"singular_values", std::vector<double>(sigma.begin(), sigma.end())}};
}

ordered_json run_bands(const RunConfig& config) {
  require(!config.out_path.empty(), "bands needs --out <file.csv>");
  const BlochModel model = load_model(config.model);
  const std::vector<BandRow> rows =
      edge_bands(EdgeSymbolFamily::from_model(model), config.mu, config.sites, config.steps);
  write_file(config.out_path, bands_csv(rows));
  return {{"rows", rows.size()}, {"out", config.out_path}};
}

void print_summary(std::ostream& out, const RunConfig& config, const ordered_json& body) {
  out << config.command << " " << (config.command == "toeplitz-index" ? config.symbol : config.model);
  for (const char* key : {"chern", "index", "match", "rows"}) {
    if (body.contains(key)) out << "  " << key << "=" << body[key].dump();
  }
  if (body.contains("singular_values") && !body["singular_values"].empty()) {
    out << "  sigma_1=" << format_double(body["singular_values"][0].get<double>());
  }
  out << "\n";
}

}  // namespace

void RunConfig::validate() const {
  require(grid >= 8, "grid must be at least 8");
  require(sites >= 8, "sites must be at least 8");
  require(steps >= 16, "steps must be at least 16");
  require(theta > 0.5 && theta < 1.0, "theta must lie in (0.5, 1)");
  require(degree >= 8, "degree must be at least 8");
  require(std::isfinite(mu), "mu must be finite");
  require(tol > 0.0 && tol < 1.0, "tol must lie in (0, 1)");
  require(weight == "hardy" || weight == "bergman", "weight must be hardy or bergman");
  require(bundle == "positive" || bundle == "negative", "bundle must be positive or negative");
  if (window) require(*window > 0.0, "window must be positive");
}

ordered_json RunConfig::provenance() const {
  return {{"command", command},
          {"model", model},
          {"mu", mu},
          {"grid", grid},
          {"sites", sites},
          {"steps", steps},
          {"theta", theta},
          {"window", window ? ordered_json(*window) : ordered_json(nullptr)},
          {"degree", degree},
          {"weight", weight},
          {"bundle", bundle},
          {"tol", tol},
          {"t", t},
          {"symbol", symbol},
          {"sweep", sweep},
          {"versions", version_info()}};
}

BecReport verify_bec(const BlochModel& model, const RunConfig& config) {
  BecReport report;
  report.config = config;
  report.bulk = chern_plaquette(eigenbundle_frames(model, config.mu, Bundle::positive, config.grid));
  report.edge = edge_spectral_flow(EdgeSymbolFamily::from_model(model), edge_params(config));
  report.match = report.bulk.chern == report.edge.index();
  return report;
}

ordered_json to_json(const BecReport& report) {
  ordered_json doc = {{"command", report.config.command},
                      {"match", report.match},
                      {"bulk_index", report.bulk.chern},
                      {"edge_index", report.edge.index()},
                      {"bulk", to_json(report.bulk)},
                      {"edge", to_json(report.edge)}};
  doc["label"] = load_model(report.config.model).label();
  doc["provenance"] = report.config.provenance();
  return doc;
}

SymbolBlocks load_symbol(const std::string& spec) {
  nlohmann::json doc;
  if (spec.rfind("winding:", 0) == 0) {
    int w = 0;
    try {
      std::size_t used = 0;
      w = std::stoi(spec.substr(8), &used);
      require(used == spec.size() - 8, "bad winding '" + spec + "'");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidParameter, "bad winding '" + spec + "'");
    }
    SymbolBlocks blocks(1, std::abs(w));
    blocks[w](0, 0) = 1.0;
    return blocks;
  }
  try {
    if (spec.rfind("file:", 0) == 0) {
      std::ifstream in(spec.substr(5));
      if (!in) throw Error(ErrorCode::FileNotFound, "cannot open symbol file '" + spec.substr(5) + "'");
      in >> doc;
    } else {
      doc = nlohmann::json::parse(spec);
    }
    const int k = doc.at("k").get<int>();
    require(k > 0, "symbol k must be positive");
    int range = 0;
    for (const auto& entry : doc.at("coefficients")) range = std::max(range, std::abs(entry.at("c").get<int>()));
    SymbolBlocks blocks(k, range);
    for (const auto& entry : doc.at("coefficients")) {
      const auto& re = entry.at("re");
      const auto& im = entry.at("im");
      require(static_cast<int>(re.size()) == k && static_cast<int>(im.size()) == k, "coefficient is not k x k");
      Matrix m(k, k);
      for (int r = 0; r < k; ++r) {
        require(static_cast<int>(re[r].size()) == k && static_cast<int>(im[r].size()) == k,
                "coefficient is not k x k");
        for (int c = 0; c < k; ++c) m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
      }
      blocks[entry.at("c").get<int>()] += m;
    }
    return blocks;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("symbol: ") + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Spectral flow, Chern numbers and Toeplitz indices of tight-binding models", "sflab"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", config.model, "qwz:<m> or file:<path>");
    sub->add_option("--mu", config.mu, "Fermi level");
    sub->add_flag("--json", config.json, "JSON report on stdout");
  };
  const auto add_edge = [&](CLI::App* sub) {
    sub->add_option("--sites", config.sites, "retained half-space sites");
    sub->add_option("--steps", config.steps, "samples of the loop parameter t");
    sub->add_option("--theta", config.theta, "left-mass threshold for edge classification");
    sub->add_option("--window", config.window, "matching window half-width (default min(0.4 gap, 0.5))");
  };

  auto* chern = app.add_subcommand("chern", "bulk Chern number of an eigenbundle");
  add_common(chern);
  chern->add_option("--grid", config.grid, "torus grid size");
  chern->add_option("--bundle", config.bundle, "positive|negative");
  chern->add_option("--fluxes", config.fluxes_path, "write plaquette fluxes as CSV");

  auto* edge = app.add_subcommand("edge-sf", "edge index as spectral flow of the half-space family");
  add_common(edge);
  add_edge(edge);
  edge->add_flag("--sweep", config.sweep, "add the sites/steps/theta robustness sweep");

  auto* disc = app.add_subcommand("disc-sf", "spectral flow of the disc Toeplitz family");
  add_common(disc);
  disc->add_option("--degree", config.degree, "monomial truncation degree");
  disc->add_option("--steps", config.steps, "samples of t");
  disc->add_option("--theta", config.theta, "low-degree mass threshold");
  disc->add_option("--weight", config.weight, "hardy|bergman");

  auto* bec = app.add_subcommand("verify-bec", "check bulk index == edge index");
  add_common(bec);
  add_edge(bec);
  bec->add_option("--grid", config.grid, "torus grid size");

  auto* aps = app.add_subcommand("aps-index", "index of d/dt - (H#(t) - mu)");
  add_common(aps);
  aps->add_option("--sites", config.sites, "half-space sites");
  aps->add_option("--steps", config.steps, "time slices");
  aps->add_option("--tol", config.tol, "relative singular-value cut");

  auto* toeplitz = app.add_subcommand("toeplitz-index", "Fredholm index of a truncated Toeplitz operator");
  toeplitz->add_option("--symbol", config.symbol, "winding:<w>, file:<path> or inline JSON")->required();
  toeplitz->add_option("--sites", config.sites, "truncation size");
  toeplitz->add_option("--tol", config.tol, "relative singular-value cut");
  toeplitz->add_flag("--json", config.json, "JSON report on stdout");

  auto* coburn = app.add_subcommand("coburn", "singular values of the Bergman - Hardy difference");
  coburn->add_option("--model", config.model, "qwz:<m> or file:<path>");
  coburn->add_option("--t", config.t, "edge momentum");
  coburn->add_option("--degree", config.degree, "monomial truncation degree");
  coburn->add_option("--weight", config.weight, "hardy|bergman");
  coburn->add_option("--out", config.out_path, "CSV output (j,sigma)");
  coburn->add_flag("--json", config.json, "JSON report on stdout");

  auto* bands = app.add_subcommand("bands", "in-gap spectrum of the half-space family as CSV");
  add_common(bands);
  bands->add_option("--sites", config.sites, "half-space sites");
  bands->add_option("--steps", config.steps, "samples of t");
  bands->add_option("--out", config.out_path, "CSV output (t,lambda,left_mass)");

  // Per-command defaults that differ from RunConfig's.
  toeplitz->preparse_callback([&](std::size_t) { config.sites = 64; });
  coburn->preparse_callback([&](std::size_t) {
    config.degree = 64;
    config.weight = "bergman";
  });
  aps->preparse_callback([&](std::size_t) {
    config.sites = 40;
    config.steps = 96;
  });

  std::vector<const char*> argv{"sflab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    out << dump_json(error_json(config, "invalid_parameter", e.what()));
    return 2;
  }

  config.command = app.get_subcommands().front()->get_name();
  if (config.command == "disc-sf") config.window.reset();

  try {
    config.validate();
    ordered_json body;
    int code = 0;
    if (config.command == "chern") body = run_chern(config);
    else if (config.command == "edge-sf") body = run_edge(config);
    else if (config.command == "disc-sf") body = run_disc(config);
    else if (config.command == "aps-index") body = run_aps(config);
    else if (config.command == "toeplitz-index") body = run_toeplitz(config);
    else if (config.command == "coburn") body = run_coburn(config);
    else if (config.command == "bands") body = run_bands(config);
    else if (config.command == "verify-bec") {
      const BlochModel model = load_model(config.model);
      require_gap(model, config.mu, config.grid);
      const BecReport report = verify_bec(model, config);
      code = report.match ? 0 : 2;
      if (config.json) {
        out << dump_json(to_json(report));
      } else {
        out << "verify-bec " << config.model << "  bulk=" << report.bulk.chern << "  edge=" << report.edge.index()
            << "  match=" << (report.match ? "true" : "false") << "\n";
      }
      return code;
    }

    if (config.json) {
      out << dump_json(with_header(config, std::move(body)));
    } else {
      print_summary(out, config, body);
    }
    return code;
  } catch (const Error& e) {
    err << "sflab " << config.command << ": " << e.what() << "\n";
    out << dump_json(error_json(config, error_name(e.code()), e.what()));
    return is_numerical(e.code()) ? 3 : 2;
  }
}

}  // namespace sflab
