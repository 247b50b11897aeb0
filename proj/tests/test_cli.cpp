#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sflab/cli.hpp"
#include "sflab/error.hpp"

using namespace sflab;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Outcome sflab_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string data_path(const std::string& name) {
  const char* dir = std::getenv("SFLAB_TEST_DATA");
  return std::string(dir ? dir : "tests/data") + "/" + name;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sflab_test_" + name);
}

}  // namespace

TEST_CASE("chern command") {
  const Outcome o = sflab_run({"chern", "--model", "qwz:5.0", "--mu", "0", "--grid", "40", "--json"});
  CHECK(o.code == 0);
  const auto j = o.json();
  CHECK(j["command"] == "chern");
  CHECK(j["chern"] == 0);
  CHECK(j["provenance"]["model"] == "qwz:5.0");
  CHECK(j["provenance"]["versions"]["sflab"] == kVersion);

  const auto neg = sflab_run({"chern", "--model", "qwz:1", "--bundle", "negative", "--json"}).json();
  CHECK(neg["chern"] == -1);

  const auto fluxes = scratch("fluxes.csv");
  CHECK(sflab_run({"chern", "--model", "qwz:-1", "--grid", "10", "--fluxes", fluxes.string()}).code == 0);
  const std::string csv = slurp(fluxes);
  CHECK(csv.rfind("s,t,flux\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);
}

TEST_CASE("gapless models exit 2") {
  for (const char* cmd : {"chern", "edge-sf", "verify-bec", "aps-index"}) {
    const Outcome o = sflab_run({cmd, "--model", "qwz:2.0", "--mu", "0", "--json"});
    CHECK(o.code == 2);
    CHECK(o.json()["error"] == "gapless");
  }
  const Outcome disc = sflab_run({"disc-sf", "--model", "qwz:2.0", "--json"});
  CHECK(disc.code == 2);
  CHECK(disc.json()["error"] == "symbol_not_invertible");
}

TEST_CASE("verify-bec") {
  const Outcome o = sflab_run(
      {"verify-bec", "--model", "qwz:1.0", "--mu", "0", "--grid", "40", "--sites", "60", "--steps", "200", "--json"});
  CHECK(o.code == 0);
  const auto j = o.json();
  CHECK(j["match"] == true);
  CHECK(j["bulk_index"] == 1);
  CHECK(j["edge_index"] == 1);
  CHECK(j["bulk"]["chern"] == j["edge"]["index"]);
  CHECK(j["provenance"]["sites"] == 60);
  CHECK(j["label"] == "qwz:1");

  // A Chern number computed on the negative bundle would not match; verify-bec always uses F+.
  const Outcome text = sflab_run({"verify-bec", "--model", "qwz:-1"});
  CHECK(text.code == 0);
  CHECK(text.out.find("match=true") != std::string::npos);
}

TEST_CASE("edge, disc and aps commands agree") {
  for (const char* m : {"qwz:1", "qwz:-1", "qwz:3"}) {
    const int edge = sflab_run({"edge-sf", "--model", m, "--json"}).json()["index"];
    const int hardy = sflab_run({"disc-sf", "--model", m, "--weight", "hardy", "--json"}).json()["index"];
    const int bergman = sflab_run({"disc-sf", "--model", m, "--weight", "bergman", "--json"}).json()["index"];
    const int aps = sflab_run({"aps-index", "--model", m, "--json"}).json()["index"];
    CHECK(edge == hardy);
    CHECK(edge == bergman);
    CHECK(edge == aps);
  }
}

TEST_CASE("toeplitz-index symbols") {
  for (int w = -2; w <= 2; ++w) {
    const auto j = sflab_run({"toeplitz-index", "--symbol", "winding:" + std::to_string(w), "--json"}).json();
    CHECK(j["index"] == -w);
    CHECK(j["det_winding"] == w);
  }
  const auto file = sflab_run({"toeplitz-index", "--symbol", "file:" + data_path("coupled_symbol.json"), "--json"});
  CHECK(file.code == 0);
  CHECK(file.json()["index"] == -2);
  const auto inline_json = sflab_run(
      {"toeplitz-index", "--symbol",
       R"({"k": 1, "coefficients": [{"c": -1, "re": [[1]], "im": [[0]]}, {"c": 0, "re": [[0.2]], "im": [[0]]}]})",
       "--json"});
  CHECK(inline_json.json()["index"] == 1);
  CHECK(sflab_run({"toeplitz-index", "--symbol", "winding:x"}).code == 2);
  CHECK(sflab_run({"toeplitz-index", "--symbol", "{not json"}).json()["error"] == "parse_error");
  CHECK(sflab_run({"toeplitz-index"}).code == 2);
}

TEST_CASE("coburn and bands write CSV") {
  const auto sv = scratch("sv.csv");
  const Outcome c = sflab_run({"coburn", "--model", "qwz:1", "--t", "0.5", "--degree", "32", "--out", sv.string(), "--json"});
  CHECK(c.code == 0);
  CHECK(c.json()["singular_values"].size() == 64);
  const std::string csv = slurp(sv);
  CHECK(csv.rfind("j,sigma\n1,", 0) == 0);

  const auto bands = scratch("bands.csv");
  CHECK(sflab_run({"bands", "--model", "qwz:1", "--sites", "30", "--steps", "32", "--out", bands.string()}).code == 0);
  CHECK(slurp(bands).rfind("t,lambda,left_mass\n", 0) == 0);
  const Outcome missing = sflab_run({"bands", "--model", "qwz:1"});
  CHECK(missing.code == 2);
  CHECK(missing.json()["error"] == "invalid_parameter");
}

TEST_CASE("model files") {
  const auto j = sflab_run({"chern", "--model", "file:" + data_path("qwz_m1.json"), "--json"});
  CHECK(j.code == 0);
  CHECK(j.json()["chern"] == 1);
  const auto partner = sflab_run({"chern", "--model", "file:" + data_path("missing_partner.json"), "--json"});
  CHECK(partner.code == 2);
  CHECK(partner.json()["error"] == "hermiticity_violation");
  const auto broken = sflab_run({"chern", "--model", "file:" + data_path("broken.json"), "--json"});
  CHECK(broken.code == 2);
  CHECK(broken.json()["error"] == "parse_error");
  const auto missing = sflab_run({"chern", "--model", "file:missing.json", "--json"});
  CHECK(missing.code == 2);
  CHECK(missing.json()["error"] == "file_not_found");
}

TEST_CASE("round trip through a model file") {
  const auto path = scratch("model.json");
  std::ofstream(path) << model_to_json(qwz_model(-1.0)).dump(2);
  const auto a = sflab_run({"chern", "--model", "file:" + path.string(), "--json"}).json();
  const auto b = sflab_run({"chern", "--model", "qwz:-1", "--json"}).json();
  CHECK(a["chern"] == b["chern"]);
  CHECK(a["raw"] == b["raw"]);
}

TEST_CASE("parameter validation") {
  CHECK(sflab_run({"edge-sf", "--theta", "1.2"}).code == 2);
  CHECK(sflab_run({"edge-sf", "--steps", "8"}).code == 2);
  CHECK(sflab_run({"chern", "--grid", "4"}).code == 2);
  CHECK(sflab_run({"edge-sf", "--sites", "4"}).code == 2);
  CHECK(sflab_run({"chern", "--bundle", "middle"}).code == 2);
  CHECK(sflab_run({"disc-sf", "--weight", "fock"}).code == 2);
  CHECK(sflab_run({"edge-sf", "--window", "0.6"}).json()["error"] == "invalid_parameter");
  CHECK(sflab_run({"chern", "--bogus"}).code == 2);
  CHECK(sflab_run({"frobnicate"}).code == 2);
  CHECK(sflab_run({}).code == 2);
  CHECK(sflab_run({"chern", "--model", "qwz:one"}).code == 2);
}

TEST_CASE("numerical errors exit 3") {
  const Outcome o = sflab_run({"edge-sf", "--model", "qwz:1", "--steps", "16", "--json"});
  CHECK(o.code == 3);
  CHECK(o.json()["error"] == "refinement_needed");
  const Outcome aps = sflab_run({"aps-index", "--model", "qwz:1", "--sites", "12", "--steps", "48", "--json"});
  CHECK(aps.code == 3);
  CHECK(aps.json()["error"] == "ambiguous_cluster");
}

TEST_CASE("reports are deterministic") {
  const std::vector<std::string> args{"edge-sf", "--model", "qwz:-1", "--sites", "40", "--steps", "100", "--json"};
  const Outcome a = sflab_run(args);
  const Outcome b = sflab_run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.back() == '\n');
}

TEST_CASE("text output") {
  const Outcome o = sflab_run({"chern", "--model", "qwz:1"});
  CHECK(o.out == "chern qwz:1  chern=1\n");
  const Outcome t = sflab_run({"toeplitz-index", "--symbol", "winding:1"});
  CHECK(t.out == "toeplitz-index winding:1  index=-1\n");
}

TEST_CASE("load_symbol") {
  const SymbolBlocks w = load_symbol("winding:-2");
  CHECK(w.dim() == 1);
  CHECK(w[-2](0, 0) == cplx(1.0));
  CHECK_THROWS_AS(load_symbol("file:/nonexistent.json"), Error);
}
