#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "support.hpp"
#include "topos/cli/documents.hpp"
#include "topos/cli/run.hpp"

namespace fs = std::filesystem;
using namespace topos;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json run_json(std::vector<std::string> args) {
  args.insert(args.begin(), {"--format", "json"});
  return nlohmann::json::parse(run(args).out);
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read(e.path());
  }
  return out;
}

const std::string data = TEST_DATA_DIR;

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"omega", "--site", "sierpinski"}).code == 0);
  CHECK(run({"check-sheaf", "--presheaf", "const2"}).code == 1);
  CHECK(run({"check-sheaf", "--presheaf", "no-such-presheaf"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("reports") {
  const auto j = run_json({"pullback", "--fixture", "c2"});
  CHECK(j["verdict"] == "pass");
  CHECK(j["details"]["elements"] == nlohmann::json::array({"(1,a)", "(1,b)", "(2,a)", "(2,b)"}));
  CHECK(j["timing"].is_null());
  CHECK(j["inputs"][0]["name"] == "c2");
  CHECK(j["inputs"][0]["digest"].get<std::string>().size() == 16);

  const auto timed = run_json({"--timing", "omega", "--site", "sierpinski"});
  CHECK(timed["timing"]["milliseconds"].is_number());

  const auto text = run({"check-sheaf", "--presheaf", "const2"}).out;
  CHECK(text.find("check-sheaf: fail") == 0);
  CHECK(text.find("2 sections vs 4 matching families") != std::string::npos);
}

TEST_CASE("worked examples through the command line") {
  CHECK(run_json({"colimit", "--diagram", "c2-span"})["details"]["size"] == 2);
  CHECK(run_json({"limit", "--diagram", "z2-tower"})["details"]["size"] == 16);
  CHECK(run_json({"sections", "P", "whole"})["details"]["count"] == 0);
  CHECK(run_json({"force", "--formula", "exists-section-P", "--at", "whole"})["verdict"] == "pass");
  CHECK(run_json({"torsor-check", "--torsor", "P"})["verdict"] == "pass");
  CHECK(run_json({"cocycle-equiv", "--cocycle", "sign", "--unit"})["verdict"] == "fail");
  CHECK(run_json({"check-cocycle", "--cocycle", "sign-broken"})["verdict"] == "fail");
  CHECK(run_json({"glue-torsor", "--cocycle", "sign", "--random", "5"})["verdict"] == "pass");
  CHECK(run_json({"extract-cocycle", "--torsor", "P", "--cocycle", "sign"})["verdict"] == "pass");
  CHECK(run_json({"kan", "--random", "5"})["verdict"] == "pass");
  CHECK(run_json({"yoneda", "--category", "arrow"})["verdict"] == "pass");
  CHECK(run_json({"sheafify", "--presheaf", "const2", "--certify"})["verdict"] == "pass");
  CHECK(run_json({"heyting", "--presheaf", "F"})["verdict"] == "pass");
  CHECK(run_json({"classify", "--presheaf", "F"})["verdict"] == "pass");
  CHECK(run_json({"interpret", "--formula", "excluded-middle-B"})["verdict"] == "pass");
}

TEST_CASE("unknown object ids are unresolved references") {
  const auto r = run({"--fixtures", data + "/unresolved", "validate-topology", "--site", "sierpinski"});
  CHECK(r.code == 2);
  CHECK(r.err.find("UnresolvedReference") == 0);
  CHECK(r.err.find("stray.json") != std::string::npos);
  CHECK(r.err.find("'nowhere'") != std::string::npos);
}

TEST_CASE("malformed documents report line and column") {
  const auto r = run({"--fixtures", data + "/malformed", "dump"});
  CHECK(r.code == 2);
  CHECK(r.err.find("ParseError") == 0);
  CHECK(r.err.find("broken.json:6:1:") != std::string::npos);
  CHECK_ERRC(cli::DocumentSet::load({fs::path(data) / "malformed" / "broken.json"}, Bounds::defaults()), ParseError);
}

TEST_CASE("extra documents are loaded alongside the fixtures") {
  const auto r = run({"--load", data + "/extra", "validate-topology", "--site", "three"});
  CHECK(r.code == 0);
  CHECK(run({"--fixtures", data + "/extra", "omega", "--site", "sierpinski"}).code == 2);
}

TEST_CASE("identical runs give identical bytes") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"--seed", "3", "kan", "--random", "10"},
           {"--seed", "3", "glue-torsor", "--cocycle", "sign", "--random", "10"},
           {"--format", "json", "extract-cocycle", "--torsor", "P", "--cocycle", "sign"},
           {"--format", "json", "sheafify", "--presheaf", "const2"}}) {
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("dump is canonical and idempotent") {
  const auto root = fs::temp_directory_path() / "workbench-dump-test";
  fs::remove_all(root);
  REQUIRE(run({"dump", "--out", (root / "first").string()}).code == 0);
  CHECK(tree(root / "first") == tree(cli::default_fixture_dir()));
  REQUIRE(run({"--fixtures", (root / "first").string(), "dump", "--out", (root / "second").string()}).code == 0);
  CHECK(tree(root / "first") == tree(root / "second"));
  fs::remove_all(root);
}

TEST_CASE("canonical text and digests") {
  const auto a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
  const auto b = nlohmann::json::parse(R"({"a": [1, 2], "b": 1})");
  CHECK(cli::canonical_text(a) == cli::canonical_text(b));
  CHECK(cli::fnv1a_hex(cli::canonical_text(a)) == cli::fnv1a_hex(cli::canonical_text(b)));
  CHECK(cli::fnv1a_hex("") == "cbf29ce484222325");
}
