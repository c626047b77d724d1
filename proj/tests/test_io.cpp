#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "wg/cli.hpp"
#include "wg/explanation_file.hpp"

using namespace wg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("wg_io_test_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("explanation files round-trip") {
  Rng rng(1);
  ExplanationFile a{ExplanationSet(ExplanationKind::attribution(3), test::gaussian_matrix(rng, 25, 3)),
                    {{"explainer", "saliency"}}};
  const auto back = parse_explanation_file(format_explanation_file(a));
  CHECK(back.set.kind() == a.set.kind());
  CHECK(back.set.data() == a.set.data());
  CHECK(back.metadata == a.metadata);

  ExplanationFile r{ExplanationSet(ExplanationKind::ranking(4), test::random_permutations(rng, 10, 4)), {}};
  const std::string text = format_explanation_file(r);
  CHECK(text.find(".") == std::string::npos);
  CHECK(parse_explanation_file(text).set.data() == r.set.data());
}

TEST_CASE("parse errors carry line and column") {
  const std::string head = "# {\"kind\":\"attribution\",\"s\":2,\"N\":2}\n";
  try {
    parse_explanation_file(head + "1,2\n3,x\n", "f.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).rfind("f.csv:3:3:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_explanation_file(head + "1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_explanation_file(head + "1,2\n3\n"), ParseError);
  CHECK_THROWS_AS(parse_explanation_file(head + "1,2\n3,4,5\n"), ParseError);
  CHECK_THROWS_AS(parse_explanation_file("1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_explanation_file("# {\"kind\":\"vector\",\"s\":2,\"N\":0}\n"), ParseError);
  CHECK_THROWS_AS(parse_explanation_file("# {\"kind\":\"ranking\",\"s\":2,\"N\":1}\n0,0\n"), ValidationError);
}

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"score", dir / "missing.csv"}).code != kExitOk);

  write(dir / "bad.csv", "# {\"kind\":\"attribution\",\"s\":2,\"N\":2}\n1,2\n3,4x\n");
  const Run bad = cli({"score", dir / "bad.csv"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("bad.csv:3:3") != std::string::npos);

  write(dir / "perm.csv", "# {\"kind\":\"ranking\",\"s\":3,\"N\":1}\n0,0,2\n");
  CHECK(cli({"score", dir / "perm.csv"}).code == kExitValidation);

  write(dir / "zero.csv", "# {\"kind\":\"attribution\",\"s\":2,\"N\":2}\n0,0\n0,0\n");
  const Run zero = cli({"score", dir / "zero.csv"});
  CHECK(zero.code == kExitValidation);
  CHECK(zero.err.find("--k") != std::string::npos);

  write(dir / "sel.csv", "# {\"kind\":\"selection\",\"s\":3,\"N\":2}\n1,0,1\n0,1,1\n");
  CHECK(cli({"compare", dir / "sel.csv", dir / "zero.csv"}).code == kExitValidation);
  CHECK(cli({"study", "nonsense", "--out", dir / "s"}).code == kExitUsage);
}

TEST_CASE("score reports dirac near one and baseline near zero") {
  TempDir dir;
  REQUIRE(cli({"generate", "baseline", "--space", "attribution", "--s", "2", "--radius", "1", "--n", "1500",
               "--seed", "3", "--out", dir / "base.csv"}).code == kExitOk);
  std::string dirac = "# {\"kind\":\"attribution\",\"s\":2,\"N\":1500}\n";
  for (int i = 0; i < 1500; ++i) dirac += "0.25,-0.5\n";
  write(dir / "dirac.csv", dirac);

  const Run one = cli({"score", dir / "dirac.csv", "--k", "1", "--seed", "4"});
  REQUIRE(one.code == kExitOk);
  const auto j = nlohmann::json::parse(one.out);
  CHECK(j["reports"][0]["normalized_wg"].get<double>() == doctest::Approx(1.0).epsilon(0.03));

  const Run cmp = cli({"compare", dir / "dirac.csv", dir / "base.csv", "--seed", "4"});
  REQUIRE(cmp.code == kExitOk);
  const auto c = nlohmann::json::parse(cmp.out);
  const auto& reports = c["reports"];
  REQUIRE(reports.size() == 2);
  CHECK(reports[0]["file"].get<std::string>().find("base.csv") != std::string::npos);
  CHECK(reports[0]["normalized_wg"].get<double>() <= 0.05);
  CHECK(reports[1]["normalized_wg"].get<double>() == doctest::Approx(1.0).epsilon(0.03));

  const Run again = cli({"compare", dir / "dirac.csv", dir / "base.csv", "--seed", "4"});
  CHECK(again.out == cmp.out);
}

TEST_CASE("replay reproduces and detects stale inputs") {
  TempDir dir;
  REQUIRE(cli({"generate", "baseline", "--space", "ranking", "--s", "4", "--n", "300", "--seed", "9",
               "--out", dir / "r.csv"}).code == kExitOk);
  REQUIRE(cli({"score", dir / "r.csv", "--seed", "2", "--out", dir / "a.json", "--manifest", dir / "m.json"}).code ==
          kExitOk);
  REQUIRE(cli({"replay", dir / "m.json", "--out", dir / "b.json"}).code == kExitOk);
  CHECK(read_text_file(dir / "a.json") == read_text_file(dir / "b.json"));

  write(dir / "r.csv", read_text_file(dir / "r.csv") + "\n");
  CHECK(cli({"replay", dir / "m.json"}).code == kExitValidation);
}

}  // TEST_SUITE
