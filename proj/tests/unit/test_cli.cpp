#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "zcurve/cli.hpp"
#include "zcurve/evidence.hpp"
#include "zcurve/model_space_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome zc(std::vector<std::string> args) {
  args.insert(args.begin(), "zcurve");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = zcurve::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("zcurve_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// Four models keep the end-to-end runs short.
std::string write_small_space(const TempDir& dir) {
  zcurve::ModelSpace space;
  const double total = 0.125 + 0.125 + 1.0 / 96.0 + 1.0 / 32.0;
  for (auto s : zcurve::default_model_space().specs) {
    if (s.label == "mu0.tau0.none" || s.label == "mu.tau.none" || s.label == "mu.tau.S5" ||
        s.label == "mu.tau.PET") {
      s.prior_prob /= total;
      space.specs.push_back(s);
    }
  }
  const auto path = dir / "space.json";
  std::ofstream(path) << zcurve::write_model_space(space);
  return path;
}

const std::vector<std::string> quick{"--chains", "2", "--warmup", "200", "--iter", "400", "--ensemble-draws", "1000"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(zc({}).code == 2);
  CHECK(zc({"frobnicate"}).code == 2);
  CHECK(zc({"simulate"}).code == 2);
  CHECK(zc({"simulate", "--k", "10", "--bias", "extreme"}).code == 2);
  CHECK(zc({"fit"}).code == 2);
  CHECK(zc({"fit", "x.csv", "--direction", "up"}).code == 2);
  CHECK(zc({"plot", "fit.json"}).code == 2);
  const auto help = zc({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("runtime errors exit with 1") {
  const auto r = zc({"fit", "/nonexistent/data.csv"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(zc({"report", "/nonexistent/fit.json"}).code == 1);
  CHECK(zc({"fit", "/nonexistent/data.csv", "--space", "/nonexistent/space.json"}).code == 1);
}

TEST_CASE("invalid data reports every bad row") {
  TempDir dir;
  std::ofstream(dir / "bad.csv") << "y,se\n0.1,0\n0.2,0.1\n0.3,-1\n";
  const auto r = zc({"fit", dir / "bad.csv"});
  CHECK(r.code == 1);
  CHECK(r.err.find("row 1") != std::string::npos);
  CHECK(r.err.find("row 3") != std::string::npos);
}

TEST_CASE("ZCURVE_THREADS is validated") {
  TempDir dir;
  ::setenv("ZCURVE_THREADS", "zero", 1);
  std::ofstream(dir / "d.csv") << "y,se\n0.1,0.1\n";
  CHECK(zc({"fit", dir / "d.csv", "--space", write_small_space(dir)}).code == 2);
  ::unsetenv("ZCURVE_THREADS");
}

TEST_CASE("simulate is deterministic and writes provenance") {
  TempDir dir;
  const auto a = zc({"simulate", "--k", "40", "--bias", "moderate", "--seed", "5"});
  const auto b = zc({"simulate", "--k", "40", "--bias", "moderate", "--seed", "5"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 41);
  CHECK(zc({"simulate", "--k", "40", "--seed", "5", "--out", dir / "s.csv"}).code == 0);
  CHECK(fs::exists(dir / "s.provenance.json"));
  CHECK(slurp(dir / "s.csv").rfind("y,se\n", 0) == 0);
}

TEST_CASE("space writes a valid default model space") {
  const auto r = zc({"space"});
  CHECK(r.code == 0);
  const auto space = zcurve::model_space_from_json(nlohmann::json::parse(r.out));
  CHECK(space.size() == 36);
}

TEST_CASE("fit, report and plot end to end") {
  TempDir dir;
  const auto space = write_small_space(dir);
  REQUIRE(zc({"simulate", "--k", "60", "--bias", "moderate", "--seed", "8", "--out", dir / "d.csv"}).code == 0);

  const auto f1 = zc(concat({"fit", dir / "d.csv", "--space", space, "--seed", "4", "--threads", "1", "--out",
                             dir / "f1.json"},
                            quick));
  REQUIRE(f1.code == 0);
  const auto f4 = zc(concat({"fit", dir / "d.csv", "--space", space, "--seed", "4", "--threads", "4", "--out",
                             dir / "f4.json"},
                            quick));
  REQUIRE(f4.code == 0);
  CHECK(slurp(dir / "f1.json") == slurp(dir / "f4.json"));

  const auto r1 = zc({"report", dir / "f1.json"});
  const auto r4 = zc({"report", dir / "f4.json"});
  CHECK(r1.code == 0);
  CHECK(r1.out == r4.out);
  CHECK(r1.out.find("BF_bias") != std::string::npos);
  CHECK(r1.out.find("N_missing") != std::string::npos);

  const auto p = zc({"plot", dir / "f1.json", dir / "d.csv", "--curves", "re,3psm,pet,robma", "--extrapolate",
                     "--draws", "200", "--out", dir / "z.svg"});
  REQUIRE(p.code == 0);
  std::istringstream svg(slurp(dir / "z.svg"));
  boost::property_tree::ptree tree;
  CHECK_NOTHROW(boost::property_tree::read_xml(svg, tree));
  CHECK(fs::exists(dir / "z.csv"));
  CHECK(fs::exists(dir / "z.bins.csv"));
  CHECK(slurp(dir / "z.csv").find("curve_robma_extrapolated") != std::string::npos);
  // The random-effects curve has no bias adjustment to remove.
  CHECK(p.err.find("'re' has no bias-adjusted draws") != std::string::npos);

  const auto again = zc({"plot", dir / "f1.json", dir / "d.csv", "--curves", "re,3psm,pet,robma", "--extrapolate",
                         "--draws", "200", "--out", dir / "z2.svg"});
  CHECK(slurp(dir / "z.svg") == slurp(dir / "z2.svg"));

  const auto unknown = zc({"plot", dir / "f1.json", dir / "d.csv", "--curves", "nope", "--out", dir / "u.svg"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("mu.tau.S5") != std::string::npos);
  CHECK(unknown.err.find("robma_bias") != std::string::npos);
}
