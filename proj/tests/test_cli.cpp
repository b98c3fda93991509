#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "opk/cli.hpp"
#include "opk/frames.hpp"
#include "opk/io.hpp"
#include "opk/spaces.hpp"

using namespace opk;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "opk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  return {code, o.str(), e.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("opk_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// parses "re", "re+imi" or "re-imi"
cplx parse_complex(const std::string& s) {
  if (s.empty() || s.back() != 'i') return std::stod(s);
  std::size_t k = s.size() - 1;
  while (k > 0 && !((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E')) --k;
  return {std::stod(s.substr(0, k)), std::stod(s.substr(k, s.size() - 1 - k))};
}

std::vector<std::vector<std::string>> read_csv(const std::string& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("Fourier Gram is written as an identity CSV") {
    TempDir t;
    const Run r = run({"gram", "--family", "fourier", "--indices", "-2..2", "--out", t / "g"});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(t / "g/gram.csv");
    REQUIRE(rows.size() == 6u);
    CHECK(rows[0][0] == "index");
    CHECK(rows[0][1] == "-2");
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k) CHECK(std::abs(parse_complex(rows[j + 1][k + 1]) - (j == k ? 1.0 : 0.0)) < 1e-12);
    const json man = read_json_file(t / "g/manifest.json");
    CHECK(man["tool"] == "opk");
    CHECK(man["version"] == kToolVersion);
    CHECK(man["command"] == "gram");
    CHECK(man["config"]["indices"] == "-2..2");
    CHECK(man["config"]["seed"] == 1);
  }

  TEST_CASE("Kadec command reports the library bounds") {
    TempDir t;
    REQUIRE(run({"kadec", "--delta", "0.1", "--out", t / "k"}).code == 0);
    const json j = read_json_file(t / "k/kadec.json");
    const KadecBounds b = kadec_bounds(0.1);
    CHECK(j["A"].get<double>() == b.A);
    CHECK(j["B"].get<double>() == b.B);
    CHECK(j["pass"] == true);
    REQUIRE(run({"kadec", "--delta", "0.3", "--out", t / "k2"}).code == 0);
    const json j2 = read_json_file(t / "k2/kadec.json");
    CHECK(j2["A"].is_null());
    CHECK(j2["pass"] == false);
  }

  TEST_CASE("reconstruct matches the library call") {
    TempDir t;
    Rng rng(5);
    const KernelSpace space = pw_average_space(0.2, Profile::Box, 16);
    const BandlimitedSignal sig = random_bandlimited(8, space.h_grid, rng);
    write_json_file(t / "sig.json", signal_to_json(sig));
    REQUIRE(run({"reconstruct", "--space", "pw", "--delta", "0.2", "--m", "16", "--signal", t / "sig.json", "--out",
                 t / "r"})
                .code == 0);
    std::vector<Index> idx;
    for (int j = -16; j <= 16; ++j) idx.push_back(Index::real(j));
    const auto secs = space.sections(idx);
    SampleSet smp;
    for (const auto& a : idx)
      smp.entries.push_back({a, average_sample_fn([&](double y) { return sig.value(y); }, AverageFunctional(a.x, 0.2))});
    const GridFunction rec = reconstruct(dual_frame(make_frame(secs)), smp);
    const double err = interior_relative_error(rec, synthesize(sig, space.h_grid), -8.0, 8.0);
    const json s = read_json_file(t / "r/summary.json");
    CHECK(s["interior_relative_error"].get<double>() == doctest::Approx(err).epsilon(1e-12));
    CHECK(err < 1e-2);
    const auto rows = read_csv(t / "r/reconstruction.csv");
    REQUIRE(static_cast<int>(rows.size()) == rec.grid.n + 1);
    const int i = rec.grid.n / 3;
    CHECK(std::stod(rows[i + 1][1]) == doctest::Approx(rec.at(i).real()).epsilon(1e-14));
    const SampleSet back = sample_set_from_json(read_json_file(t / "r/samples.json"));
    CHECK(back.entries.size() == 33u);
  }

  TEST_CASE("every subcommand runs and writes its manifest") {
    TempDir t;
    const std::vector<std::vector<std::string>> cmds = {
        {"gram", "--family", "average", "--indices", "-3..3"},
        {"psd", "--family", "point", "--indices", "-2,0.5,1"},
        {"reconstruct", "--space", "fourier", "--m", "4"},
        {"avg-sample", "--indices", "-2..2"},
        {"regnet", "--family", "fourier", "--indices", "-3..3"},
        {"kadec", "--delta", "0.05"},
        {"si-diagnose", "--generator", "hat", "--k-max", "12"},
        {"stability", "--trials", "10", "--m", "6", "--sizes", "3,6,13"},
        {"vector-sampling", "--n", "2", "--m", "4", "--perturb", "0.1"}};
    for (const auto& c : cmds) {
      auto args = c;
      args.push_back("--out");
      args.push_back(t / c[0]);
      const Run r = run(args);
      INFO(c[0], " stderr: ", r.err);
      CHECK(r.code == 0);
      CHECK(fs::exists(t / (c[0] + "/manifest.json")));
    }
  }

  TEST_CASE("rerunning a manifest reproduces every CSV byte for byte") {
    TempDir t;
    const std::vector<std::vector<std::string>> cmds = {
        {"regnet", "--family", "average", "--indices", "-4..4", "--noise", "0.01", "--seed", "7"},
        {"avg-sample", "--profile", "triangle", "--seed", "3"},
        {"stability", "--trials", "8", "--m", "5", "--sizes", "2,5,11", "--seed", "11"},
        {"vector-sampling", "--perturb", "0.15", "--m", "3", "--seed", "2"}};
    for (const auto& c : cmds) {
      auto a = c;
      a.insert(a.end(), {"--out", t / (c[0] + "_1")});
      REQUIRE(run(a).code == 0);
      const Run r2 = run({c[0], "--config", t / (c[0] + "_1/manifest.json"), "--out", t / (c[0] + "_2")});
      REQUIRE(r2.code == 0);
      for (const auto& e : fs::directory_iterator(t / (c[0] + "_1")))
        if (e.path().extension() == ".csv") {
          INFO(e.path().string());
          CHECK(slurp(e.path().string()) == slurp(t / (c[0] + "_2/" + e.path().filename().string())));
        }
      CHECK(slurp(t / (c[0] + "_1/manifest.json")) == slurp(t / (c[0] + "_2/manifest.json")));
    }
  }

  TEST_CASE("written JSON artifacts load back") {
    TempDir t;
    REQUIRE(run({"avg-sample", "--out", t / "a"}).code == 0);
    const BandlimitedSignal s = signal_from_json(read_json_file(t / "a/signal.json"));
    CHECK(s.m == 8);
    const SampleSet smp = sample_set_from_json(read_json_file(t / "a/samples.json"));
    CHECK(smp.entries.size() == 17u);
    REQUIRE(run({"vector-sampling", "--out", t / "v"}).code == 0);
    CHECK(vector_sampling_set_from_json(read_json_file(t / "v/sampling_set.json")).n == 2);
    REQUIRE(run({"regnet", "--family", "fourier", "--indices", "0..3", "--out", t / "r"}).code == 0);
    const ProblemSpec p = problem_spec_from_json(read_json_file(t / "r/problem.json"));
    CHECK(p.indices.size() == 4u);
    // the problem file drives a second run to the same coefficients
    REQUIRE(run({"regnet", "--problem", t / "r/problem.json", "--out", t / "r2"}).code == 0);
    CHECK(slurp(t / "r/eta.csv") == slurp(t / "r2/eta.csv"));
  }

  TEST_CASE("errors map to exit codes and JSON on stderr") {
    TempDir t;
    Run r = run({"gram", "--family", "nope", "--out", t / "x"});
    CHECK(r.code == 2);
    json e = json::parse(r.err);
    CHECK(e["class"] == "validation");
    CHECK(e.contains("message"));

    r = run({"kadec", "--delta", "abc", "--out", t / "x"});
    CHECK(r.code == 2);
    r = run({"bogus"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["error"] == "usage");
    r = run({"gram", "--indices", "3..1", "--out", t / "x"});
    CHECK(r.code == 2);
    r = run({"avg-sample", "--delta", "-0.1", "--out", t / "x"});
    CHECK(r.code == 2);

    r = run({"regnet", "--family", "fourier", "--indices", "0,0,1", "--lambda", "1e-15", "--out", t / "x"});
    CHECK(r.code == 3);
    e = json::parse(r.err);
    CHECK(e["class"] == "numerical");
    CHECK(e["error"] == "conditioning");
  }

  TEST_CASE("config files are validated") {
    TempDir t;
    write_json_file(t / "bad_key.json", {{"deltaa", 0.1}});
    CHECK(run({"kadec", "--config", t / "bad_key.json", "--out", t / "x"}).code == 2);
    write_json_file(t / "bad_type.json", {{"delta", "wide"}});
    CHECK(run({"kadec", "--config", t / "bad_type.json", "--out", t / "x"}).code == 2);
    write_json_file(t / "ok.json", {{"delta", 0.2}});
    REQUIRE(run({"kadec", "--delta", "0.1", "--config", t / "ok.json", "--out", t / "k"}).code == 0);
    CHECK(read_json_file(t / "k/kadec.json")["delta"].get<double>() == 0.2);
    REQUIRE(run({"gram", "--family", "fourier", "--indices", "0..1", "--out", t / "g"}).code == 0);
    CHECK(run({"kadec", "--config", t / "g/manifest.json", "--out", t / "x"}).code == 2);
  }
}
