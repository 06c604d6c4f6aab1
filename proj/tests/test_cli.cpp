#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirstat/dirstat.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dirstat;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("dirstat_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  Result run(const std::string& args) const {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string("\"") + DIRSTAT_CLI_PATH + "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
  }

  Dataset dataset(const std::string& name) const {
    std::ifstream in(path(name));
    return read_dataset(in, name);
  }

  std::vector<int> labels(const std::string& name) const {
    std::ifstream in(path(name));
    return read_labels(in, name);
  }

  json json_file(const std::string& name) const { return json::parse(slurp(path(name))); }

  fs::path dir_;
};

// Minimal CSV reader: header names -> column of numbers, '#' lines skipped.
std::map<std::string, std::vector<double>> read_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> names;
  std::map<std::string, std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string cell;
    if (names.empty()) {
      while (std::getline(row, cell, ',')) names.push_back(cell);
      continue;
    }
    for (std::size_t j = 0; std::getline(row, cell, ','); ++j) cols[names.at(j)].push_back(std::stod(cell));
  }
  return cols;
}

}  // namespace

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("fit --data x.txt --out y").status, 2);  // --k missing
  EXPECT_EQ(run("fit --data x.txt --k 2 --family gaussian --out y").status, 2);
  EXPECT_EQ(run("bench-kappa --r 0.5,1.2").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, DataErrorsExitWithThree) {
  EXPECT_EQ(run("fit --data " + path("missing.txt") + " --k 2 --out " + path("m")).status, 3);
  write("bad.txt", "0.6 0.8\n0.6 x\n");
  const Result bad = run("fit --data " + path("bad.txt") + " --k 1 --out " + path("m"));
  EXPECT_EQ(bad.status, 3);
  EXPECT_NE(bad.err.find("bad.txt:2:5: invalid number 'x'"), std::string::npos) << bad.err;
  write("raw.txt", "3 4\n1 1\n");
  EXPECT_EQ(run("fit --data " + path("raw.txt") + " --k 1 --out " + path("m")).status, 3);  // rows not unit
  write("a.txt", "0\n1\n");
  write("b.txt", "0\n1\n1\n");
  EXPECT_EQ(run("eval --truth " + path("a.txt") + " --pred " + path("b.txt")).status, 3);
}

TEST_F(Cli, IngestNormalizesAndRecordsConfig) {
  write("raw.txt", "# measurements\n3, 4\n0 -2\n");
  ASSERT_EQ(run("ingest --in " + path("raw.txt") + " --out " + path("unit.txt")).status, 0);
  const Dataset u = dataset("unit.txt");
  EXPECT_DOUBLE_EQ(u(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(u(0, 1), 0.8);
  EXPECT_EQ(u(1, 1), -1.0);
  const std::string text = slurp(path("unit.txt"));
  EXPECT_EQ(text.rfind("# dirstat format 1\n# config {", 0), 0u) << text;

  write("raw3.txt", "1 2 3\n");
  ASSERT_EQ(run("ingest --in " + path("raw3.txt") + " --normalize pearson --out " + path("p.txt")).status, 0);
  const Dataset p = dataset("p.txt");
  EXPECT_NEAR(p(0, 0), -std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(p(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(p(0, 2), std::sqrt(0.5), 1e-15);

  write("flat.txt", "2 2 2\n");
  EXPECT_EQ(run("ingest --in " + path("flat.txt") + " --normalize pearson --out " + path("f.txt")).status, 3);
}

TEST_F(Cli, SampleIsDeterministicPerSeed) {
  const std::string common = "sample --family vmf --p 3 --k 1 --kappa 10 --n 500 ";
  ASSERT_EQ(run(common + "--seed 4 --out " + path("a")).status, 0);
  ASSERT_EQ(run(common + "--seed 4 --out " + path("b")).status, 0);
  ASSERT_EQ(run(common + "--seed 5 --out " + path("c")).status, 0);
  EXPECT_EQ(slurp(path("a.data.txt")), slurp(path("b.data.txt")));
  EXPECT_EQ(slurp(path("a.labels.txt")), slurp(path("b.labels.txt")));
  EXPECT_NE(slurp(path("a.data.txt")), slurp(path("c.data.txt")));

  // K = 1 is plain vMF sampling: every label is 0 and the mean resultant
  // length is close to A_3(10).
  const Dataset x = dataset("a.data.txt");
  const std::vector<int> y = labels("a.labels.txt");
  EXPECT_EQ(x.rows(), 500);
  EXPECT_TRUE(std::all_of(y.begin(), y.end(), [](int l) { return l == 0; }));
  EXPECT_NEAR(x.colwise().mean().norm(), specfun::bessel_ratio(3, 10.0), 0.02);
  for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_NEAR(x.row(i).norm(), 1.0, 1e-9);
}

TEST_F(Cli, TwoConesClusterPerfectly) {
  const json model = {{"version", 1},
                      {"family", "vmf"},
                      {"p", 3},
                      {"K", 2},
                      {"weights", {0.5, 0.5}},
                      {"components", {{{"mu", {1.0, 0.0, 0.0}}, {"kappa", 80.0}}, {{"mu", {0.0, 1.0, 0.0}}, {"kappa", 80.0}}}}};
  write("cones.json", model.dump());
  ASSERT_EQ(run("sample --model " + path("cones.json") + " --n 400 --seed 2 --out " + path("s")).status, 0);
  ASSERT_EQ(run("cluster --data " + path("s.data.txt") + " --method spkmeans --k 2 --seed 1 --out " + path("c")).status, 0);
  const Result e = run("eval --truth " + path("s.labels.txt") + " --pred " + path("c.labels.txt") + " --json");
  ASSERT_EQ(e.status, 0) << e.err;
  EXPECT_NEAR(json::parse(e.out)["nmi"].get<double>(), 1.0, 1e-12);
  const json report = json_file("c.report.json");
  EXPECT_EQ(report["config"]["method"], "spkmeans");
  EXPECT_EQ(report["centroids"].size(), 2u);
}

TEST_F(Cli, FitOutputsAreReproducibleAndLossless) {
  ASSERT_EQ(run("sample --family watson --p 4 --k 3 --kappa 25 --n 600 --seed 9 --out " + path("s")).status, 0);
  const std::string fit = "fit --data " + path("s.data.txt") + " --family watson --k 3 --seed 3 ";
  ASSERT_EQ(run(fit + "--threads 1 --out " + path("a")).status, 0);
  ASSERT_EQ(run(fit + "--threads 1 --out " + path("b")).status, 0);
  ASSERT_EQ(run(fit + "--threads 4 --out " + path("t")).status, 0);
  for (const char* suffix : {".model.json", ".labels.txt", ".report.json"}) {
    EXPECT_EQ(slurp(path(std::string("a") + suffix)), slurp(path(std::string("b") + suffix))) << suffix;
  }
  json a = json_file("a.model.json"), t = json_file("t.model.json");
  EXPECT_EQ(a["components"], t["components"]);
  EXPECT_EQ(a["config"]["threads"], 1);
  EXPECT_EQ(a["version"], 1);

  // The stored model reproduces the library fit bit for bit.
  EmConfig cfg;
  cfg.seed = 3;
  cfg.threads = 1;
  const FitReport direct = fit_em(Family::watson, dataset("s.data.txt"), 3, cfg);
  for (int j = 0; j < 3; ++j) {
    const auto mu = a["components"][j]["mu"].get<std::vector<double>>();
    for (int d = 0; d < 4; ++d) EXPECT_EQ(mu[static_cast<std::size_t>(d)], direct.final_model.components[j].mu.coords()(d));
    EXPECT_EQ(a["components"][j]["kappa"].get<double>(), direct.final_model.components[j].kappa);
    EXPECT_EQ(a["weights"][j].get<double>(), direct.final_model.components[j].weight);
  }
  const json report = json_file("a.report.json");
  EXPECT_EQ(report["log_likelihood_trace"].get<std::vector<double>>(), direct.log_likelihood_trace);

  // A fitted model can be sampled from again.
  EXPECT_EQ(run("sample --model " + path("a.model.json") + " --n 10 --out " + path("again")).status, 0);
}

TEST_F(Cli, EvalMirrorsNmiCases) {
  write("y1.txt", "0\n0\n1\n1\n");
  write("y2.txt", "1\n1\n0\n0\n");
  write("y3.txt", "0\n1\n0\n1\n");
  write("y4.txt", "0\n1\n2\n3\n");
  const auto score = [&](const char* a, const char* b) {
    const Result r = run(std::string("eval --json --truth ") + path(a) + " --pred " + path(b));
    EXPECT_EQ(r.status, 0) << r.err;
    return json::parse(r.out)["nmi"].get<double>();
  };
  EXPECT_NEAR(score("y1.txt", "y2.txt"), 1.0, 1e-12);
  EXPECT_NEAR(score("y1.txt", "y3.txt"), 0.0, 1e-12);
  EXPECT_NEAR(score("y1.txt", "y4.txt"), std::sqrt(0.5), 1e-12);
  const Result plain = run("eval --truth " + path("y1.txt") + " --pred " + path("y3.txt"));
  EXPECT_NE(plain.out.find("nmi: 0.000000000000"), std::string::npos) << plain.out;
  EXPECT_NE(plain.out.find("     1      1"), std::string::npos) << plain.out;
}

TEST_F(Cli, BenchKappaTables) {
  const Result v = run("bench-kappa --family vmf --p 10,100,1000 --r 0.05:0.95:0.05");
  ASSERT_EQ(v.status, 0) << v.err;
  auto cols = read_csv(v.out);
  ASSERT_EQ(cols["p"].size(), 57u);
  for (std::size_t i = 0; i < 57; ++i) {
    EXPECT_LE(cols["residual_newton2"][i], cols["residual_banerjee"][i]) << i;
    EXPECT_LE(cols["residual_exact"][i], 1e-12) << i;
  }

  const Result w = run("bench-kappa --family watson --p 3,10,200 --r 0.05:0.95:0.05,0.1");
  EXPECT_EQ(w.status, 2);  // mixed grid syntax is rejected
  const Result w2 = run("bench-kappa --family watson --p 3,10,200 --r 0.05:0.95:0.05 --out " + path("w.csv"));
  ASSERT_EQ(w2.status, 0) << w2.err;
  cols = read_csv(slurp(path("w.csv")));
  bool saw_zero_row = false;
  for (std::size_t i = 0; i < cols["r"].size(); ++i) {
    EXPECT_LE(cols["lower"][i], cols["mid"][i]);
    EXPECT_LE(cols["mid"][i], cols["upper"][i]);
    EXPECT_LE(cols["residual_kappa"][i], 1e-10);
    if (cols["r"][i] == cols["a"][i] / cols["c"][i]) {
      saw_zero_row = true;
      for (const char* c : {"residual_lower", "residual_mid", "residual_upper", "residual_kappa", "kappa"}) {
        EXPECT_EQ(cols[c][i], 0.0) << c;
      }
    }
  }
  EXPECT_TRUE(saw_zero_row);  // p = 10 puts a/c = 0.1 on the grid
}

TEST_F(Cli, BigsimRoundTrip) {
  const Result s = run("sample --preset bigsim --seed 1 --out " + path("big"));
  ASSERT_EQ(s.status, 0) << s.err;
  const std::vector<int> y = labels("big.labels.txt");
  ASSERT_EQ(y.size(), 5000u);
  const double weights[4] = {0.25, 0.24, 0.25, 0.26};
  for (int j = 0; j < 4; ++j) {
    const double count = static_cast<double>(std::count(y.begin(), y.end(), j));
    EXPECT_LE(std::abs(count - 5000.0 * weights[j]), 0.03 * 5000.0 * weights[j]);
  }
  const Result f = run("fit --data " + path("big.data.txt") + " --k 4 --seed 1 --out " + path("fit"));
  ASSERT_EQ(f.status, 0) << f.err;
  EXPECT_NE(f.out.find("wall_time_s: "), std::string::npos);
  const Result e = run("eval --json --truth " + path("big.labels.txt") + " --pred " + path("fit.labels.txt") +
                    " --truth-model " + path("big.model.json") + " --model " + path("fit.model.json"));
  ASSERT_EQ(e.status, 0) << e.err;
  const json r = json::parse(e.out);
  EXPECT_GE(r["recovery"]["min_cosine"].get<double>(), 0.99);
  EXPECT_LE(r["recovery"]["max_kappa_rel_error"].get<double>(), 0.05);
  EXPECT_LE(r["recovery"]["max_weight_rel_error"].get<double>(), 0.05);
  EXPECT_NEAR(r["nmi"].get<double>(), 1.0, 1e-12);
}

TEST_F(Cli, TextPresetIsClusterable) {
  ASSERT_EQ(run("sample --preset text --seed 3 --out " + path("t")).status, 0);
  const Dataset x = dataset("t.data.txt");
  EXPECT_EQ(x.rows(), 1000);
  EXPECT_EQ(x.cols(), 2000);
  EXPECT_FALSE(fs::exists(path("t.model.json")));
  ASSERT_EQ(run("cluster --data " + path("t.data.txt") + " --k 5 --restarts 5 --seed 1 --out " + path("c")).status, 0);
  const Result e = run("eval --json --truth " + path("t.labels.txt") + " --pred " + path("c.labels.txt"));
  ASSERT_EQ(e.status, 0);
  EXPECT_GE(json::parse(e.out)["nmi"].get<double>(), 0.8);
}
