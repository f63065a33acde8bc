#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wqed/cli.hpp"
#include "wqed/dynamics.hpp"
#include "wqed/fit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "wqed");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = wqed::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("wqed_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
  }
  double header_value(const std::string& key) const {
    for (const auto& c : comments)
      if (c.rfind(key + " ", 0) == 0) return std::stod(c.substr(key.size() + 1));
    FAIL("missing header " << key);
    return 0.0;
  }
};

Csv read_csv(const std::string& path) {
  Csv csv;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      csv.comments.push_back(line.substr(2));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (csv.columns.empty()) {
      csv.columns = cells;
    } else {
      std::vector<double> row;
      for (const auto& c : cells) row.push_back(std::stod(c));
      csv.rows.push_back(row);
    }
  }
  return csv;
}

}  // namespace

TEST_CASE("missing config file exits with the I/O code and writes nothing") {
  TempDir dir("missing");
  const auto r = invoke({"--config", dir / "nope.json", "--out", dir.path.string(), "spectrum"});
  CHECK(r.code == wqed::cli::kIo);
  CHECK(r.err.find("nope.json") != std::string::npos);
  CHECK(fs::is_empty(dir.path));
}

TEST_CASE("config validation errors exit with code 1") {
  TempDir dir("invalid");
  spit(dir / "unknown.json", R"({"emitter": {"beta": 0.5, "colour": 1}})");
  CHECK(invoke({"--config", dir / "unknown.json", "--out", dir.path.string(), "spectrum"}).code == 1);
  spit(dir / "range.json", R"({"emitter": {"beta": 1.5}})");
  CHECK(invoke({"--config", dir / "range.json", "--out", dir.path.string(), "spectrum"}).code == 1);
  spit(dir / "grid.json", R"({"grids": {"flux": [1e-3, 1e3, 1]}})");
  CHECK(invoke({"--config", dir / "grid.json", "--out", dir.path.string(), "saturation"}).code == 1);
  spit(dir / "broken.json", "{\"emitter\": ");
  CHECK(invoke({"--config", dir / "broken.json", "--out", dir.path.string(), "spectrum"}).code == 1);
  CHECK(invoke({"--out", dir.path.string(), "bound-state", "--vs", "gamma"}).code == 1);
  CHECK(invoke({"--out", dir.path.string(), "--no-such-flag", "spectrum"}).code == 1);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"--out", dir.path.string(), "--flux-min", "0", "saturation"}).code == 1);
  for (const auto& f : fs::directory_iterator(dir.path)) CHECK(f.path().extension() == ".json");
}

TEST_CASE("json errors are machine readable") {
  TempDir dir("jsonerr");
  const auto r = invoke({"--json-errors", "--config", dir / "missing.json", "spectrum"});
  CHECK(r.code == 3);
  const auto j = json::parse(r.err);
  CHECK(j["error"]["exit_code"] == 3);
  CHECK(j["error"]["category"] == "io");
  CHECK(j["error"]["code"] == "Io");
}

TEST_CASE("saturation table shows the noise-limited dip and the deconvolved critical flux") {
  TempDir dir("sat");
  const auto r = invoke({"--out", dir.path.string(), "--flux-points", "13", "saturation"});
  REQUIRE(r.code == 0);
  const auto csv = read_csv(dir / "saturation.csv");
  CHECK(csv.columns == std::vector<std::string>{"flux_per_lifetime", "power_nW", "T_bare", "T_noise_averaged",
                                                "T_coherent", "T_incoherent"});
  REQUIRE(csv.rows.size() == 13);
  CHECK(csv.comments.at(0).rfind("wqed ", 0) == 0);
  const auto cfg = json::parse(csv.comments.at(1).substr(std::string("config ").size()));
  CHECK(cfg["emitter"]["beta"] == 0.85);
  CHECK(cfg["grids"]["flux"][2] == 13);

  CHECK(csv.header_value("weak_dip_noise_averaged_percent") == doctest::Approx(8.0).epsilon(0.25));
  CHECK(csv.header_value("n_c_deconvolved") == doctest::Approx(0.81).epsilon(0.25));

  // The lowest flux row reproduces the weak-drive dip.
  const auto& first = csv.rows.front();
  CHECK(100.0 * (1.0 - first[csv.col("T_noise_averaged")]) ==
        doctest::Approx(csv.header_value("weak_dip_noise_averaged_percent")).epsilon(0.01));
  for (const auto& row : csv.rows) {
    CHECK(row[csv.col("T_coherent")] + row[csv.col("T_incoherent")] ==
          doctest::Approx(row[csv.col("T_bare")]).epsilon(1e-12));
    CHECK(row[csv.col("power_nW")] ==
          doctest::Approx(wqed::units::flux_to_power(row[0], 2.5, wqed::PowerConversion{})).epsilon(1e-9));
  }
}

TEST_CASE("g2 without noise or detector gives bunching near 2.1 at zero delay") {
  TempDir dir("g2");
  spit(dir / "clean.json", R"({"noise": {"sigma": 0, "alpha": 0}, "detector": {"jitter_sigma": 0},
                               "grids": {"tau": [-4, 4, 81]}})");
  const auto r = invoke({"--config", dir / "clean.json", "--out", dir.path.string(), "g2", "--flux", "1e-3"});
  REQUIRE(r.code == 0);
  const auto csv = read_csv(dir / "g2.csv");
  CHECK(csv.header_value("g2_zero_raw") == doctest::Approx(2.1).epsilon(0.2 / 2.1));
  const auto& mid = csv.rows.at(40);
  CHECK(mid[0] == 0.0);
  CHECK(mid[csv.col("g2_raw")] == doctest::Approx(csv.header_value("g2_zero_raw")).epsilon(1e-12));
  CHECK(mid[csv.col("g2_noise_averaged")] == doctest::Approx(mid[csv.col("g2_raw")]).epsilon(1e-9));
  CHECK(mid[csv.col("g2_detected")] == doctest::Approx(mid[csv.col("g2_raw")]).epsilon(1e-9));
  CHECK(csv.rows.front()[csv.col("g2_raw")] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("detector jitter lowers the detected peak") {
  TempDir dir("jitter");
  spit(dir / "c.json", R"({"detector": {"jitter_sigma": 0.2}, "grids": {"tau": [-4, 4, 201]}})");
  REQUIRE(invoke({"--config", dir / "c.json", "--out", dir.path.string(), "g2"}).code == 0);
  const auto csv = read_csv(dir / "g2.csv");
  const auto& mid = csv.rows.at(100);
  CHECK(mid[csv.col("g2_detected")] < mid[csv.col("g2_noise_averaged")]);
  CHECK(mid[csv.col("g2_noise_averaged")] < mid[csv.col("g2_raw")]);
}

TEST_CASE("a coarse tau grid for the detector is a validation error") {
  TempDir dir("coarse");
  spit(dir / "c.json", R"({"detector": {"jitter_sigma": 0.05}, "grids": {"tau": [-4, 4, 21]}})");
  CHECK(invoke({"--config", dir / "c.json", "--out", dir.path.string(), "g2"}).code == 1);
  CHECK(fs::exists(dir / "c.json"));
  CHECK(!fs::exists(dir / "g2.csv"));
}

TEST_CASE("repeated runs are byte identical") {
  TempDir a("repeat_a"), b("repeat_b");
  for (const auto* dir : {&a, &b}) {
    REQUIRE(invoke({"--out", dir->path.string(), "--detuning-points", "41", "spectrum"}).code == 0);
    REQUIRE(invoke({"--out", dir->path.string(), "--flux-points", "5", "g2-power-sweep"}).code == 0);
    REQUIRE(invoke({"--out", dir->path.string(), "--seed", "7", "oracle", "--duration", "400", "--batches",
                    "8"})
                .code == 0);
  }
  for (const char* f : {"spectrum.csv", "g2_power_sweep.csv", "oracle.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(!slurp(a / f).empty());
  }
  TempDir c("repeat_c");
  REQUIRE(invoke({"--out", c.path.string(), "--seed", "8", "oracle", "--duration", "400", "--batches", "8"}).code ==
          0);
  CHECK(slurp(a / "oracle.csv") != slurp(c / "oracle.csv"));
}

TEST_CASE("power sweep decreases from bunching towards one") {
  TempDir dir("sweep");
  REQUIRE(invoke({"--out", dir.path.string(), "--flux-points", "7", "g2-power-sweep"}).code == 0);
  const auto csv = read_csv(dir / "g2_power_sweep.csv");
  REQUIRE(csv.rows.size() == 7);
  for (std::size_t i = 1; i < csv.rows.size(); ++i) CHECK(csv.rows[i][2] < csv.rows[i - 1][2]);
  CHECK(csv.rows.back()[2] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bound-state tables") {
  TempDir dir("bound");
  REQUIRE(invoke({"--out", dir.path.string(), "bound-state", "--beta-points", "11"}).code == 0);
  const auto vs_beta = read_csv(dir / "bound_state_vs_beta.csv");
  REQUIRE(vs_beta.rows.size() == 11);
  CHECK(vs_beta.rows.front()[1] == 0.0);
  for (std::size_t i = 2; i < vs_beta.rows.size(); ++i) CHECK(vs_beta.rows[i][1] >= vs_beta.rows[i - 1][1]);

  REQUIRE(invoke({"--out", dir.path.string(), "--detuning-points", "9", "bound-state", "--vs", "detuning"}).code ==
          0);
  const auto vs_det = read_csv(dir / "bound_state_vs_detuning.csv");
  REQUIRE(vs_det.rows.size() == 9);
  CHECK(vs_det.rows[4][0] == 0.0);
  CHECK(vs_det.rows[4][2] == doctest::Approx(0.748).epsilon(0.01));
}

TEST_CASE("fit writes json with metadata and recovers beta") {
  TempDir dir("fit");
  const wqed::SaturationParams truth;
  const auto flux = wqed::logspace(1e-2, 1e2, 20);
  const auto y = wqed::saturation_model(truth, 2.5, flux, *wqed::gauss_hermite(641));
  std::ostringstream data;
  data << "# power_nW, T\n";
  data.precision(17);
  for (std::size_t i = 0; i < flux.size(); ++i)
    data << wqed::units::flux_to_power(flux[i], 2.5, wqed::PowerConversion{}) << "," << y[i] << "\n";
  spit(dir / "sat.csv", data.str());
  spit(dir / "start.json", R"({"emitter": {"beta": 0.7, "gamma_deph": 1.5}})");

  const auto r = invoke({"--config", dir / "start.json", "--out", dir.path.string(), "fit", "--data",
                         dir / "sat.csv", "--fix", "sigma,alpha"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(dir / "fit.json"));
  CHECK(j["meta"]["version"].get<std::string>().size() > 0);
  CHECK(j["meta"]["config"]["emitter"]["beta"] == 0.7);
  CHECK(j["meta"]["fixed"] == json::array({"sigma", "alpha"}));
  double beta = 0.0;
  for (const auto& p : j["params"]) {
    if (p["name"] == "beta") beta = p["value"];
    if (p["name"] == "sigma") CHECK(p["free"] == false);
  }
  CHECK(beta == doctest::Approx(0.85).epsilon(0.01));
  CHECK(j["derived"].contains("n_c"));

  CHECK(invoke({"--out", dir.path.string(), "fit", "--data", dir / "absent.csv"}).code == 3);
  CHECK(invoke({"--out", dir.path.string(), "fit", "--data", dir / "sat.csv", "--fix", "gamma"}).code == 1);
  CHECK(invoke({"--out", dir.path.string(), "fit", "--data", dir / "sat.csv", "--kind", "g2"}).code == 1);
  spit(dir / "bad.csv", "1,2\n1,3\n");
  CHECK(invoke({"--out", dir.path.string(), "fit", "--data", dir / "bad.csv"}).code == 1);
}

TEST_CASE("oracle report agrees with the regression values") {
  TempDir dir("oracle");
  REQUIRE(invoke({"--out", dir.path.string(), "oracle", "--flux", "0.5", "--duration", "4000"}).code == 0);
  const auto csv = read_csv(dir / "oracle.csv");
  REQUIRE(!csv.rows.empty());
  for (const auto& c : csv.comments) {
    if (c.rfind("T_trajectory", 0) == 0 || c.rfind("g2_first_bin", 0) == 0) {
      const double z = std::stod(c.substr(c.rfind(' ') + 1));
      CHECK(std::abs(z) < 5.0);
    }
  }
}

TEST_CASE("executable reports exit codes to the shell") {
  TempDir dir("exe");
  auto status = [&](const std::string& args) {
    const std::string cmd = std::string("\"") + WQED_CLI_EXE + "\" " + args + " >/dev/null 2>&1";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("--version") == 0);
  CHECK(status("--config " + dir / "missing.json" + " --out " + dir.path.string() + " spectrum") == 3);
  CHECK(fs::is_empty(dir.path));
  CHECK(status("--out " + dir.path.string() + " --detuning-points 5 spectrum") == 0);
  CHECK(fs::exists(dir / "spectrum.csv"));
}
