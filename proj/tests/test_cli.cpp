#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("ldpot_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path writeConfig(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / (name + ".json");
  std::ofstream(p) << text;
  return p;
}

struct Result {
  int code = -1;
  std::string err;
};

Result run(const std::string& command, const fs::path& config, const fs::path& out,
           const std::string& extra = "") {
  const fs::path errFile = out.string() + ".stderr";
  const std::string cmd = std::string(LDPOT_CLI) + " " + command + " " + config.string() + " -o " +
                          out.string() + " " + extra + " 2> " + errFile.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(errFile);
  std::stringstream ss;
  ss << f.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json manifest(const fs::path& out) { return Json::parse(slurp(out / "manifest.json")); }

const char* kCircle = R"("set": {"kind": "circle", "center": [0, 0], "radius": 1, "resolution": 64})";

}  // namespace

TEST_CASE("fekete on the circle") {
  // 420 points contain the (k+1)-st roots of unity for every k <= 6.
  const auto cfg = writeConfig("fekete", R"({
    "set": {"kind": "circle", "center": [0, 0], "radius": 1, "resolution": 420},
    "weight": "0", "k_max": 6, "seed": 1})");
  const fs::path out = scratch() / "fekete";
  const Result r = run("fekete", cfg, out);
  CHECK(r.code == 0);
  const Json m = manifest(out);
  CHECK(m.at("pass").get<bool>());
  CHECK(m.at("command") == "fekete");
  CHECK(m.at("seed") == 1);
  CHECK(m.at("tasks") == 1);
  CHECK(m.at("config_hash").get<std::string>().size() == 16);
  std::istringstream csv(slurp(out / "fekete.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "k,N_k,log_vdm_q,delta_qk,normalized,iterations,sweeps,converged,lebesgue");
  int rows = 0;
  while (std::getline(csv, line)) {
    // delta^{0,k} = (k+1)^(1/k) at the roots of unity.
    std::istringstream fields(line);
    std::string k, n, logv, delta;
    std::getline(fields, k, ',');
    std::getline(fields, n, ',');
    std::getline(fields, logv, ',');
    std::getline(fields, delta, ',');
    const int kk = std::stoi(k);
    CHECK(std::stod(delta) == doctest::Approx(std::pow(kk + 1.0, 1.0 / kk)).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == 6);
}

TEST_CASE("equilibrium with the quadratic field") {
  const auto cfg = writeConfig("gue", R"({
    "set": {"kind": "interval_union", "intervals": [[-2, 2]], "resolution": 100},
    "weight": "x^2", "reference": {"kind": "semicircle", "radius": 1}})");
  const fs::path out = scratch() / "gue";
  CHECK(run("equilibrium", cfg, out).code == 0);
  const Json s = Json::parse(slurp(out / "equilibrium.json"));
  CHECK(s.at("cdf_sup_distance").get<double>() < 0.01);
  CHECK(fs::exists(out / "equilibrium.csv"));
}

TEST_CASE("failing check exits 1") {
  const auto cfg = writeConfig("wrongref", R"({
    "set": {"kind": "interval_union", "intervals": [[-2, 2]], "resolution": 100},
    "weight": "x^2", "reference": {"kind": "semicircle", "radius": 2}})");
  const fs::path out = scratch() / "wrongref";
  const Result r = run("equilibrium", cfg, out);
  CHECK(r.code == 1);
  CHECK(r.err.find("reference_cdf") != std::string::npos);
  CHECK_FALSE(manifest(out).at("pass").get<bool>());
}

TEST_CASE("configuration errors exit 2 and still write the manifest") {
  SUBCASE("missing seed for sample") {
    const auto cfg = writeConfig("noseed", std::string("{") + kCircle + R"(, "k": 2, "samples": 10})");
    const fs::path out = scratch() / "noseed";
    const Result r = run("sample", cfg, out);
    CHECK(r.code == 2);
    CHECK(r.err.find("seed") != std::string::npos);
    const Json m = manifest(out);
    CHECK_FALSE(m.at("pass").get<bool>());
    CHECK(m.contains("error"));
  }
  SUBCASE("unknown key") {
    const auto cfg = writeConfig("unknown", std::string("{") + kCircle + R"(, "k_max": 3, "colour": 1})");
    const fs::path out = scratch() / "unknown";
    CHECK(run("fekete", cfg, out).code == 2);
    CHECK(fs::exists(out / "manifest.json"));
  }
  SUBCASE("bad weight") {
    const auto cfg = writeConfig("badweight", std::string("{") + kCircle + R"(, "weight": "log(", "k_max": 3})");
    const fs::path out = scratch() / "badweight";
    const Result r = run("fekete", cfg, out);
    CHECK(r.code == 2);
    CHECK(r.err.find("offset 4") != std::string::npos);
  }
  SUBCASE("invalid json") {
    const auto cfg = writeConfig("invalid", "{\"set\": ");
    const fs::path out = scratch() / "invalid";
    CHECK(run("zk", cfg, out).code == 2);
    CHECK(fs::exists(out / "manifest.json"));
  }
  SUBCASE("unreadable config") {
    const fs::path out = scratch() / "missing";
    CHECK(run("zk", scratch() / "does_not_exist.json", out).code == 2);
    CHECK(fs::exists(out / "manifest.json"));
  }
  SUBCASE("unknown command") {
    const auto cfg = writeConfig("any", "{}");
    CHECK(run("frobnicate", cfg, scratch() / "frob").code == 2);
  }
}

TEST_CASE("reruns are byte-identical") {
  const auto cfg = writeConfig("sample", std::string("{") + kCircle +
                                             R"(, "k": 4, "samples": 200, "seed": 5, "eta": 0.1, "delta_bar": 1})");
  const fs::path a = scratch() / "sample_a";
  const fs::path b = scratch() / "sample_b";
  const fs::path c = scratch() / "sample_c";
  REQUIRE(run("sample", cfg, a, "--tasks 2").code == 0);
  REQUIRE(run("sample", cfg, b, "--tasks 2").code == 0);
  REQUIRE(run("sample", cfg, c, "--tasks 1").code == 0);
  for (const char* f : {"samples.jsonl", "samples.csv", "intensity.csv", "sample.json", "manifest.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(manifest(c).at("tasks") == 1);
  CHECK(manifest(a).at("tasks") == 2);
  const Json m = manifest(a);
  CHECK(m.at("artifact_files").size() == 4);
}

TEST_CASE("partition function table") {
  const auto cfg = writeConfig("zk", std::string("{") + kCircle + R"(, "k_range": [1, 6]})");
  const fs::path out = scratch() / "zk";
  CHECK(run("zk", cfg, out).code == 0);
  const Json lim = Json::parse(slurp(out / "zk.json"));
  CHECK(lim.contains("limit_log_model"));
  CHECK(lim.contains("limit_richardson"));
}
