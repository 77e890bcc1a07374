#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("demonscatter_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" DEMONSCATTER_CLI "' " + args + " 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) {
  std::ifstream in(workdir() / name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& name, const std::string& text) { std::ofstream(workdir() / name) << text; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::string kConfigs = DEMONSCATTER_CONFIG_DIR;

std::string free_model_json() {
  json v = json::array();
  for (int i = 0; i < 201; ++i) v.push_back(json::array({json::array({0.0, 0.0})}));
  return json{{"grid", {{"xmin", -1.5}, {"xmax", 1.5}, {"n", 201}}}, {"thresholds", {0.0}}, {"V", v}}.dump();
}

}  // namespace

TEST_CASE("scatter on a free particle") {
  write("free.json", free_model_json());
  REQUIRE(run("scatter --model free.json -v 2 -o s.json --report r.csv") == 0);
  const auto rows = csv_rows(slurp("r.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(std::stod(rows[0][5])) < 1e-10);
  const json s = json::parse(slurp("s.json"));
  CHECK(s.at("S").at("n_open") == 1);
}

TEST_CASE("scatter with the bundled half-demon config") {
  REQUIRE(run("scatter --config '" + kConfigs + "/fig1_halfdemon.json'") == 0);
  const auto rows = csv_rows(slurp("fig1_halfdemon_report.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(std::stod(rows[0][5]) - 0.5) <= 0.02);
  const json s = json::parse(slurp("fig1_halfdemon_smatrix.json"));
  CHECK(s.at("S").at("n_open") == 2);
  CHECK(s.at("diagnostics").at("unitarity_defect").get<double>() < 1e-8);
}

TEST_CASE("missing model file is a config error") {
  CHECK(run("scatter --model does_not_exist.json") == 2);
  CHECK(slurp("stderr.txt").find("does_not_exist.json") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected") {
  write("bad.json", R"({"resolution": 11, "colour": "blue"})");
  CHECK(run("regions --config bad.json") == 2);
  write("bad2.json", R"({"optical": {"b": 1, "bb": 2}})");
  CHECK(run("kernel --config bad2.json") == 2);
  CHECK(run("regions --no-such-flag") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("flags override the config file") {
  write("r.json", R"({"resolution": 11, "output": "a.csv"})");
  REQUIRE(run("regions --config r.json --resolution 3 -o b.csv") == 0);
  CHECK(csv_rows(slurp("b.csv")).size() == 6);
}

TEST_CASE("kernel export peaks near (x0, x0)") {
  REQUIRE(run("kernel --config '" + kConfigs + "/fig1_kernel.json' -o k.csv") == 0);
  const auto rows = csv_rows(slurp("k.csv"));
  REQUIRE(rows.size() == 301 * 301);
  double best = -1, bx = 0, by = 0;
  for (const auto& r : rows) {
    const double a = std::stod(r[2]);
    if (a > best) best = a, bx = std::stod(r[0]), by = std::stod(r[1]);
  }
  CHECK(std::abs(bx - 0.16455) < 0.05);
  CHECK(std::abs(by - 0.16455) < 0.05);
}

TEST_CASE("zero coupling exports a zero kernel") {
  REQUIRE(run("kernel --b 0 --c 0 -n 21 -o z.csv") == 0);
  for (const auto& r : csv_rows(slurp("z.csv"))) CHECK(r[2] == "0");
}

TEST_CASE("q = 0 is a compute error") {
  CHECK(run("kernel --delta -32 -v 8 -n 21 -o q.csv") == 3);
  CHECK(slurp("stderr.txt").find("q-zero") != std::string::npos);
}

TEST_CASE("regions export") {
  REQUIRE(run("regions --config '" + kConfigs + "/fig2_regions.json'") == 0);
  const auto rows = csv_rows(slurp("fig2_regions.csv"));
  CHECK(rows.size() == 101 * 102 / 2);
  bool green = false, red = false;
  for (const auto& r : rows) {
    const double t2 = std::stod(r[0]), rt2 = std::stod(r[1]);
    CHECK(rt2 <= 1 - t2 + 1e-12);
    if (t2 == 1 && rt2 == 0) green = r[2] == "1" && r[3] == "1";
    if (t2 == 0 && rt2 == 1) red = r[2] == "0" && r[3] == "0";
  }
  CHECK(green);
  CHECK(red);
  CHECK(run("regions --resolution 1") == 2);
}

TEST_CASE("classify the reference kernel") {
  REQUIRE(run("classify -o c.json") == 0);
  const json c = json::parse(slurp("c.json"));
  CHECK(c.at("summary") == "Trivial only");
  CHECK(c.at("trivial_only") == true);
}

TEST_CASE("sweep a free particle") {
  write("free.json", free_model_json());
  REQUIRE(run("sweep --model free.json --velocities 1 2 3 4 5 6 7 8 9 10 -o sw.csv") == 0);
  const auto rows = csv_rows(slurp("sw.csv"));
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][0]) == static_cast<double>(i + 1));
    CHECK(std::abs(std::stod(rows[i][5])) < 1e-10);
  }
}

TEST_CASE("nonlocal scatter agrees with the coupled solver") {
  REQUIRE(run("scatter-nonlocal -o nl.json --report nl.csv") == 0);
  REQUIRE(run("scatter -o cc.json --report cc.csv") == 0);
  const auto a = csv_rows(slurp("nl.csv")), b = csv_rows(slurp("cc.csv"));
  for (int col = 1; col <= 5; ++col) CHECK(std::abs(std::stod(a[0][col]) - std::stod(b[0][col])) < 1e-3);
}

TEST_CASE("kernel files feed the nonlocal commands") {
  REQUIRE(run("kernel --format cartesian -n 401 -o kc.csv") == 0);
  REQUIRE(run("scatter-nonlocal --kernel kc.csv -o a.json --report a.csv") == 0);
  REQUIRE(run("kernel --format json -n 401 -o kc.json") == 0);
  REQUIRE(run("classify --kernel kc.json -o c2.json") == 0);
  CHECK(json::parse(slurp("c2.json")).at("trivial_only") == true);
}

TEST_CASE("outputs are byte-identical across runs") {
  REQUIRE(run("refine-paper --budget 40 -o p1.json --log l1.csv") == 0);
  REQUIRE(run("refine-paper --budget 40 -o p2.json --log l2.csv") == 0);
  CHECK(slurp("p1.json") == slurp("p2.json"));
  CHECK(slurp("l1.csv") == slurp("l2.csv"));
  REQUIRE(run("kernel -n 31 -o k1.csv") == 0);
  REQUIRE(run("kernel -n 31 -o k2.csv") == 0);
  CHECK(slurp("k1.csv") == slurp("k2.csv"));
}

TEST_CASE("optimize the half-demon with seed 1 and budget 5000") {
  REQUIRE(run("optimize --target half-demon --seed 1 --budget 5000 -o opt.json --log opt.csv") == 0);
  const json r = json::parse(slurp("opt.json"));
  CHECK(r.at("converged") == true);
  CHECK(r.at("evaluations").get<int>() <= 5000);
  CHECK(csv_rows(slurp("opt.csv")).size() == r.at("evaluations").get<std::size_t>());
  CHECK(run("optimize --target nonsense") == 2);
  CHECK(run("optimize --budget 10") == 2);
}
