#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dnr/cli.hpp"
#include "dnr/report.hpp"
#include "support.hpp"

using namespace dnr;
using namespace dnr::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dnr_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(slurp(path));
  j.erase("wall_seconds");
  return j;
}

Options case_options(const std::string& name) {
  Options o;
  o.case_dir = test::data_dir() / name;
  return o;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

template <class Command>
Outcome invoke(Command command, const Options& options) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = command(options, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("golden outputs on the 4-node ring") {
  const auto dir = scratch("golden");
  const std::filesystem::path golden = DNR_GOLDEN_DIR;

  SUBCASE("baseline") {
    auto o = case_options("4ring");
    o.out = dir / "baseline.json";
    o.profile = dir / "baseline.csv";
    REQUIRE(invoke(cmd_baseline, o).code == ok);
    CHECK(read_json(*o.out) == read_json(golden / "4ring_baseline.json"));
    CHECK(slurp(*o.profile) == slurp(golden / "4ring_baseline.csv"));
  }
  SUBCASE("oracle") {
    auto o = case_options("4ring");
    o.out = dir / "oracle.json";
    o.profile = dir / "oracle.csv";
    REQUIRE(invoke(cmd_oracle, o).code == ok);
    CHECK(read_json(*o.out) == read_json(golden / "4ring_oracle.json"));
    CHECK(slurp(*o.profile) == slurp(golden / "4ring_oracle.csv"));
  }
  SUBCASE("solve") {
    auto o = case_options("4ring");
    o.out = dir / "solve.json";
    o.history = dir / "history.csv";
    o.max_generations = 3;
    REQUIRE(invoke(cmd_solve, o).code == ok);
    CHECK(read_json(*o.out) == read_json(golden / "4ring_solve.json"));
    CHECK(slurp(*o.history) == slurp(golden / "4ring_history.csv"));
  }
}

TEST_CASE("report schema") {
  const auto dir = scratch("schema");
  auto o = case_options("33bus");
  o.out = dir / "r.json";
  REQUIRE(invoke(cmd_baseline, o).code == ok);
  const auto j = nlohmann::json::parse(slurp(*o.out));
  for (const char* key : {"case", "mode", "open_branches", "closed_branches", "loss_kw", "voltage", "iterations",
                          "seed", "wall_seconds"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["mode"] == "baseline");
  CHECK(j["open_branches"] == nlohmann::json({33, 34, 35, 36, 37}));
  CHECK(j["closed_branches"].size() == 32);
  CHECK(j["voltage"]["min_node"] == 18);
  CHECK(j["seed"].is_null());
}

TEST_CASE("baseline prints the loss") {
  const auto r = invoke(cmd_baseline, case_options("33bus"));
  CHECK(r.code == ok);
  CHECK(r.out.find("open branches   33,34,35,36,37") != std::string::npos);
  CHECK(r.out.find("loss ") != std::string::npos);
}

TEST_CASE("pf reproduces a competing method's configuration") {
  const auto dir = scratch("pf");
  auto o = case_options("33bus");
  o.open = {7, 10, 14, 28, 32};
  o.out = dir / "pf.json";
  REQUIRE(invoke(cmd_pf, o).code == ok);
  const double loss = nlohmann::json::parse(slurp(*o.out))["loss_kw"];
  CHECK(loss == doctest::Approx(140.5).epsilon(0.02));
}

TEST_CASE("pf reproduces solve and oracle losses") {
  const auto dir = scratch("roundtrip");
  for (auto command : {cmd_solve, cmd_oracle}) {
    auto o = case_options("33bus");
    o.out = dir / "first.json";
    REQUIRE(invoke(command, o).code == ok);
    const auto first = nlohmann::json::parse(slurp(*o.out));

    auto again = case_options("33bus");
    again.open = first["open_branches"].get<std::vector<long>>();
    again.out = dir / "again.json";
    REQUIRE(invoke(cmd_pf, again).code == ok);
    const auto second = nlohmann::json::parse(slurp(*again.out));
    const double a = first["loss_kw"];
    const double b = second["loss_kw"];
    CHECK(std::abs(a - b) <= 1e-9 * a);
    std::vector<BranchId> open;
    for (long label : again.open) open.push_back(test::case33().branch_by_label(label));
    CHECK(is_spanning_tree(test::case33(), Configuration::from_open(test::case33(), open).closed()));
  }
}

TEST_CASE("solve writes a two-column voltage profile") {
  const auto dir = scratch("profile");
  auto o = case_options("33bus");
  o.profile = dir / "v.csv";
  REQUIRE(invoke(cmd_solve, o).code == ok);
  std::ifstream in(*o.profile);
  const auto profile = read_voltage_csv(in);
  REQUIRE(profile.columns == std::vector<std::string>{"v_pu_before", "v_pu_after"});
  REQUIRE(profile.nodes.size() == 33);
  const auto& before = profile.values[0];
  const auto& after = profile.values[1];
  CHECK(*std::min_element(after.begin(), after.end()) > *std::min_element(before.begin(), before.end()));
}

TEST_CASE("multi-seed summary") {
  auto o = case_options("4ring");
  o.seeds = "1..3";
  const auto r = invoke(cmd_solve, o);
  REQUIRE(r.code == ok);
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) rows += !line.empty() && std::isdigit(static_cast<unsigned char>(line.back())) &&
                                            line.find("wall") == std::string::npos;
  CHECK(rows == 3);
}

TEST_CASE("exit codes") {
  SUBCASE("missing loads file is a data error naming the file") {
    const auto dir = scratch("missing");
    for (const char* f : {"branches.csv", "system.json"})
      std::filesystem::copy_file(test::data_dir() / "4ring" / f, dir / f);
    Options o;
    o.case_dir = dir;
    const auto r = invoke(cmd_baseline, o);
    CHECK(r.code == data_error);
    CHECK(r.err.find("loads.csv") != std::string::npos);
  }
  SUBCASE("non-radial open set is rejected with the reason") {
    auto o = case_options("33bus");
    o.open = {1, 2, 3, 4, 5};
    const auto r = invoke(cmd_pf, o);
    CHECK(r.code == data_error);
    CHECK(r.err.find("not radial") != std::string::npos);
    CHECK(r.err.find("islanded") != std::string::npos);
  }
  SUBCASE("wrong number of open branches") {
    auto o = case_options("33bus");
    o.open = {7, 9};
    CHECK(invoke(cmd_pf, o).code == data_error);
  }
  SUBCASE("unknown branch label") {
    auto o = case_options("33bus");
    o.open = {7, 9, 14, 32, 99};
    CHECK(invoke(cmd_pf, o).code == data_error);
  }
  SUBCASE("conflicting seed flags") {
    auto o = case_options("4ring");
    o.seed = 1;
    o.seeds = "1..2";
    CHECK(invoke(cmd_solve, o).code == usage_error);
  }
  SUBCASE("bad GA value") {
    auto o = case_options("4ring");
    o.crossover_rate = 2.0;
    CHECK(invoke(cmd_solve, o).code == usage_error);
  }
  SUBCASE("validate accepts the benchmark cases") {
    const auto r = invoke(cmd_validate, case_options("69bus"));
    CHECK(r.code == ok);
    CHECK(r.out.find("spanning trees: 407924") != std::string::npos);
  }
}

TEST_CASE("seed lists and config resolution") {
  CHECK(parse_seed_list("1..4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(parse_seed_list("5,9,2") == std::vector<std::uint64_t>{5, 9, 2});
  CHECK(parse_seed_list("7") == std::vector<std::uint64_t>{7});
  CHECK_THROWS_AS(parse_seed_list("4..1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed_list("a..b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed_list(""), std::invalid_argument);

  const auto dir = scratch("config");
  std::ofstream(dir / "ga.conf") << "population_size = 30\nmutation_rate = 0.4\n";
  Options o;
  o.config_file = dir / "ga.conf";
  o.mutation_rate = 0.1;
  o.seed = 9;
  const auto config = resolve_ga_config(o);
  CHECK(config.population_size == 30);
  CHECK(config.mutation_rate == 0.1);
  CHECK(config.seed == 9);
  CHECK(config.crossover_rate == 0.8);
}
