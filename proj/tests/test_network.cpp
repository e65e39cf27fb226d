#include <doctest.h>

#include <fstream>

#include "dnr/network.hpp"
#include "dnr/topology.hpp"
#include "support.hpp"

using namespace dnr;
using dnr::test::case33;
using dnr::test::case69;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dnr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void copy_case(const std::filesystem::path& from, const std::filesystem::path& to) {
  for (const char* f : {"branches.csv", "loads.csv", "system.json"}) std::filesystem::copy_file(from / f, to / f);
}

bool has_kind(const std::vector<Diagnostic>& d, Diagnostic::Kind kind) {
  for (const auto& x : d)
    if (x.kind == kind) return true;
  return false;
}

}  // namespace

TEST_CASE("33-node case ingests with its published dimensions") {
  const auto& c = case33();
  CHECK(c.num_nodes() == 33);
  CHECK(c.num_branches() == 37);
  CHECK(c.tie_branches() == std::vector<BranchId>{33, 34, 35, 36, 37});
  CHECK(c.base_kv == doctest::Approx(12.66));
  CHECK(c.base_mva == doctest::Approx(100.0));
  CHECK(c.node(c.substation).label == 1);
  CHECK(validate_case(c).empty());
}

TEST_CASE("69-node case ingests with its published dimensions") {
  const auto& c = case69();
  CHECK(c.num_nodes() == 69);
  CHECK(c.num_branches() == 73);
  CHECK(c.tie_branches().size() == 5);
  CHECK(c.num_branches() - c.tree_size() == 5);
  CHECK(validate_case(c).empty());
}

TEST_CASE("non-tie branches of the benchmark cases form a spanning tree") {
  CHECK(is_spanning_tree(case33(), case33().non_tie_branches()));
  CHECK(is_spanning_tree(case69(), case69().non_tie_branches()));
}

TEST_CASE("per-unit impedances round-trip to ohms") {
  for (const auto* c : {&case33(), &case69()}) {
    const double zbase = c->base_kv * c->base_kv / c->base_mva;
    for (const auto& b : c->branches) {
      CHECK(std::abs(b.r_pu * zbase - b.r_ohm) <= 1e-12 * b.r_ohm);
      CHECK(std::abs(b.x_pu * zbase - b.x_ohm) <= 1e-12 * b.x_ohm);
    }
  }
}

TEST_CASE("load, save, load yields an identical case") {
  const auto dir = scratch("roundtrip");
  save_case(case69(), dir);
  CHECK(load_case(dir) == case69());
  save_case(case33(), dir);
  CHECK(load_case(dir) == case33());
}

TEST_CASE("arbitrary labels are remapped to contiguous ids") {
  SystemRecord sys{"sparse", 1.0, 1.0, {100}};
  std::vector<BranchRecord> branches{{70, 100, 205, 1.0, 1.0, false, 2},
                                     {9, 205, 330, 1.0, 1.0, false, 3},
                                     {40, 330, 100, 1.0, 1.0, true, 4}};
  std::vector<LoadRecord> loads{{330, 50.0, 10.0, 2}};
  const auto c = build_case(sys, branches, loads);
  CHECK(c.num_nodes() == 3);
  CHECK(c.node(1).label == 100);
  CHECK(c.node(3).label == 330);
  CHECK(c.node(3).p_kw == 50.0);
  CHECK(c.branch(1).label == 9);
  CHECK(c.branch(3).label == 70);
  CHECK(c.branch_by_label(40) == 2);
  CHECK(c.branch(2).is_tie);
  CHECK_THROWS_AS(c.branch_by_label(41), ValidationError);
}

TEST_CASE("self-loop rows are rejected with the row number") {
  SystemRecord sys{"bad", 1.0, 1.0, {1}};
  std::vector<BranchRecord> branches{{1, 1, 2, 1.0, 1.0, false, 2}, {2, 2, 2, 1.0, 1.0, false, 3}};
  try {
    build_case(sys, branches, {});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("ingestion errors name the offending entity") {
  SystemRecord sys{"bad", 1.0, 1.0, {1}};
  SUBCASE("duplicate branch id") {
    std::vector<BranchRecord> b{{1, 1, 2, 1, 1, false, 2}, {1, 2, 3, 1, 1, false, 3}};
    CHECK_THROWS_WITH_AS(build_case(sys, b, {}), doctest::Contains("duplicate branch id 1"), ValidationError);
  }
  SUBCASE("no substation") {
    SystemRecord none{"bad", 1.0, 1.0, {}};
    std::vector<BranchRecord> b{{1, 1, 2, 1, 1, false, 2}};
    CHECK_THROWS_WITH_AS(build_case(none, b, {}), doctest::Contains("exactly one substation"), ValidationError);
  }
  SUBCASE("two substations") {
    SystemRecord two{"bad", 1.0, 1.0, {1, 2}};
    std::vector<BranchRecord> b{{1, 1, 2, 1, 1, false, 2}};
    CHECK_THROWS_WITH_AS(build_case(two, b, {}), doctest::Contains("found 2"), ValidationError);
  }
  SUBCASE("disconnected graph") {
    std::vector<BranchRecord> b{{1, 1, 2, 1, 1, false, 2}, {2, 3, 4, 1, 1, false, 3}};
    CHECK_THROWS_WITH_AS(build_case(sys, b, {}), doctest::Contains("disconnected"), ValidationError);
  }
  SUBCASE("zero impedance") {
    std::vector<BranchRecord> b{{1, 1, 2, 0, 0, false, 2}};
    CHECK_THROWS_WITH_AS(build_case(sys, b, {}), doctest::Contains("invalid impedance"), ValidationError);
  }
}

TEST_CASE("validate_case reports one diagnostic per violation") {
  SUBCASE("valid case is clean") { CHECK(validate_case(case33()).empty()); }

  SUBCASE("removing branch 18 with ties 33 and 35 strands nodes 19-22") {
    NetworkCase c = case33();
    std::vector<Branch> kept;
    for (const auto& b : c.branches) {
      if (b.id == 18 || b.id == 33 || b.id == 35) continue;
      kept.push_back(b);
    }
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = static_cast<BranchId>(i) + 1;
    c.branches = kept;
    const auto d = validate_case(c);
    REQUIRE(d.size() == 1);
    CHECK(d.front().kind == Diagnostic::Kind::disconnected);
  }

  SUBCASE("two substation flags") {
    NetworkCase c = case33();
    c.nodes[5].is_substation = true;
    c.nodes[5].p_kw = 0;
    c.nodes[5].q_kvar = 0;
    const auto d = validate_case(c);
    CHECK(has_kind(d, Diagnostic::Kind::substation_count));
  }

  SUBCASE("negative load and loaded substation") {
    NetworkCase c = case33();
    c.nodes[3].p_kw = -1.0;
    c.nodes[0].p_kw = 5.0;
    const auto d = validate_case(c);
    CHECK(d.size() == 2);
    CHECK(has_kind(d, Diagnostic::Kind::negative_load));
    CHECK(has_kind(d, Diagnostic::Kind::substation_load));
  }

  SUBCASE("stale per-unit values") {
    NetworkCase c = case33();
    c.branches[2].r_pu *= 1.01;
    CHECK(has_kind(validate_case(c), Diagnostic::Kind::per_unit_mismatch));
  }
}

TEST_CASE("file-level parse errors") {
  const auto dir = scratch("parse");
  copy_case(test::data_dir() / "4ring", dir);

  SUBCASE("missing loads file") {
    std::filesystem::remove(dir / "loads.csv");
    CHECK_THROWS_WITH_AS(load_case(dir), doctest::Contains("loads.csv"), ParseError);
  }
  SUBCASE("malformed number names file and line") {
    std::ofstream(dir / "branches.csv") << "id,from,to,r_ohm,x_ohm,is_tie\n1,1,2,abc,0.5,0\n";
    CHECK_THROWS_WITH_AS(load_case(dir), doctest::Contains("branches.csv:2"), ParseError);
  }
  SUBCASE("wrong header") {
    std::ofstream(dir / "loads.csv") << "bus,p,q\n2,1,1\n";
    CHECK_THROWS_AS(load_case(dir), ParseError);
  }
  SUBCASE("bad tie flag") {
    std::ofstream(dir / "branches.csv") << "id,from,to,r_ohm,x_ohm,is_tie\n1,1,2,1,0.5,2\n";
    CHECK_THROWS_AS(load_case(dir), ParseError);
  }
  SUBCASE("self-loop row through the file path") {
    std::ofstream(dir / "branches.csv") << "id,from,to,r_ohm,x_ohm,is_tie\n1,1,2,1,0.5,0\n2,2,3,1,0.5,0\n"
                                           "3,3,4,1,0.5,0\n4,4,4,1,0.5,1\n";
    CHECK_THROWS_WITH_AS(load_case(dir), doctest::Contains("row 5"), ValidationError);
  }
}
