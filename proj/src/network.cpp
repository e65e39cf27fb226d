#include "dnr/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "dnr/disjoint_set.hpp"

namespace dnr {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

struct CsvReader {
  std::filesystem::path path;
  std::ifstream in;
  int row = 0;

  explicit CsvReader(const std::filesystem::path& p) : path(p), in(p) {
    if (!in) throw ParseError(fmt::format("{}: cannot open file", path.string()));
  }

  void expect_header(const std::vector<std::string>& expected) {
    std::string line;
    if (!next_line(line)) throw ParseError(fmt::format("{}: empty file", path.string()));
    if (split_csv(line) != expected) {
      throw ParseError(fmt::format("{}:{}: expected header '{}'", path.string(), row, join(expected, ",")));
    }
  }

  bool next_line(std::string& line) {
    while (std::getline(in, line)) {
      ++row;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!trim(line).empty()) return true;
    }
    return false;
  }

  std::vector<std::string> fields(const std::string& line, std::size_t count) const {
    auto f = split_csv(line);
    if (f.size() != count) {
      throw ParseError(fmt::format("{}:{}: expected {} fields, found {}", path.string(), row, count, f.size()));
    }
    return f;
  }

  long to_long(const std::string& s, const char* what) const {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw ParseError(fmt::format("{}:{}: {} '{}' is not an integer", path.string(), row, what, s));
    }
    return v;
  }

  double to_double(const std::string& s, const char* what) const {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw ParseError(fmt::format("{}:{}: {} '{}' is not a number", path.string(), row, what, s));
    }
    return v;
  }
};

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error("invalid network case: " + join(problems, "; ")), problems_(std::move(problems)) {}

std::vector<BranchId> NetworkCase::tie_branches() const {
  std::vector<BranchId> ids;
  for (const auto& b : branches)
    if (b.is_tie) ids.push_back(b.id);
  return ids;
}

std::vector<BranchId> NetworkCase::non_tie_branches() const {
  std::vector<BranchId> ids;
  for (const auto& b : branches)
    if (!b.is_tie) ids.push_back(b.id);
  return ids;
}

BranchId NetworkCase::branch_by_label(long label) const {
  for (const auto& b : branches)
    if (b.label == label) return b.id;
  throw ValidationError({fmt::format("unknown branch {}", label)});
}

NodeId NetworkCase::node_by_label(long label) const {
  for (const auto& n : nodes)
    if (n.label == label) return n.id;
  throw ValidationError({fmt::format("unknown node {}", label)});
}

std::vector<BranchRecord> read_branches(const std::filesystem::path& path) {
  CsvReader csv(path);
  csv.expect_header({"id", "from", "to", "r_ohm", "x_ohm", "is_tie"});
  std::vector<BranchRecord> rows;
  std::string line;
  while (csv.next_line(line)) {
    const auto f = csv.fields(line, 6);
    BranchRecord r;
    r.label = csv.to_long(f[0], "id");
    r.from = csv.to_long(f[1], "from");
    r.to = csv.to_long(f[2], "to");
    r.r_ohm = csv.to_double(f[3], "r_ohm");
    r.x_ohm = csv.to_double(f[4], "x_ohm");
    const auto tie = csv.to_long(f[5], "is_tie");
    if (tie != 0 && tie != 1) {
      throw ParseError(fmt::format("{}:{}: is_tie must be 0 or 1", path.string(), csv.row));
    }
    r.is_tie = tie == 1;
    r.row = csv.row;
    rows.push_back(r);
  }
  return rows;
}

std::vector<LoadRecord> read_loads(const std::filesystem::path& path) {
  CsvReader csv(path);
  csv.expect_header({"node", "p_kw", "q_kvar"});
  std::vector<LoadRecord> rows;
  std::string line;
  while (csv.next_line(line)) {
    const auto f = csv.fields(line, 3);
    LoadRecord r;
    r.node = csv.to_long(f[0], "node");
    r.p_kw = csv.to_double(f[1], "p_kw");
    r.q_kvar = csv.to_double(f[2], "q_kvar");
    r.row = csv.row;
    rows.push_back(r);
  }
  return rows;
}

SystemRecord read_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("{}: cannot open file", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  SystemRecord s;
  try {
    s.name = j.value("name", path.parent_path().filename().string());
    s.base_kv = j.at("base_kv").get<double>();
    s.base_mva = j.value("base_mva", 100.0);
    const auto& sub = j.at("substation");
    if (sub.is_array()) {
      s.substations = sub.get<std::vector<long>>();
    } else {
      s.substations.push_back(sub.get<long>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return s;
}

NetworkCase build_case(const SystemRecord& system, const std::vector<BranchRecord>& branches,
                       const std::vector<LoadRecord>& loads) {
  std::vector<std::string> problems;

  std::set<long> node_labels;
  std::map<long, int> branch_rows;
  for (const auto& b : branches) {
    if (auto [it, fresh] = branch_rows.emplace(b.label, b.row); !fresh) {
      problems.push_back(fmt::format("branch row {}: duplicate branch id {} (first on row {})", b.row, b.label, it->second));
    }
    if (b.from == b.to) {
      problems.push_back(fmt::format("branch row {}: branch {} connects node {} to itself", b.row, b.label, b.from));
    }
    if (b.r_ohm < 0 || b.x_ohm < 0 || b.r_ohm + b.x_ohm <= 0) {
      problems.push_back(fmt::format("branch row {}: branch {} has invalid impedance r={} x={}", b.row, b.label, b.r_ohm, b.x_ohm));
    }
    node_labels.insert(b.from);
    node_labels.insert(b.to);
  }

  std::map<long, const LoadRecord*> load_by_node;
  for (const auto& l : loads) {
    if (auto [it, fresh] = load_by_node.emplace(l.node, &l); !fresh) {
      problems.push_back(fmt::format("load row {}: duplicate load for node {} (first on row {})", l.row, l.node, it->second->row));
    }
    node_labels.insert(l.node);
  }

  if (system.substations.size() != 1) {
    problems.push_back(fmt::format("expected exactly one substation, found {}", system.substations.size()));
  }
  for (auto s : system.substations) {
    if (!node_labels.count(s)) problems.push_back(fmt::format("substation node {} does not appear in any branch", s));
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  NetworkCase net;
  net.name = system.name;
  net.base_kv = system.base_kv;
  net.base_mva = system.base_mva;

  std::map<long, NodeId> node_id;
  for (auto label : node_labels) {
    Node n;
    n.id = static_cast<NodeId>(net.nodes.size()) + 1;
    n.label = label;
    if (auto it = load_by_node.find(label); it != load_by_node.end()) {
      n.p_kw = it->second->p_kw;
      n.q_kvar = it->second->q_kvar;
    }
    n.is_substation = std::find(system.substations.begin(), system.substations.end(), label) != system.substations.end();
    if (n.is_substation) net.substation = n.id;
    node_id[label] = n.id;
    net.nodes.push_back(n);
  }

  std::vector<BranchRecord> sorted = branches;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  const double zbase = net.impedance_base_ohm();
  for (const auto& r : sorted) {
    Branch b;
    b.id = static_cast<BranchId>(net.branches.size()) + 1;
    b.label = r.label;
    b.from = node_id.at(r.from);
    b.to = node_id.at(r.to);
    b.r_ohm = r.r_ohm;
    b.x_ohm = r.x_ohm;
    b.r_pu = r.r_ohm / zbase;
    b.x_pu = r.x_ohm / zbase;
    b.is_tie = r.is_tie;
    net.branches.push_back(b);
  }

  if (auto diagnostics = validate_case(net); !diagnostics.empty()) {
    std::vector<std::string> messages;
    for (auto& d : diagnostics) messages.push_back(std::move(d.message));
    throw ValidationError(std::move(messages));
  }
  return net;
}

NetworkCase load_case(const std::filesystem::path& branch_file, const std::filesystem::path& load_file,
                      const std::filesystem::path& system_file) {
  // Read all three before building so a missing file is reported as such.
  auto system = read_system(system_file);
  auto branches = read_branches(branch_file);
  auto loads = read_loads(load_file);
  return build_case(system, branches, loads);
}

NetworkCase load_case(const std::filesystem::path& case_dir) {
  return load_case(case_dir / "branches.csv", case_dir / "loads.csv", case_dir / "system.json");
}

void save_case(const NetworkCase& network, const std::filesystem::path& case_dir) {
  std::filesystem::create_directories(case_dir);
  {
    std::ofstream out(case_dir / "branches.csv");
    out << "id,from,to,r_ohm,x_ohm,is_tie\n";
    for (const auto& b : network.branches) {
      out << fmt::format("{},{},{},{},{},{}\n", b.label, network.node(b.from).label, network.node(b.to).label,
                         b.r_ohm, b.x_ohm, b.is_tie ? 1 : 0);
    }
  }
  {
    std::ofstream out(case_dir / "loads.csv");
    out << "node,p_kw,q_kvar\n";
    for (const auto& n : network.nodes) {
      if (n.is_substation) continue;
      out << fmt::format("{},{},{}\n", n.label, n.p_kw, n.q_kvar);
    }
  }
  nlohmann::json j;
  j["name"] = network.name;
  j["base_kv"] = network.base_kv;
  j["base_mva"] = network.base_mva;
  j["substation"] = network.node(network.substation).label;
  std::ofstream(case_dir / "system.json") << j.dump(2) << "\n";
}

std::vector<Diagnostic> validate_case(const NetworkCase& net) {
  using Kind = Diagnostic::Kind;
  std::vector<Diagnostic> out;
  auto report = [&](Kind kind, std::string message) { out.push_back({kind, std::move(message)}); };

  if (!(net.base_kv > 0) || !(net.base_mva > 0)) {
    report(Kind::bad_base, fmt::format("base values must be positive (base_kv={}, base_mva={})", net.base_kv, net.base_mva));
  }

  const int n_nodes = net.num_nodes();
  for (int i = 0; i < n_nodes; ++i) {
    if (net.nodes[i].id != i + 1) {
      report(Kind::node_ids, fmt::format("node {} at position {}: ids must be unique and contiguous from 1", net.nodes[i].label, i + 1));
    }
  }
  for (int i = 0; i < net.num_branches(); ++i) {
    if (net.branches[i].id != i + 1) {
      report(Kind::branch_ids, fmt::format("branch {} at position {}: ids must be unique and contiguous from 1", net.branches[i].label, i + 1));
    }
  }

  int substations = 0;
  for (const auto& n : net.nodes) {
    if (n.p_kw < 0) report(Kind::negative_load, fmt::format("node {}: negative active load {} kW", n.label, n.p_kw));
    if (n.is_substation) {
      ++substations;
      if (n.p_kw != 0 || n.q_kvar != 0) report(Kind::substation_load, fmt::format("substation node {} carries a load", n.label));
    }
  }
  if (substations != 1) {
    report(Kind::substation_count, fmt::format("expected exactly one substation, found {}", substations));
  } else if (net.substation < 1 || net.substation > n_nodes || !net.nodes[net.substation - 1].is_substation) {
    report(Kind::substation_count, "substation id does not match the flagged substation node");
  }

  const double zbase = net.impedance_base_ohm();
  bool endpoints_ok = true;
  for (const auto& b : net.branches) {
    if (b.from < 1 || b.from > n_nodes || b.to < 1 || b.to > n_nodes) {
      report(Kind::unknown_endpoint, fmt::format("branch {}: endpoint outside 1..{}", b.label, n_nodes));
      endpoints_ok = false;
      continue;
    }
    if (b.from == b.to) report(Kind::self_loop, fmt::format("branch {}: connects node {} to itself", b.label, net.node(b.from).label));
    if (b.r_ohm < 0 || b.x_ohm < 0 || b.r_ohm + b.x_ohm <= 0) {
      report(Kind::bad_impedance, fmt::format("branch {}: invalid impedance r={} x={}", b.label, b.r_ohm, b.x_ohm));
    }
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    if (!close(b.r_pu * zbase, b.r_ohm) || !close(b.x_pu * zbase, b.x_ohm)) {
      report(Kind::per_unit_mismatch, fmt::format("branch {}: per-unit impedance inconsistent with ohmic values", b.label));
    }
  }

  if (endpoints_ok && n_nodes > 0) {
    DisjointSet dsu(n_nodes);
    for (const auto& b : net.branches) dsu.unite(b.from - 1, b.to - 1);
    if (dsu.components() != 1) {
      std::vector<std::string> stranded;
      const int root = dsu.find(std::max(net.substation, 1) - 1);
      for (const auto& n : net.nodes) {
        if (dsu.find(n.id - 1) != root) stranded.push_back(std::to_string(n.label));
      }
      report(Kind::disconnected, fmt::format("network is disconnected ({} components); unreachable nodes: {}",
                                              dsu.components(), join(stranded, ",")));
    }
  }
  return out;
}

}  // namespace dnr
