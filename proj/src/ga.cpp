#include "dnr/ga.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>

namespace dnr {

bool satisfies_invariants(const Chromosome& chromosome, const NetworkCase& network) {
  if (static_cast<int>(chromosome.genes.size()) != network.tree_size()) return false;
  auto genes = gene_set(chromosome);
  if (std::adjacent_find(genes.begin(), genes.end()) != genes.end()) return false;
  return genes.empty() || (genes.front() >= 1 && genes.back() <= network.num_branches());
}

std::vector<BranchId> gene_set(const Chromosome& chromosome) {
  auto genes = chromosome.genes;
  std::sort(genes.begin(), genes.end());
  return genes;
}

Configuration decode(const NetworkCase& network, const Chromosome& chromosome) {
  return Configuration::from_closed(network, chromosome.genes);
}

std::string to_string(PenaltyMode mode) { return mode == PenaltyMode::off ? "off" : "voltage"; }

PenaltyMode parse_penalty_mode(const std::string& text) {
  if (text == "off") return PenaltyMode::off;
  if (text == "voltage" || text == "voltage-penalty") return PenaltyMode::voltage;
  throw std::invalid_argument(fmt::format("unknown penalty mode '{}' (expected off or voltage)", text));
}

void GAConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("population_size must be at least 2");
  if (!(crossover_rate >= 0 && crossover_rate <= 1)) throw std::invalid_argument("crossover_rate must lie in [0, 1]");
  if (!(mutation_rate >= 0 && mutation_rate <= 1)) throw std::invalid_argument("mutation_rate must lie in [0, 1]");
  if (elite_count < 0 || elite_count >= population_size) {
    throw std::invalid_argument("elite_count must be non-negative and below population_size");
  }
  if (max_generations < 0) throw std::invalid_argument("max_generations must be non-negative");
  if (stagnation_limit < 1) throw std::invalid_argument("stagnation_limit must be at least 1");
  if (!(penalty_kw_per_pu >= 0)) throw std::invalid_argument("penalty_kw_per_pu must be non-negative");
  if (!(voltage_band.min_pu < voltage_band.max_pu)) throw std::invalid_argument("voltage band is empty");
}

namespace {

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) throw std::invalid_argument(fmt::format("bad value '{}' for {}", text, key));
  return value;
}

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

GAConfig parse_ga_config(std::istream& in, GAConfig config) {
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    line = strip(line.substr(0, line.find('#')));
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(fmt::format("config line {}: expected key = value", row));
    const auto key = strip(line.substr(0, eq));
    auto value = strip(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

    if (key == "population_size") config.population_size = parse_value<int>(key, value);
    else if (key == "crossover_rate") config.crossover_rate = parse_value<double>(key, value);
    else if (key == "mutation_rate") config.mutation_rate = parse_value<double>(key, value);
    else if (key == "elite_count") config.elite_count = parse_value<int>(key, value);
    else if (key == "max_generations") config.max_generations = parse_value<int>(key, value);
    else if (key == "stagnation_limit") config.stagnation_limit = parse_value<int>(key, value);
    else if (key == "seed") config.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "penalty_mode") config.penalty_mode = parse_penalty_mode(value);
    else if (key == "penalty_kw_per_pu") config.penalty_kw_per_pu = parse_value<double>(key, value);
    else if (key == "voltage_min_pu") config.voltage_band.min_pu = parse_value<double>(key, value);
    else if (key == "voltage_max_pu") config.voltage_band.max_pu = parse_value<double>(key, value);
    else throw std::invalid_argument(fmt::format("config line {}: unknown key '{}'", row, key));
  }
  return config;
}

std::string to_config_text(const GAConfig& c) {
  return fmt::format(
      "population_size = {}\ncrossover_rate = {}\nmutation_rate = {}\nelite_count = {}\n"
      "max_generations = {}\nstagnation_limit = {}\nseed = {}\npenalty_mode = {}\n"
      "penalty_kw_per_pu = {}\nvoltage_min_pu = {}\nvoltage_max_pu = {}\n",
      c.population_size, c.crossover_rate, c.mutation_rate, c.elite_count, c.max_generations, c.stagnation_limit,
      c.seed, to_string(c.penalty_mode), c.penalty_kw_per_pu, c.voltage_band.min_pu, c.voltage_band.max_pu);
}

double fitness(double p_loss_kw) {
  if (!(p_loss_kw >= 0)) throw std::invalid_argument(fmt::format("loss must be non-negative, got {}", p_loss_kw));
  return 1.0 / (1.0 + p_loss_kw);
}

std::optional<Evaluation> evaluate(const NetworkCase& network, const Chromosome& chromosome,
                                   const EvaluationOptions& options) {
  if (!is_spanning_tree(network, chromosome.genes)) return std::nullopt;
  const auto config = decode(network, chromosome);
  const auto pf = solve(network, config, options.sweep);
  if (!pf.converged) return std::nullopt;
  double objective = pf.p_loss_kw;
  if (options.penalty_mode == PenaltyMode::voltage) {
    objective += options.penalty_kw_per_pu * voltage_violation_pu(pf, options.voltage_band);
  }
  return Evaluation{fitness(objective), pf.p_loss_kw};
}

Evaluator::Evaluator(const NetworkCase& network, EvaluationOptions options)
    : network_(&network), options_(std::move(options)) {}

std::optional<Evaluation> Evaluator::operator()(const Chromosome& chromosome) {
  auto key = gene_set(chromosome);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  ++validity_checks_;
  std::optional<Evaluation> outcome;
  if (is_spanning_tree(*network_, chromosome.genes)) {
    ++validity_passes_;
    ++power_flow_solves_;
    const auto pf = solve(*network_, decode(*network_, chromosome), options_.sweep);
    if (pf.converged) {
      double objective = pf.p_loss_kw;
      if (options_.penalty_mode == PenaltyMode::voltage) {
        objective += options_.penalty_kw_per_pu * voltage_violation_pu(pf, options_.voltage_band);
      }
      outcome = Evaluation{fitness(objective), pf.p_loss_kw};
    }
  }
  cache_.emplace(std::move(key), outcome);
  return outcome;
}

void repair_duplicates(std::vector<BranchId>& genes, int alphabet_size, Rng& rng) {
  std::vector<char> used(static_cast<std::size_t>(alphabet_size) + 1, 0);
  std::vector<std::size_t> repeats;
  for (std::size_t i = 0; i < genes.size(); ++i) {
    if (used[genes[i]]) repeats.push_back(i);
    used[genes[i]] = 1;
  }
  if (repeats.empty()) return;
  std::vector<BranchId> unused;
  for (BranchId id = 1; id <= alphabet_size; ++id)
    if (!used[id]) unused.push_back(id);
  for (auto position : repeats) {
    std::uniform_int_distribution<std::size_t> pick(0, unused.size() - 1);
    const auto k = pick(rng);
    genes[position] = unused[k];
    unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(k));
  }
}

namespace {

// Child keeps `outer` outside [lo, hi) and takes `inner`'s genes inside. An
// outside gene that collides with the exchanged section is replaced by
// following the section's position-wise mapping inner[p] -> outer[p].
std::vector<BranchId> pmx_child(const std::vector<BranchId>& outer, const std::vector<BranchId>& inner,
                                std::size_t lo, std::size_t hi, int alphabet_size) {
  std::vector<int> section_pos(static_cast<std::size_t>(alphabet_size) + 1, -1);
  for (std::size_t p = lo; p < hi; ++p) section_pos[inner[p]] = static_cast<int>(p);

  std::vector<BranchId> child = outer;
  for (std::size_t p = lo; p < hi; ++p) child[p] = inner[p];
  for (std::size_t p = 0; p < child.size(); ++p) {
    if (p >= lo && p < hi) continue;
    BranchId gene = outer[p];
    // Terminates: the mapping is injective and `gene` starts outside outer's section.
    for (std::size_t steps = 0; section_pos[gene] >= 0 && steps <= child.size(); ++steps) {
      gene = outer[static_cast<std::size_t>(section_pos[gene])];
    }
    child[p] = gene;
  }
  return child;
}

}  // namespace

std::pair<Chromosome, Chromosome> pmx_crossover(const Chromosome& a, const Chromosome& b, int alphabet_size,
                                                std::size_t lo, std::size_t hi, Rng& rng) {
  if (a.genes.size() != b.genes.size()) throw std::invalid_argument("parents differ in length");
  if (lo > hi || hi > a.genes.size()) throw std::invalid_argument("invalid crossover section");
  Chromosome first{pmx_child(a.genes, b.genes, lo, hi, alphabet_size)};
  Chromosome second{pmx_child(b.genes, a.genes, lo, hi, alphabet_size)};
  repair_duplicates(first.genes, alphabet_size, rng);
  repair_duplicates(second.genes, alphabet_size, rng);
  return {std::move(first), std::move(second)};
}

std::pair<Chromosome, Chromosome> pmx_crossover(const Chromosome& a, const Chromosome& b, int alphabet_size,
                                                Rng& rng) {
  std::uniform_int_distribution<std::size_t> cut(0, a.genes.size());
  auto lo = cut(rng);
  auto hi = cut(rng);
  if (lo > hi) std::swap(lo, hi);
  return pmx_crossover(a, b, alphabet_size, lo, hi, rng);
}

Chromosome mutate(const Chromosome& chromosome, const NetworkCase& network, Rng& rng) {
  std::vector<char> used(static_cast<std::size_t>(network.num_branches()) + 1, 0);
  for (auto g : chromosome.genes) used[g] = 1;
  std::vector<BranchId> outside;
  for (BranchId id = 1; id <= network.num_branches(); ++id)
    if (!used[id]) outside.push_back(id);
  if (outside.empty() || chromosome.genes.empty()) return chromosome;

  Chromosome mutated = chromosome;
  std::uniform_int_distribution<std::size_t> position(0, mutated.genes.size() - 1);
  std::uniform_int_distribution<std::size_t> replacement(0, outside.size() - 1);
  const auto p = position(rng);
  mutated.genes[p] = outside[replacement(rng)];
  return mutated;
}

namespace {

Chromosome random_chromosome(const NetworkCase& network, Rng& rng) {
  return Chromosome{random_spanning_tree_branches(network, rng)};
}

// Valid individuals ahead of invalid ones, higher fitness first; stable so
// ties keep population order.
std::vector<std::size_t> ranking(const std::vector<Individual>& population) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& ex = population[x].evaluation;
    const auto& ey = population[y].evaluation;
    if (ex.has_value() != ey.has_value()) return ex.has_value();
    return ex && ex->fitness > ey->fitness;
  });
  return order;
}

GenerationStats summarize(const std::vector<Individual>& population) {
  GenerationStats stats;
  double total = 0.0;
  int valid = 0;
  for (const auto& ind : population) {
    if (!ind.evaluation) continue;
    ++valid;
    total += ind.evaluation->fitness;
    stats.best_fitness = std::max(stats.best_fitness, ind.evaluation->fitness);
  }
  stats.mean_fitness = valid ? total / valid : 0.0;
  stats.valid_fraction = population.empty() ? 0.0 : static_cast<double>(valid) / static_cast<double>(population.size());
  return stats;
}

}  // namespace

std::vector<Individual> elitist_select(const NetworkCase& network, const std::vector<Individual>& population,
                                       const GAConfig& config, Rng& rng) {
  const auto size = static_cast<std::size_t>(config.population_size);
  std::vector<Individual> next;
  next.reserve(size);

  const auto order = ranking(population);
  std::vector<std::size_t> valid;
  for (auto i : order)
    if (population[i].evaluation) valid.push_back(i);

  if (valid.empty()) {
    while (next.size() < size) next.push_back({random_chromosome(network, rng), std::nullopt});
    return next;
  }

  for (std::size_t k = 0; k < valid.size() && next.size() < static_cast<std::size_t>(config.elite_count); ++k) {
    next.push_back(population[valid[k]]);
  }

  std::vector<double> weights;
  weights.reserve(valid.size());
  for (auto i : valid) weights.push_back(population[i].evaluation->fitness);
  std::discrete_distribution<std::size_t> roulette(weights.begin(), weights.end());
  while (next.size() < size) next.push_back(population[valid[roulette(rng)]]);
  return next;
}

GAResult run(const NetworkCase& network, const GAConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Evaluator evaluator(network, EvaluationOptions{config.penalty_mode, config.penalty_kw_per_pu, config.voltage_band, {}});
  const auto size = static_cast<std::size_t>(config.population_size);
  const int alphabet = network.num_branches();

  std::vector<Individual> population;
  population.reserve(size);
  for (std::size_t i = 0; i < size; ++i) population.push_back({random_chromosome(network, rng), std::nullopt});
  for (auto& ind : population) ind.evaluation = evaluator(ind.chromosome);

  GAResult result;
  result.seed = config.seed;
  result.history.push_back(summarize(population));
  double best = result.history.back().best_fitness;
  int stagnant = 0;

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int generation = 1; generation <= config.max_generations; ++generation) {
    auto pool = elitist_select(network, population, config, rng);

    std::vector<Individual> next;
    next.reserve(size);
    std::set<std::vector<BranchId>> members;
    const auto elites = std::min(static_cast<std::size_t>(config.elite_count), pool.size());
    for (std::size_t i = 0; i < elites; ++i) {
      members.insert(gene_set(pool[i].chromosome));
      next.push_back(pool[i]);
    }

    auto admit = [&](Chromosome child) {
      if (members.count(gene_set(child))) child = mutate(child, network, rng);
      members.insert(gene_set(child));
      next.push_back({std::move(child), std::nullopt});
    };

    for (std::size_t k = elites; next.size() < size; k += 2) {
      const auto& pa = pool[k].chromosome;
      const auto& pb = pool[k + 1 < size ? k + 1 : elites].chromosome;
      Chromosome ca = pa;
      Chromosome cb = pb;
      if (coin(rng) < config.crossover_rate) std::tie(ca, cb) = pmx_crossover(pa, pb, alphabet, rng);
      if (coin(rng) < config.mutation_rate) ca = mutate(ca, network, rng);
      if (coin(rng) < config.mutation_rate) cb = mutate(cb, network, rng);
      admit(std::move(ca));
      if (next.size() < size) admit(std::move(cb));
    }

    // Randomness is fully consumed above; evaluation order cannot affect results.
    for (auto& ind : next)
      if (!ind.evaluation) ind.evaluation = evaluator(ind.chromosome);

    population = std::move(next);
    result.history.push_back(summarize(population));
    result.generations_run = generation;

    if (result.history.back().best_fitness > best) {
      best = result.history.back().best_fitness;
      stagnant = 0;
    } else if (++stagnant >= config.stagnation_limit) {
      break;
    }
  }

  const auto order = ranking(population);
  const auto& winner = population[order.front()];
  if (!winner.evaluation) {
    // Only reachable when the initial population itself failed power flow.
    throw std::runtime_error("genetic search found no convergent radial configuration");
  }
  result.best = decode(network, winner.chromosome);
  result.best_loss_kw = winner.evaluation->loss_kw;
  result.evaluations = evaluator.power_flow_solves();
  result.validity_checks = evaluator.validity_checks();
  return result;
}

}  // namespace dnr
