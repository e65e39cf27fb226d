#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dnr/network.hpp"
#include "dnr/powerflow.hpp"
#include "dnr/topology.hpp"

namespace dnr {

/// Integer-encoded genome: V - 1 distinct branch ids. Gene order carries no
/// electrical meaning; only the gene set is decoded.
struct Chromosome {
  std::vector<BranchId> genes;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Length V - 1, all genes distinct and within 1..E.
bool satisfies_invariants(const Chromosome& chromosome, const NetworkCase& network);
std::vector<BranchId> gene_set(const Chromosome& chromosome);
Configuration decode(const NetworkCase& network, const Chromosome& chromosome);

enum class PenaltyMode { off, voltage };

std::string to_string(PenaltyMode mode);
PenaltyMode parse_penalty_mode(const std::string& text);

struct GAConfig {
  int population_size = 50;
  double crossover_rate = 0.8;
  double mutation_rate = 0.2;
  int elite_count = 2;
  int max_generations = 200;
  int stagnation_limit = 50;
  std::uint64_t seed = 42;
  PenaltyMode penalty_mode = PenaltyMode::off;
  /// Added loss per per-unit of out-of-band voltage when the penalty is on.
  double penalty_kw_per_pu = 10000.0;
  VoltageBand voltage_band{};

  /// Throws std::invalid_argument on the first broken invariant.
  void validate() const;
};

/// Reads `key = value` lines (blank lines and `#` comments ignored) on top of
/// `base`. Keys are the GAConfig field names.
GAConfig parse_ga_config(std::istream& in, GAConfig base = {});
std::string to_config_text(const GAConfig& config);

/// 1 / (1 + loss) with loss in kW. Throws std::invalid_argument on negative loss.
double fitness(double p_loss_kw);

struct Evaluation {
  double fitness = 0.0;
  double loss_kw = 0.0;  ///< electrical loss, before any penalty
};

struct EvaluationOptions {
  PenaltyMode penalty_mode = PenaltyMode::off;
  double penalty_kw_per_pu = 10000.0;
  VoltageBand voltage_band{};
  SweepOptions sweep{};
};

/// Two-step evaluation: radiality filter first, power flow only for trees.
/// nullopt marks an invalid individual (non-tree or non-convergent).
std::optional<Evaluation> evaluate(const NetworkCase& network, const Chromosome& chromosome,
                                   const EvaluationOptions& options = {});

/// Stateful evaluate() with call counters and a cache keyed on the gene set.
class Evaluator {
 public:
  Evaluator(const NetworkCase& network, EvaluationOptions options = {});

  std::optional<Evaluation> operator()(const Chromosome& chromosome);

  std::uint64_t validity_checks() const { return validity_checks_; }
  std::uint64_t validity_passes() const { return validity_passes_; }
  std::uint64_t power_flow_solves() const { return power_flow_solves_; }

 private:
  const NetworkCase* network_;
  EvaluationOptions options_;
  std::map<std::vector<BranchId>, std::optional<Evaluation>> cache_;
  std::uint64_t validity_checks_ = 0;
  std::uint64_t validity_passes_ = 0;
  std::uint64_t power_flow_solves_ = 0;
};

/// Replaces repeated genes with uniformly drawn unused ids from 1..alphabet_size.
void repair_duplicates(std::vector<BranchId>& genes, int alphabet_size, Rng& rng);

/// Partially matched crossover between two random cut points. Parents need
/// not share a gene set; children keep every Chromosome invariant but may
/// fail the radiality test.
std::pair<Chromosome, Chromosome> pmx_crossover(const Chromosome& a, const Chromosome& b,
                                                int alphabet_size, Rng& rng);

/// Same operator with explicit cut points, `0 <= lo <= hi <= length`.
std::pair<Chromosome, Chromosome> pmx_crossover(const Chromosome& a, const Chromosome& b,
                                                int alphabet_size, std::size_t lo, std::size_t hi,
                                                Rng& rng);

/// Swaps one random gene for a random branch outside the chromosome.
/// Identity when every branch is already used.
Chromosome mutate(const Chromosome& chromosome, const NetworkCase& network, Rng& rng);

struct Individual {
  Chromosome chromosome;
  std::optional<Evaluation> evaluation;
};

/// Elites first (best first, copied unchanged), then roulette draws over valid
/// individuals. With no valid individual, returns fresh random spanning trees
/// (unevaluated). Output size is config.population_size.
std::vector<Individual> elitist_select(const NetworkCase& network,
                                       const std::vector<Individual>& population,
                                       const GAConfig& config, Rng& rng);

struct GenerationStats {
  double best_fitness = 0.0;
  double mean_fitness = 0.0;  ///< over valid individuals
  double valid_fraction = 0.0;

  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

struct GAResult {
  Configuration best;
  double best_loss_kw = 0.0;
  std::vector<GenerationStats> history;  ///< entry 0 is the initial population
  int generations_run = 0;
  std::uint64_t evaluations = 0;  ///< power-flow solves
  std::uint64_t validity_checks = 0;
  std::uint64_t seed = 0;
};

GAResult run(const NetworkCase& network, const GAConfig& config);

}  // namespace dnr
