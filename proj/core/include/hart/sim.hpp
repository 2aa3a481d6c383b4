#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hart/model.hpp"
#include "hart/procedures.hpp"

namespace hart {

enum class Dependence { independent, banded_block, ar1_block };
enum class NullMode { theoretical, empirical };

/// Full description of a simulation experiment.
struct ScenarioConfig {
  MixtureModel model;
  std::size_t m = 5000;
  double alpha = 0.1;
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  Dependence dependence = Dependence::independent;
  std::size_t replicates_per_unit = 1; // >1: items carry sqrt(n)*xbar and sample sd
  bool sigma_known = true;
  std::vector<Procedure> procedures = {Procedure::HART};
  // analysis-side options
  NullMode null_mode = NullMode::theoretical;
  double coverage = 0.99;       // empirical-null central mass
  double lambda = 0.5;          // Storey threshold
  bool jackknife = true;
  std::optional<double> sigma_filter;
};

struct ProcedureSummary {
  Procedure procedure;
  double fdr = 0.0;      // mean FDP over reps
  double fdr_se = 0.0;
  double ap = 0.0;       // mean average power over reps
  double ap_se = 0.0;
  double mean_rejections = 0.0;
  double mfdr = 0.0;     // sum(false rejections) / sum(rejections), 0/0 -> 0
};

struct RepRecord {
  std::size_t rep;
  Procedure procedure;
  double fdp;
  double ap;
  std::size_t rejections;
  std::size_t false_rejections;
};

struct RunSummary {
  std::vector<ProcedureSummary> procedures;
  std::vector<RepRecord> reps;
  std::vector<std::string> diagnostics;
};

/// Deterministic draw of one replication: items (x, sigma, z, p) plus truth.
/// The RNG streams derive from (config.seed, rep_index) only.
std::pair<std::vector<TestItem>, TruthVector>
generate_scenario(const ScenarioConfig& config, std::size_t rep_index);

/// False discovery proportion sum((1-theta) delta) / max(sum delta, 1).
double fdp(const DecisionSet& decisions, const TruthVector& truth);

/// Average power sum(theta delta) / max(sum theta, 1).
double average_power(const DecisionSet& decisions, const TruthVector& truth);

/// Runs the experiment: generate, decide per procedure, aggregate.
/// Configuration/procedure mismatches (oracles without a known-sigma
/// Gaussian scenario, analytic p-threshold outside its domain) raise
/// hart::config_error naming the pair.
RunSummary run_experiment(const ScenarioConfig& config);

/// Effective dependence block width for a given m (4000 at paper scale,
/// min(m/5, 4000) below it).
std::size_t dependence_block_size(std::size_t m);

} // namespace hart
