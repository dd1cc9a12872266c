#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <istream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "xgwas/assoc.hpp"
#include "xgwas/ncp.hpp"

namespace xgwas {

struct SimConfig {
  int n = 1000;
  PopulationSpec pop;
  EffectSpec effects;
  double sex_effect = 0.0;  // beta_S
  ChromosomeKind chromosome = ChromosomeKind::XChromosome;
  int replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// Deterministic per-replicate stream: replicate r of a run always sees the
// same generator state regardless of threading or execution order.
std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate);

// Sexes i.i.d. Bernoulli(sex_ratio); female genotypes HWE-multinomial,
// X-male genotypes Bernoulli(f_male), autosome males HWE with f_male.
void simulate_genotypes(int n, const PopulationSpec& pop, ChromosomeKind kind,
                        std::mt19937_64& rng, std::vector<Genotype>& genotypes,
                        std::vector<Sex>& sexes);

// Linear: mu_group + beta_S * S + Normal(0, sigma2); logistic: Bernoulli of
// the inverse-logit of the same predictor.
Eigen::VectorXd simulate_phenotype(std::span<const Genotype> genotypes,
                                   std::span<const Sex> sexes,
                                   const EffectSpec& effects, double sex_effect,
                                   Family family, std::mt19937_64& rng);

struct PowerEstimate {
  double rate = 0.0;
  double mc_se = 0.0;
  int rejected = 0;
  int used = 0;
  int excluded = 0;  // replicates whose fit failed, reported not dropped
};

// Fraction of replicates with p < alpha; replicate r uses the stream
// derived from (seed, r), so parallel and serial runs agree exactly.
PowerEstimate empirical_power(const SimConfig& config, const ModelSpec& model,
                              TestKind test, int threads = 1);

// Max statistic discrepancies across the four coding schemes for one
// dataset. Models with the interaction term are expected to agree across
// all schemes; without it, only within each XCI class.
struct InvarianceReport {
  double within_all = 0.0;    // M3/M4: max over all scheme pairs
  double within_xci = 0.0;    // M0-M2: risk-allele swap under XCI
  double within_noxci = 0.0;  // M0-M2: risk-allele swap under no XCI
  double across_xci = 0.0;    // M0-M2: XCI vs no-XCI pairs
  double max_statistic = 0.0;
  bool all_schemes_equivalent = false;
};

InvarianceReport invariance_audit(std::span<const Genotype> genotypes,
                                  std::span<const Sex> sexes,
                                  const Eigen::VectorXd& y, ModelId model,
                                  Family family, TestKind test);

// Flat key=value configuration (see README for the schema).
SimConfig parse_sim_config(std::istream& in);
SimConfig load_sim_config(const std::string& path);
std::string sim_config_hash(const SimConfig& config);

}  // namespace xgwas
