#include "xgwas/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace xgwas {

void SimConfig::validate() const {
  pop.validate();
  if (n <= 0) throw std::invalid_argument("sim: n must be positive");
  if (replicates < 1) throw std::invalid_argument("sim: replicates must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("sim: alpha out of (0,1)");
  if (effects.sigma2 <= 0.0) throw std::invalid_argument("sim: sigma2 <= 0");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ (replicate + 1)));
}

void simulate_genotypes(int n, const PopulationSpec& pop, ChromosomeKind kind,
                        std::mt19937_64& rng, std::vector<Genotype>& genotypes,
                        std::vector<Sex>& sexes) {
  pop.validate();
  genotypes.resize(n);
  sexes.resize(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto diploid = [&](double f) {
    const double u = unif(rng);
    const double p_rr = (1.0 - f) * (1.0 - f);
    const double p_het = 2.0 * f * (1.0 - f);
    if (u < p_rr) return GenotypeValue::HomRef;
    if (u < p_rr + p_het) return GenotypeValue::Het;
    return GenotypeValue::HomAlt;
  };

  for (int i = 0; i < n; ++i) {
    const bool male = unif(rng) < pop.sex_ratio;
    sexes[i] = male ? Sex::Male : Sex::Female;
    GenotypeValue v;
    if (kind == ChromosomeKind::XChromosome && male)
      v = unif(rng) < pop.f_male ? GenotypeValue::HemiAlt
                                 : GenotypeValue::HemiRef;
    else
      v = diploid(male ? pop.f_male : pop.f_female);
    genotypes[i] = {v, kind};
  }
}

namespace {

double group_mean(const Genotype& g, const EffectSpec& eff) {
  switch (g.value) {
    case GenotypeValue::HomRef: return eff.mu_rr;
    case GenotypeValue::Het: return eff.mu_rR;
    case GenotypeValue::HomAlt: return eff.mu_RR;
    case GenotypeValue::HemiRef: return eff.mu_r;
    case GenotypeValue::HemiAlt: return eff.mu_R;
    case GenotypeValue::Missing: break;
  }
  throw std::invalid_argument("missing genotype");
}

}  // namespace

Eigen::VectorXd simulate_phenotype(std::span<const Genotype> genotypes,
                                   std::span<const Sex> sexes,
                                   const EffectSpec& effects, double sex_effect,
                                   Family family, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(genotypes.size());
  if (n != static_cast<Eigen::Index>(sexes.size()))
    throw std::invalid_argument("simulate_phenotype: length mismatch");
  Eigen::VectorXd y(n);
  std::normal_distribution<double> norm(0.0, std::sqrt(effects.sigma2));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lin = group_mean(genotypes[i], effects) +
                       sex_effect * (sexes[i] == Sex::Male ? 1.0 : 0.0);
    if (family == Family::Linear) {
      y(i) = lin + norm(rng);
    } else {
      const double p = 1.0 / (1.0 + std::exp(-lin));
      y(i) = unif(rng) < p ? 1.0 : 0.0;
    }
  }
  return y;
}

namespace {

// One replicate: simulate, fit, test. Throws on fit failure.
double replicate_p_value(const SimConfig& config, const ModelSpec& model,
                         TestKind test, std::uint64_t replicate) {
  auto rng = replicate_rng(config.seed, replicate);
  std::vector<Genotype> genotypes;
  std::vector<Sex> sexes;
  simulate_genotypes(config.n, config.pop, config.chromosome, rng, genotypes,
                     sexes);
  const Eigen::VectorXd y =
      simulate_phenotype(genotypes, sexes, config.effects, config.sex_effect,
                         model.family, rng);
  const DesignMatrix x = build_design(genotypes, sexes, std::nullopt, model);
  switch (test) {
    case TestKind::Wald: {
      const FitResult full = fit(x, y, model.family, false);
      return wald_test(x, full, model.family).p_value;
    }
    case TestKind::Score: {
      const FitResult null = fit(x, y, model.family, true);
      return score_test(x, y, null, model.family).p_value;
    }
    case TestKind::Lrt: {
      const FitResult full = fit(x, y, model.family, false);
      const FitResult null = fit(x, y, model.family, true);
      return lrt_test(x, full, null, model.family).p_value;
    }
    case TestKind::F: {
      const FitResult full = fit(x, y, model.family, false);
      const FitResult null = fit(x, y, model.family, true);
      return f_test(x, y, full, null).p_value;
    }
  }
  throw std::logic_error("unknown test kind");
}

}  // namespace

PowerEstimate empirical_power(const SimConfig& config, const ModelSpec& model,
                              TestKind test, int threads) {
  config.validate();
  if (test == TestKind::F && model.family != Family::Linear)
    throw std::invalid_argument("F-test requires linear family");

  const int r = config.replicates;
  std::vector<std::int8_t> outcome(r, -1);  // 1 reject, 0 keep, -1 excluded

  auto run_range = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      try {
        const double p = replicate_p_value(config, model, test,
                                           static_cast<std::uint64_t>(i));
        outcome[i] = p < config.alpha ? 1 : 0;
      } catch (const std::exception&) {
        outcome[i] = -1;
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1) {
    run_range(0, r);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (r + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(r, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  PowerEstimate est;
  for (int i = 0; i < r; ++i) {
    if (outcome[i] < 0) {
      ++est.excluded;
    } else {
      ++est.used;
      est.rejected += outcome[i];
    }
  }
  if (est.used > 0) {
    est.rate = static_cast<double>(est.rejected) / est.used;
    est.mc_se = std::sqrt(est.rate * (1.0 - est.rate) / est.used);
  }
  return est;
}

InvarianceReport invariance_audit(std::span<const Genotype> genotypes,
                                  std::span<const Sex> sexes,
                                  const Eigen::VectorXd& y, ModelId model,
                                  Family family, TestKind test) {
  if (!genotypes.empty() &&
      genotypes.front().chromosome != ChromosomeKind::XChromosome)
    throw std::invalid_argument("invariance_audit: X-chromosome data required");

  std::array<double, 4> stat{};  // indexed by kAllSchemes order
  for (size_t s = 0; s < kAllSchemes.size(); ++s) {
    const ModelSpec spec{model, family, kAllSchemes[s], 0};
    const DesignMatrix x = build_design(genotypes, sexes, std::nullopt, spec);
    double value = 0.0;
    switch (test) {
      case TestKind::Wald:
        value = wald_test(x, fit(x, y, family, false), family).statistic;
        break;
      case TestKind::Score:
        value = score_test(x, y, fit(x, y, family, true), family).statistic;
        break;
      case TestKind::Lrt:
        value = lrt_test(x, fit(x, y, family, false), fit(x, y, family, true),
                         family)
                    .statistic;
        break;
      case TestKind::F:
        value = f_test(x, y, fit(x, y, family, false), fit(x, y, family, true))
                    .statistic;
        break;
    }
    stat[s] = value;
  }

  // kAllSchemes order: (R,I), (r,I), (R,N), (r,N).
  InvarianceReport rep;
  rep.max_statistic =
      *std::max_element(stat.begin(), stat.end(),
                        [](double a, double b) { return std::abs(a) < std::abs(b); });
  rep.all_schemes_equivalent = model_has_interaction(model);
  if (rep.all_schemes_equivalent) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        d = std::max(d, std::abs(stat[i] - stat[j]));
    rep.within_all = d;
    return rep;
  }
  rep.within_xci = std::abs(stat[0] - stat[1]);
  rep.within_noxci = std::abs(stat[2] - stat[3]);
  double across = 0.0;
  for (int i : {0, 1})
    for (int j : {2, 3}) across = std::max(across, std::abs(stat[i] - stat[j]));
  rep.across_xci = across;
  return rep;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

SimConfig parse_sim_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("sim config: expected key=value at line " +
                               std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "n") cfg.n = std::stoi(value);
    else if (key == "replicates") cfg.replicates = std::stoi(value);
    else if (key == "alpha") cfg.alpha = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "sex_ratio") cfg.pop.sex_ratio = std::stod(value);
    else if (key == "f_female") cfg.pop.f_female = std::stod(value);
    else if (key == "f_male") cfg.pop.f_male = std::stod(value);
    else if (key == "mu_rr") cfg.effects.mu_rr = std::stod(value);
    else if (key == "mu_rR") cfg.effects.mu_rR = std::stod(value);
    else if (key == "mu_RR") cfg.effects.mu_RR = std::stod(value);
    else if (key == "mu_r") cfg.effects.mu_r = std::stod(value);
    else if (key == "mu_R") cfg.effects.mu_R = std::stod(value);
    else if (key == "sigma2") cfg.effects.sigma2 = std::stod(value);
    else if (key == "sex_effect") cfg.sex_effect = std::stod(value);
    else if (key == "family")
      cfg.effects.family = value == "logistic" ? Family::Logistic : Family::Linear;
    else if (key == "chromosome")
      cfg.chromosome = (value == "A" || value == "autosome")
                           ? ChromosomeKind::Autosome
                           : ChromosomeKind::XChromosome;
    else
      throw std::runtime_error("sim config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sim config: " + path);
  return parse_sim_config(in);
}

std::string sim_config_hash(const SimConfig& c) {
  std::ostringstream canon;
  canon.precision(17);
  canon << c.n << '|' << c.replicates << '|' << c.alpha << '|' << c.seed << '|'
        << c.pop.f_female << '|' << c.pop.f_male << '|' << c.pop.sex_ratio
        << '|' << c.effects.mu_rr << '|' << c.effects.mu_rR << '|'
        << c.effects.mu_RR << '|' << c.effects.mu_r << '|' << c.effects.mu_R
        << '|' << c.effects.sigma2 << '|' << c.sex_effect << '|'
        << static_cast<int>(c.effects.family) << '|'
        << static_cast<int>(c.chromosome);
  // FNV-1a over the canonical text.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canon.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace xgwas
