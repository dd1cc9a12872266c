// Command-line front end: per-SNP association scans, coding-invariance
// audits, analytic power tables, and seeded Monte Carlo power estimates.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>

#include "xgwas/power.hpp"
#include "xgwas/scan.hpp"
#include "xgwas/simulate.hpp"

namespace {

using namespace xgwas;

Family parse_family(const std::string& s) {
  if (s == "linear") return Family::Linear;
  if (s == "logistic") return Family::Logistic;
  throw CLI::ValidationError("--family", "expected linear or logistic");
}

TestKind parse_test(const std::string& s) {
  if (s == "wald") return TestKind::Wald;
  if (s == "score") return TestKind::Score;
  if (s == "lrt") return TestKind::Lrt;
  if (s == "f") return TestKind::F;
  throw CLI::ValidationError("--tests", "expected wald, score, lrt or f");
}

ModelId parse_model(const std::string& s) {
  if (s == "additive") return ModelId::Additive;
  if (s == "genotypic") return ModelId::Genotypic;
  if (s == "M0") return ModelId::M0;
  if (s == "M1") return ModelId::M1;
  if (s == "M2") return ModelId::M2;
  if (s == "M3") return ModelId::M3;
  if (s == "M4") return ModelId::M4;
  throw CLI::ValidationError("--models", "unknown model " + s);
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw CLI::ValidationError("--out", "cannot open " + path);
  return file;
}

struct ScanArgs {
  std::string geno, pheno, out;
  std::string family = "linear";
  std::vector<std::string> tests = {"wald"};
  std::vector<std::string> models;
  double alpha = 5e-8;
  int threads = 1;
  double qc_miss = 0.10;
  int qc_mac = 5;
  bool with_audit = false;
};

int run_scan(const ScanArgs& a) {
  const Dataset ds = load_dataset(a.geno, a.pheno);
  if (ds.unknown_symbol_count > 0)
    std::cerr << "warning: " << ds.unknown_symbol_count
              << " genotype symbols outside the alphabet were set missing\n";

  ScanOptions opts;
  opts.family = parse_family(a.family);
  opts.tests.clear();
  for (const auto& t : a.tests) opts.tests.push_back(parse_test(t));
  opts.alpha = a.alpha;
  opts.threads = a.threads;
  opts.qc_max_missing = a.qc_miss;
  opts.qc_min_mac = a.qc_mac;

  auto rows = scan(ds, opts);
  if (!a.models.empty()) {
    std::vector<ScanRow> kept;
    for (auto& r : rows)
      for (const auto& m : a.models)
        if (r.model.rfind(m, 0) == 0) {
          kept.push_back(r);
          break;
        }
    rows = std::move(kept);
  }
  std::ofstream file;
  write_scan_tsv(open_output(file, a.out), rows);

  if (a.with_audit) {
    std::ofstream afile;
    const std::string apath = a.out.empty() ? "" : a.out + ".audit";
    write_audit_tsv(open_output(afile, apath),
                    audit(ds, opts.family, opts.tests.front(),
                          {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4}));
  }
  return 0;
}

struct SimulateArgs {
  std::string config, out;
  std::vector<std::string> tests = {"wald"};
  std::vector<std::string> models;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
};

int run_simulate(const SimulateArgs& a) {
  SimConfig cfg = load_sim_config(a.config);
  if (a.seed_set) cfg.seed = a.seed;

  std::vector<std::pair<std::string, ModelSpec>> variants;
  const Family family = cfg.effects.family;
  if (cfg.chromosome == ChromosomeKind::Autosome) {
    variants = {{"additive", {ModelId::Additive, family, {}, 0}},
                {"genotypic", {ModelId::Genotypic, family, {}, 0}}};
  } else {
    const CodingScheme xci{RiskAllele::Alt, XciStatus::Inactivated};
    const CodingScheme noxci{RiskAllele::Alt, XciStatus::NotInactivated};
    variants = {{"M1(xci)", {ModelId::M1, family, xci, 0}},
                {"M1(noxci)", {ModelId::M1, family, noxci, 0}},
                {"M2(xci)", {ModelId::M2, family, xci, 0}},
                {"M2(noxci)", {ModelId::M2, family, noxci, 0}},
                {"M3", {ModelId::M3, family, noxci, 0}},
                {"M4", {ModelId::M4, family, noxci, 0}}};
  }
  if (!a.models.empty()) {
    std::vector<std::pair<std::string, ModelSpec>> kept;
    for (auto& v : variants)
      for (const auto& m : a.models)
        if (v.first.rfind(m, 0) == 0) {
          kept.push_back(v);
          break;
        }
    variants = std::move(kept);
  }

  std::ofstream file;
  auto& os = open_output(file, a.out);
  os << "config_hash,model,test,rate,mc_se,excluded_count\n";
  const std::string hash = sim_config_hash(cfg);
  for (const auto& [label, model] : variants) {
    for (const auto& t : a.tests) {
      const TestKind test = parse_test(t);
      const PowerEstimate est = empirical_power(cfg, model, test, a.threads);
      os << hash << ',' << label << ',' << t << ',' << est.rate << ','
         << est.mc_se << ',' << est.excluded << '\n';
    }
  }
  return 0;
}

struct PowerArgs {
  std::string mode = "landmarks";
  std::string out;
  int df_small = 1, df_large = 2;
  double alpha = 0.0008;
  double ncp1 = 10.0;
  int n = 1000;
  double f_female = 0.2, f_male = 0.2;
  double sigma2 = 4.0;
  double mu_rr = -0.3, mu_rR = 0.0, mu_RR = 0.3, mu_r = 0.0, mu_R = 0.3;
  double beta_a = 0.3;
  std::string sweep = "interaction";
};

int run_power(const PowerArgs& a) {
  std::ofstream file;
  auto& os = open_output(file, a.out);

  if (a.mode == "landmarks") {
    os << "df_small,df_large,max_loss,argmax_alpha,argmax_ncp\n";
    for (auto [d1, d2] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
      const auto r = max_power_loss(d1, d2, {0.0, 15.0}, {0.0, 100.0});
      os << d1 << ',' << d2 << ',' << r.max_loss << ',' << r.argmax_alpha
         << ',' << r.argmax_ncp << '\n';
    }
    return 0;
  }
  if (a.mode == "grid") {
    write_power_grid_csv(os, {0.0, 15.0}, {0.0, 100.0}, 0.05, 0.5);
    return 0;
  }
  if (a.mode == "gain") {
    os << "delta,power_small,power_large\n";
    for (const auto& r :
         power_gain_curve(a.ncp1, {0.0, 10.0}, 0.1, a.alpha, a.df_small, a.df_large))
      os << r.delta << ',' << r.power_small << ',' << r.power_large << '\n';
    return 0;
  }
  if (a.mode == "xsweep") {
    PopulationSpec pop{a.f_female, a.f_male, 0.5, true};
    EffectSpec base{a.mu_rr, a.mu_rR, a.mu_RR, a.mu_r, a.mu_R, a.sigma2,
                    Family::Linear};
    const SweepKind kind =
        a.sweep == "dominant" ? SweepKind::Dominant : SweepKind::Interaction;
    write_xchr_sweep_csv(
        os, xchr_power_sweep(kind, base, pop, a.n, a.alpha, -0.6, 0.6, 0.05));
    return 0;
  }
  if (a.mode == "autosweep") {
    write_autosome_sweep_csv(
        os, autosome_power_sweep(a.beta_a, a.f_female, a.sigma2, a.n, a.alpha,
                                 -0.6, 0.6, 0.05));
    return 0;
  }
  std::cerr << "unknown power mode: " << a.mode << "\n";
  return 1;
}

struct AuditArgs {
  std::string geno, pheno, out;
  std::string family = "linear";
  std::string test = "wald";
  std::vector<std::string> models = {"M1", "M2", "M3", "M4"};
};

int run_audit(const AuditArgs& a) {
  const Dataset ds = load_dataset(a.geno, a.pheno);
  std::vector<ModelId> models;
  for (const auto& m : a.models) models.push_back(parse_model(m));
  std::ofstream file;
  write_audit_tsv(open_output(file, a.out),
                  audit(ds, parse_family(a.family), parse_test(a.test), models));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "X-chromosome-inclusive association toolkit: robust genotype codings, "
      "Wald/Score/LRT/F scans, analytic power and seeded simulation"};
  app.require_subcommand(1);

  ScanArgs sa;
  auto* scan_cmd = app.add_subcommand("scan", "per-SNP association scan");
  scan_cmd->add_option("--geno", sa.geno, "genotype TSV")->required();
  scan_cmd->add_option("--pheno", sa.pheno, "phenotype TSV")->required();
  scan_cmd->add_option("--family", sa.family, "linear|logistic");
  scan_cmd->add_option("--tests", sa.tests, "wald,score,lrt,f")->delimiter(',');
  scan_cmd->add_option("--models", sa.models, "filter by model label prefix")
      ->delimiter(',');
  scan_cmd->add_option("--alpha", sa.alpha, "significance level (reporting)");
  scan_cmd->add_option("--threads", sa.threads, "worker threads");
  scan_cmd->add_option("--qc-miss", sa.qc_miss, "max missingness fraction");
  scan_cmd->add_option("--qc-mac", sa.qc_mac, "min minor-allele count per sex");
  scan_cmd->add_option("--out", sa.out, "output TSV (default stdout)");
  scan_cmd->add_flag("--audit", sa.with_audit, "also write the invariance audit");

  SimulateArgs ma;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo power/size runs");
  sim_cmd->add_option("--config", ma.config, "key=value SimConfig file")->required();
  sim_cmd->add_option("--tests", ma.tests, "wald,score,lrt,f")->delimiter(',');
  sim_cmd->add_option("--models", ma.models, "filter by model label prefix")
      ->delimiter(',');
  auto* seed_opt = sim_cmd->add_option("--seed", ma.seed, "override config seed");
  sim_cmd->add_option("--threads", ma.threads, "worker threads");
  sim_cmd->add_option("--out", ma.out, "output CSV (default stdout)");

  PowerArgs pa;
  auto* pow_cmd = app.add_subcommand("power", "analytic power tables");
  pow_cmd->add_option("--mode", pa.mode,
                      "landmarks|grid|gain|xsweep|autosweep");
  pow_cmd->add_option("--df-small", pa.df_small, "smaller df");
  pow_cmd->add_option("--df-large", pa.df_large, "larger df");
  pow_cmd->add_option("--alpha", pa.alpha, "significance level");
  pow_cmd->add_option("--ncp1", pa.ncp1, "gain mode: baseline ncp");
  pow_cmd->add_option("--n", pa.n, "sample size for sweeps");
  pow_cmd->add_option("--f-female", pa.f_female, "risk-allele frequency, females");
  pow_cmd->add_option("--f-male", pa.f_male, "risk-allele frequency, males");
  pow_cmd->add_option("--sigma2", pa.sigma2, "residual variance");
  pow_cmd->add_option("--mu-rr", pa.mu_rr, "group mean rr");
  pow_cmd->add_option("--mu-rR", pa.mu_rR, "group mean rR");
  pow_cmd->add_option("--mu-RR", pa.mu_RR, "group mean RR");
  pow_cmd->add_option("--mu-r", pa.mu_r, "group mean r (males)");
  pow_cmd->add_option("--mu-R", pa.mu_R, "group mean R (males)");
  pow_cmd->add_option("--beta-a", pa.beta_a, "autosweep: additive effect");
  pow_cmd->add_option("--sweep-kind", pa.sweep, "dominant|interaction");
  pow_cmd->add_option("--out", pa.out, "output CSV (default stdout)");

  AuditArgs aa;
  auto* audit_cmd = app.add_subcommand("audit", "coding-invariance audit");
  audit_cmd->add_option("--geno", aa.geno, "genotype TSV")->required();
  audit_cmd->add_option("--pheno", aa.pheno, "phenotype TSV")->required();
  audit_cmd->add_option("--family", aa.family, "linear|logistic");
  audit_cmd->add_option("--test", aa.test, "wald|score|lrt|f");
  audit_cmd->add_option("--models", aa.models, "X models to audit")->delimiter(',');
  audit_cmd->add_option("--out", aa.out, "output TSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scan_cmd) return run_scan(sa);
    if (*sim_cmd) {
      ma.seed_set = seed_opt->count() > 0;
      return run_simulate(ma);
    }
    if (*pow_cmd) return run_power(pa);
    if (*audit_cmd) return run_audit(aa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
