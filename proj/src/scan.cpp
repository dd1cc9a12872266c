#include "xgwas/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "xgwas/distributions.hpp"
#include "xgwas/transform.hpp"

namespace xgwas {

double hwe_check(long n_hom_ref, long n_het, long n_hom_alt) {
  if (n_hom_ref < 0 || n_het < 0 || n_hom_alt < 0)
    throw std::invalid_argument("hwe_check: negative count");
  const double n = static_cast<double>(n_hom_ref + n_het + n_hom_alt);
  if (n <= 0.0) throw std::invalid_argument("hwe_check: zero total");
  const double f = (2.0 * n_hom_alt + n_het) / (2.0 * n);
  if (f <= 0.0 || f >= 1.0) return 1.0;  // monomorphic: fits HWE trivially
  const double e_rr = n * (1.0 - f) * (1.0 - f);
  const double e_het = n * 2.0 * f * (1.0 - f);
  const double e_RR = n * f * f;
  const double x2 = (n_hom_ref - e_rr) * (n_hom_ref - e_rr) / e_rr +
                    (n_het - e_het) * (n_het - e_het) / e_het +
                    (n_hom_alt - e_RR) * (n_hom_alt - e_RR) / e_RR;
  return chisq_sf(x2, 1);
}

namespace {

struct SnpSlice {
  std::vector<Genotype> genotypes;
  std::vector<Sex> sexes;
  Eigen::VectorXd y;
  std::optional<Eigen::MatrixXd> covariates;
  int n_used = 0;
  int excluded = 0;
};

SnpSlice complete_slice(const Dataset& ds, const SnpRecord& snp) {
  const auto kept = complete_cases(snp.genotypes);
  SnpSlice s;
  s.n_used = static_cast<int>(kept.size());
  s.excluded = ds.n() - s.n_used;
  s.genotypes.reserve(kept.size());
  s.sexes.reserve(kept.size());
  s.y.resize(kept.size());
  if (ds.covariates)
    s.covariates = Eigen::MatrixXd(kept.size(), ds.covariates->cols());
  for (size_t i = 0; i < kept.size(); ++i) {
    s.genotypes.push_back(snp.genotypes[kept[i]]);
    s.sexes.push_back(ds.sexes[kept[i]]);
    s.y(i) = ds.phenotype(kept[i]);
    if (s.covariates) s.covariates->row(i) = ds.covariates->row(kept[i]);
  }
  return s;
}

// Minor-allele count per sex stratum.
int min_stratum_mac(const SnpSlice& s) {
  long alt[2] = {0, 0};
  long total[2] = {0, 0};
  for (size_t i = 0; i < s.genotypes.size(); ++i) {
    const int sex = s.sexes[i] == Sex::Male ? 1 : 0;
    int copies = 2;
    int count = 0;
    switch (s.genotypes[i].value) {
      case GenotypeValue::HomRef: count = 0; break;
      case GenotypeValue::Het: count = 1; break;
      case GenotypeValue::HomAlt: count = 2; break;
      case GenotypeValue::HemiRef: count = 0; copies = 1; break;
      case GenotypeValue::HemiAlt: count = 1; copies = 1; break;
      case GenotypeValue::Missing: continue;
    }
    alt[sex] += count;
    total[sex] += copies;
  }
  int mac = std::numeric_limits<int>::max();
  for (int sex = 0; sex < 2; ++sex) {
    if (total[sex] == 0) continue;  // single-sex panel: skip empty stratum
    mac = std::min<int>(mac, static_cast<int>(std::min(alt[sex], total[sex] - alt[sex])));
  }
  return mac == std::numeric_limits<int>::max() ? 0 : mac;
}

struct ModelVariant {
  ModelSpec spec;
  std::string label;
};

std::vector<ModelVariant> snp_models(ChromosomeKind kind, Family family) {
  if (kind == ChromosomeKind::Autosome)
    return {
        {{ModelId::Additive, family, {}, 0}, "additive"},
        {{ModelId::Genotypic, family, {}, 0}, "genotypic"},
    };
  const CodingScheme xci{RiskAllele::Alt, XciStatus::Inactivated};
  const CodingScheme noxci{RiskAllele::Alt, XciStatus::NotInactivated};
  return {
      {{ModelId::M1, family, xci, 0}, "M1(xci)"},
      {{ModelId::M1, family, noxci, 0}, "M1(noxci)"},
      {{ModelId::M2, family, xci, 0}, "M2(xci)"},
      {{ModelId::M2, family, noxci, 0}, "M2(noxci)"},
      {{ModelId::M3, family, noxci, 0}, "M3"},
      {{ModelId::M4, family, noxci, 0}, "M4"},
  };
}

TestResult run_test(const DesignMatrix& x, const Eigen::VectorXd& y,
                    Family family, TestKind test, const FitResult* full,
                    const FitResult* null) {
  switch (test) {
    case TestKind::Wald: return wald_test(x, *full, family);
    case TestKind::Score: return score_test(x, y, *null, family);
    case TestKind::Lrt: return lrt_test(x, *full, *null, family);
    case TestKind::F: return f_test(x, y, *full, *null);
  }
  throw std::logic_error("unknown test kind");
}

std::vector<ScanRow> scan_one(const Dataset& ds, const SnpRecord& snp,
                              const ScanOptions& opts) {
  std::vector<ScanRow> rows;
  auto flagged = [&](const std::string& note, int n_used, int excluded) {
    ScanRow row;
    row.snp_id = snp.id;
    row.model = "-";
    row.test = "-";
    row.statistic = std::numeric_limits<double>::quiet_NaN();
    row.p_value = std::numeric_limits<double>::quiet_NaN();
    row.p_recommended = std::numeric_limits<double>::quiet_NaN();
    row.n_used = n_used;
    row.excluded_missing = excluded;
    row.note = note;
    rows.push_back(row);
  };

  SnpSlice s;
  try {
    s = complete_slice(ds, snp);
  } catch (const std::exception& e) {
    flagged(e.what(), 0, ds.n());
    return rows;
  }
  if (s.excluded > opts.qc_max_missing * ds.n()) {
    flagged("missingness above threshold", s.n_used, s.excluded);
    return rows;
  }
  if (min_stratum_mac(s) < opts.qc_min_mac) {
    flagged("minor allele count below threshold", s.n_used, s.excluded);
    return rows;
  }

  const auto variants = snp_models(snp.chromosome, opts.family);
  const std::string recommended_label =
      snp.chromosome == ChromosomeKind::Autosome ? "genotypic" : "M4";

  struct Prepared {
    const ModelVariant* variant;
    DesignMatrix x;
    std::optional<FitResult> full, null;
    std::string note;
  };
  std::vector<Prepared> prepared;
  const bool needs_full = std::any_of(opts.tests.begin(), opts.tests.end(),
                                      [](TestKind t) { return t != TestKind::Score; });
  const bool needs_null = std::any_of(opts.tests.begin(), opts.tests.end(),
                                      [](TestKind t) { return t != TestKind::Wald; });
  for (const auto& v : variants) {
    Prepared p;
    p.variant = &v;
    try {
      p.x = build_design(s.genotypes, s.sexes, s.covariates, v.spec);
      if (needs_full) p.full = fit(p.x, s.y, opts.family, false);
      if (needs_null) p.null = fit(p.x, s.y, opts.family, true);
      if ((p.full && !p.full->converged) || (p.null && !p.null->converged))
        p.note = "fit did not converge";
    } catch (const std::exception& e) {
      p.note = e.what();
    }
    prepared.push_back(std::move(p));
  }

  for (const auto& p : prepared) {
    for (TestKind t : opts.tests) {
      if (t == TestKind::F && opts.family != Family::Linear) continue;
      ScanRow row;
      row.snp_id = snp.id;
      row.model = p.variant->label;
      row.test = test_name(t);
      row.n_used = s.n_used;
      row.excluded_missing = s.excluded;
      if (!p.note.empty()) {
        row.note = p.note;
        row.statistic = std::numeric_limits<double>::quiet_NaN();
        row.p_value = std::numeric_limits<double>::quiet_NaN();
        row.p_recommended = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        continue;
      }
      try {
        const TestResult res = run_test(p.x, s.y, opts.family, t,
                                        p.full ? &*p.full : nullptr,
                                        p.null ? &*p.null : nullptr);
        row.statistic = res.statistic;
        row.df = res.df;
        row.df2 = res.df2;
        row.p_value = res.p_value;
      } catch (const std::exception& e) {
        row.note = e.what();
        row.statistic = std::numeric_limits<double>::quiet_NaN();
        row.p_value = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }

  // Recommended column: p of the full model under the same test kind.
  for (auto& row : rows) {
    row.p_recommended = std::numeric_limits<double>::quiet_NaN();
    for (const auto& other : rows)
      if (other.model == recommended_label && other.test == row.test &&
          !std::isnan(other.p_value))
        row.p_recommended = other.p_value;
  }
  return rows;
}

double min_p(const std::vector<ScanRow>& rows) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (!std::isnan(r.p_value)) best = std::min(best, r.p_value);
  return best;
}

}  // namespace

std::vector<ScanRow> scan(const Dataset& ds, const ScanOptions& opts) {
  if (opts.family == Family::Logistic && !ds.binary_phenotype)
    throw std::invalid_argument("scan: logistic family requires 0/1 phenotype");

  const int n_snps = static_cast<int>(ds.snps.size());
  std::vector<std::vector<ScanRow>> per_snp(n_snps);

  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    for (int i = 0; i < n_snps; ++i) per_snp[i] = scan_one(ds, ds.snps[i], opts);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int i = next.fetch_add(1); i < n_snps; i = next.fetch_add(1))
        per_snp[i] = scan_one(ds, ds.snps[i], opts);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // SNPs ordered by their minimal p-value; flagged-only SNPs go last in
  // input order.
  std::vector<int> order(n_snps);
  for (int i = 0; i < n_snps; ++i) order[i] = i;
  std::vector<double> key(n_snps);
  for (int i = 0; i < n_snps; ++i) key[i] = min_p(per_snp[i]);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool fa = std::isfinite(key[a]);
    const bool fb = std::isfinite(key[b]);
    if (fa != fb) return fa;
    return key[a] < key[b];
  });

  std::vector<ScanRow> out;
  for (int i : order)
    for (auto& row : per_snp[i]) out.push_back(std::move(row));
  return out;
}

std::vector<AuditRow> audit(const Dataset& ds, Family family, TestKind test,
                            const std::vector<ModelId>& models) {
  std::vector<AuditRow> out;
  for (const auto& snp : ds.snps) {
    SnpSlice s;
    try {
      s = complete_slice(ds, snp);
    } catch (const std::exception& e) {
      out.push_back({snp.id, "-", {}, e.what()});
      continue;
    }

    if (snp.chromosome == ChromosomeKind::XChromosome) {
      for (ModelId m : models) {
        if (is_autosome_model(m)) continue;
        AuditRow row;
        row.snp_id = snp.id;
        row.model = model_name(m);
        try {
          row.report = invariance_audit(s.genotypes, s.sexes, s.y, m, family, test);
        } catch (const std::exception& e) {
          row.note = e.what();
        }
        out.push_back(std::move(row));
      }
      continue;
    }

    // Autosome: same vs flipped male baseline in the additive + GS model.
    AuditRow row;
    row.snp_id = snp.id;
    row.model = "additive+GS male-baseline";
    try {
      const DesignMatrix x1 = build_autosome_gs_design(
          s.genotypes, s.sexes, RiskAllele::Alt, RiskAllele::Alt);
      const DesignMatrix x2 = build_autosome_gs_design(
          s.genotypes, s.sexes, RiskAllele::Alt, RiskAllele::Ref);
      auto stat_of = [&](const DesignMatrix& x) {
        switch (test) {
          case TestKind::Wald:
            return wald_test(x, fit(x, s.y, family, false), family).statistic;
          case TestKind::Score:
            return score_test(x, s.y, fit(x, s.y, family, true), family).statistic;
          case TestKind::Lrt:
            return lrt_test(x, fit(x, s.y, family, false),
                            fit(x, s.y, family, true), family).statistic;
          case TestKind::F:
            return f_test(x, s.y, fit(x, s.y, family, false),
                          fit(x, s.y, family, true)).statistic;
        }
        throw std::logic_error("unknown test kind");
      };
      const double s1 = stat_of(x1);
      const double s2 = stat_of(x2);
      row.report.within_all = std::abs(s1 - s2);
      row.report.all_schemes_equivalent = true;
      row.report.max_statistic = std::max(std::abs(s1), std::abs(s2));
    } catch (const std::exception& e) {
      row.note = e.what();
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void write_scan_tsv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << "snp_id\tmodel\ttest\tstatistic\tdf\tdf2\tp_value\tp_recommended\t"
        "n_used\texcluded_missing\tnote\n";
  for (const auto& r : rows) {
    os << r.snp_id << '\t' << r.model << '\t' << r.test << '\t'
       << fmt(r.statistic) << '\t' << r.df << '\t'
       << (r.df2 ? std::to_string(*r.df2) : "NA") << '\t' << fmt(r.p_value)
       << '\t' << fmt(r.p_recommended) << '\t' << r.n_used << '\t'
       << r.excluded_missing << '\t' << (r.note.empty() ? "-" : r.note)
       << '\n';
  }
}

void write_audit_tsv(std::ostream& os, const std::vector<AuditRow>& rows) {
  os << "snp_id\tmodel\twithin_all\twithin_xci\twithin_noxci\tacross_xci\t"
        "max_statistic\tnote\n";
  for (const auto& r : rows) {
    os << r.snp_id << '\t' << r.model << '\t' << fmt(r.report.within_all)
       << '\t' << fmt(r.report.within_xci) << '\t'
       << fmt(r.report.within_noxci) << '\t' << fmt(r.report.across_xci)
       << '\t' << fmt(r.report.max_statistic) << '\t'
       << (r.note.empty() ? "-" : r.note) << '\n';
  }
}

}  // namespace xgwas
