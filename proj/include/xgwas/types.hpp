#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace xgwas {

enum class Sex : int { Female = 0, Male = 1 };

enum class ChromosomeKind { Autosome, XChromosome };

// Genotype states. Females and autosomal samples carry two alleles
// (HomRef/Het/HomAlt); X-chromosome males are hemizygous (HemiRef/HemiAlt).
enum class GenotypeValue {
  HomRef,   // rr
  Het,      // rR
  HomAlt,   // RR
  HemiRef,  // r, X males only
  HemiAlt,  // R, X males only
  Missing,
};

struct Genotype {
  GenotypeValue value = GenotypeValue::Missing;
  ChromosomeKind chromosome = ChromosomeKind::Autosome;

  bool missing() const { return value == GenotypeValue::Missing; }
  bool hemizygous() const {
    return value == GenotypeValue::HemiRef || value == GenotypeValue::HemiAlt;
  }
  bool operator==(const Genotype&) const = default;
};

// The counted ("risk") allele of the additive coding. The other allele is
// the baseline.
enum class RiskAllele { Alt, Ref };

// Sample-level X-inactivation assumption behind the additive coding.
enum class XciStatus { Inactivated, NotInactivated };

struct CodingScheme {
  RiskAllele risk = RiskAllele::Alt;
  XciStatus xci = XciStatus::NotInactivated;

  bool operator==(const CodingScheme&) const = default;
};

// All four (risk allele, XCI) coding schemes.
inline constexpr std::array<CodingScheme, 4> kAllSchemes = {{
    {RiskAllele::Alt, XciStatus::Inactivated},
    {RiskAllele::Ref, XciStatus::Inactivated},
    {RiskAllele::Alt, XciStatus::NotInactivated},
    {RiskAllele::Ref, XciStatus::NotInactivated},
}};

// Additive/Genotypic are autosome models; M0-M4 are X-chromosome models
// ranging from additive-only to sex + additive + dominant + interaction.
enum class ModelId { Additive, Genotypic, M0, M1, M2, M3, M4 };

enum class Family { Linear, Logistic };

struct ModelSpec {
  ModelId model = ModelId::M4;
  Family family = Family::Linear;
  CodingScheme scheme = {};
  int extra_covariates = 0;
};

inline bool is_autosome_model(ModelId m) {
  return m == ModelId::Additive || m == ModelId::Genotypic;
}

inline bool model_has_sex(ModelId m) {
  return m == ModelId::M1 || m == ModelId::M2 || m == ModelId::M3 ||
         m == ModelId::M4;
}

inline bool model_has_dominant(ModelId m) {
  return m == ModelId::Genotypic || m == ModelId::M2 || m == ModelId::M4;
}

inline bool model_has_interaction(ModelId m) {
  return m == ModelId::M3 || m == ModelId::M4;
}

// Size of the tested coefficient block.
inline int tested_df(ModelId m) {
  switch (m) {
    case ModelId::Additive:
    case ModelId::M0:
    case ModelId::M1:
      return 1;
    case ModelId::Genotypic:
    case ModelId::M2:
    case ModelId::M3:
      return 2;
    case ModelId::M4:
      return 3;
  }
  return 0;
}

std::string model_name(ModelId m);
std::string scheme_name(const CodingScheme& s);

}  // namespace xgwas
