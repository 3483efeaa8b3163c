// Copyright 2026 The PeGS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pegs/generator.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "pegs/error.h"
#include "pegs/parallel.h"
#include "pegs/random.h"

namespace pegs {
namespace {

enum Feature {
  kTyp, kAge, kSex, kEthnicity, kRace, kZip, kLos, kDisp, kPay, kCharge,
  kMdc, kSev, kCat, kNumFeatures
};

enum CareType { kAcute, kSkilledNursing, kPsychiatric, kChemical, kRehab, kOtherCare };

enum Mdc {
  kNervous, kEye, kEnmt, kRespiratory, kCirculatory, kDigestive,
  kHepatobiliary, kMusculoskeletal, kSkin, kEndocrine, kKidney,
  kMaleReproductive, kFemaleReproductive, kPregnancy, kNewborn, kBlood,
  kMyeloproliferative, kInfectious, kMental, kSubstance, kInjury, kBurns,
  kHealthStatus, kMultipleTrauma, kHiv, kNumMdc
};

enum Payer {
  kMedicare, kMediCal, kPrivate, kWorkersComp, kCountyIndigent,
  kOtherGovernment, kOtherIndigent, kSelfPay, kOtherPayer, kNumPayers
};

enum Disposition {
  kRoutine, kAcuteTransfer, kOtherCareTransfer, kSkilledNursingTransfer,
  kResidential, kPrison, kAgainstAdvice, kDied, kHomeHealth, kHospice,
  kOtherDisposition, kNewbornTransfer, kDispositionNa, kNumDispositions
};

FeatureSpec Categorical(std::string name, std::vector<std::string> labels) {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.categories = std::move(labels);
  return spec;
}

FeatureSpec Binned(std::string name, std::vector<std::string> labels,
                   std::vector<double> edges, std::vector<double> reps) {
  FeatureSpec spec = Categorical(std::move(name), std::move(labels));
  spec.kind = FeatureKind::kBinnedNumeric;
  spec.bin_edges = std::move(edges);
  spec.numeric_representatives = std::move(reps);
  return spec;
}

FeatureSpec AgeSpec() {
  std::vector<std::string> labels{"NA"};
  std::vector<double> edges, reps{50.0};
  for (int a = 0; a <= 80; a += 5) {
    labels.push_back(std::to_string(a));
    edges.push_back(a);
    reps.push_back(a < 80 ? a + 2.5 : 85.0);
  }
  return Binned("age.yrs", std::move(labels), std::move(edges), std::move(reps));
}

FeatureSpec LosSpec() {
  std::vector<std::string> labels{"NA"};
  std::vector<double> edges, reps{4.0};
  for (int d = 0; d <= 9; ++d) {
    labels.push_back(std::to_string(d));
    edges.push_back(d);
    reps.push_back(d);
  }
  for (int lo = 10; lo < 90; lo += 20) {
    labels.push_back(std::to_string(lo) + "-" + std::to_string(lo + 20));
    edges.push_back(lo);
    reps.push_back(lo + 10);
  }
  labels.push_back("90+");
  edges.push_back(90);
  reps.push_back(100);
  return Binned("los", std::move(labels), std::move(edges), std::move(reps));
}

std::string ThousandsLabel(double value) {
  const double k = value / 1000.0;
  if (k == std::floor(k)) return std::to_string(static_cast<int>(k)) + "K";
  return std::to_string(static_cast<int>(k)) + "." +
         std::to_string(static_cast<int>(std::lround((k - std::floor(k)) * 10))) +
         "K";
}

FeatureSpec ChargeSpec() {
  std::vector<double> edges{1000,  2000,  4000,  6000,  8000,
                            10000, 12500, 15000, 17500, 20000};
  for (double c = 25000; c <= 80000; c += 5000) edges.push_back(c);
  edges.push_back(90000);
  edges.push_back(100000);
  std::vector<std::string> labels{"0"};
  std::vector<double> reps{500.0};
  for (std::size_t k = 0; k < edges.size(); ++k) {
    labels.push_back(ThousandsLabel(edges[k]));
    reps.push_back(k + 1 < edges.size() ? 0.5 * (edges[k] + edges[k + 1])
                                        : 110000.0);
  }
  labels.back() += "+";
  return Binned("charge", std::move(labels), std::move(edges), std::move(reps));
}

// Draws an index proportional to non-negative weights.
int Draw(RngStream& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> p(weights.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = weights[j] / total;
  return rng.Categorical(p);
}

double Clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

Record DrawRecord(const Schema& schema, RngStream& rng) {
  Record rec(kNumFeatures);

  // Geography and demographics.
  std::array<double, 16> zip_w;
  for (int z = 0; z < 16; ++z) zip_w[z] = 1.0 / std::pow(z + 1.0, 0.6);
  const int zip = Draw(rng, zip_w);
  std::array<double, 7> race_w{0.42, 0.10, 0.01, 0.13, 0.25, 0.08, 0.01};
  if (zip % 4 == 1) race_w[1] *= 3.5;
  if (zip % 4 == 2) race_w[3] *= 2.5;
  if (zip >= 12) race_w[4] *= 1.6;
  const int race = Draw(rng, race_w);
  std::array<double, 4> eth_w{0.40, 0.52, 0.07, 0.01};
  if (race == 4) eth_w = {0.85, 0.10, 0.04, 0.01};
  if (race == 1 || race == 3) eth_w = {0.04, 0.90, 0.05, 0.01};
  if (race == 5 || race == 6) eth_w = {0.20, 0.20, 0.45, 0.15};
  const int ethnicity = Draw(rng, eth_w);

  // Care type, age and sex.
  const std::array<double, 6> typ_w{0.78, 0.07, 0.07, 0.03, 0.03, 0.02};
  const int typ = Draw(rng, typ_w);
  bool newborn = false;
  bool maternity = false;
  double age;
  switch (typ) {
    case kAcute: {
      const double u = rng.Uniform();
      if (u < 0.10) {
        newborn = true;
        age = 0.5 * rng.Uniform();
      } else if (u < 0.17) {
        age = 1.0 + 17.0 * rng.Uniform();
      } else if (u < 0.40) {
        maternity = true;
        age = Clamp(31.0 + 6.5 * rng.Normal(), 15.0, 49.0);
      } else {
        age = Clamp(62.0 + 16.0 * rng.Normal(), 18.0, 102.0);
      }
      break;
    }
    case kSkilledNursing: age = Clamp(80.0 + 8.0 * rng.Normal(), 40.0, 104.0); break;
    case kPsychiatric: age = Clamp(38.0 + 14.0 * rng.Normal(), 12.0, 90.0); break;
    case kChemical: age = Clamp(40.0 + 12.0 * rng.Normal(), 15.0, 80.0); break;
    case kRehab: age = Clamp(65.0 + 15.0 * rng.Normal(), 18.0, 98.0); break;
    default: age = Clamp(50.0 + 20.0 * rng.Normal(), 0.0, 100.0); break;
  }
  const bool age_missing = rng.Uniform() < 0.004;
  int sex;
  if (rng.Uniform() < 0.003) {
    sex = 2;
  } else if (maternity) {
    sex = rng.Uniform() < 0.9 ? 1 : 0;
  } else {
    sex = rng.Uniform() < (age > 70 ? 0.58 : 0.5) ? 1 : 0;
  }

  // Diagnosis, surgical flag and severity.
  std::array<double, kNumMdc> mdc_w{0.06,  0.002, 0.01,  0.11,  0.14,
                                    0.10,  0.04,  0.09,  0.025, 0.03,
                                    0.04,  0.005, 0.015, 0.0,   0.0,
                                    0.01,  0.008, 0.05,  0.02,  0.01,
                                    0.015, 0.001, 0.01,  0.003, 0.002};
  if (maternity) mdc_w[kPregnancy] = 1.6;
  if (age >= 65) {
    mdc_w[kCirculatory] *= 1.8;
    mdc_w[kRespiratory] *= 1.5;
    mdc_w[kInfectious] *= 1.5;
  }
  if (age < 18) {
    mdc_w[kRespiratory] *= 2.0;
    mdc_w[kCirculatory] *= 0.2;
  }
  if (sex == 0) mdc_w[kFemaleReproductive] = mdc_w[kPregnancy] = 0.0;
  if (sex == 1) mdc_w[kMaleReproductive] = 0.0;
  if (typ == kSkilledNursing) {
    mdc_w[kMusculoskeletal] *= 2.5;
    mdc_w[kNervous] *= 2.0;
    mdc_w[kInfectious] *= 2.0;
  } else if (typ == kRehab) {
    mdc_w[kMusculoskeletal] *= 4.0;
    mdc_w[kNervous] *= 4.0;
  } else if (typ == kPsychiatric) {
    mdc_w.fill(0.005);
    mdc_w[kMental] = 1.0;
    mdc_w[kPregnancy] = mdc_w[kNewborn] = 0.0;
  } else if (typ == kChemical) {
    mdc_w.fill(0.005);
    mdc_w[kSubstance] = 1.0;
    mdc_w[kPregnancy] = mdc_w[kNewborn] = 0.0;
  }
  int mdc;
  if (newborn) {
    mdc = rng.Uniform() < 0.95 ? kNewborn : kRespiratory;
  } else {
    mdc = Draw(rng, mdc_w);
  }

  std::array<double, kNumMdc> surgical_p;
  surgical_p.fill(0.1);
  surgical_p[kMusculoskeletal] = 0.55;
  surgical_p[kCirculatory] = 0.35;
  surgical_p[kFemaleReproductive] = 0.5;
  surgical_p[kMaleReproductive] = 0.5;
  surgical_p[kPregnancy] = 0.3;
  surgical_p[kDigestive] = 0.25;
  surgical_p[kHepatobiliary] = 0.3;
  surgical_p[kEye] = 0.6;
  surgical_p[kEnmt] = 0.4;
  surgical_p[kSkin] = 0.3;
  surgical_p[kMultipleTrauma] = 0.6;
  surgical_p[kBurns] = 0.4;
  surgical_p[kNewborn] = 0.03;
  surgical_p[kMental] = surgical_p[kSubstance] = 0.02;
  const int surgical = rng.Uniform() < surgical_p[mdc] ? 1 : 0;

  double score = 0.03 * (age - 50.0) + 0.5 * surgical + 0.8 * rng.Normal();
  if (mdc == kInfectious || mdc == kRespiratory || mdc == kMultipleTrauma) {
    score += 0.5;
  }
  if (mdc == kNewborn || mdc == kPregnancy) score -= 0.6;
  const int sev = score < -0.3 ? 0 : (score < 0.8 ? 1 : 2);

  // Length of stay and charge.
  double stay;
  switch (typ) {
    case kAcute:
      stay = newborn ? std::exp(0.7 + 0.4 * rng.Normal())
                     : std::exp(0.8 + 0.35 * sev + 0.3 * surgical +
                                0.008 * (age - 50.0) + 0.6 * rng.Normal());
      break;
    case kSkilledNursing: stay = std::exp(2.8 + 0.6 * rng.Normal()); break;
    case kPsychiatric: stay = std::exp(2.1 + 0.6 * rng.Normal()); break;
    case kChemical: stay = std::exp(1.7 + 0.5 * rng.Normal()); break;
    case kRehab: stay = std::exp(2.5 + 0.4 * rng.Normal()); break;
    default: stay = std::exp(1.5 + 0.8 * rng.Normal()); break;
  }
  stay = std::floor(std::max(stay - 0.5, 0.0));
  const bool stay_missing = rng.Uniform() < 0.003;

  double log_charge = 8.6 + 0.8 * std::log1p(stay) + 0.7 * surgical +
                      0.25 * sev + 0.4 * rng.Normal();
  if (typ == kSkilledNursing) log_charge -= 0.5;
  if (typ == kPsychiatric || typ == kChemical) log_charge -= 0.3;
  if (newborn) log_charge -= 0.6;
  const double charge = std::exp(log_charge);

  // Payer and disposition.
  std::array<double, kNumPayers> pay_w{0.08, 0.30, 0.45, 0.02, 0.03,
                                       0.02, 0.01, 0.07, 0.02};
  if (age >= 65) pay_w = {0.75, 0.10, 0.10, 0.005, 0.01, 0.01, 0.005, 0.01, 0.01};
  if (age < 18) pay_w = {0.0, 0.50, 0.40, 0.0, 0.02, 0.03, 0.01, 0.02, 0.02};
  if (typ == kPsychiatric || typ == kChemical) {
    pay_w[kMediCal] *= 1.8;
    pay_w[kCountyIndigent] *= 5.0;
  }
  if (zip >= 12) pay_w[kMediCal] *= 1.5;
  if (race == 4) pay_w[kMediCal] *= 1.3;
  const int pay = Draw(rng, pay_w);

  std::array<double, kNumDispositions> disp_w{};
  disp_w[kRoutine] = 0.75;
  disp_w[kAcuteTransfer] = 0.02;
  disp_w[kOtherCareTransfer] = 0.02;
  disp_w[kSkilledNursingTransfer] = age >= 70 ? 0.12 + 0.05 * sev : 0.01;
  disp_w[kResidential] = 0.01;
  disp_w[kPrison] = 0.003;
  disp_w[kAgainstAdvice] = typ == kChemical ? 0.10 : 0.01;
  disp_w[kDied] = 0.005 + 0.02 * sev + (age >= 80 ? 0.03 : 0.0);
  disp_w[kHomeHealth] = age >= 65 ? 0.08 : 0.02;
  disp_w[kHospice] = age >= 75 ? 0.01 + 0.01 * sev : 0.001;
  disp_w[kOtherDisposition] = 0.01;
  disp_w[kNewbornTransfer] = newborn ? 0.02 : 0.0;
  disp_w[kDispositionNa] = 0.002;
  if (newborn) disp_w[kRoutine] = 3.0;
  if (typ == kSkilledNursing) {
    disp_w[kRoutine] = 0.45;
    disp_w[kAcuteTransfer] = 0.15;
    disp_w[kDied] += 0.06;
  }
  const int disp = Draw(rng, disp_w);

  rec[kTyp] = typ;
  rec[kAge] = BinNumeric(age_missing ? -1.0 : age, schema.feature(kAge));
  rec[kSex] = sex;
  rec[kEthnicity] = ethnicity;
  rec[kRace] = race;
  rec[kZip] = zip;
  rec[kLos] = BinNumeric(stay_missing ? -1.0 : stay, schema.feature(kLos));
  rec[kDisp] = disp;
  rec[kPay] = pay;
  rec[kCharge] = BinNumeric(charge, schema.feature(kCharge));
  rec[kMdc] = mdc;
  rec[kSev] = sev;
  rec[kCat] = surgical;
  return rec;
}

}  // namespace

SchemaPtr HospitalSchema() {
  std::vector<FeatureSpec> features;
  features.push_back(Categorical(
      "typ", {"Acute Care", "Skilled Nursing", "Psychiatric",
              "Chemical Dependency", "Physical Rehab", "Other"}));
  features.push_back(AgeSpec());
  features.push_back(Categorical("sex", {"Male", "Female", "NA"}));
  features.push_back(
      Categorical("ethncty", {"Hispanic", "Non-Hispanic", "Unknown", "NA"}));
  features.push_back(Categorical(
      "race", {"White", "Black", "Native American", "Asian/Pacific Islander",
               "Other", "Unknown", "NA"}));
  features.push_back(Categorical(
      "patzip", {"900xx", "902xx", "903xx", "905xx", "906xx", "907xx", "908xx",
                 "910xx", "911xx", "912xx", "913xx", "914xx", "915xx", "917xx",
                 "918xx", "935xx"}));
  features.push_back(LosSpec());
  features.push_back(Categorical(
      "disp", {"Routine", "Acute Care", "Other Care", "Skilled Nursing",
               "Residential Care", "Prison/Jail", "Against Medical Advice",
               "Died", "Home Health", "Hospice", "Other", "Newborn Transfer",
               "NA"}));
  features.push_back(Categorical(
      "pay", {"Medicare", "Medi-Cal", "Private", "Workers Comp",
              "County Indigent", "Other Government", "Other Indigent",
              "Self Pay", "Other"}));
  features.push_back(ChargeSpec());
  features.push_back(Categorical(
      "MDC", {"Nervous", "Eye", "ENMT", "Respiratory", "Circulatory",
              "Digestive", "Hepatobiliary", "Musculoskeletal", "Skin",
              "Endocrine", "Kidney", "Male Reproductive", "Female Reproductive",
              "Pregnancy", "Newborn", "Blood", "Myeloproliferative",
              "Infectious", "Mental", "Substance Use", "Injury", "Burns",
              "Health Status", "Multiple Trauma", "HIV"}));
  features.push_back(Categorical("sev", {"0", "1", "2"}));
  features.push_back(Categorical("cat", {"Medical", "Surgical"}));
  return std::make_shared<const Schema>(std::move(features));
}

Dataset GenerateHospitalData(int num_rows, std::uint64_t seed, int threads) {
  if (num_rows < 0) ThrowUsage("number of rows must be non-negative");
  SchemaPtr schema = HospitalSchema();
  std::vector<Category> cells(static_cast<std::size_t>(num_rows) * kNumFeatures);
  ParallelFor(num_rows, threads, [&](int r) {
    RngStream rng(seed, StreamId(StreamPurpose::kGenerator, 0,
                                 static_cast<std::uint64_t>(r)));
    const Record rec = DrawRecord(*schema, rng);
    std::copy(rec.begin(), rec.end(),
              cells.begin() + static_cast<std::ptrdiff_t>(r) * kNumFeatures);
  });
  return Dataset(schema, std::move(cells));
}

}  // namespace pegs
