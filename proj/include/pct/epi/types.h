#ifndef PCT_EPI_TYPES_H_
#define PCT_EPI_TYPES_H_

#include <array>
#include <bitset>
#include <cstdint>
#include "absl/strings/string_view.h"
#include <vector>

namespace pct {

using AgentId = int32_t;
using Day = int32_t;
inline constexpr Day kNoDay = -1;

// Length of the look-back window: today plus the 14 previous days.
inline constexpr int kMaxLookbackDays = 14;
inline constexpr int kWindowDays = kMaxLookbackDays + 1;

inline constexpr int kNumSymptoms = 12;
inline constexpr int kNumConditions = 8;
inline constexpr int kNumBehaviorLevels = 4;
inline constexpr int kQuarantineLevel = 3;

using SymptomSet = std::bitset<kNumSymptoms>;
using ConditionSet = std::bitset<kNumConditions>;

// Fixed order; feature encoders and the heuristic rule table rely on it.
inline constexpr std::array<absl::string_view, kNumSymptoms> kSymptomNames = {
    "fever",         "cough",      "fatigue",    "loss_of_taste",
    "sore_throat",   "headache",   "shortness_of_breath",
    "muscle_ache",   "runny_nose", "diarrhea",   "nausea",
    "chills"};

inline constexpr std::array<absl::string_view, kNumConditions> kConditionNames = {
    "smoker",  "diabetes", "heart_disease", "lung_disease",
    "obesity", "immuno_suppressed", "hypertension", "cancer"};

enum class Sex : uint8_t { kFemale = 0, kMale = 1, kOther = 2 };

struct AgentProfile {
  int age = 40;
  Sex sex = Sex::kFemale;
  ConditionSet conditions;
  double carefulness = 0.5;
  bool has_app = false;
  bool smartphone_owner = false;
};

enum class Compartment : uint8_t {
  kSusceptible = 0,
  kExposed = 1,
  kInfectious = 2,
  kRecovered = 3,
};

absl::string_view CompartmentName(Compartment c);

struct DiseaseState {
  Compartment compartment = Compartment::kSusceptible;
  Day day_exposed = kNoDay;
  int latent_days = 0;
  int incubation_days = 0;
  int recovery_tail_days = 0;
  bool is_asymptomatic = false;
  Day symptom_onset_day = kNoDay;
  // Indexed by days since exposure; zero past the end.
  std::vector<double> infectiousness_curve;
  SymptomSet true_symptoms;

  bool infected() const { return day_exposed != kNoDay; }
  double CurveAt(int days_since_exposure) const {
    if (days_since_exposure < 0 ||
        days_since_exposure >= static_cast<int>(infectiousness_curve.size())) {
      return 0.0;
    }
    return infectiousness_curve[days_since_exposure];
  }
  // Day on which the agent becomes Recovered.
  Day RecoveryDay() const {
    return day_exposed + static_cast<Day>(infectiousness_curve.size());
  }
};

enum class TestResult : uint8_t {
  kNone = 0,
  kPendingPositive = 1,
  kPendingNegative = 2,
  kPositive = 3,
  kNegative = 4,
};

// One day of self-reported health information. test_result refers to a test
// sampled on `day`; it becomes visible on test_result_day.
struct HealthStatus {
  Day day = kNoDay;
  SymptomSet reported_symptoms;
  TestResult test_result = TestResult::kNone;
  Day test_result_day = kNoDay;

  // The status as seen by the agent on `today`: pending or not-yet-delivered
  // results read as kNone.
  HealthStatus VisibleOn(Day today) const;
  bool operator==(const HealthStatus&) const = default;
};

// A qualifying contact (>= 15 minutes under 2 meters) between two agents on
// one day; `count` repeated encounters.
struct ContactEvent {
  Day day = 0;
  AgentId agent_a = 0;
  AgentId agent_b = 0;
  int count = 1;
  bool household = false;
};

struct InfectionEdge {
  AgentId infector = 0;
  AgentId infectee = 0;
  Day day = 0;
};

}  // namespace pct

#endif  // PCT_EPI_TYPES_H_
