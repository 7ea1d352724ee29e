#ifndef PCT_TRACING_MESSAGES_H_
#define PCT_TRACING_MESSAGES_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pct/common/json_util.h"
#include "pct/epi/types.h"
#include "pct/tracing/risk.h"

namespace pct {

// Opaque routing handle. Each side of a contact holds a fresh handle per
// (pair, day); only the router can resolve it to a mailbox.
using Handle = uint64_t;

enum class MessageKind : uint8_t {
  // First message for an encounter, carrying the sender's level that day.
  kEncounter = 0,
  // Replaces old_level by new_level for one earlier encounter.
  kUpdate = 1,
  // Binary tracing: the sender tested positive.
  kPositiveNotice = 2,
};

struct RiskMessage {
  MessageKind kind = MessageKind::kEncounter;
  Day encounter_day = 0;
  RiskLevel new_level = 0;
  RiskLevel old_level = kNoRiskLevel;
  Day transport_day = 0;
  Handle handle = 0;
};

Json MessageToJson(const RiskMessage& m);

// What a receiver keeps of its messages: day offset, level and count.
// There is deliberately no field that could identify a sender.
struct Cluster {
  int day_offset = 0;
  RiskLevel risk_level = 0;
  int count = 1;
  bool operator==(const Cluster&) const = default;
};

// One agent's record of its own app-to-app contacts over the window: for
// each day, the handles reaching the other party and the encounter counts.
class ContactLog {
 public:
  struct Entry {
    Handle handle = 0;
    int count = 1;
  };

  void Record(Day day, Handle handle, int count);
  // Contacts recorded on `day`; empty when outside the retained window.
  std::span<const Entry> On(Day day) const;
  // Drops days older than now - kMaxLookbackDays.
  void Prune(Day now);

 private:
  struct Slot {
    Day day = kNoDay;
    std::vector<Entry> entries;
  };
  std::array<Slot, kWindowDays> slots_;
};

// Update messages for past contacts whose quantized level changed.
// `previous` and `next` are indexed by day offset from `now` (entry k is
// day now - k); `previous` must already be aligned to today's offsets.
// Every recorded encounter on a changed day gets one message.
std::vector<RiskMessage> BuildUpdateMessages(const ContactLog& log, Day now,
                                             std::span<const double> previous,
                                             std::span<const double> next,
                                             const RiskBinTable& bins);

// Receiver-side clustering of risk messages by (encounter day, level).
class ClusterWindow {
 public:
  // Applies one received message. Messages for days outside the window are
  // dropped. An update whose (day, old_level) cluster is empty counts as a
  // fresh message at new_level and is recorded as an anomaly.
  void Apply(const RiskMessage& message, Day now);
  // Applies a batch in delivery order: ascending transport_day, then
  // ascending new_level, so the highest level wins a tie.
  void ApplyAll(std::vector<RiskMessage> messages, Day now);
  // Clears days older than now - kMaxLookbackDays.
  void Prune(Day now);

  // Clusters sorted by (day_offset, risk_level), counts > 0 only.
  std::vector<Cluster> Clusters(Day now) const;
  int CountOn(Day day) const;
  long anomalies() const { return anomalies_; }

 private:
  struct Slot {
    Day day = kNoDay;
    std::array<int, kNumRiskLevels> counts{};
  };
  Slot* SlotFor(Day day, Day now);

  std::array<Slot, kWindowDays> slots_;
  long anomalies_ = 0;
};

// Reference implementation used by tests: replays a message log from
// scratch into (day_offset, level) counts.
std::vector<Cluster> ReplayClusters(std::span<const RiskMessage> log, Day now);

}  // namespace pct

#endif  // PCT_TRACING_MESSAGES_H_
