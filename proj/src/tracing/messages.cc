#include "pct/tracing/messages.h"

#include <algorithm>
#include <map>

#include "pct/common/check.h"

namespace pct {
namespace {

int SlotIndex(Day day) { return ((day % kWindowDays) + kWindowDays) % kWindowDays; }

bool InWindow(Day day, Day now) { return day <= now && day >= now - kMaxLookbackDays; }

absl::string_view KindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kEncounter:
      return "encounter";
    case MessageKind::kUpdate:
      return "update";
    case MessageKind::kPositiveNotice:
      return "positive_notice";
  }
  return "?";
}

}  // namespace

Json MessageToJson(const RiskMessage& m) {
  return Json{{"kind", std::string(KindName(m.kind))},
              {"encounter_day", m.encounter_day},
              {"new_level", m.new_level},
              {"old_level", m.old_level},
              {"transport_day", m.transport_day}};
}

void ContactLog::Record(Day day, Handle handle, int count) {
  Slot& slot = slots_[SlotIndex(day)];
  if (slot.day != day) {
    slot.day = day;
    slot.entries.clear();
  }
  slot.entries.push_back({handle, count});
}

std::span<const ContactLog::Entry> ContactLog::On(Day day) const {
  const Slot& slot = slots_[SlotIndex(day)];
  if (slot.day != day) return {};
  return slot.entries;
}

void ContactLog::Prune(Day now) {
  for (Slot& slot : slots_) {
    if (slot.day != kNoDay && !InWindow(slot.day, now)) {
      slot.day = kNoDay;
      slot.entries.clear();
    }
  }
}

std::vector<RiskMessage> BuildUpdateMessages(const ContactLog& log, Day now,
                                             std::span<const double> previous,
                                             std::span<const double> next,
                                             const RiskBinTable& bins) {
  PCT_CHECK(previous.size() == static_cast<size_t>(kWindowDays) &&
                next.size() == static_cast<size_t>(kWindowDays),
            "histories must cover the full window");
  std::vector<RiskMessage> out;
  for (int k = 0; k < kWindowDays; ++k) {
    const Day day = now - k;
    const auto contacts = log.On(day);
    if (contacts.empty()) continue;
    const RiskLevel old_level = bins.Level(previous[k]);
    const RiskLevel new_level = bins.Level(next[k]);
    if (old_level == new_level) continue;
    for (const ContactLog::Entry& e : contacts) {
      for (int c = 0; c < e.count; ++c) {
        out.push_back({MessageKind::kUpdate, day, new_level, old_level, now, e.handle});
      }
    }
  }
  return out;
}

ClusterWindow::Slot* ClusterWindow::SlotFor(Day day, Day now) {
  if (!InWindow(day, now)) return nullptr;
  Slot& slot = slots_[SlotIndex(day)];
  if (slot.day != day) {
    slot.day = day;
    slot.counts.fill(0);
  }
  return &slot;
}

void ClusterWindow::Apply(const RiskMessage& m, Day now) {
  if (m.kind == MessageKind::kPositiveNotice) return;
  Slot* slot = SlotFor(m.encounter_day, now);
  if (slot == nullptr) return;
  PCT_CHECK(m.new_level >= 0 && m.new_level < kNumRiskLevels, "risk level out of range");
  if (m.kind == MessageKind::kUpdate) {
    if (m.old_level >= 0 && m.old_level < kNumRiskLevels && slot->counts[m.old_level] > 0) {
      --slot->counts[m.old_level];
    } else {
      ++anomalies_;
    }
  }
  ++slot->counts[m.new_level];
}

void ClusterWindow::ApplyAll(std::vector<RiskMessage> messages, Day now) {
  std::stable_sort(messages.begin(), messages.end(),
                   [](const RiskMessage& a, const RiskMessage& b) {
                     if (a.transport_day != b.transport_day) {
                       return a.transport_day < b.transport_day;
                     }
                     return a.new_level < b.new_level;
                   });
  for (const RiskMessage& m : messages) Apply(m, now);
}

void ClusterWindow::Prune(Day now) {
  for (Slot& slot : slots_) {
    if (slot.day != kNoDay && !InWindow(slot.day, now)) {
      slot.day = kNoDay;
      slot.counts.fill(0);
    }
  }
}

std::vector<Cluster> ClusterWindow::Clusters(Day now) const {
  std::vector<Cluster> out;
  for (int k = 0; k < kWindowDays; ++k) {
    const Slot& slot = slots_[SlotIndex(now - k)];
    if (slot.day != now - k) continue;
    for (int level = 0; level < kNumRiskLevels; ++level) {
      if (slot.counts[level] > 0) out.push_back({k, level, slot.counts[level]});
    }
  }
  return out;
}

int ClusterWindow::CountOn(Day day) const {
  const Slot& slot = slots_[SlotIndex(day)];
  if (slot.day != day) return 0;
  int total = 0;
  for (int c : slot.counts) total += c;
  return total;
}

std::vector<Cluster> ReplayClusters(std::span<const RiskMessage> log, Day now) {
  std::map<std::pair<int, int>, int> counts;
  for (const RiskMessage& m : log) {
    if (m.kind == MessageKind::kPositiveNotice || !InWindow(m.encounter_day, now)) continue;
    const int offset = now - m.encounter_day;
    if (m.kind == MessageKind::kUpdate) {
      auto it = counts.find({offset, m.old_level});
      if (it != counts.end() && it->second > 0) --it->second;
    }
    ++counts[{offset, m.new_level}];
  }
  std::vector<Cluster> out;
  for (const auto& [key, count] : counts) {
    if (count > 0) out.push_back({key.first, key.second, count});
  }
  return out;
}

}  // namespace pct
