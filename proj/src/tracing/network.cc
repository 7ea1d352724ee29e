#include "pct/tracing/network.h"

#include <algorithm>

#include "pct/common/rng.h"

namespace pct {

TracingNetwork::TracingNetwork(std::vector<uint8_t> app_user, uint64_t seed)
    : app_user_(std::move(app_user)),
      seed_(seed),
      logs_(app_user_.size()),
      windows_(app_user_.size()),
      inbox_(app_user_.size()),
      last_notice_(app_user_.size(), kNoDay) {}

void TracingNetwork::BeginTick(Day now) {
  for (size_t id = 0; id < app_user_.size(); ++id) {
    if (!app_user_[id]) continue;
    windows_[id].Prune(now);
    logs_[id].Prune(now);
    if (!inbox_[id].empty()) {
      windows_[id].ApplyAll(std::move(inbox_[id]), now);
      inbox_[id].clear();
    }
  }
  const Day oldest = now - kMaxLookbackDays;
  auto stale = [&](const auto& entry) { return entry.first < oldest; };
  for (const auto& [day, handles] : handles_by_day_) {
    if (day >= oldest) continue;
    for (Handle h : handles) routes_.erase(h);
  }
  handles_by_day_.erase(std::remove_if(handles_by_day_.begin(), handles_by_day_.end(), stale),
                        handles_by_day_.end());
}

void TracingNetwork::RecordContacts(Day day, std::span<const ContactEvent> contacts) {
  std::vector<Handle> issued;
  for (const ContactEvent& e : contacts) {
    if (!app_user_[e.agent_a] || !app_user_[e.agent_b]) continue;
    const auto a = static_cast<uint64_t>(e.agent_a);
    const auto b = static_cast<uint64_t>(e.agent_b);
    const auto d = static_cast<uint64_t>(day);
    // Handle held by a that reaches b, and the reverse.
    const Handle to_b = DeriveSeed(seed_, Stream::kHandles, {d, a, b});
    const Handle to_a = DeriveSeed(seed_, Stream::kHandles, {d, b, a});
    routes_[to_b] = e.agent_b;
    routes_[to_a] = e.agent_a;
    issued.push_back(to_b);
    issued.push_back(to_a);
    logs_[e.agent_a].Record(day, to_b, e.count);
    logs_[e.agent_b].Record(day, to_a, e.count);
  }
  handles_by_day_.push_back({day, std::move(issued)});
}

void TracingNetwork::SendEncounterMessages(AgentId id, Day day, RiskLevel level, Day now) {
  for (const ContactLog::Entry& e : logs_[id].On(day)) {
    for (int c = 0; c < e.count; ++c) {
      outbox_.push_back({MessageKind::kEncounter, day, level, kNoRiskLevel, now, e.handle});
    }
  }
}

void TracingNetwork::Send(std::span<const RiskMessage> messages) {
  outbox_.insert(outbox_.end(), messages.begin(), messages.end());
}

void TracingNetwork::SendPositiveNotices(AgentId id, Day now) {
  for (Day day = now - kMaxLookbackDays; day <= now; ++day) {
    for (const ContactLog::Entry& e : logs_[id].On(day)) {
      outbox_.push_back({MessageKind::kPositiveNotice, day, 0, kNoRiskLevel, now, e.handle});
    }
  }
}

void TracingNetwork::Route(Day now) {
  for (const RiskMessage& m : outbox_) {
    auto it = routes_.find(m.handle);
    if (it == routes_.end()) {
      ++unroutable_;
      continue;
    }
    ++messages_routed_;
    if (trace_ != nullptr) {
      Json j = MessageToJson(m);
      j["day"] = now;
      (*trace_) << j.dump() << '\n';
    }
    if (m.kind == MessageKind::kPositiveNotice) {
      last_notice_[it->second] = std::max(last_notice_[it->second], now);
    } else {
      inbox_[it->second].push_back(m);
    }
  }
  outbox_.clear();
}

long TracingNetwork::anomalies() const {
  long total = 0;
  for (const ClusterWindow& w : windows_) total += w.anomalies();
  return total;
}

}  // namespace pct
