#ifndef PCT_TRACING_NETWORK_H_
#define PCT_TRACING_NETWORK_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "pct/epi/types.h"
#include "pct/tracing/messages.h"

namespace pct {

// Processing ticks per simulated day. Messages routed in one tick are
// applied at the start of the next.
inline constexpr int kTicksPerDay = 1;

// The in-simulator transport: per-agent contact logs, outboxes, inboxes
// and cluster windows, plus the handle table that routes messages. Only
// agents with the app take part.
class TracingNetwork {
 public:
  TracingNetwork(std::vector<uint8_t> app_user, uint64_t seed);

  // Applies messages routed in earlier ticks and drops state older than
  // the window.
  void BeginTick(Day now);

  // Logs the app-to-app contacts of `day` and issues a fresh handle for
  // each side of each pair.
  void RecordContacts(Day day, std::span<const ContactEvent> contacts);

  // One encounter message per encounter recorded by `id` on `day`.
  void SendEncounterMessages(AgentId id, Day day, RiskLevel level, Day now);
  void Send(std::span<const RiskMessage> messages);
  // Binary tracing notice to every contact of the last 15 days.
  void SendPositiveNotices(AgentId id, Day now);

  // Resolves the handles of everything sent this tick. Risk messages land
  // in inboxes; positive notices take effect immediately.
  void Route(Day now);

  std::vector<Cluster> Clusters(AgentId id, Day now) const {
    return windows_[id].Clusters(now);
  }
  const ContactLog& contact_log(AgentId id) const { return logs_[id]; }
  const ClusterWindow& window(AgentId id) const { return windows_[id]; }
  Day last_notice_day(AgentId id) const { return last_notice_[id]; }
  bool app_user(AgentId id) const { return app_user_[id] != 0; }

  long messages_routed() const { return messages_routed_; }
  long unroutable() const { return unroutable_; }
  long anomalies() const;

  // Optional JSONL trace of every routed message.
  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  std::vector<uint8_t> app_user_;
  uint64_t seed_;
  std::vector<ContactLog> logs_;
  std::vector<ClusterWindow> windows_;
  std::vector<std::vector<RiskMessage>> inbox_;
  std::vector<Day> last_notice_;
  std::vector<RiskMessage> outbox_;
  std::unordered_map<Handle, AgentId> routes_;
  std::vector<std::pair<Day, std::vector<Handle>>> handles_by_day_;
  long messages_routed_ = 0;
  long unroutable_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace pct

#endif  // PCT_TRACING_NETWORK_H_
