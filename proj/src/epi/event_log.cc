#include "pct/epi/event_log.h"

namespace pct {

void EventLog::Record(Day day, absl::string_view type, Json payload) {
  payload["day"] = day;
  payload["type"] = type;
  (*out_) << payload.dump() << '\n';
  ++records_;
}

}  // namespace pct
