#ifndef PCT_EPI_EVENT_LOG_H_
#define PCT_EPI_EVENT_LOG_H_

#include <ostream>
#include "absl/strings/string_view.h"

#include "pct/common/json_util.h"
#include "pct/epi/types.h"

namespace pct {

// JSONL sink, one record per line: {"day":d,"type":"...",...payload}.
// The record types and their fields are listed in docs/event_log.md.
class EventLog {
 public:
  explicit EventLog(std::ostream* out) : out_(out) {}

  void Record(Day day, absl::string_view type, Json payload);
  long records() const { return records_; }

 private:
  std::ostream* out_;
  long records_ = 0;
};

}  // namespace pct

#endif  // PCT_EPI_EVENT_LOG_H_
