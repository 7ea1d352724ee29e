#ifndef PCT_COMMON_JSON_UTIL_H_
#define PCT_COMMON_JSON_UTIL_H_

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace pct {

using Json = nlohmann::json;

// Reads the fields of one JSON object and rejects keys nobody asked for.
// Errors are sticky: the first failure is reported by Finish(). Error
// messages start with the dotted key path so callers can attach a line
// number (see AttachLine).
//
//   ObjectReader r(j, "world");
//   r.Read("agents", &cfg.agents).Read("days", &cfg.days);
//   if (cfg.agents <= 0) r.Fail("agents", "must be positive");
//   return r.Finish();
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  template <typename T>
  ObjectReader& Read(absl::string_view key, T* out) {
    const Json* v = Lookup(key);
    if (v == nullptr) return *this;
    try {
      *out = v->get<T>();
    } catch (const Json::exception& e) {
      Fail(key, absl::StrCat("wrong type (", e.what(), ")"));
    }
    return *this;
  }

  // Returns the member (marking it consumed) or nullptr when absent.
  const Json* Lookup(absl::string_view key);

  bool Has(absl::string_view key) const;
  void Fail(absl::string_view key, absl::string_view message);
  void Check(bool condition, absl::string_view key, absl::string_view message) {
    if (!condition) Fail(key, message);
  }
  std::string KeyPath(absl::string_view key) const;

  bool ok() const { return status_.ok(); }
  absl::Status Finish();

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
  absl::Status status_;
};

absl::StatusOr<Json> ParseJson(absl::string_view text, absl::string_view source);
absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

// 1-based line of the first occurrence of "key" in a JSON text, 0 if absent.
int LineOfKey(absl::string_view text, absl::string_view key);

// Prefixes a config error with "<source>:<line>: " using the last component
// of the key path at the start of the message.
absl::Status AttachLine(const absl::Status& status, absl::string_view text,
                        absl::string_view source);

// FNV-1a, 64 bit, rendered as 16 hex digits.
std::string Fnv1aHex(absl::string_view data);

}  // namespace pct

#endif  // PCT_COMMON_JSON_UTIL_H_
