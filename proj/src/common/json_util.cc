#include "pct/common/json_util.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_format.h"

namespace pct {

ObjectReader::ObjectReader(const Json& j, std::string path)
    : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) {
    status_ = absl::InvalidArgumentError(
        absl::StrCat(path_.empty() ? "<root>" : path_, ": expected an object"));
  }
}

std::string ObjectReader::KeyPath(absl::string_view key) const {
  return path_.empty() ? std::string(key) : absl::StrCat(path_, ".", key);
}

const Json* ObjectReader::Lookup(absl::string_view key) {
  if (!j_.is_object()) return nullptr;
  auto it = j_.find(std::string(key));
  if (it == j_.end()) return nullptr;
  seen_.emplace(key);
  return &*it;
}

bool ObjectReader::Has(absl::string_view key) const {
  return j_.is_object() && j_.contains(std::string(key));
}

void ObjectReader::Fail(absl::string_view key, absl::string_view message) {
  if (!status_.ok()) return;
  status_ = absl::InvalidArgumentError(absl::StrCat(KeyPath(key), ": ", message));
}

absl::Status ObjectReader::Finish() {
  if (!status_.ok()) return status_;
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!seen_.contains(it.key())) {
      return absl::InvalidArgumentError(
          absl::StrCat(KeyPath(it.key()), ": unknown key"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Json> ParseJson(absl::string_view text, absl::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // nlohmann reports "at line L, column C" inside what().
    return absl::InvalidArgumentError(absl::StrCat(source, ": ", e.what()));
  }
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::InternalError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

int LineOfKey(absl::string_view text, absl::string_view key) {
  const std::string needle = absl::StrCat("\"", key, "\"");
  size_t pos = text.find(needle);
  if (pos == absl::string_view::npos) return 0;
  int line = 1;
  for (size_t i = 0; i < pos; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

absl::Status AttachLine(const absl::Status& status, absl::string_view text,
                        absl::string_view source) {
  if (status.ok()) return status;
  absl::string_view msg = status.message();
  size_t colon = msg.find(": ");
  absl::string_view path = colon == absl::string_view::npos ? "" : msg.substr(0, colon);
  size_t dot = path.rfind('.');
  absl::string_view key = dot == absl::string_view::npos ? path : path.substr(dot + 1);
  int line = key.empty() ? 0 : LineOfKey(text, key);
  if (line == 0) return absl::Status(status.code(), absl::StrCat(source, ": ", msg));
  return absl::Status(status.code(), absl::StrCat(source, ":", line, ": ", msg));
}

std::string Fnv1aHex(absl::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", h);
}

}  // namespace pct
