#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "afeng/affect.hpp"

namespace afeng::memory {

struct InteractionRecord {
  std::uint64_t id = 0;
  std::int64_t timestamp_ms = 0;  // UTC, milliseconds since the Unix epoch
  std::string text;
  affect::EmotionDistribution distribution;
  affect::AppraisalResult appraisal;
  affect::BehaviorSet behaviors;
  std::string bml_id;

  bool operator==(const InteractionRecord&) const = default;
};

// "2026-10-16T09:30:00.125Z"
std::string format_utc(std::int64_t timestamp_ms);

std::string to_json_line(const InteractionRecord& rec);
// Throws MemoryError(Corrupt) on any schema violation.
InteractionRecord from_json_line(std::string_view line);

class MemoryError : public std::runtime_error {
 public:
  enum class Kind { DuplicateId, StorageFull, IoFailure, BadHeader, Corrupt };
  MemoryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::string_view kLogHeader = "#afeng-log v1";

// Bounded most-recent-first view over the latest interactions.
class SessionBuffer {
 public:
  explicit SessionBuffer(std::size_t capacity = 10);

  // Throws DuplicateId unless rec.id exceeds every id already held.
  void push(InteractionRecord rec);
  std::vector<InteractionRecord> recent(std::size_t n) const;
  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::optional<std::uint64_t> newest_id() const;

  // Rebuilds the buffer from records in ascending id order (a log replay).
  static SessionBuffer from_log(const std::vector<InteractionRecord>& records,
                                std::size_t capacity = 10);

 private:
  std::size_t capacity_;
  std::deque<InteractionRecord> records_;
};

struct ReplayResult {
  std::vector<InteractionRecord> records;  // ascending id order
  std::vector<std::string> warnings;
};

// Append-only JSON-lines log. One writer at a time per process; appends are
// serialized internally so the store can be shared across request threads.
class LongTermStore {
 public:
  // Creates the file with its header line when absent or empty. A trailing
  // partial line left by a crash is terminated so later appends start on a
  // fresh line. max_bytes, when set, caps the file size (StorageFull).
  explicit LongTermStore(std::filesystem::path log_path,
                         std::optional<std::uintmax_t> max_bytes = std::nullopt);

  void append(const InteractionRecord& rec);
  ReplayResult replay() const;

  std::uint64_t last_id() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::optional<std::uintmax_t> max_bytes_;
  std::uint64_t last_id_ = 0;
  mutable std::mutex mutex_;
};

// Replays the log at path (throws BadHeader on a foreign file).
ReplayResult replay_log(const std::filesystem::path& path);

// Persists then buffers. The buffer is only touched once the log append
// succeeded, keeping it a recency suffix of the log.
void record(LongTermStore& store, SessionBuffer& buffer, const InteractionRecord& rec);

}  // namespace afeng::memory
