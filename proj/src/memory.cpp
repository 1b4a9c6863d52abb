#include "afeng/memory.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <json.hpp>

namespace afeng::memory {
namespace {

using nlohmann::json;

MemoryError corrupt(const std::string& why) {
  return MemoryError(MemoryError::Kind::Corrupt, "corrupt log record: " + why);
}

// Writes all of data at the end of the file; on failure the file is cut back
// to its previous length so no partial record survives.
void append_bytes(const std::filesystem::path& path, std::string_view data,
                  std::optional<std::uintmax_t> max_bytes) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw MemoryError(MemoryError::Kind::IoFailure,
                      "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  const off_t before = ::lseek(fd, 0, SEEK_END);
  if (max_bytes && static_cast<std::uintmax_t>(before) + data.size() > *max_bytes) {
    ::close(fd);
    throw MemoryError(MemoryError::Kind::StorageFull, "log quota exceeded: " + path.string());
  }
  std::size_t done = 0;
  int err = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      err = errno;
      break;
    }
    done += static_cast<std::size_t>(n);
  }
  if (err == 0 && ::fsync(fd) != 0 && errno != EINVAL) err = errno;
  if (err != 0) {
    const bool restored = before >= 0 && ::ftruncate(fd, before) == 0;
    ::close(fd);
    const auto kind = (err == ENOSPC || err == EDQUOT || err == EFBIG)
                          ? MemoryError::Kind::StorageFull
                          : MemoryError::Kind::IoFailure;
    throw MemoryError(kind, "append to " + path.string() + " failed: " + std::strerror(err) +
                                (restored ? "" : " (could not roll back partial write)"));
  }
  ::close(fd);
}

}  // namespace

std::string format_utc(std::int64_t ms) {
  std::int64_t secs = ms / 1000;
  std::int64_t frac = ms % 1000;
  if (frac < 0) {
    frac += 1000;
    secs -= 1;
  }
  const std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(frac));
  return buf;
}

std::string to_json_line(const InteractionRecord& rec) {
  json dist = json::object();
  for (Emotion e : kAllEmotions) dist[std::string(name_of(e))] = rec.distribution[e];
  const json j = {
      {"id", rec.id},
      {"timestamp_ms", rec.timestamp_ms},
      {"timestamp", format_utc(rec.timestamp_ms)},
      {"text", rec.text},
      {"distribution", dist},
      {"appraisal",
       {{"dominant", std::string(name_of(rec.appraisal.dominant))},
        {"intensity", rec.appraisal.intensity},
        {"valence", std::string(affect::to_string(rec.appraisal.valence))},
        {"agent_emotion", rec.appraisal.agent_emotion},
        {"event_goal", rec.appraisal.event_goal}}},
      {"behaviors",
       {{"goal", rec.behaviors.goal_behavior},
        {"self", rec.behaviors.self_behavior},
        {"other", rec.behaviors.other_behavior}}},
      {"bml_id", rec.bml_id},
  };
  return j.dump();
}

InteractionRecord from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw corrupt(e.what());
  }
  try {
    InteractionRecord rec;
    rec.id = j.at("id").get<std::uint64_t>();
    rec.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    rec.text = j.at("text").get<std::string>();
    std::array<double, kNumEmotions> probs{};
    const auto& dist = j.at("distribution");
    for (Emotion e : kAllEmotions) probs[index_of(e)] = dist.at(std::string(name_of(e))).get<double>();
    rec.distribution = affect::EmotionDistribution::from(probs);
    const auto& a = j.at("appraisal");
    const auto dominant = parse_emotion(a.at("dominant").get<std::string>());
    if (!dominant) throw corrupt("unknown dominant emotion");
    rec.appraisal.dominant = *dominant;
    rec.appraisal.intensity = a.at("intensity").get<double>();
    rec.appraisal.valence = affect::valence_from_string(a.at("valence").get<std::string>());
    rec.appraisal.agent_emotion = a.at("agent_emotion").get<std::string>();
    rec.appraisal.event_goal = a.at("event_goal").get<std::string>();
    const auto& b = j.at("behaviors");
    rec.behaviors.goal_behavior = b.at("goal").get<std::string>();
    rec.behaviors.self_behavior = b.at("self").get<std::string>();
    rec.behaviors.other_behavior = b.at("other").get<std::string>();
    rec.bml_id = j.at("bml_id").get<std::string>();
    return rec;
  } catch (const json::exception& e) {
    throw corrupt(e.what());
  } catch (const std::invalid_argument& e) {
    throw corrupt(e.what());
  } catch (const affect::AffectError& e) {
    throw corrupt(e.what());
  }
}

SessionBuffer::SessionBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("session buffer capacity must be positive");
}

void SessionBuffer::push(InteractionRecord rec) {
  if (!records_.empty() && rec.id <= records_.front().id) {
    throw MemoryError(MemoryError::Kind::DuplicateId,
                      "record id " + std::to_string(rec.id) + " is not newer than " +
                          std::to_string(records_.front().id));
  }
  records_.push_front(std::move(rec));
  if (records_.size() > capacity_) records_.pop_back();
}

std::vector<InteractionRecord> SessionBuffer::recent(std::size_t n) const {
  const auto k = std::min(n, records_.size());
  return {records_.begin(), records_.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::optional<std::uint64_t> SessionBuffer::newest_id() const {
  if (records_.empty()) return std::nullopt;
  return records_.front().id;
}

SessionBuffer SessionBuffer::from_log(const std::vector<InteractionRecord>& records,
                                      std::size_t capacity) {
  SessionBuffer buf(capacity);
  const auto skip = records.size() > capacity ? records.size() - capacity : 0;
  for (auto i = skip; i < records.size(); ++i) buf.push(records[i]);
  return buf;
}

ReplayResult replay_log(const std::filesystem::path& path) {
  ReplayResult out;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MemoryError(MemoryError::Kind::IoFailure, "cannot read " + path.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (content.empty()) return out;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::uint64_t last = 0;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    std::string_view line(content.data() + pos, (terminated ? nl : content.size()) - pos);
    pos = terminated ? nl + 1 : content.size();
    ++line_no;

    if (line_no == 1) {
      if (line != kLogHeader) {
        throw MemoryError(MemoryError::Kind::BadHeader,
                          path.string() + ": missing '" + std::string(kLogHeader) + "' header");
      }
      continue;
    }
    if (line.empty()) continue;
    try {
      auto rec = from_json_line(line);
      if (rec.id <= last) {
        out.warnings.push_back("line " + std::to_string(line_no) + ": id " +
                               std::to_string(rec.id) + " out of order, skipped");
        continue;
      }
      if (!terminated) {
        // A complete object without its newline is still a whole record.
        out.warnings.push_back("line " + std::to_string(line_no) + ": missing final newline");
      }
      last = rec.id;
      out.records.push_back(std::move(rec));
    } catch (const MemoryError& e) {
      out.warnings.push_back("line " + std::to_string(line_no) +
                             (terminated ? ": unreadable record ignored: "
                                         : ": partial trailing record ignored: ") +
                             e.what());
    }
  }
  return out;
}

LongTermStore::LongTermStore(std::filesystem::path log_path, std::optional<std::uintmax_t> max_bytes)
    : path_(std::move(log_path)), max_bytes_(max_bytes) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path_, ec) || std::filesystem::file_size(path_, ec) == 0;
  if (fresh) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    append_bytes(path_, std::string(kLogHeader) + "\n", max_bytes_);
    return;
  }
  const auto replayed = replay_log(path_);
  if (!replayed.records.empty()) last_id_ = replayed.records.back().id;

  std::ifstream in(path_, std::ios::binary | std::ios::ate);
  in.seekg(-1, std::ios::end);
  char tail = '\n';
  in.get(tail);
  if (tail != '\n') append_bytes(path_, "\n", std::nullopt);
}

void LongTermStore::append(const InteractionRecord& rec) {
  std::lock_guard lock(mutex_);
  if (rec.id <= last_id_) {
    throw MemoryError(MemoryError::Kind::DuplicateId,
                      "record id " + std::to_string(rec.id) + " is not newer than " +
                          std::to_string(last_id_));
  }
  append_bytes(path_, to_json_line(rec) + "\n", max_bytes_);
  last_id_ = rec.id;
}

ReplayResult LongTermStore::replay() const {
  std::lock_guard lock(mutex_);
  return replay_log(path_);
}

std::uint64_t LongTermStore::last_id() const {
  std::lock_guard lock(mutex_);
  return last_id_;
}

void record(LongTermStore& store, SessionBuffer& buffer, const InteractionRecord& rec) {
  if (const auto newest = buffer.newest_id(); newest && rec.id <= *newest) {
    throw MemoryError(MemoryError::Kind::DuplicateId,
                      "record id " + std::to_string(rec.id) + " is not newer than " +
                          std::to_string(*newest));
  }
  store.append(rec);
  buffer.push(rec);
}

}  // namespace afeng::memory
