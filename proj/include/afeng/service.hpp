#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "afeng/affect.hpp"
#include "afeng/memory.hpp"
#include "afeng/pipeline.hpp"

namespace afeng::service {

inline constexpr std::size_t kMaxTextLength = 1000;  // code points

struct InteractResponse {
  std::string text;
  affect::EmotionDistribution distribution;
  affect::AppraisalResult appraisal;
  affect::BehaviorSet behaviors;
  std::string bml;
  std::uint64_t record_id = 0;
  std::int64_t timestamp_ms = 0;
};

nlohmann::json to_json(const InteractResponse& r);
nlohmann::json to_json(const memory::InteractionRecord& r);

// Request-level failure carrying its HTTP status.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& msg)
      : std::runtime_error(msg), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

// Appraisal, behaviors and canonical BML for one already-classified text.
// The BML document id is "bml-<record_id>".
InteractResponse respond(std::string text, const affect::EmotionDistribution& dist,
                         std::uint64_t record_id, std::int64_t timestamp_ms,
                         const std::string& character = "agent");

using Clock = std::function<std::int64_t()>;  // UTC milliseconds

std::int64_t system_clock_ms();

struct EngineOptions {
  std::size_t buffer_capacity = 10;
  // Recency blend of the appraised distribution with the last
  // `blend_window` recorded distributions. 0 disables it.
  double blend_weight = 0.0;
  std::size_t blend_window = 5;
  std::string character = "agent";
  Clock clock = system_clock_ms;
};

// Sentence -> distribution -> appraisal -> behaviors -> BML -> memory.
class Engine {
 public:
  // The long-term log lives at `log_path`; its records seed the session
  // buffer. A missing classifier makes interact() fail with 503.
  Engine(std::optional<pipeline::Classifier> classifier, std::filesystem::path log_path,
         EngineOptions options = {});

  InteractResponse interact(std::string_view text);
  std::vector<memory::InteractionRecord> history(std::size_t n) const;
  nlohmann::json model_info() const;

  bool model_loaded() const { return classifier_.has_value(); }
  const std::vector<std::string>& replay_warnings() const { return replay_warnings_; }

 private:
  std::optional<pipeline::Classifier> classifier_;
  std::string checkpoint_hash_;
  EngineOptions options_;
  memory::LongTermStore store_;
  memory::SessionBuffer buffer_;
  std::vector<std::string> replay_warnings_;
  mutable std::mutex mutex_;
};

// Number of UTF-8 code points (invalid bytes count as one each).
std::size_t utf8_length(std::string_view s);

}  // namespace afeng::service
