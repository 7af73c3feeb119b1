#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "nomiclaw/common.hpp"

namespace nomiclaw {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct BackendParams {
  double temperature = 0.7;
  std::map<std::string, std::string> extra_options;
  int max_retries = 3;  // transport retries after the first attempt
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds base_backoff{250};  // doubles per retry
};

/// Shared token budget pacing requests to one endpoint. acquire() blocks
/// until the next slot; slots are spaced 1/rate seconds apart. Safe for
/// concurrent use.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();
  double rate() const { return rate_; }

 private:
  double rate_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_slot_;
};

/// Abstract chat-completion transport. The HTTP client implements it;
/// tests substitute canned responders.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual Result<std::string> complete(const ModelId& model,
                                       const std::vector<ChatMessage>& messages,
                                       const BackendParams& params) = 0;
};

/// Client for a local model server's JSON chat endpoint (POST
/// {base_url}/api/chat with model/messages/options, non-streaming; the
/// assistant text comes back under message.content). Retries transport
/// errors and non-200 statuses with exponential backoff until the retry
/// budget is spent. Safe for concurrent use across parallel games.
class BackendClient : public ChatTransport {
 public:
  explicit BackendClient(std::string base_url,
                         std::shared_ptr<RateLimiter> limiter = nullptr);

  Result<std::string> complete(const ModelId& model,
                               const std::vector<ChatMessage>& messages,
                               const BackendParams& params) override;

  const std::string& base_url() const { return base_url_; }

  /// Resolves the endpoint: explicit argument wins, then NOMIC_BACKEND_URL,
  /// then the conventional local default.
  static std::string resolve_base_url(const std::string& explicit_url = "");

 private:
  std::string base_url_;
  std::shared_ptr<RateLimiter> limiter_;
};

}  // namespace nomiclaw
