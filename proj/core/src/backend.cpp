#include "nomiclaw/backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace nomiclaw {

namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string scheme_host_port;  // httplib::Client target
  std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& base_url) {
  std::string url = base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  auto scheme_end = url.find("://");
  std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RateLimiter::RateLimiter(double requests_per_second)
    : rate_(requests_per_second), next_slot_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto now = std::chrono::steady_clock::now();
    slot = std::max(next_slot_, now);
    next_slot_ = slot + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(1.0 / rate_));
  }
  std::this_thread::sleep_until(slot);
}

BackendClient::BackendClient(std::string base_url,
                             std::shared_ptr<RateLimiter> limiter)
    : base_url_(std::move(base_url)), limiter_(std::move(limiter)) {}

std::string BackendClient::resolve_base_url(const std::string& explicit_url) {
  if (!explicit_url.empty()) return explicit_url;
  if (const char* env = std::getenv("NOMIC_BACKEND_URL"); env && *env) return env;
  return "http://127.0.0.1:11434";
}

Result<std::string> BackendClient::complete(const ModelId& model,
                                            const std::vector<ChatMessage>& messages,
                                            const BackendParams& params) {
  json body;
  body["model"] = model;
  body["stream"] = false;
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(msgs);
  json options;
  options["temperature"] = params.temperature;
  for (const auto& [k, v] : params.extra_options) options[k] = v;
  body["options"] = std::move(options);
  const std::string payload = body.dump();

  ParsedUrl url = parse_base_url(base_url_);
  std::string last_error = "no attempt made";
  auto backoff = params.base_backoff;

  for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    if (limiter_) limiter_->acquire();

    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(params.timeout);
    client.set_read_timeout(params.timeout);
    client.set_write_timeout(params.timeout);

    auto res = client.Post(url.path_prefix + "/api/chat", payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded())
      return Result<std::string>::fail("backend returned invalid JSON");
    if (reply.contains("message") && reply["message"].contains("content") &&
        reply["message"]["content"].is_string())
      return Result<std::string>::ok(reply["message"]["content"].get<std::string>());
    return Result<std::string>::fail("backend reply lacks message.content");
  }
  return Result<std::string>::fail("backend unreachable after " +
                                   std::to_string(params.max_retries + 1) +
                                   " attempts (" + last_error + ")");
}

}  // namespace nomiclaw
