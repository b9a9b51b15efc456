#include "posewatch/sink.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "posewatch/error.hpp"

namespace posewatch {

std::string format_alert(const PairEvent& event) {
  nlohmann::json j;
  j["timestamp_s"] = event.event.timestamp;
  j["frame_index"] = event.event.frame_index;
  j["pair"] = event.pair.to_string();
  j["kind"] = to_string(event.event.kind);
  j["window_count"] = event.event.window_count;
  j["probability"] = event.probability;
  return j.dump();
}

std::string format_evidence(const PairEvent& event, const EvidenceWindow& window, const std::string& source) {
  nlohmann::json j;
  j["pair"] = event.pair.to_string();
  j["trigger_timestamp_s"] = event.event.timestamp;
  j["trigger_frame_index"] = event.event.frame_index;
  j["window_count"] = event.event.window_count;
  j["probability"] = event.probability;
  j["start_s"] = window.start;
  j["end_s"] = window.end;
  j["first_frame"] = window.first_frame;
  j["last_frame"] = window.last_frame;
  j["source"] = source;
  return j.dump(2) + "\n";
}

HttpTarget parse_http_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw Error(ErrorCode::kInvalidConfig, "sink URL must start with http:// (got '" + url + "')");
  }
  const auto slash = url.find('/', scheme.size());
  HttpTarget t;
  t.origin = url.substr(0, slash);
  t.path = slash == std::string::npos ? "/" : url.substr(slash);
  if (t.origin.size() == scheme.size()) throw Error(ErrorCode::kInvalidConfig, "sink URL has no host");
  return t;
}

HttpSink::HttpSink(const std::string& url, int retries, double backoff_s, double timeout_s)
    : target_(parse_http_url(url)), retries_(retries), backoff_s_(backoff_s), timeout_s_(timeout_s) {
  if (retries_ < 0 || backoff_s_ < 0.0 || !(timeout_s_ > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "sink retries/backoff must be >= 0 and timeout > 0");
  }
}

void HttpSink::post(const std::string& body) {
  httplib::Client client(target_.origin);
  const auto timeout = std::chrono::duration<double>(timeout_s_);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::duration<double>(backoff_s_));
    ++attempts_;
    auto res = client.Post(target_.path, body, "application/json");
    if (res && res->status >= 200 && res->status < 300) return;
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
  }
  throw Error(ErrorCode::kSinkUnreachable,
              target_.origin + target_.path + " after " + std::to_string(retries_ + 1) + " attempts: " + last_error);
}

}  // namespace posewatch
