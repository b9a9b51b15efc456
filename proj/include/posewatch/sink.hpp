#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "posewatch/pipeline.hpp"

namespace posewatch {

// {"frame_index", "kind", "pair", "probability", "timestamp_s", "window_count"}
std::string format_alert(const PairEvent& event);

// Evidence manifest for one activation.
std::string format_evidence(const PairEvent& event, const EvidenceWindow& window, const std::string& source);

struct HttpTarget {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

// Only plain http is supported. Throws InvalidConfig.
HttpTarget parse_http_url(const std::string& url);

// POSTs each alert as JSON. A delivery gets 1 + retries attempts with a
// fixed backoff between them; exhausting them throws SinkUnreachable.
class HttpSink {
 public:
  HttpSink(const std::string& url, int retries = 2, double backoff_s = 1.0, double timeout_s = 2.0);
  void post(const std::string& body);
  int attempts_made() const { return attempts_; }

 private:
  HttpTarget target_;
  int retries_;
  double backoff_s_;
  double timeout_s_;
  int attempts_ = 0;
};

}  // namespace posewatch
