#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posewatch/core_types.hpp"

namespace posewatch {

// ---- frame stream (JSON Lines) ----------------------------------------------
//
// {"frame_index": 12, "timestamp_s": 0.4,
//  "persons": [{"track_id": 3, "keypoints": [[x, y, c] x 17], "bbox": [x1, y1, x2, y2]}]}
//
// timestamp_s may be omitted, in which case it is frame_index / fps.

// Parses one line; structural problems throw MalformedRecord. The record is
// not validated.
FrameRecord parse_frame(std::string_view line, double fps = 30.0);
std::string format_frame(const FrameRecord& record);

// Incremental reader: skips blank lines, validates each record and enforces
// increasing timestamps. Throws MalformedRecord with the line number.
class FrameReader {
 public:
  FrameReader(std::istream& in, double fps);
  std::optional<FrameRecord> next();

 private:
  std::istream& in_;
  double fps_;
  std::size_t line_no_ = 0;
  std::optional<double> last_timestamp_;
};

std::vector<FrameRecord> read_frames(std::istream& in, double fps = 30.0);
std::vector<FrameRecord> read_frames_file(const std::string& path, double fps = 30.0);
void write_frames(std::ostream& out, std::span<const FrameRecord> frames);
void write_frames_file(const std::string& path, std::span<const FrameRecord> frames);

// ---- CSV ----------------------------------------------------------------------

// Round-trip decimal text (17 significant digits).
std::string format_number(double v);

struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
};

// Header "segment_id,<names...>", one row per segment.
void write_feature_csv(std::ostream& out, const FeatureTable& table);
// Throws MalformedRecord on shape or number errors.
FeatureTable read_feature_csv(std::istream& in);

// "segment_id,label" rows with labels 0/1.
void write_labels_csv(std::ostream& out, std::span<const std::string> ids, std::span<const int> labels);
std::map<std::string, int> read_labels_csv(std::istream& in);

std::vector<std::string> split_csv_line(std::string_view line);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace posewatch
