#include "posewatch/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "posewatch/error.hpp"

namespace posewatch {

namespace {

using nlohmann::json;

double number_field(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::kMalformedRecord, std::string(what) + " is not a number");
  return j.get<double>();
}

Skeleton parse_skeleton(const json& person) {
  Skeleton s;
  const auto& kps = person.at("keypoints");
  if (!kps.is_array() || kps.size() != kNumKeypoints) {
    throw Error(ErrorCode::kMalformedRecord,
                "expected " + std::to_string(kNumKeypoints) + " keypoints, got " +
                    (kps.is_array() ? std::to_string(kps.size()) : std::string("non-array")));
  }
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    const auto& kp = kps[i];
    if (!kp.is_array() || kp.size() != 3) {
      throw Error(ErrorCode::kMalformedRecord, "keypoint " + std::to_string(i) + " is not [x, y, c]");
    }
    s.keypoints[i] = {number_field(kp[0], "x"), number_field(kp[1], "y"),
                      number_field(kp[2], "confidence")};
  }
  const auto& bb = person.at("bbox");
  if (!bb.is_array() || bb.size() != 4) throw Error(ErrorCode::kMalformedRecord, "bbox is not [x1, y1, x2, y2]");
  s.bbox = {number_field(bb[0], "bbox"), number_field(bb[1], "bbox"), number_field(bb[2], "bbox"),
            number_field(bb[3], "bbox")};
  return s;
}

}  // namespace

FrameRecord parse_frame(std::string_view line, double fps) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
  try {
    if (!j.is_object()) throw Error(ErrorCode::kMalformedRecord, "frame is not an object");
    FrameRecord r;
    const auto& idx = j.at("frame_index");
    if (!idx.is_number_integer()) throw Error(ErrorCode::kMalformedRecord, "frame_index is not an integer");
    r.frame_index = idx.get<std::int64_t>();
    if (j.contains("timestamp_s") && !j["timestamp_s"].is_null()) {
      r.timestamp = number_field(j["timestamp_s"], "timestamp_s");
    } else {
      r.timestamp = static_cast<double>(r.frame_index) / fps;
    }
    const auto& persons = j.at("persons");
    if (!persons.is_array()) throw Error(ErrorCode::kMalformedRecord, "persons is not an array");
    for (const auto& p : persons) {
      const auto& id = p.at("track_id");
      if (!id.is_number_integer()) throw Error(ErrorCode::kMalformedRecord, "track_id is not an integer");
      r.persons.push_back({id.get<std::int64_t>(), parse_skeleton(p)});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
}

std::string format_frame(const FrameRecord& record) {
  json j;
  j["frame_index"] = record.frame_index;
  j["timestamp_s"] = record.timestamp;
  auto persons = json::array();
  for (const auto& p : record.persons) {
    json jp;
    jp["track_id"] = p.track_id;
    auto kps = json::array();
    for (const auto& kp : p.skeleton.keypoints) kps.push_back({kp.x, kp.y, kp.confidence});
    jp["keypoints"] = std::move(kps);
    const auto& b = p.skeleton.bbox;
    jp["bbox"] = {b.x1, b.y1, b.x2, b.y2};
    persons.push_back(std::move(jp));
  }
  j["persons"] = std::move(persons);
  return j.dump();
}

FrameReader::FrameReader(std::istream& in, double fps) : in_(in), fps_(fps) {}

std::optional<FrameRecord> FrameReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = validate_frame(parse_frame(line, fps_), last_timestamp_);
      last_timestamp_ = rec.timestamp;
      return rec;
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::vector<FrameRecord> read_frames(std::istream& in, double fps) {
  FrameReader reader(in, fps);
  std::vector<FrameRecord> frames;
  while (auto f = reader.next()) frames.push_back(std::move(*f));
  return frames;
}

std::vector<FrameRecord> read_frames_file(const std::string& path, double fps) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_frames(in, fps);
}

void write_frames(std::ostream& out, std::span<const FrameRecord> frames) {
  for (const auto& f : frames) out << format_frame(f) << '\n';
}

void write_frames_file(const std::string& path, std::span<const FrameRecord> frames) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_frames(out, frames);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "segment_id";
  for (const auto& n : table.feature_names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out << table.ids[i];
    for (double v : table.rows[i]) out << ',' << format_number(v);
    out << '\n';
  }
}

FeatureTable read_feature_csv(std::istream& in) {
  FeatureTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kMalformedRecord, "missing CSV header");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "segment_id") {
    throw Error(ErrorCode::kMalformedRecord, "CSV header must start with segment_id");
  }
  table.feature_names.assign(header.begin() + 1, header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " cells, got " + std::to_string(cells.size()));
    }
    table.ids.push_back(cells[0]);
    std::vector<double> row;
    row.reserve(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const char* begin = cells[c].c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0' || errno == ERANGE) {
        throw Error(ErrorCode::kMalformedRecord,
                    "line " + std::to_string(line_no) + ": bad number '" + cells[c] + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_labels_csv(std::ostream& out, std::span<const std::string> ids, std::span<const int> labels) {
  out << "segment_id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << '\n';
}

std::map<std::string, int> read_labels_csv(std::istream& in) {
  std::map<std::string, int> labels;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kMalformedRecord, "missing labels header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv_line(line);
    int label = -1;
    if (cells.size() == 2) {
      auto [ptr, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), label);
      if (ec != std::errc() || ptr != cells[1].data() + cells[1].size()) label = -1;
    }
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(line_no) + ": bad label row");
    }
    labels[cells[0]] = label;
  }
  return labels;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

}  // namespace posewatch
