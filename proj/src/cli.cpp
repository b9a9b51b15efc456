#include "posewatch/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "posewatch/forest.hpp"
#include "posewatch/io.hpp"
#include "posewatch/pipeline.hpp"
#include "posewatch/selection.hpp"
#include "posewatch/sink.hpp"
#include "posewatch/synth.hpp"

namespace posewatch {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingClass:
      return kExitTrainingData;
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kVersionMismatch:
      return kExitSchema;
    case ErrorCode::kSinkUnreachable:
      return kExitSink;
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidSpec:
      return kExitUsage;
    default:
      return kExitMalformed;
  }
}

namespace {

struct Common {
  std::string config_path;
  std::optional<double> fps;

  PipelineConfig load() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : PipelineConfig::from_file(config_path);
    if (fps) {
      cfg.fps = *fps;
      cfg.hysteresis = HysteresisConfig::for_fps(*fps);
    }
    cfg.validate();
    return cfg;
  }
};

// Writes to a file, or to `fallback` for "" and "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::kIo, "cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

FeatureTable rows_to_table(const std::vector<SegmentRow>& rows, const FeatureSchema& schema) {
  FeatureTable t;
  t.feature_names = schema.names();
  for (const auto& r : rows) {
    t.ids.push_back(r.id);
    t.rows.push_back(r.values);
  }
  return t;
}

// ---- extract ------------------------------------------------------------------

struct ExtractArgs {
  std::string input;
  std::string manifest;
  std::string out;
  std::string labels_out;
  bool both_orderings = false;
};

int cmd_extract(const ExtractArgs& a, const PipelineConfig& cfg, std::istream& in, std::ostream& out,
                std::ostream& err) {
  auto schema = std::make_shared<const FeatureSchema>(FeatureSchema::full());
  std::vector<SegmentRow> rows;
  std::vector<int> labels;

  if (!a.manifest.empty()) {
    const auto entries = read_manifest(a.manifest);
    const fs::path base = fs::path(a.manifest).parent_path();
    for (const auto& e : entries) {
      const auto frames = read_frames_file((base / e.file).string(), cfg.fps);
      const LabeledClip clip{e.name, e.label, e.event_time, e.aggressor_id};
      auto got = extract_event_rows(frames, clip, schema, cfg, a.both_orderings);
      if (got.rows.empty()) err << "warning: " << e.name << " has no qualifying pair\n";
      for (std::size_t i = 0; i < got.rows.size(); ++i) {
        rows.push_back(std::move(got.rows[i]));
        labels.push_back(got.labels[i]);
      }
    }
  } else {
    std::vector<FrameRecord> frames;
    if (a.input == "-") {
      frames = read_frames(in, cfg.fps);
    } else {
      frames = read_frames_file(a.input, cfg.fps);
    }
    const std::string prefix = fs::path(a.input).stem().string();
    rows = extract_stream_rows(frames, schema, cfg, a.both_orderings, a.input == "-" ? "" : prefix + "@");
  }

  Output o(a.out, out);
  write_feature_csv(*o, rows_to_table(rows, *schema));
  if (!a.labels_out.empty()) {
    if (a.manifest.empty()) throw Error(ErrorCode::kInvalidArgument, "--labels-out needs --manifest");
    std::vector<std::string> ids;
    for (const auto& r : rows) ids.push_back(r.id);
    Output lo(a.labels_out, out);
    write_labels_csv(*lo, ids, labels);
  }
  err << "extracted " << rows.size() << " segment rows\n";
  return kExitOk;
}

// ---- train --------------------------------------------------------------------

struct TrainArgs {
  std::string features;
  std::string labels;
  std::string model_out;
  std::string report;
  std::optional<std::size_t> select_k;
  std::optional<int> trees;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

Dataset load_dataset(const std::string& features_path, const std::string& labels_path) {
  auto fin = open_input(features_path);
  const auto table = read_feature_csv(fin);
  auto lin = open_input(labels_path);
  const auto labels = read_labels_csv(lin);
  Dataset d;
  d.feature_names = table.feature_names;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto it = labels.find(table.ids[i]);
    if (it == labels.end()) throw Error(ErrorCode::kMalformedRecord, "no label for segment '" + table.ids[i] + "'");
    d.rows.push_back(table.rows[i]);
    d.labels.push_back(it->second);
    d.ids.push_back(table.ids[i]);
  }
  return d;
}

double accuracy(const ForestModel& m, const Dataset& d) {
  if (d.size() == 0) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < d.size(); ++i) hit += m.predict_row(d.rows[i]).label == d.labels[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(d.size());
}

std::string importance_table(const std::vector<std::pair<std::string, double>>& ranked, std::size_t limit) {
  std::size_t width = std::string("Feature").size();
  for (std::size_t i = 0; i < std::min(limit, ranked.size()); ++i) width = std::max(width, ranked[i].first.size());
  std::ostringstream s;
  char buf[64];
  s << "Feature" << std::string(width - 7 + 2, ' ') << "Importance\n";
  for (std::size_t i = 0; i < std::min(limit, ranked.size()); ++i) {
    std::snprintf(buf, sizeof(buf), "%.4f", ranked[i].second);
    s << ranked[i].first << std::string(width - ranked[i].first.size() + 2, ' ') << buf << '\n';
  }
  return s.str();
}

int cmd_train(const TrainArgs& a, PipelineConfig cfg, std::ostream& out, std::ostream& err) {
  if (a.trees) cfg.forest.n_trees = *a.trees;
  if (a.seed) cfg.forest.seed = *a.seed;
  if (a.threads) cfg.forest.threads = *a.threads;
  cfg.forest.validate();

  Dataset data = load_dataset(a.features, a.labels);
  ForestModel full = train(data, cfg.forest);
  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t i = 0; i < full.feature_names.size(); ++i) {
    ranked.emplace_back(full.feature_names[i], full.importances[i]);
  }
  std::size_t k = a.select_k.value_or(std::min(cfg.select_k, data.num_features()));
  ForestModel model = std::move(full);
  if (k > 0) {
    const auto sel = select_top_k(model.feature_names, model.importances, k);
    ranked = sel.ranked;
    if (k < data.num_features()) {
      data = data.select_columns(sel.reduced_schema);
      model = train(data, cfg.forest);
    }
  } else {
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  }

  write_text_file(a.model_out, serialize(model));

  std::ostringstream rep;
  std::size_t pos = 0;
  for (int l : data.labels) pos += l == 1 ? 1 : 0;
  char buf[64];
  rep << "samples: " << data.size() << " (" << pos << " positive, " << data.size() - pos << " negative)\n";
  rep << "trees: " << cfg.forest.n_trees << ", seed: " << cfg.forest.seed << "\n";
  rep << "features used: " << model.feature_names.size() << "\n";
  std::snprintf(buf, sizeof(buf), "%.6f", accuracy(model, data));
  rep << "training accuracy: " << buf << "\n\n";
  rep << importance_table(ranked, k > 0 ? k : ranked.size());
  Output o(a.report, out);
  *o << rep.str();
  err << "model written to " << a.model_out << "\n";
  return kExitOk;
}

// ---- stream -------------------------------------------------------------------

struct StreamArgs {
  std::string input;
  std::string model;
  std::string alerts_out;
  std::string evidence_dir;
  std::string sink_url;
  std::optional<double> sink_backoff;
};

int cmd_stream(const StreamArgs& a, PipelineConfig cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  const std::string model_path = a.model.empty() ? cfg.model : a.model;
  const std::string input_path = a.input.empty() ? cfg.input : a.input;
  const std::string evidence_dir = a.evidence_dir.empty() ? cfg.evidence_dir : a.evidence_dir;
  const std::string sink_url = a.sink_url.empty() ? cfg.sink_url : a.sink_url;
  if (a.sink_backoff) cfg.sink_backoff_s = *a.sink_backoff;
  if (model_path.empty()) throw Error(ErrorCode::kInvalidArgument, "--model is required");
  if (input_path.empty()) throw Error(ErrorCode::kInvalidArgument, "--input is required");

  auto model = std::make_shared<const ForestModel>(deserialize(read_text_file(model_path)));
  StreamDetector detector(model, cfg);

  std::ifstream file;
  std::istream* src = &in;
  if (input_path != "-") {
    file = open_input(input_path);
    src = &file;
  }
  FrameReader reader(*src, cfg.fps);
  Output alerts(a.alerts_out.empty() ? cfg.output : a.alerts_out, out);
  std::optional<HttpSink> sink;
  if (!sink_url.empty()) sink.emplace(sink_url, cfg.sink_retries, cfg.sink_backoff_s);
  if (!evidence_dir.empty()) fs::create_directories(evidence_dir);

  using clock = std::chrono::steady_clock;
  double busy = 0.0;
  double worst = 0.0;
  std::size_t activations = 0;
  const auto wall_start = clock::now();
  while (auto frame = reader.next()) {
    const auto t = clock::now();
    const auto events = detector.push(*frame);
    const double spent = std::chrono::duration<double>(clock::now() - t).count();
    busy += spent;
    worst = std::max(worst, spent);
    for (const auto& ev : events) {
      const std::string line = format_alert(ev);
      *alerts << line << '\n';
      if (sink) sink->post(line);
      if (ev.event.kind != AlarmKind::kActivated) continue;
      ++activations;
      if (!evidence_dir.empty()) {
        const auto w = evidence_window(ev.event, cfg.evidence_pre_s, cfg.evidence_post_s, cfg.fps,
                                       detector.stream_start().value_or(0.0));
        char name[96];
        std::snprintf(name, sizeof(name), "evidence_%06lld_%s.json",
                      static_cast<long long>(ev.event.frame_index), ev.pair.to_string().c_str());
        write_text_file((fs::path(evidence_dir) / name).string(), format_evidence(ev, w, input_path));
      }
    }
  }
  (*alerts).flush();
  const double wall = std::chrono::duration<double>(clock::now() - wall_start).count();
  const std::size_t n = detector.frames_seen();
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "frames: %zu, segments: %zu, activations: %zu, processing: %.3f s (%.1f frames/s), "
                "mean latency %.3f ms, max %.3f ms, wall %.3f s\n",
                n, detector.evaluations(), activations, busy, busy > 0 ? static_cast<double>(n) / busy : 0.0,
                n ? 1e3 * busy / static_cast<double>(n) : 0.0, 1e3 * worst, wall);
  err << buf;
  return kExitOk;
}

// ---- rank / pca / simulate ------------------------------------------------------

int cmd_rank(const std::string& model_path, std::size_t k, std::ostream& out) {
  const auto model = deserialize(read_text_file(model_path));
  const auto sel = select_top_k(model.feature_names, model.importances, k);
  out << importance_table(sel.ranked, k);
  return kExitOk;
}

struct PcaArgs {
  std::string features;
  std::string labels;
  std::string out;
  std::size_t components = 2;
  bool no_standardize = false;
};

int cmd_pca(const PcaArgs& a, std::ostream& out, std::ostream& err) {
  auto fin = open_input(a.features);
  const auto table = read_feature_csv(fin);
  std::map<std::string, int> labels;
  if (!a.labels.empty()) {
    auto lin = open_input(a.labels);
    labels = read_labels_csv(lin);
  }
  const auto res = pca_project(table.rows, a.components, !a.no_standardize);
  Output o(a.out, out);
  *o << "sample_id";
  for (std::size_t c = 0; c < a.components; ++c) *o << ",pc" << c + 1;
  *o << ",label\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    *o << table.ids[i];
    for (double v : res.projected[i]) *o << ',' << format_number(v);
    auto it = labels.find(table.ids[i]);
    *o << ',' << (it == labels.end() ? std::string() : std::to_string(it->second)) << '\n';
  }
  err << "explained variance ratio:";
  for (double r : res.explained_variance_ratio) err << ' ' << format_number(r);
  err << '\n';
  return kExitOk;
}

struct SimulateArgs {
  std::optional<std::size_t> n_per_class;
  std::size_t total = 90;
  std::uint64_t seed = 42;
  std::string out;
  double noise = 1.5;
  double duration = 4.0;
};

int cmd_simulate(const SimulateArgs& a, const PipelineConfig& cfg, std::ostream& err) {
  CorpusSpec spec = a.n_per_class ? CorpusSpec::balanced(*a.n_per_class, a.seed) : CorpusSpec::paper_ratio(a.total, a.seed);
  if (spec.n_positive + spec.n_negative == 0) throw Error(ErrorCode::kInvalidSpec, "corpus would be empty");
  spec.noise_sigma = a.noise;
  spec.duration = a.duration;
  spec.fps = cfg.fps;
  const auto corpus = generate_corpus(spec);
  write_corpus(corpus, a.out);
  err << "wrote " << corpus.clips.size() << " clips (" << spec.n_positive << " snatch) to " << a.out << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "Pipeline config (JSON)");
  sub->add_option("--fps", c.fps, "Frame rate of the stream")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pose-stream snatch detection", "posewatch"};
  app.require_subcommand(1);

  Common common;

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Segment features from a frame stream or a corpus manifest");
  auto* in_opt = extract->add_option("--input", ex.input, "Frame stream (JSONL), '-' for stdin");
  auto* man_opt = extract->add_option("--manifest", ex.manifest, "Corpus manifest.json (event-centered rows)");
  in_opt->excludes(man_opt);
  extract->add_option("--out", ex.out, "Feature CSV (default stdout)");
  extract->add_option("--labels-out", ex.labels_out, "Labels CSV (manifest mode)");
  extract->add_flag("--both-orderings", ex.both_orderings, "Emit a row per role ordering");
  add_common(extract, common);

  TrainArgs tr;
  auto* trn = app.add_subcommand("train", "Train the forest and report importances");
  trn->add_option("--features", tr.features, "Feature CSV")->required();
  trn->add_option("--labels", tr.labels, "Labels CSV")->required();
  trn->add_option("--model-out", tr.model_out, "Model file")->required();
  trn->add_option("--report", tr.report, "Report file (default stdout)");
  trn->add_option("--select-k", tr.select_k, "Keep the k most important features (0 keeps all)");
  trn->add_option("--trees", tr.trees, "Number of trees")->check(CLI::PositiveNumber);
  trn->add_option("--seed", tr.seed, "Random seed");
  trn->add_option("--threads", tr.threads, "Training threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  add_common(trn, common);

  StreamArgs st;
  auto* stream = app.add_subcommand("stream", "Detect events in a frame stream");
  stream->add_option("--input", st.input, "Frame stream (JSONL), '-' for stdin");
  stream->add_option("--model", st.model, "Model file");
  stream->add_option("--alerts-out", st.alerts_out, "Alert lines (default stdout)");
  stream->add_option("--evidence-dir", st.evidence_dir, "Directory for evidence manifests");
  stream->add_option("--sink-url", st.sink_url, "POST alerts to this http:// URL");
  stream->add_option("--sink-backoff", st.sink_backoff, "Seconds between delivery attempts")
      ->check(CLI::NonNegativeNumber);
  add_common(stream, common);

  std::string rank_model;
  std::size_t rank_k = 10;
  auto* rank = app.add_subcommand("rank", "Top-k features of a trained model");
  rank->add_option("--model", rank_model, "Model file")->required();
  rank->add_option("--k", rank_k, "Rows to show")->check(CLI::PositiveNumber);

  PcaArgs pc;
  auto* pca = app.add_subcommand("pca", "Project a feature CSV onto its principal components");
  pca->add_option("--features", pc.features, "Feature CSV")->required();
  pca->add_option("--labels", pc.labels, "Labels CSV");
  pca->add_option("--out", pc.out, "Output CSV (default stdout)");
  pca->add_option("--components", pc.components, "Number of components")->check(CLI::PositiveNumber);
  pca->add_flag("--no-standardize", pc.no_standardize, "Center only");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic labeled corpus");
  auto* n_opt = simulate->add_option("--n", sim.n_per_class, "Clips per class (balanced)");
  auto* total_opt = simulate->add_option("--total", sim.total, "Total clips at a 29:61 ratio");
  n_opt->excludes(total_opt);
  simulate->add_option("--seed", sim.seed, "Root seed");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--noise", sim.noise, "Keypoint noise sigma in pixels")->check(CLI::NonNegativeNumber);
  simulate->add_option("--duration", sim.duration, "Clip length in seconds")->check(CLI::PositiveNumber);
  add_common(simulate, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (extract->parsed()) {
      if (ex.input.empty() && ex.manifest.empty()) {
        err << "extract: one of --input or --manifest is required\n";
        return kExitUsage;
      }
      return cmd_extract(ex, common.load(), in, out, err);
    }
    if (trn->parsed()) return cmd_train(tr, common.load(), out, err);
    if (stream->parsed()) return cmd_stream(st, common.load(), in, out, err);
    if (rank->parsed()) return cmd_rank(rank_model, rank_k, out);
    if (pca->parsed()) return cmd_pca(pc, out, err);
    if (simulate->parsed()) return cmd_simulate(sim, common.load(), err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitMalformed;
  }
  return kExitUsage;
}

}  // namespace posewatch
