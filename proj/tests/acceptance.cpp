// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "model_fixture.hpp"
#include "oracles.hpp"
#include "reference_features.hpp"
#include "replay.hpp"
#include "posewatch/features.hpp"
#include "posewatch/forest.hpp"
#include "posewatch/pipeline.hpp"
#include "posewatch/preprocess.hpp"
#include "posewatch/selection.hpp"
#include "posewatch/synth.hpp"
#include "posewatch/temporal.hpp"

using namespace posewatch;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---- 1. smoothing ----------------------------------------------------------

Outcome ema_closed_form() {
  Rng rng(1001);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = rng.uniform(0.01, 0.99);
    const std::size_t n = 1 + rng.uniform_index(100);
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-500, 500);
    Track t;
    t.id = {1, 0};
    Skeleton base = gen::skeleton(rng, {0, 0}, 50, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      Skeleton s = base;
      s.keypoints[5].x = x[i];
      t.samples.push_back({static_cast<double>(i) / 30.0, static_cast<std::int64_t>(i), s});
    }
    const auto sm = smooth_track(t, {a});
    for (std::size_t k = 0; k < n; ++k) {
      double want = std::pow(1.0 - a, static_cast<double>(k)) * x[0];
      for (std::size_t j = 0; j < k; ++j) want += a * std::pow(1.0 - a, static_cast<double>(j)) * x[k - j];
      worst = std::max(worst, std::abs(sm.smoothed[k].keypoints[5].x - want));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 1.0, fmt("max error %.3g over 1000 sequences in %.3f s", worst, secs)};
}

// ---- 2. features -----------------------------------------------------------

Outcome feature_oracle() {
  Rng rng(2002);
  const auto& names = FeatureSchema::full().names();
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto pair = gen::pair(rng, 2 + rng.uniform_index(19), rng.bernoulli(0.5) ? 30.0 : 10.0, rng.uniform(0.0, 0.3));
    const auto got = compute_catalog_features(pair);
    const auto want = ref::features(pair);
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& w = want.at(names[i]);
      if (got[i].has_value() != w.has_value() || (got[i] && *got[i] != *w)) ++mismatches;
    }
  }
  int variant = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto pair = gen::pair(rng, 3 + rng.uniform_index(18), 30.0, 0.1);
    const bool scale = trial % 2 == 0;
    const auto moved = scale ? gen::transform(pair, std::exp(rng.uniform(-2.3, 2.3)), 0, 0)
                             : gen::transform(pair, 1.0, rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3));
    const auto a = compute_catalog_features(pair);
    const auto b = compute_catalog_features(moved);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (a[i].has_value() != b[i].has_value() || (a[i] && !close_rel(*a[i], *b[i], 1e-6))) ++variant;
    }
  }
  return {mismatches == 0 && variant == 0,
          fmt("%d reference mismatches over 200 segments, %d invariance violations over 100", mismatches, variant)};
}

// ---- 3. IoU ------------------------------------------------------------------

Outcome iou_raster() {
  Rng rng(3003);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const BBox a = gen::box(rng, 50.0);
    BBox b = gen::box(rng, 50.0);
    if (trial % 3 == 0) b = {a.x1 + rng.uniform(-5, 5), a.y1 + rng.uniform(-5, 5), a.x2 + rng.uniform(-5, 5),
                             a.y2 + rng.uniform(-5, 5)};
    if (b.x2 <= b.x1 || b.y2 <= b.y1) b = a;
    worst = std::max(worst, std::abs(iou(a, b) - oracle::raster_iou(a, b, 20000)));
  }
  return {worst <= 1e-3, fmt("max |iou - raster| %.2e over 1000 pairs", worst)};
}

// ---- 4. hysteresis -----------------------------------------------------------

Outcome hysteresis_exhaustive() {
  long sequences = 0, bad = 0;
  for (int w = 2; w <= 6; ++w) {
    for (int on = 2; on <= w; ++on) {
      for (int off = 1; off < on; ++off) {
        for (int len = 0; len <= 12; ++len) {
          for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
            std::vector<bool> y(static_cast<std::size_t>(len));
            for (int k = 0; k < len; ++k) y[static_cast<std::size_t>(k)] = (bits >> k) & 1u;
            AlarmState s({w, on, off, 30.0});
            std::vector<oracle::Event> got;
            bool ok = true;
            for (std::size_t t = 0; t < y.size(); ++t) {
              const auto e = s.step(y[t], static_cast<double>(t), static_cast<std::int64_t>(t));
              if (e) got.push_back({e->kind == AlarmKind::kActivated, static_cast<std::size_t>(e->frame_index),
                                    e->window_count});
              if (s.active() && s.window_count() <= off) ok = false;
              if (!s.active() && s.window_count() >= on) ok = false;
            }
            for (std::size_t k = 0; k < got.size(); ++k) ok = ok && got[k].activated == (k % 2 == 0);
            ok = ok && got == oracle::hysteresis(y, w, on, off);
            ++sequences;
            bad += !ok;
          }
        }
      }
    }
  }
  return {bad == 0, fmt("%ld of %ld sequences disagree", bad, sequences)};
}

// ---- 5. forest ---------------------------------------------------------------

Dataset random_small(Rng& rng, std::size_t n, std::size_t f) {
  Dataset d;
  for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("f" + std::to_string(j));
  const int levels = 2 + static_cast<int>(rng.uniform_index(5));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(f);
    for (double& v : r) v = static_cast<double>(rng.uniform_index(static_cast<std::uint64_t>(levels)));
    d.rows.push_back(r);
    d.labels.push_back(i < 2 ? static_cast<int>(i) : static_cast<int>(rng.uniform_index(2)));
  }
  return d;
}

Outcome forest_checks() {
  Rng rng(5005);
  int split_bad = 0, compared = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto f = 1 + rng.uniform_index(3);
    auto d = random_small(rng, 2 + rng.uniform_index(11), f);
    const auto want = oracle::exhaustive_root_split(d);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.features_per_split = static_cast<int>(f);
    const auto model = train(d, cfg);
    const auto& root = model.trees[0].nodes[0];
    if (!want) {
      split_bad += !root.is_leaf();
      continue;
    }
    ++compared;
    split_bad += root.is_leaf() || root.feature != want->feature || root.threshold != want->threshold;
  }

  double worst_sum = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto d = random_small(rng, 40, 6);
    ForestConfig cfg;
    cfg.n_trees = 15;
    cfg.seed = rng.next_u64();
    const auto m = train(d, cfg);
    double s = 0.0;
    for (double v : m.importances) s += v;
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }

  const auto corpus = generate_corpus(CorpusSpec::balanced(15, 7));
  const auto data = build_dataset(corpus, PipelineConfig{});
  ForestConfig cfg;
  cfg.n_trees = 100;
  cfg.seed = 42;
  const auto ref = serialize(train(data, cfg));
  bool same = serialize(train(data, cfg)) == ref;
  for (int threads : {2, 4, 8}) {
    cfg.threads = threads;
    same = same && serialize(train(data, cfg)) == ref;
  }
  return {split_bad == 0 && compared > 1000 && worst_sum <= 1e-9 && same,
          fmt("root split disagreements %d/%d, max |sum importances - 1| %.1e, seed 42 reproducible across "
              "runs and threads: %s",
              split_bad, compared, worst_sum, same ? "yes" : "no")};
}

// ---- 6. end to end -----------------------------------------------------------

struct Split {
  Dataset train, test;
};

Split stratified(const Dataset& d, double train_fraction, std::uint64_t seed) {
  Rng rng(seed);
  Split s;
  for (auto* part : {&s.train, &s.test}) part->feature_names = d.feature_names;
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.labels[i] == c) idx.push_back(i);
    }
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
    const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& part = k < n_train ? s.train : s.test;
      part.rows.push_back(d.rows[idx[k]]);
      part.labels.push_back(d.labels[idx[k]]);
      part.ids.push_back(d.ids[idx[k]]);
    }
  }
  return s;
}

ForestModel g_model;

Outcome end_to_end() {
  const auto t0 = Clock::now();
  const auto corpus = generate_corpus(CorpusSpec::balanced(60, 2024));
  const auto data = build_dataset(corpus, PipelineConfig{});
  const auto split = stratified(data, 0.7, 7);
  ForestConfig cfg;
  cfg.n_trees = 500;
  cfg.seed = 42;
  g_model = fix::train_top_k(split.train, cfg, 10);
  const auto test = split.test.select_columns(g_model.feature_names);
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int p = g_model.predict_row(test.rows[i]).label;
    tp += p == 1 && test.labels[i] == 1;
    fp += p == 1 && test.labels[i] == 0;
    fn += p == 0 && test.labels[i] == 1;
  }
  const double f1 = tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
  const double secs = seconds_since(t0);
  return {f1 >= 0.90 && secs < 120.0,
          fmt("held-out F1 %.3f (tp %d, fp %d, fn %d, %zu test rows) in %.1f s", f1, tp, fp, fn, test.size(), secs)};
}

// ---- 7. throughput -----------------------------------------------------------

Outcome throughput() {
  ScenarioSpec s;
  s.kind = ScenarioKind::kHandshake;
  s.seed = 77;
  s.duration = 60.0;
  s.noise_sigma = 1.5;
  const auto clip = generate(s);
  PipelineConfig cfg;
  StreamDetector det(std::make_shared<const ForestModel>(g_model), cfg);
  const auto t0 = Clock::now();
  std::size_t events = 0;
  for (const auto& f : clip.frames) events += det.push(f).size();
  const double secs = seconds_since(t0);
  const double fps = static_cast<double>(clip.frames.size()) / secs;
  return {fps >= 300.0, fmt("%.0f frames/s over %zu frames (%zu events)", fps, clip.frames.size(), events)};
}

// ---- 8. PCA ------------------------------------------------------------------

Outcome pca_checks() {
  Rng rng(8008);
  Matrix x(50, std::vector<double>(12));
  for (auto& r : x) {
    const double l1 = rng.normal(), l2 = rng.normal();
    for (std::size_t j = 0; j < 12; ++j) r[j] = (j + 1) * l1 + (j % 3) * l2 + rng.normal(0.0, 0.3) + 5.0 * j;
  }
  const auto p = pca_project(x, 12, false);

  // Independent eigenvalues of the sample covariance.
  Eigen::MatrixXd m(50, 12);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 12; ++j) m(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::MatrixXd c = m.rowwise() - m.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c / 49.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  double var_err = 0.0, proj_var_err = 0.0, recon_err = 0.0;
  for (std::size_t k = 0; k < 12; ++k) {
    const double ev = es.eigenvalues()(11 - static_cast<int>(k));
    var_err = std::max(var_err, std::abs(p.explained_variance[k] - ev) / std::max(1.0, ev));
    double ss = 0.0;
    for (const auto& r : p.projected) ss += r[k] * r[k];
    proj_var_err = std::max(proj_var_err, std::abs(ss / 49.0 - ev) / std::max(1.0, ev));
  }
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 12; ++j) {
      double v = p.mean[j];
      for (std::size_t k = 0; k < 12; ++k) v += p.projected[i][k] * p.components[k][j] * p.scale[j];
      recon_err = std::max(recon_err, std::abs(v - x[i][j]));
    }
  }
  return {var_err <= 1e-6 && proj_var_err <= 1e-6 && recon_err <= 1e-6,
          fmt("variance vs eigenvalue %.1e, projected variance %.1e, reconstruction %.1e", var_err, proj_var_err,
              recon_err)};
}

// ---- 9. online / offline -----------------------------------------------------

Outcome online_offline() {
  const auto model = std::make_shared<const ForestModel>(g_model);
  PipelineConfig cfg;
  Rng rng(9009);
  const ScenarioKind kinds[] = {ScenarioKind::kSnatch, ScenarioKind::kWalkBy, ScenarioKind::kHandshake,
                                ScenarioKind::kStanding};
  int bad = 0;
  std::size_t total = 0;
  for (int c = 0; c < 20; ++c) {
    ScenarioSpec s;
    s.kind = kinds[rng.uniform_index(4)];
    s.seed = rng.next_u64();
    s.duration = rng.uniform(3.0, 9.0);
    s.noise_sigma = rng.uniform(0.0, 3.0);
    s.scale = rng.uniform(60.0, 160.0);
    auto clip = generate(s);
    if (c % 4 == 3) {
      // A mid-clip dropout splits a track.
      const std::size_t a = clip.frames.size() / 3;
      for (std::size_t i = a; i < a + 15 && i < clip.frames.size(); ++i) clip.frames[i].persons.resize(1);
    }
    StreamDetector det(model, cfg);
    std::vector<PairEvent> online;
    for (const auto& f : clip.frames) {
      for (auto& e : det.push(f)) online.push_back(std::move(e));
    }
    total += online.size();
    const auto got = replay::from_stream(online);
    bad += got != replay::offline(clip.frames, *model, cfg);
    bad += got != replay::from_stream(detect_offline(clip.frames, model, cfg));
  }
  return {bad == 0, fmt("%d disagreements over 20 clips (%zu online events)", bad, total)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"ema-closed-form", ema_closed_form},
      {"feature-reference", feature_oracle},
      {"iou-raster", iou_raster},
      {"hysteresis-exhaustive", hysteresis_exhaustive},
      {"forest-split-importance-determinism", forest_checks},
      {"end-to-end-f1", end_to_end},
      {"streaming-throughput", throughput},
      {"pca-variance-reconstruction", pca_checks},
      {"online-offline-equivalence", online_offline},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.ok;
    std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
