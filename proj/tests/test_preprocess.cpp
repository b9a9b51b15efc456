#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "generators.hpp"
#include "posewatch/error.hpp"
#include "posewatch/preprocess.hpp"

using namespace posewatch;

namespace {

Track scalar_track(const std::vector<double>& xs) {
  std::vector<Skeleton> poses;
  for (double x : xs) poses.push_back(fix::moved(fix::upright({0, 0}), {x, 0}));
  return fix::track_of(poses);
}

// Unrolled recursion: (1-a)^t x0 + a * sum_k (1-a)^k x_{t-k}.
double closed_form(const std::vector<double>& x, std::size_t t, double a) {
  double v = std::pow(1.0 - a, static_cast<double>(t)) * x[0];
  for (std::size_t k = 0; k < t; ++k) v += a * std::pow(1.0 - a, static_cast<double>(k)) * x[t - k];
  return v;
}

}  // namespace

TEST_CASE("ema_step examples") {
  CHECK(ema_step(0.0, 1.0, 0.5) == 0.5);
  CHECK(ema_step(0.0, 1.0, 0.999) == doctest::Approx(0.999).epsilon(1e-15));
  for (double c : {-3.5, 0.0, 7.25, 1e6}) {
    for (double a : {0.01, 0.6, 0.99}) CHECK(ema_step(c, c, a) == c);
  }
  for (double bad : {0.0, 1.0, -0.2, 1.5, std::nan("")}) {
    CHECK_THROWS_AS(ema_step(0, 1, bad), Error);
  }
}

TEST_CASE("smooth_track: constant input, step input, carry-forward") {
  auto constant = smooth_track(scalar_track(std::vector<double>(10, 4.0)), {0.6});
  for (std::size_t i = 0; i < 10; ++i) CHECK(constant.smoothed[i] == constant.samples[i].skeleton);

  auto step = smooth_track(scalar_track({0, 0, 1, 1}), {0.5});
  const double expect[] = {0, 0, 0.5, 0.75};
  for (std::size_t i = 0; i < 4; ++i) CHECK(step.smoothed[i].keypoints[9].x == expect[i]);

  auto t = scalar_track({0, 1, 2, 3, 4});
  t.samples[3].skeleton.keypoints[9].confidence = 0.1;
  t.samples[3].skeleton.keypoints[9].x = 1000.0;
  auto s = smooth_track(t, {0.6});
  CHECK(s.smoothed[3].keypoints[9].x == s.smoothed[2].keypoints[9].x);
  CHECK_FALSE(s.smoothed[3].keypoints[9].valid());
  CHECK(s.smoothed[4].keypoints[9].x == ema_step(s.smoothed[2].keypoints[9].x, 4.0, 0.6));

  CHECK_THROWS_AS(smooth_track(Track{}, {0.6}), Error);
}

TEST_CASE("property: EMA matches its closed-form expansion") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.uniform(0.01, 0.99);
    std::vector<double> x(1 + rng.uniform_index(100));
    for (double& v : x) v = rng.uniform(-100, 100);
    auto s = smooth_track(scalar_track(x), {a});
    for (std::size_t t = 0; t < x.size(); ++t) {
      CHECK(std::abs(s.smoothed[t].keypoints[11].x - closed_form(x, t, a)) < 1e-9);
    }
  }
}

TEST_CASE("property: EMA is shift-equivariant") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(0.05, 0.95);
    const double c = rng.uniform(-500, 500);
    std::vector<double> x(2 + rng.uniform_index(50)), y;
    for (double& v : x) v = rng.uniform(-50, 50);
    for (double v : x) y.push_back(v + c);
    auto sx = smooth_track(scalar_track(x), {a});
    auto sy = smooth_track(scalar_track(y), {a});
    for (std::size_t t = 0; t < x.size(); ++t) {
      CHECK(sy.smoothed[t].keypoints[11].x == doctest::Approx(sx.smoothed[t].keypoints[11].x + c).epsilon(1e-12));
    }
  }
}

TEST_CASE("the incremental smoother is bit-identical to smooth_track") {
  Rng rng(3);
  auto t = gen::track(rng, {1, 0}, 60, 30.0, {100, 100}, 50.0, 0.3);
  auto s = smooth_track(t, {0.6});
  SkeletonSmoother inc({0.6});
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(inc.push(t.samples[i].skeleton) == s.smoothed[i]);
}

TEST_CASE("torso height and body scale") {
  Skeleton s;
  for (auto& k : s.keypoints) k.confidence = 0.9;
  s[Joint::kLeftShoulder] = {0, 0, 0.9};
  s[Joint::kRightShoulder] = {2, 0, 0.9};
  s[Joint::kLeftHip] = {0, 4, 0.9};
  s[Joint::kRightHip] = {2, 4, 0.9};
  s.bbox = {0, 0, 2, 10};
  CHECK(*torso_height(s) == 4.0);
  CHECK(*body_scale(s) == 4.0);

  auto degenerate = s;
  degenerate[Joint::kLeftHip] = {0, 0, 0.9};
  degenerate[Joint::kRightHip] = {2, 0, 0.9};
  CHECK(*torso_height(degenerate) == 0.0);
  CHECK(*body_scale(degenerate) == doctest::Approx(0.5));

  for (Joint j : {Joint::kLeftShoulder, Joint::kRightShoulder, Joint::kLeftHip, Joint::kRightHip}) {
    s[j].confidence = 0.1;
  }
  CHECK_FALSE(torso_height(s).has_value());
  CHECK_FALSE(body_scale(s).has_value());
}

TEST_CASE("softmax and role probabilities") {
  std::vector<double> m{1.0, 0.0};
  auto p = softmax(m);
  CHECK(p[0] == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(p[1] == doctest::Approx(0.2689).epsilon(1e-4));

  std::vector<double> eq{0.3, 0.3};
  CHECK(softmax(eq)[0] == 0.5);

  // One mover and one stander.
  std::vector<Skeleton> walk, stand;
  for (int i = 0; i < 10; ++i) {
    walk.push_back(fix::upright({i * 10.0, 0}, 10.0));
    stand.push_back(fix::upright({500, 0}, 10.0));
  }
  std::vector<Track> tracks{fix::track_of(stand, 30, 1), fix::track_of(walk, 30, 2)};
  auto roles = aggressor_probabilities(tracks, 2.0);
  CHECK(roles[1].p_aggressor > roles[0].p_aggressor);
  CHECK(roles[0].p_aggressor + roles[1].p_aggressor == doctest::Approx(1.0));
  CHECK(roles[1].mean_motion == doctest::Approx(30.0));
  CHECK(most_likely_aggressor(roles) == 1);

  std::vector<Track> single{tracks[0]};
  CHECK(aggressor_probabilities(single, 2.0)[0].p_aggressor == 1.0);

  std::vector<Track> still{fix::track_of({fix::upright({0, 0})}, 30, 1)};
  CHECK_THROWS_AS(aggressor_probabilities(still, 2.0), Error);
}

TEST_CASE("property: softmax sums to one and ignores a common shift") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> m(1 + rng.uniform_index(6)), shifted;
    for (double& v : m) v = rng.uniform(-20, 20);
    const double c = rng.uniform(-100, 100);
    for (double v : m) shifted.push_back(v + c);
    auto p = softmax(m);
    auto q = softmax(shifted);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      sum += p[i];
      CHECK(std::abs(p[i] - q[i]) < 1e-9);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    const auto top = std::max_element(p.begin(), p.end()) - p.begin();
    CHECK(m[top] == *std::max_element(m.begin(), m.end()));
  }
}

TEST_CASE("property: the argmax role follows the argmax motion, ties to the lower id") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Track> tracks;
    const auto n = 2 + rng.uniform_index(3);
    for (std::size_t k = 0; k < n; ++k) {
      const double speed = static_cast<double>(rng.uniform_index(3));
      std::vector<Skeleton> poses;
      for (int i = 0; i < 8; ++i) poses.push_back(fix::upright({100.0 * k + speed * i, 0}, 10.0));
      tracks.push_back(fix::track_of(poses, 30, static_cast<std::int64_t>(k + 1)));
    }
    auto roles = aggressor_probabilities(tracks, 2.0);
    const auto best = most_likely_aggressor(roles);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(roles[best].p_aggressor >= roles[k].p_aggressor);
      if (roles[k].mean_motion == roles[best].mean_motion) CHECK(best <= k);
    }
  }
}
