#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <panfuse/harness.hpp>

#include "test_helpers.hpp"

using panfuse::Band;
using panfuse::BandStack;
using panfuse::ExperimentSpec;
using panfuse::Method;

namespace {

// analytically smooth reference whose chroma varies slowly: the ideal input
// for the degrade-upsample-fuse closed loop
BandStack smooth_reference(std::size_t w, std::size_t h, std::size_t bands) {
  constexpr double pi = 3.14159265358979323846;
  std::vector<Band> out;
  for (std::size_t b = 0; b < bands; ++b) {
    std::vector<double> s(w * h);
    const double offset = 0.4 + 0.1 * static_cast<double>(b);
    const double gain = 0.15 + 0.03 * static_cast<double>(b);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c)
        s[r * w + c] = offset + gain * (std::sin(2 * pi * static_cast<double>(r) /
                                                 static_cast<double>(h)) +
                                        std::cos(2 * pi * static_cast<double>(c) /
                                                 static_cast<double>(w)));
    out.emplace_back(w, h, std::move(s));
  }
  return BandStack(std::move(out));
}

}  // namespace

TEST_CASE("synthetic scenes are reproducible and well-formed") {
  const auto a = panfuse::generate_scene(64, 32, 4, 4, 7);
  const auto b = panfuse::generate_scene(64, 32, 4, 4, 7);
  const auto other = panfuse::generate_scene(64, 32, 4, 4, 8);

  CHECK(a.pan.samples() == b.pan.samples());
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.reference.band(i).samples() == b.reference.band(i).samples());
    CHECK(a.ms.band(i).samples() == b.ms.band(i).samples());
  }
  CHECK(a.pan.samples() != other.pan.samples());

  CHECK(a.pan.width() == 64);
  CHECK(a.pan.height() == 32);
  CHECK(a.ms.width() == 16);
  CHECK(a.ms.height() == 8);
  CHECK(a.reference.name(0) == "Red");
  CHECK(a.reference.name(3) == "NIR");
}

TEST_CASE("the scene pan tracks the band mean") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto scene = panfuse::generate_scene(128, 128, 4, 4, seed);
    const double corr = panfuse::cc(scene.pan, panfuse::pixelwise_mean(scene.reference));
    CHECK(corr > 0.7);
  }
}

TEST_CASE("scene preconditions") {
  CHECK_THROWS_AS(panfuse::generate_scene(60, 64, 4, 8, 1), panfuse::ParameterError);
  CHECK_THROWS_AS(panfuse::generate_scene(64, 64, 1, 4, 1), panfuse::ParameterError);
  CHECK_THROWS_AS(panfuse::generate_scene(4, 4, 4, 4, 1), panfuse::ParameterError);
}

TEST_CASE("experiment spec validation") {
  const auto scene = panfuse::generate_scene(32, 32, 4, 4, 9);
  ExperimentSpec spec;
  CHECK_THROWS_AS(panfuse::run_experiment(scene.pan, scene.reference, spec),
                  panfuse::ParameterError);
  spec.methods = {Method::Brovey};
  spec.ratio = 3;
  CHECK_THROWS_AS(panfuse::run_experiment(scene.pan, scene.reference, spec),
                  panfuse::ParameterError);
  spec.ratio = 4;
  CHECK_THROWS_AS(
      panfuse::run_experiment(testutil::random_band(16, 16, 10), scene.reference, spec),
      panfuse::ShapeError);
}

TEST_CASE("brovey closes the loop when the pan is the band mean") {
  const BandStack reference = smooth_reference(96, 96, 4);
  const Band pan = panfuse::pixelwise_mean(reference);
  ExperimentSpec spec;
  spec.methods = {Method::Brovey};
  spec.ratio = 4;
  const auto results = panfuse::run_experiment(pan, reference, spec);
  REQUIRE(results.size() == 1);
  CHECK(results[0].first == Method::Brovey);
  CHECK(results[0].second.mean_cc >= 0.99);
}

TEST_CASE("experiments are deterministic") {
  const auto scene = panfuse::generate_scene(64, 64, 4, 4, 11);
  ExperimentSpec spec;
  spec.methods = {Method::Brovey, Method::AW, Method::BW};
  spec.ratio = 4;
  const auto r1 = panfuse::run_experiment(scene.pan, scene.reference, spec);
  const auto r2 = panfuse::run_experiment(scene.pan, scene.reference, spec);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].first == r2[i].first);
    CHECK(r1[i].second.mean_cc == r2[i].second.mean_cc);
    CHECK(r1[i].second.mean_uiqi == r2[i].second.mean_uiqi);
    for (std::size_t b = 0; b < r1[i].second.per_band.size(); ++b) {
      CHECK(r1[i].second.per_band[b].cc == r2[i].second.per_band[b].cc);
      CHECK(r1[i].second.per_band[b].uiqi == r2[i].second.per_band[b].uiqi);
    }
  }
}

TEST_CASE("method failures carry the method tag") {
  // proportional bands stay proportional through degradation, so pca sees a
  // rank-deficient covariance
  const Band base = testutil::random_band(32, 32, 12, 0.2, 1.2);
  const BandStack reference({base, panfuse::scale(base, 2.0)});
  ExperimentSpec spec;
  spec.methods = {Method::PCA};
  spec.ratio = 4;
  try {
    panfuse::run_experiment(testutil::random_band(32, 32, 13), reference, spec);
    FAIL("expected NumericError");
  } catch (const panfuse::NumericError& e) {
    CHECK(std::string(e.what()).find("method pca") != std::string::npos);
  }
}

TEST_CASE("report rows follow the reference band names") {
  const auto scene = panfuse::generate_scene(32, 32, 4, 4, 14);
  ExperimentSpec spec;
  spec.methods = {Method::AW};
  spec.ratio = 4;
  spec.window = {8, 1};
  const auto results = panfuse::run_experiment(scene.pan, scene.reference, spec);
  REQUIRE(results[0].second.per_band.size() == 4);
  CHECK(results[0].second.per_band[0].band == "Red");
  CHECK(results[0].second.per_band[3].band == "NIR");
}
