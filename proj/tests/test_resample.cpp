#include <catch2/catch_amalgamated.hpp>

#include <panfuse/resample.hpp>

#include "test_helpers.hpp"

using panfuse::Band;
using panfuse::ResampleKernel;
using panfuse::ResampleSpec;

namespace {

// direct bilinear evaluation at (row/f, col/f), independent of the
// separable pass in the library
double bilinear_at(const Band& in, std::size_t orow, std::size_t ocol, std::size_t f) {
  const double y = static_cast<double>(orow) / f;
  const double x = static_cast<double>(ocol) / f;
  const auto r0 = static_cast<long>(std::floor(y));
  const auto c0 = static_cast<long>(std::floor(x));
  const double ty = y - r0, tx = x - c0;
  auto px = [&](long r, long c) {
    return in(testutil::reflect(r, in.height()), testutil::reflect(c, in.width()));
  };
  return (1 - ty) * ((1 - tx) * px(r0, c0) + tx * px(r0, c0 + 1)) +
         ty * ((1 - tx) * px(r0 + 1, c0) + tx * px(r0 + 1, c0 + 1));
}

}  // namespace

TEST_CASE("upsample factor 1 is the identity for every kernel") {
  const Band b = testutil::random_band(5, 4, 21);
  for (auto kernel : {ResampleKernel::Nearest, ResampleKernel::Bilinear,
                      ResampleKernel::Bicubic}) {
    CHECK(panfuse::upsample(b, {1, kernel}).samples() == b.samples());
  }
}

TEST_CASE("bicubic upsampling preserves a constant band exactly") {
  const Band b(2, 2, 7.0);
  const Band up = panfuse::upsample(b, {4, ResampleKernel::Bicubic});
  REQUIRE(up.width() == 8);
  REQUIRE(up.height() == 8);
  for (double v : up.samples()) CHECK(v == 7.0);
}

TEST_CASE("on-grid outputs copy input samples for every kernel") {
  const Band b = testutil::random_band(6, 5, 22);
  for (auto kernel : {ResampleKernel::Nearest, ResampleKernel::Bilinear,
                      ResampleKernel::Bicubic}) {
    const Band up = panfuse::upsample(b, {3, kernel});
    for (std::size_t r = 0; r < b.height(); ++r)
      for (std::size_t c = 0; c < b.width(); ++c)
        CHECK(up(3 * r, 3 * c) == b(r, c));
  }
}

TEST_CASE("bilinear upsampling matches a direct evaluation") {
  const Band b(2, 2, {0, 2, 4, 6});
  const Band up = panfuse::upsample(b, {2, ResampleKernel::Bilinear});
  REQUIRE(up.width() == 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      CHECK(up(r, c) == Catch::Approx(bilinear_at(b, r, c, 2)).margin(1e-12));

  const Band big = testutil::random_band(7, 6, 23);
  const Band up3 = panfuse::upsample(big, {3, ResampleKernel::Bilinear});
  for (std::size_t r = 0; r < up3.height(); ++r)
    for (std::size_t c = 0; c < up3.width(); ++c)
      CHECK(up3(r, c) == Catch::Approx(bilinear_at(big, r, c, 3)).margin(1e-12));
}

TEST_CASE("upsample rejects bad factors") {
  const Band b(2, 2, 1.0);
  CHECK_THROWS_AS(panfuse::upsample(b, {0, ResampleKernel::Bilinear}),
                  panfuse::ParameterError);
  CHECK_THROWS_AS(panfuse::upsample(b, {static_cast<std::size_t>(-1) / 2,
                                        ResampleKernel::Bilinear}),
                  panfuse::ParameterError);
}

TEST_CASE("degrade basics") {
  SECTION("factor 1 is the identity") {
    const Band b = testutil::random_band(6, 6, 24);
    CHECK(panfuse::degrade(b, 1).samples() == b.samples());
  }
  SECTION("a constant band stays constant, mean preserved exactly") {
    const Band b(8, 8, 5.0);
    const Band d = panfuse::degrade(b, 4);
    REQUIRE(d.width() == 2);
    for (double v : d.samples()) CHECK(v == 5.0);
  }
  SECTION("dimensions must divide the factor") {
    CHECK_THROWS_AS(panfuse::degrade(Band(6, 6, 1.0), 4), panfuse::ShapeError);
  }
  SECTION("upsample then degrade reproduces a constant band") {
    const Band b(3, 3, 2.5);
    for (auto kernel : {ResampleKernel::Nearest, ResampleKernel::Bilinear,
                        ResampleKernel::Bicubic}) {
      const Band round = panfuse::degrade(panfuse::upsample(b, {4, kernel}), 4);
      CHECK(round.samples() == b.samples());
    }
  }
}

TEST_CASE("degrade matches an independent filter-then-subsample reference") {
  const Band b = testutil::random_band(16, 16, 25);
  const Band got = panfuse::degrade(b, 4);

  Band smoothed = testutil::dense_b3_smooth(b, 1);
  smoothed = testutil::dense_b3_smooth(smoothed, 2);
  std::vector<double> expect;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) expect.push_back(smoothed(4 * r, 4 * c));

  const Band want(4, 4, std::move(expect));
  CHECK(testutil::max_rel_err(got, want) < 1e-9);
}

TEST_CASE("stack resampling keeps band names") {
  const panfuse::BandStack s(
      {testutil::random_band(4, 4, 26), testutil::random_band(4, 4, 27)}, {"a", "b"});
  const auto up = panfuse::upsample(s, {2, ResampleKernel::Bicubic});
  CHECK(up.name(1) == "b");
  const auto down = panfuse::degrade(up, 2);
  CHECK(down.band(0).samples() == panfuse::degrade(up.band(0), 2).samples());
}
