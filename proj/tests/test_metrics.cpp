#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "uwe/metrics.hpp"

using namespace uwe;
using testutil::make_gray;
using testutil::make_rgb;

TEST_CASE("mse anchors") {
  const GrayImage zero = make_gray(1, 1, {0});
  const GrayImage full = make_gray(1, 1, {255});
  CHECK(mse(zero, zero) == 0.0);
  CHECK(mse(zero, full) == 65025.0);
  const RgbImage rgb = make_rgb(2, 1, {1, 2, 3, 4, 5, 6});
  CHECK(mse(rgb, rgb) == 0.0);
}

TEST_CASE("mse requires matching dimensions") {
  CHECK_THROWS_AS(mse(make_gray(1, 1, {0}), make_gray(2, 1, {0, 0})), Error);
}

TEST_CASE("mse is symmetric and zero only on identical images") {
  Prng rng(31);
  for (int i = 0; i < 500; ++i) {
    GrayImage a = testutil::random_gray(rng, 8);
    GrayImage b = a;
    for (auto& v : b.intensities) {
      v = static_cast<std::uint8_t>(rng.uniform_index(256));
    }
    CHECK(mse(a, b) == mse(b, a));
    CHECK(mse(a, b) >= 0.0);
    if (mse(a, b) == 0.0) CHECK(a == b);
  }
}

TEST_CASE("psnr anchors") {
  CHECK(std::isinf(psnr_from_mse(0.0)));
  CHECK(psnr_from_mse(65025.0) == doctest::Approx(0.0).epsilon(1e-12));
  // 255^2 / 100 -> 10 log10(100) = 20 dB
  CHECK(psnr_from_mse(650.25) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("psnr decreases as mse grows") {
  double prev = psnr_from_mse(1.0);
  for (double m : {2.0, 10.0, 100.0, 1000.0, 65025.0}) {
    const double cur = psnr_from_mse(m);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("entropy anchors") {
  CHECK(entropy(make_gray(2, 2, {9, 9, 9, 9})) == 0.0);
  CHECK(entropy(make_gray(2, 1, {0, 255})) == doctest::Approx(1.0));
  GrayImage ramp;
  ramp.width = 256;
  ramp.height = 1;
  for (int k = 0; k < 256; ++k) {
    ramp.intensities.push_back(static_cast<std::uint8_t>(k));
  }
  CHECK(entropy(ramp) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("entropy stays within [0,8] and is permutation invariant") {
  Prng rng(32);
  for (int i = 0; i < 200; ++i) {
    const GrayImage img = testutil::random_gray(rng, 12);
    const double e = entropy(img);
    CHECK(e >= 0.0);
    CHECK(e <= 8.0);

    // Relabel occupied intensities through a bijection.
    GrayImage relabeled = img;
    for (auto& v : relabeled.intensities) {
      v = static_cast<std::uint8_t>(255 - v);
    }
    CHECK(entropy(relabeled) == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("entropy of an RGB image is entropy of its grayscale conversion") {
  Prng rng(33);
  const RgbImage img = testutil::random_rgb(rng, 9);
  CHECK(entropy(img) == entropy(to_grayscale(img)));
}

TEST_CASE("report aggregates mirror the per-image entries") {
  MetricsReport report;
  report.per_image.push_back({"a.ppm", 100.0, psnr_from_mse(100.0), 5.0});
  report.per_image.push_back({"b.ppm", 0.0, psnr_from_mse(0.0), 3.0});
  const ReportAggregate agg = aggregate(report);
  CHECK(agg.image_count == 2);
  CHECK(agg.mean_mse == doctest::Approx(50.0));
  CHECK(agg.infinite_psnr_count == 1);
  CHECK(agg.mean_psnr_db == doctest::Approx(psnr_from_mse(100.0)));
  CHECK(agg.mean_entropy_bits == doctest::Approx(4.0));

  const std::string json = report_to_json(report);
  CHECK(json.find("\"psnr_db\": \"inf\"") != std::string::npos);
  CHECK(json.find("\"image_count\": 2") != std::string::npos);
  CHECK(json.find("\"input_id\": \"a.ppm\"") != std::string::npos);
}
