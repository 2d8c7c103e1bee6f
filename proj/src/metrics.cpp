#include "uwe/metrics.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "uwe/histeq.hpp"

namespace uwe {

namespace {

double mse_bytes(const std::vector<std::uint8_t>& a,
                 const std::vector<std::uint8_t>& b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    sum += static_cast<double>(d) * static_cast<double>(d);
  }
  return sum / static_cast<double>(a.size());
}

}  // namespace

double mse(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorCode::DimensionMismatch, "mse: image dimensions differ");
  }
  return mse_bytes(a.intensities, b.intensities);
}

double mse(const RgbImage& a, const RgbImage& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorCode::DimensionMismatch, "mse: image dimensions differ");
  }
  return mse_bytes(a.pixels, b.pixels);
}

double psnr_from_mse(double mse_value) {
  if (mse_value == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(255.0 * 255.0 / mse_value);
}

double psnr(const GrayImage& a, const GrayImage& b) {
  return psnr_from_mse(mse(a, b));
}

double psnr(const RgbImage& a, const RgbImage& b) {
  return psnr_from_mse(mse(a, b));
}

double entropy(const GrayImage& img) {
  const Histogram h = histogram(img);  // throws EmptyImage
  const double total = static_cast<double>(h.total);
  double bits = 0.0;
  for (std::uint64_t count : h.counts) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / total;
    bits -= p * std::log2(p);
  }
  return bits;
}

double entropy(const RgbImage& img) { return entropy(to_grayscale(img)); }

ReportAggregate aggregate(const MetricsReport& report) {
  ReportAggregate agg;
  agg.image_count = report.per_image.size();
  double psnr_sum = 0.0;
  std::size_t psnr_finite = 0;
  for (const ImageMetrics& m : report.per_image) {
    agg.mean_mse += m.mse;
    agg.mean_entropy_bits += m.entropy_bits;
    if (std::isinf(m.psnr_db)) {
      ++agg.infinite_psnr_count;
    } else {
      psnr_sum += m.psnr_db;
      ++psnr_finite;
    }
  }
  if (agg.image_count > 0) {
    agg.mean_mse /= static_cast<double>(agg.image_count);
    agg.mean_entropy_bits /= static_cast<double>(agg.image_count);
  }
  agg.mean_psnr_db = psnr_finite > 0
                         ? psnr_sum / static_cast<double>(psnr_finite)
                         : std::numeric_limits<double>::infinity();
  return agg;
}

namespace {

nlohmann::json psnr_to_json(double psnr_db) {
  if (std::isinf(psnr_db)) return "inf";
  return psnr_db;
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json doc;
  doc["per_image"] = nlohmann::json::array();
  for (const ImageMetrics& m : report.per_image) {
    doc["per_image"].push_back({
        {"input_id", m.input_id},
        {"mse", m.mse},
        {"psnr_db", psnr_to_json(m.psnr_db)},
        {"entropy_bits", m.entropy_bits},
    });
  }
  const ReportAggregate agg = aggregate(report);
  doc["aggregate"] = {
      {"mean_mse", agg.mean_mse},
      {"mean_psnr_db", psnr_to_json(agg.mean_psnr_db)},
      {"infinite_psnr_count", agg.infinite_psnr_count},
      {"mean_entropy_bits", agg.mean_entropy_bits},
      {"image_count", agg.image_count},
  };
  return doc.dump(2) + "\n";
}

}  // namespace uwe
