#pragma once

#include <string>
#include <vector>

#include "uwe/image.hpp"

namespace uwe {

/// Mean squared difference over all pixels and channels, channels taken as
/// integers in [0,255], accumulated in 64-bit floating point.
/// Throws DimensionMismatch when shapes differ.
double mse(const GrayImage& a, const GrayImage& b);
double mse(const RgbImage& a, const RgbImage& b);

/// 10 * log10(255^2 / mse). Returns +infinity when mse is 0.
double psnr_from_mse(double mse_value);
double psnr(const GrayImage& a, const GrayImage& b);
double psnr(const RgbImage& a, const RgbImage& b);

/// Shannon entropy of the intensity histogram, in bits (0..8).
/// RGB input is decolored first; the pipeline works in the gray domain.
double entropy(const GrayImage& img);
double entropy(const RgbImage& img);

struct ImageMetrics {
  std::string input_id;
  double mse = 0.0;
  double psnr_db = 0.0;  // may be +infinity
  double entropy_bits = 0.0;
};

struct ReportAggregate {
  double mean_mse = 0.0;
  double mean_psnr_db = 0.0;  // over finite entries; +infinity if none
  std::size_t infinite_psnr_count = 0;
  double mean_entropy_bits = 0.0;
  std::size_t image_count = 0;
};

struct MetricsReport {
  std::vector<ImageMetrics> per_image;
};

ReportAggregate aggregate(const MetricsReport& report);

/// JSON document with per_image and aggregate sections; +infinity PSNR is
/// encoded as the string "inf" so reports never carry non-JSON numbers.
std::string report_to_json(const MetricsReport& report);

}  // namespace uwe
