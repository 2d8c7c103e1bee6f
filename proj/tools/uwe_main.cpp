// uwe: underwater image enhancement pipeline (decolor -> histogram
// equalization -> learned re-colorization) plus training and evaluation.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "uwe/colorizer.hpp"
#include "uwe/dataset.hpp"
#include "uwe/fileio.hpp"
#include "uwe/histeq.hpp"
#include "uwe/metrics.hpp"
#include "uwe/ppm.hpp"

namespace {

// Exit codes: 0 ok, 1 usage, 2 I/O, 3 malformed input, 4 model, 5 diverged.
int exit_code_for(const uwe::Error& e) {
  switch (e.code()) {
    case uwe::ErrorCode::Io:
      return 2;
    case uwe::ErrorCode::BadMagic:
    case uwe::ErrorCode::TruncatedCheckpoint:
    case uwe::ErrorCode::ArchMismatch:
      return 4;
    case uwe::ErrorCode::EmptyDataset:
      return 1;
    case uwe::ErrorCode::NonFiniteLoss:
      return 5;
    default:
      return 3;
  }
}

uwe::GrayImage to_gray_any(const uwe::Image& img) {
  if (const auto* rgb = std::get_if<uwe::RgbImage>(&img)) {
    return uwe::to_grayscale(*rgb);
  }
  return std::get<uwe::GrayImage>(img);
}

std::string resolve_path(const std::filesystem::path& base,
                         const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() ? p.string() : (base / p).string();
}

void require_parent_writable(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    uwe::fail(uwe::ErrorCode::Io,
              "output directory does not exist: " + parent.string());
  }
}

struct EnhanceArgs {
  std::string input, model, output;
  bool skip_colorize = false;
};

int cmd_enhance(const EnhanceArgs& args) {
  if (!args.skip_colorize && args.model.empty()) {
    std::cerr << "enhance: --model is required unless --skip-colorize is set\n";
    return 1;
  }
  const uwe::Image input = uwe::load_image(args.input);
  const uwe::GrayImage equalized = uwe::equalize(to_gray_any(input));
  if (args.skip_colorize) {
    uwe::save_image(args.output, equalized);
    return 0;
  }
  const uwe::ColorizerModel model = uwe::load_model_file(args.model);
  uwe::save_image(args.output, uwe::colorize(model, equalized));
  return 0;
}

int cmd_histeq(const std::string& input, const std::string& output) {
  const uwe::Image img = uwe::load_image(input);
  uwe::save_image(output, uwe::equalize(to_gray_any(img)));
  return 0;
}

struct LoadedPair {
  uwe::GrayImage equalized;
  uwe::Image reference;
  const uwe::ManifestEntry* entry;
};

std::vector<LoadedPair> load_pairs(const uwe::Manifest& manifest,
                                   const std::filesystem::path& base) {
  std::vector<LoadedPair> pairs;
  pairs.reserve(manifest.entries.size());
  for (const uwe::ManifestEntry& entry : manifest.entries) {
    LoadedPair pair;
    pair.entry = &entry;
    const uwe::Image input =
        uwe::load_image(resolve_path(base, entry.input_path));
    pair.reference = uwe::load_image(resolve_path(base, entry.reference_path));
    if (uwe::image_width(input) != uwe::image_width(pair.reference) ||
        uwe::image_height(input) != uwe::image_height(pair.reference)) {
      uwe::fail(uwe::ErrorCode::DimensionMismatch,
                "manifest line " + std::to_string(entry.line) +
                    ": input and reference dimensions differ");
    }
    pair.equalized = uwe::equalize(to_gray_any(input));
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

struct TrainArgs {
  std::string manifest, out;
  uwe::TrainConfig cfg;
};

int cmd_train(const TrainArgs& args) {
  const uwe::Manifest manifest = uwe::load_manifest_file(args.manifest);
  if (manifest.entries.empty()) {
    uwe::fail(uwe::ErrorCode::EmptyDataset, "train: manifest lists no pairs");
  }
  require_parent_writable(args.out);
  const auto base = std::filesystem::path(args.manifest).parent_path();

  uwe::Prng patch_rng(args.cfg.seed);
  std::vector<uwe::TrainPair> pairs;
  for (const LoadedPair& loaded : load_pairs(manifest, base)) {
    const auto* rgb = std::get_if<uwe::RgbImage>(&loaded.reference);
    if (rgb == nullptr) {
      uwe::fail(uwe::ErrorCode::DimensionMismatch,
                "manifest line " + std::to_string(loaded.entry->line) +
                    ": reference must be an RGB (P6) image");
    }
    for (const uwe::PatchPair& patch : uwe::extract_patches(
             loaded.equalized, *rgb, args.cfg.patch_size,
             args.cfg.patches_per_image, patch_rng)) {
      pairs.push_back(
          {uwe::gray_plane(patch.gray), uwe::rgb_planes(patch.rgb)});
    }
  }

  const uwe::TrainResult result =
      uwe::train(pairs, args.cfg, [](std::int64_t step, double loss) {
        if (step % 100 == 0) {
          std::printf("step %" PRId64 " loss %.6g\n", step, loss);
          std::fflush(stdout);
        }
      });
  uwe::save_model_file(args.out, result.model);
  return 0;
}

struct EvalArgs {
  std::string manifest, model, report;
  bool skip_colorize = false;
};

int cmd_eval(const EvalArgs& args) {
  if (!args.skip_colorize && args.model.empty()) {
    std::cerr << "eval: --model is required unless --skip-colorize is set\n";
    return 1;
  }
  const uwe::Manifest manifest = uwe::load_manifest_file(args.manifest);
  if (manifest.entries.empty()) {
    uwe::fail(uwe::ErrorCode::EmptyDataset, "eval: manifest lists no pairs");
  }
  require_parent_writable(args.report);
  const auto base = std::filesystem::path(args.manifest).parent_path();
  uwe::ColorizerModel model;
  if (!args.skip_colorize) {
    model = uwe::load_model_file(args.model);
  }

  uwe::MetricsReport report;
  for (const LoadedPair& loaded : load_pairs(manifest, base)) {
    const uwe::Image enhanced =
        args.skip_colorize ? uwe::Image(loaded.equalized)
                           : uwe::Image(uwe::colorize(model, loaded.equalized));
    if (uwe::channel_count(enhanced) !=
        uwe::channel_count(loaded.reference)) {
      uwe::fail(uwe::ErrorCode::DimensionMismatch,
                "manifest line " + std::to_string(loaded.entry->line) +
                    ": enhanced output and reference channel counts differ");
    }
    uwe::ImageMetrics m;
    m.input_id = loaded.entry->input_path;
    if (const auto* rgb = std::get_if<uwe::RgbImage>(&enhanced)) {
      m.mse = uwe::mse(*rgb, std::get<uwe::RgbImage>(loaded.reference));
      m.entropy_bits = uwe::entropy(*rgb);
    } else {
      const auto& gray = std::get<uwe::GrayImage>(enhanced);
      m.mse = uwe::mse(gray, std::get<uwe::GrayImage>(loaded.reference));
      m.entropy_bits = uwe::entropy(gray);
    }
    m.psnr_db = uwe::psnr_from_mse(m.mse);
    report.per_image.push_back(std::move(m));
  }
  uwe::write_file_atomic(args.report, uwe::report_to_json(report));
  return 0;
}

int cmd_metrics(const std::string& path_a, const std::string& path_b) {
  const uwe::Image a = uwe::load_image(path_a);
  const uwe::Image b = uwe::load_image(path_b);
  if (uwe::channel_count(a) != uwe::channel_count(b)) {
    uwe::fail(uwe::ErrorCode::DimensionMismatch,
              "metrics: images have different channel counts");
  }
  double mse_value = 0.0;
  if (const auto* rgb = std::get_if<uwe::RgbImage>(&a)) {
    mse_value = uwe::mse(*rgb, std::get<uwe::RgbImage>(b));
  } else {
    mse_value =
        uwe::mse(std::get<uwe::GrayImage>(a), std::get<uwe::GrayImage>(b));
  }
  const double entropy_a = std::visit(
      [](const auto& img) { return uwe::entropy(img); }, a);
  const double entropy_b = std::visit(
      [](const auto& img) { return uwe::entropy(img); }, b);
  std::printf("mse=%.6g psnr=%.6g entropy_a=%.6g entropy_b=%.6g\n", mse_value,
              uwe::psnr_from_mse(mse_value), entropy_a, entropy_b);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Underwater image enhancement: grayscale decoloring, histogram "
               "equalization, and CNN re-colorization"};
  app.require_subcommand(1);

  EnhanceArgs enhance_args;
  CLI::App* enhance = app.add_subcommand(
      "enhance", "Run the full pipeline on one image");
  enhance->add_option("--input", enhance_args.input, "Input PPM/PGM")
      ->required();
  enhance->add_option("--model", enhance_args.model, "Colorizer checkpoint");
  enhance->add_option("--output", enhance_args.output, "Output image")
      ->required();
  enhance->add_flag("--skip-colorize", enhance_args.skip_colorize,
                    "Stop after equalization and write a PGM");

  std::string histeq_input, histeq_output;
  CLI::App* histeq_cmd = app.add_subcommand(
      "histeq", "Decolor and histogram-equalize one image");
  histeq_cmd->add_option("--input", histeq_input, "Input PPM/PGM")->required();
  histeq_cmd->add_option("--output", histeq_output, "Output PGM")->required();

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train the colorizer on a manifest of image pairs");
  train_cmd->add_option("--manifest", train_args.manifest, "Pair manifest")
      ->required();
  train_cmd->add_option("--out", train_args.out, "Checkpoint to write")
      ->required();
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "Training epochs")
      ->default_val(10);
  train_cmd->add_option("--lr", train_args.cfg.lr, "Adam learning rate")
      ->default_val(1e-3);
  train_cmd->add_option("--seed", train_args.cfg.seed, "RNG seed")
      ->default_val(42);
  train_cmd
      ->add_option("--patch-size", train_args.cfg.patch_size,
                   "Square patch edge (divisible by 4)")
      ->default_val(32);

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Enhance every manifest input and write a metrics report");
  eval_cmd->add_option("--manifest", eval_args.manifest, "Pair manifest")
      ->required();
  eval_cmd->add_option("--model", eval_args.model, "Colorizer checkpoint");
  eval_cmd->add_option("--report", eval_args.report, "JSON report to write")
      ->required();
  eval_cmd->add_flag("--skip-colorize", eval_args.skip_colorize,
                     "Evaluate the equalized grayscale instead of colorizing");

  std::string metrics_a, metrics_b;
  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "Print mse/psnr/entropy for two images");
  metrics_cmd->add_option("--a", metrics_a, "First image")->required();
  metrics_cmd->add_option("--b", metrics_b, "Second image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(enhance)) return cmd_enhance(enhance_args);
    if (app.got_subcommand(histeq_cmd)) {
      return cmd_histeq(histeq_input, histeq_output);
    }
    if (app.got_subcommand(train_cmd)) {
      if (train_args.cfg.patch_size % 4 != 0 || train_args.cfg.patch_size <= 0) {
        std::cerr << "train: --patch-size must be a positive multiple of 4\n";
        return 1;
      }
      if (train_args.cfg.epochs <= 0) {
        std::cerr << "train: --epochs must be positive\n";
        return 1;
      }
      return cmd_train(train_args);
    }
    if (app.got_subcommand(eval_cmd)) return cmd_eval(eval_args);
    if (app.got_subcommand(metrics_cmd)) {
      return cmd_metrics(metrics_a, metrics_b);
    }
  } catch (const uwe::Error& e) {
    std::cerr << "uwe: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "uwe: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
