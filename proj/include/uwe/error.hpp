#pragma once

#include <stdexcept>
#include <string>

namespace uwe {

enum class ErrorCode {
  // PPM/PGM codec
  UnsupportedMagic,
  UnsupportedMaxval,
  Truncated,
  MalformedHeader,
  // raster conversions
  NonFiniteValue,
  ImageTooSmall,
  // histogram / metrics
  EmptyImage,
  DimensionMismatch,
  // tensors and layers
  ShapeMismatch,
  OddDimension,
  MisalignedDims,
  // checkpoints
  BadMagic,
  TruncatedCheckpoint,
  ArchMismatch,
  // dataset
  MalformedLine,
  DuplicatePair,
  PatchTooLarge,
  EmptyDataset,
  // training
  NonFiniteLoss,
  // filesystem
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace uwe
