#pragma once

#include <stdexcept>
#include <string>

namespace mocap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bvh
struct MalformedHierarchy : Error {
  int line = 0;
  explicit MalformedHierarchy(const std::string& msg, int line_no = 0)
      : Error(msg), line(line_no) {}
};
struct FrameCountMismatch : Error {
  using Error::Error;
};
struct ChannelArityMismatch : Error {
  using Error::Error;
};
struct NonNumericValue : Error {
  int line = 0;
  explicit NonNumericValue(const std::string& msg, int line_no = 0)
      : Error(msg), line(line_no) {}
};

// motion / features
struct TooFewFrames : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct MixedChannelCounts : Error {
  using Error::Error;
};

// ngn
struct InvalidBounds : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct NonPositiveRate : Error {
  using Error::Error;
};
struct MissingClass : Error {
  using Error::Error;
};

// metrics
struct TooFewSamples : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};

// classify
struct SingleClass : Error {
  using Error::Error;
};
struct NoSplits : Error {
  using Error::Error;
};
struct EmptyMatrix : Error {
  using Error::Error;
};
struct ClassTooSmall : Error {
  using Error::Error;
};

}  // namespace mocap
