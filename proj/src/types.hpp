#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nids {

inline constexpr int kNumClasses = 5;

// Global class order. Every matrix, model file and report uses these indices.
enum class ClassLabel : std::uint8_t {
  kNormal = 0,
  kDos = 1,
  kProbe = 2,
  kR2l = 3,
  kU2r = 4,
};

inline constexpr std::array<const char*, kNumClasses> kClassNames = {
    "Normal", "DoS", "Probe", "R2L", "U2R"};

inline const char* class_name(int label) {
  if (label < 0 || label >= kNumClasses) throw std::out_of_range("class label out of range");
  return kClassNames[static_cast<std::size_t>(label)];
}

inline int class_index(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i)
    if (name == kClassNames[static_cast<std::size_t>(i)]) return i;
  return -1;
}

// Error taxonomy. DataError and IoError map to exit code 2 in the CLI,
// NumericError to 3, std::invalid_argument to 1.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;

}  // namespace nids
