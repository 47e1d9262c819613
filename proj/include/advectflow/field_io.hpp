/// @file field_io.hpp
/// @brief PWAF binary field files: a fixed 32-byte header followed by raw
///        little-endian doubles in layout order. Round trips are bit-exact.

#pragma once

#include <string>

#include "advectflow/field.hpp"

namespace advectflow {

/// Thrown for malformed or unreadable PWAF files.
class FieldIoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Header layout (32 bytes, little-endian):
///   0..3   magic "PWAF"
///   4..7   version (u32, currently 1)
///   8..19  nx, ny, nz (u32 each)
///   20..22 halo widths x, y, z (u8 each)
///   23..31 zero padding
inline constexpr std::size_t kPwafHeaderBytes = 32;
inline constexpr std::uint32_t kPwafVersion = 1;

void write_field(const Field3D& field, const std::string& path);

/// Reads and validates a PWAF file. Throws FieldIoError on bad magic,
/// unsupported version, halo/extent nonsense, short payload, or non-finite
/// values.
Field3D read_field(const std::string& path);

}  // namespace advectflow
