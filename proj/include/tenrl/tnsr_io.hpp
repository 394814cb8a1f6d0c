#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "tenrl/tensor.hpp"

namespace tenrl {

/// "TNSR" binary layout: magic 54 4E 53 52, version 0x01, dtype byte
/// (0x00 float64, 0x01 float32), u32 LE mode count, u64 LE extents, then
/// little-endian row-major data.
class TnsrFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_tnsr(std::ostream& os, const DenseTensor& t);
DenseTensor read_tnsr(std::istream& is);

void save_tnsr(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor load_tnsr(const std::filesystem::path& path);

}  // namespace tenrl
