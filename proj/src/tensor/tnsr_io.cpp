#include "tenrl/tnsr_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace tenrl {

namespace {

constexpr std::array<unsigned char, 4> kMagic{0x54, 0x4E, 0x53, 0x52};
constexpr unsigned char kVersion = 0x01;

static_assert(std::endian::native == std::endian::little, "TNSR I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) throw TnsrFormatError("truncated TNSR stream");
  return value;
}

}  // namespace

void write_tnsr(std::ostream& os, const DenseTensor& t) {
  if (t.order() == 0) throw TnsrFormatError("cannot serialize an empty tensor");
  os.write(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
  put<std::uint8_t>(os, kVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(t.dtype()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.order()));
  for (auto e : t.shape()) put<std::uint64_t>(os, e);
  if (t.dtype() == DType::kFloat64) {
    os.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
  } else {
    for (double v : t.data()) put<float>(os, static_cast<float>(v));
  }
  if (!os) throw TnsrFormatError("failed writing TNSR stream");
}

DenseTensor read_tnsr(std::istream& is) {
  std::array<unsigned char, 4> magic{};
  if (!is.read(reinterpret_cast<char*>(magic.data()), magic.size())) throw TnsrFormatError("truncated TNSR header");
  if (magic != kMagic) throw TnsrFormatError("bad TNSR magic");
  const auto version = get<std::uint8_t>(is);
  if (version != kVersion) throw TnsrFormatError("unsupported TNSR version " + std::to_string(version));
  const auto dtype = get<std::uint8_t>(is);
  if (dtype > 1) throw TnsrFormatError("unknown TNSR dtype " + std::to_string(dtype));
  const auto modes = get<std::uint32_t>(is);
  if (modes == 0) throw TnsrFormatError("TNSR mode count must be positive");
  Shape shape(modes);
  for (auto& e : shape) {
    e = static_cast<std::size_t>(get<std::uint64_t>(is));
    if (e == 0) throw TnsrFormatError("TNSR extents must be positive");
  }
  std::vector<double> data(shape_size(shape));
  if (dtype == 0) {
    if (!is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double))))
      throw TnsrFormatError("truncated TNSR payload");
  } else {
    for (auto& v : data) v = get<float>(is);
  }
  DenseTensor t(std::move(shape), std::move(data));
  t.set_dtype(static_cast<DType>(dtype));
  return t;
}

void save_tnsr(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TnsrFormatError("cannot open " + path.string() + " for writing");
  write_tnsr(os, t);
}

DenseTensor load_tnsr(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TnsrFormatError("cannot open " + path.string());
  return read_tnsr(is);
}

}  // namespace tenrl
