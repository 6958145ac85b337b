#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "hamp/costmap.hpp"
#include "hamp/error.hpp"

namespace hamp {

namespace {

constexpr std::array<char, 8> kMagic = {'H', 'A', 'M', 'P', 'C', 'F', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 64;

template <typename T>
void put_le(std::vector<unsigned char>& buf, std::size_t pos, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(buf.data() + pos, bytes, sizeof(T));
}

template <typename T>
T get_le(const unsigned char* data) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, data, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_cost_field_binary(const std::filesystem::path& path, const CostField& field) {
  const auto& spec = field.spec();
  const auto values = field.values();
  std::vector<unsigned char> buf(kHeaderSize + 4 * values.size(), 0);
  std::memcpy(buf.data(), kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(buf, 8, kVersion);
  put_le<std::uint32_t>(buf, 12, static_cast<std::uint32_t>(spec.dims[0]));
  put_le<std::uint32_t>(buf, 16, static_cast<std::uint32_t>(spec.dims[1]));
  put_le<std::uint32_t>(buf, 20, static_cast<std::uint32_t>(spec.dims[2]));
  put_le<double>(buf, 24, spec.resolution);
  put_le<double>(buf, 32, spec.origin.x());
  put_le<double>(buf, 40, spec.origin.y());
  put_le<double>(buf, 48, spec.origin.z());
  for (std::size_t i = 0; i < values.size(); ++i) {
    put_le<float>(buf, kHeaderSize + 4 * i, static_cast<float>(values[i]));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

CostField read_cost_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderSize || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": not a cost field file");
  }
  if (get_le<std::uint32_t>(buf.data() + 8) != kVersion) {
    throw Error(ErrorCode::ParseError, path.string() + ": unsupported cost field version");
  }
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    dims[a] = static_cast<int>(get_le<std::uint32_t>(buf.data() + 12 + 4 * a));
  }
  const double res = get_le<double>(buf.data() + 24);
  const Eigen::Vector3d origin(get_le<double>(buf.data() + 32), get_le<double>(buf.data() + 40),
                               get_le<double>(buf.data() + 48));
  const GridSpec spec(origin, res, dims);
  if (buf.size() != kHeaderSize + 4 * spec.cell_count()) {
    throw Error(ErrorCode::ParseError, path.string() + ": payload size does not match header dims");
  }
  std::vector<double> values(spec.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = get_le<float>(buf.data() + kHeaderSize + 4 * i);
  }
  return CostField(spec, std::move(values));
}

}  // namespace hamp
