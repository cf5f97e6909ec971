#include "grm3d/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "grm3d/errors.hpp"

namespace grm3d {
namespace {

static_assert(std::numeric_limits<float>::is_iec559, "GMAP requires IEEE-754 floats");

constexpr char kGmapMagic[4] = {'G', 'M', 'A', 'P'};
constexpr char kBundleMagic[4] = {'G', 'W', 'T', 'S'};
constexpr std::uint16_t kBundleVersion = 1;
// Refuse absurd headers before allocating (1 Gi values).
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 30;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t& offset) : bytes_(bytes), pos_(offset) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() < pos_ || bytes_.size() - pos_ < n) {
      throw FormatError(std::string("truncated ") + what + ": expected " + std::to_string(n) +
                            " bytes, found " +
                            std::to_string(bytes_.size() > pos_ ? bytes_.size() - pos_ : 0),
                        pos_);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  void magic(const char (&expected)[4]) {
    need(4, "magic");
    if (std::memcmp(bytes_.data() + pos_, expected, 4) != 0) {
      throw FormatError(std::string("bad magic, expected \"") + std::string(expected, 4) + "\"",
                        pos_);
    }
    pos_ += 4;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::uint8_t* here() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t& pos_;
};

}  // namespace

std::vector<std::uint8_t> encode_gmap(const TensorMap& map) {
  if (!map.all_finite()) throw FormatError("refusing to write non-finite values", 0);
  std::vector<std::uint8_t> out;
  out.reserve(kGmapHeaderSize + map.size() * 4);
  out.insert(out.end(), std::begin(kGmapMagic), std::end(kGmapMagic));
  put_u16(out, kGmapVersion);
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  for (float v : map.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

TensorMap decode_gmap(std::span<const std::uint8_t> bytes, std::size_t& offset, bool exact) {
  if (offset >= bytes.size()) throw FormatError("empty input", offset);
  Reader r(bytes, offset);
  r.magic(kGmapMagic);
  const std::size_t version_at = r.pos();
  const auto version = r.u16("version");
  if (version != kGmapVersion) {
    throw FormatError("unsupported GMAP version " + std::to_string(version), version_at);
  }
  const std::size_t dims_at = r.pos();
  const std::uint64_t c = r.u32("channels");
  const std::uint64_t h = r.u32("height");
  const std::uint64_t w = r.u32("width");
  const std::uint64_t count = c * h * w;
  if (c > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max() ||
      w > std::numeric_limits<int>::max() || (h != 0 && w != 0 && c > kMaxValues / (h * w)) ||
      count > kMaxValues) {
    throw FormatError("dimension overflow " + std::to_string(c) + "x" + std::to_string(h) + "x" +
                          std::to_string(w),
                      dims_at);
  }
  const std::uint64_t payload = count * 4;
  if (r.remaining() < payload || (exact && r.remaining() != payload)) {
    throw FormatError("payload size mismatch: expected " + std::to_string(payload) +
                          " bytes, actual " + std::to_string(r.remaining()),
                      r.pos());
  }
  std::vector<float> values(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t at = r.pos();
    const float v = std::bit_cast<float>(r.u32("value"));
    if (!std::isfinite(v)) throw FormatError("non-finite value in payload", at);
    values[i] = v;
  }
  return TensorMap(static_cast<int>(c), static_cast<int>(h), static_cast<int>(w),
                   std::move(values));
}

TensorMap decode_gmap(std::span<const std::uint8_t> bytes) {
  std::size_t offset = 0;
  return decode_gmap(bytes, offset, true);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_gmap(const std::filesystem::path& path, const TensorMap& map) {
  write_file_atomic(path, encode_gmap(map));
}

TensorMap read_gmap(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_gmap(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

std::vector<std::uint8_t> encode_bundle(const TensorBundle& bundle) {
  std::vector<std::uint8_t> out(std::begin(kBundleMagic), std::end(kBundleMagic));
  put_u16(out, kBundleVersion);
  put_u32(out, static_cast<std::uint32_t>(bundle.size()));
  for (const auto& [name, tensor] : bundle) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    const auto blob = encode_gmap(tensor);
    out.insert(out.end(), blob.begin(), blob.end());
  }
  return out;
}

TensorBundle decode_bundle(std::span<const std::uint8_t> bytes) {
  std::size_t offset = 0;
  if (bytes.empty()) throw FormatError("empty input", 0);
  Reader r(bytes, offset);
  r.magic(kBundleMagic);
  const std::size_t version_at = r.pos();
  if (r.u16("version") != kBundleVersion) throw FormatError("unsupported bundle version", version_at);
  const auto count = r.u32("entry count");
  TensorBundle bundle;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t name_at = r.pos();
    const auto len = r.u32("name length");
    r.need(len, "name");
    std::string name(reinterpret_cast<const char*>(r.here()), len);
    r.skip(len);
    if (bundle.count(name)) throw FormatError("duplicate entry \"" + name + "\"", name_at);
    bundle.emplace(std::move(name), decode_gmap(bytes, offset, false));
  }
  if (offset != bytes.size()) throw FormatError("trailing bytes after last entry", offset);
  return bundle;
}

void write_bundle(const std::filesystem::path& path, const TensorBundle& bundle) {
  write_file_atomic(path, encode_bundle(bundle));
}

TensorBundle read_bundle(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_bundle(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

}  // namespace grm3d
