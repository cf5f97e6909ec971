#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "grm3d/tensor.hpp"

namespace grm3d {

// GMAP layout: "GMAP", u16 version (=1), u32 channels, u32 height, u32 width,
// then channels*height*width float32 values. Everything little-endian.
inline constexpr std::uint16_t kGmapVersion = 1;
inline constexpr std::size_t kGmapHeaderSize = 4 + 2 + 4 + 4 + 4;

std::vector<std::uint8_t> encode_gmap(const TensorMap& map);

/// Decodes one GMAP blob starting at `offset`; on success `offset` points past it.
/// With `exact` set, trailing bytes after the payload are a format error.
TensorMap decode_gmap(std::span<const std::uint8_t> bytes, std::size_t& offset, bool exact);
TensorMap decode_gmap(std::span<const std::uint8_t> bytes);

void write_gmap(const std::filesystem::path& path, const TensorMap& map);
TensorMap read_gmap(const std::filesystem::path& path);

// Named tensor bundle: "GWTS", u16 version, u32 entry count, then per entry
// u32 name length, UTF-8 name, GMAP blob. Entries are written in name order.
using TensorBundle = std::map<std::string, TensorMap>;

std::vector<std::uint8_t> encode_bundle(const TensorBundle& bundle);
TensorBundle decode_bundle(std::span<const std::uint8_t> bytes);
void write_bundle(const std::filesystem::path& path, const TensorBundle& bundle);
TensorBundle read_bundle(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
/// Writes via a temporary sibling file and rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace grm3d
