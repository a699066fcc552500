#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ve2d/state.hpp"

namespace ve2d {

/// Binary snapshot layout, little-endian throughout:
///   "VE2D" | u32 version | u32 n | f64 L | f64 t | f64 mu | V | H1 | H2
/// where each array holds n*n f64 samples in grid order (x2 fastest).
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const PotentialState& s);
PotentialState decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::filesystem::path& path, const PotentialState& s);
PotentialState read_snapshot(const std::filesystem::path& path);

}  // namespace ve2d
