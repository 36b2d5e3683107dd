#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "lgplan/mpnn.hpp"

namespace lgplan {

inline constexpr uint32_t kModelFormatVersion = 1;
// Upper bound on the JSON header written by save_model.
inline constexpr size_t kModelHeaderMax = 1024;

// Binary container: magic, version, JSON header (kind, dims, labels, seed,
// aggregator, readout), parameter count, little-endian doubles, checksum.
// The exact layout is in docs/formats.md. Size is at most
// 32 + kModelHeaderMax + 8 * num_parameters bytes.
std::string serialize_model(const MpnnModel& model);
MpnnModel deserialize_model(const std::string& bytes);

void save_model(const MpnnModel& model, const std::filesystem::path& path);
// Throws FileNotFound, FormatVersionMismatch, ChecksumMismatch.
MpnnModel load_model(const std::filesystem::path& path);

}  // namespace lgplan
