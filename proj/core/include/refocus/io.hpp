#pragma once

#include <filesystem>
#include <vector>

#include "refocus/geometry.hpp"

namespace refocus {

/// ASCII `.xyz`: one point per line, three floats separated by single spaces,
/// LF endings, no header.
[[nodiscard]] PointCloud load_xyz(const std::filesystem::path& path);
void save_xyz(const std::filesystem::path& path, const PointCloud& cloud);

/// Binary cache: magic "RFPC", version byte 1, little-endian uint32 N, then 3N
/// little-endian float32.
[[nodiscard]] PointCloud load_binary(const std::filesystem::path& path);
void save_binary(const std::filesystem::path& path, const PointCloud& cloud);

/// Dataset directory: `manifest.csv` (header `file,label`) plus one `.xyz` per
/// row and an optional `classes.txt` with one class name per line. Without
/// `classes.txt` the class count is max(label) + 1.
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& dir, Split split = Split::test);
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

/// Outlier ground truth written next to a corrupted dataset: `flags.csv` with
/// header `file,point_index`, one row per flagged point.
void save_flags(const std::filesystem::path& dir, const Dataset& dataset,
                const std::vector<std::vector<bool>>& flags);
/// Reads `flags.csv`; returns one flag vector per sample, sized to its cloud.
[[nodiscard]] std::vector<std::vector<bool>> load_flags(const std::filesystem::path& dir,
                                                        const Dataset& dataset);

}  // namespace refocus
