#pragma once

// Signal persistence.
//
// CSV: header line `value`, then one value per line in storage order. The
// grid is not recorded, so readers supply it (or get a 1-D grid by default).
//
// Raw binary: an 8-byte little-endian dims header (two uint32: n0, n1 with
// n1 = 0 for 1-D signals) followed by little-endian IEEE-754 doubles.

#include <filesystem>
#include <optional>

#include "smre/grid.hpp"

namespace smre::io {

void write_csv(const std::filesystem::path& path, const Signal& s);
/// When `grid` is empty the signal is read as 1-D with as many cells as rows.
Signal read_csv(const std::filesystem::path& path, const std::optional<Grid>& grid = std::nullopt);

void write_raw(const std::filesystem::path& path, const Signal& s);
Signal read_raw(const std::filesystem::path& path);

}  // namespace smre::io
