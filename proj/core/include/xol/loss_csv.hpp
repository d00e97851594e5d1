#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace xol {

// Reads nonnegative losses from CSV. A header row is required when there is
// more than one column and must contain a `loss` column; a single-column file
// may omit it. Blank lines are skipped. Throws ParseError with the 1-based
// line number on malformed or negative values, or when no data rows exist.
std::vector<double> read_losses(std::istream& in);
std::vector<double> read_losses_file(const std::string& path);

// 64-bit FNV-1a digest of a file's bytes.
std::uint64_t file_digest(const std::string& path);

} // namespace xol
