#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trajsim {

/// 12-significant-digit decimal, the fixed precision used by derived CSV
/// artifacts (distance matrices, embeddings, sweeps).
std::string fmt_g12(double v);

/// Shortest decimal that round-trips the exact double. Used for trajectory
/// CSVs so that serialize -> ingest is lossless.
std::string fmt_exact(double v);

std::optional<double> parse_double(std::string_view s);

/// Splits one CSV line on commas. No quoting: field values must not contain
/// commas or newlines.
std::vector<std::string_view> split_csv_line(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace trajsim
