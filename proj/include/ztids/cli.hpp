#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace ztids::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsage = 2 };

// Entry point of the `ztids` binary. Normal output goes to `out`; usage text,
// errors and logs go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Hash of a run report with timing and thread count left out, as 16 hex digits.
std::string content_hash(const nlohmann::json& report);

// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);

// Plain-text table with Accuracy/Precision/Recall/F1/Time columns.
std::string render_table(const nlohmann::json& report);

}  // namespace ztids::cli
