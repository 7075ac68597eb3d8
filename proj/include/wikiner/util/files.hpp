#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wikiner::util {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Appends one line (a trailing '\n' is added) and flushes it to disk.
void append_line_durable(const std::filesystem::path& path, std::string_view line);

// Splits on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace wikiner::util
