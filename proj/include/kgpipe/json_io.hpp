#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace kgpipe {

using json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);

// Writes through a temporary sibling and renames it into place, so readers
// never observe a partially written file.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

json read_json_file(const std::filesystem::path& path);

// Two-space indented dump with a trailing newline. nlohmann::json keeps
// object keys sorted, which makes the output byte-stable.
void write_json_atomic(const std::filesystem::path& path, const json& value);

std::string sha256_hex(std::string_view data);

}  // namespace kgpipe
