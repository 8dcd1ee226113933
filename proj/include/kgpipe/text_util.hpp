#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgpipe::text {

// Byte range [begin, end) of one whitespace-delimited token.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on Unicode White_Space code points (UTF-8 input). Invalid UTF-8
// bytes are treated as non-space.
std::vector<TokenSpan> whitespace_token_spans(std::string_view text);

bool is_unicode_space(char32_t cp);

std::string_view trim(std::string_view s);
std::string trim_copy(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Lowercases ASCII and collapses every whitespace run to one space; used as
// the equality key for duplicate detection.
std::string normalize_for_compare(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool istarts_with(std::string_view s, std::string_view prefix);
bool icontains(std::string_view haystack, std::string_view needle);
void replace_all(std::string& s, std::string_view from, std::string_view to);

// "DataFormat" -> "data format", "CNNModel" -> "cnn model".
std::string decamelize(std::string_view name);

}  // namespace kgpipe::text
