#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace infogent::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
bool contains_icase(std::string_view haystack, std::string_view needle);

/// True when `word` appears in `s` case-insensitively, delimited by
/// non-alphanumeric characters on both sides.
bool contains_word_icase(std::string_view s, std::string_view word);

/// Lowercase, punctuation replaced by spaces, whitespace runs collapsed,
/// trimmed.
std::string normalize(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
/// Lines without their \n or \r\n terminator; a final newline does not
/// start another line.
std::vector<std::string> split_lines(std::string_view s);

/// Returns the first balanced {...} region, honouring JSON string
/// literals and escapes. Markdown fences around it are irrelevant since
/// only the braces are scanned.
std::optional<std::string> first_json_object(std::string_view s);

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;  // 0 when absent
  std::string path_and_query;  // always starts with '/'
};

/// Parses an absolute url of the form scheme://host[:port][/path][?query].
std::optional<Url> parse_url(std::string_view s);
bool is_absolute_url(std::string_view s);
/// Lowercased hostname, or empty when the url does not parse.
std::string hostname(std::string_view url);
/// True when `host` equals `suffix` or ends with "." + suffix.
bool host_matches_suffix(std::string_view host, std::string_view suffix);

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view s);

/// Current wall time as ISO-8601 UTC with millisecond precision.
std::string iso8601_now();

}  // namespace infogent::text
