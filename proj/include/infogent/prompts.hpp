#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace infogent::prompts {

// Template names, one per file under prompts/.
inline constexpr std::string_view kNavigatorApi = "navigator_api";
inline constexpr std::string_view kNavigatorVisual = "navigator_visual";
inline constexpr std::string_view kExtractorText = "extractor_text";
inline constexpr std::string_view kExtractorVisual = "extractor_visual";
inline constexpr std::string_view kAggregatorApi = "aggregator_api";
inline constexpr std::string_view kAggregatorVisual = "aggregator_visual";
inline constexpr std::string_view kJudge = "judge";
inline constexpr std::string_view kAnswer = "answer";

using Vars = std::map<std::string, std::string, std::less<>>;

/// Raw template bytes as stored on disk. Throws std::out_of_range for an
/// unknown name.
const std::string& template_text(std::string_view name);

std::vector<std::string> template_names();

/// Single-pass substitution of {name} tokens whose name is in `vars`.
/// Unknown {tokens} and bare braces are left untouched, and substituted
/// values are never rescanned.
std::string render(std::string_view tpl, const Vars& vars);

/// Placeholder names of the form {identifier} in order of first use.
std::vector<std::string> placeholders(std::string_view tpl);

namespace detail {
const std::map<std::string, std::string, std::less<>>& embedded_templates();
}

}  // namespace infogent::prompts
