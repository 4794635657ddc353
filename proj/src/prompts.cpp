#include "infogent/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace infogent::prompts {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

const std::string& template_text(std::string_view name) {
  const auto& table = detail::embedded_templates();
  auto it = table.find(name);
  if (it == table.end()) throw std::out_of_range("unknown prompt template: " + std::string(name));
  return it->second;
}

std::vector<std::string> template_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : detail::embedded_templates()) out.push_back(k);
  return out;
}

std::string render(std::string_view tpl, const Vars& vars) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      const auto close = tpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const std::string_view name = tpl.substr(i + 1, close - i - 1);
        if (auto it = vars.find(name); is_identifier(name) && it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tpl[i]);
    ++i;
  }
  return out;
}

std::vector<std::string> placeholders(std::string_view tpl) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = tpl.find('{', i)) != std::string_view::npos) {
    const auto close = tpl.find('}', i + 1);
    if (close == std::string_view::npos) break;
    const std::string name(tpl.substr(i + 1, close - i - 1));
    if (is_identifier(name) && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    i = i + 1;
  }
  return out;
}

}  // namespace infogent::prompts
