#include "infogent/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "infogent/text_util.hpp"

namespace infogent {

namespace {

RougeScore from_counts(std::size_t overlap, std::size_t predicted_total, std::size_t gold_total) {
  RougeScore s;
  if (predicted_total > 0) s.precision = static_cast<double>(overlap) / static_cast<double>(predicted_total);
  if (gold_total > 0) s.recall = static_cast<double>(overlap) / static_cast<double>(gold_total);
  if (s.precision + s.recall > 0) s.f = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

RougeScore degenerate(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return a == b ? RougeScore{1.0, 1.0, 1.0} : RougeScore{};
}

std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

bool string_accuracy(std::string_view predicted, std::string_view gold) {
  const std::string g = text::normalize(gold);
  if (g.empty()) return false;
  return text::normalize(predicted).find(g) != std::string::npos;
}

std::vector<std::string> metric_tokens(std::string_view s) { return text::split_whitespace(text::normalize(s)); }

RougeScore rouge_n(const std::vector<std::string>& predicted, const std::vector<std::string>& gold, int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const auto un = static_cast<std::size_t>(n);
  const std::size_t pred_total = predicted.size() >= un ? predicted.size() - un + 1 : 0;
  const std::size_t gold_total = gold.size() >= un ? gold.size() - un + 1 : 0;
  if (pred_total == 0 && gold_total == 0) return degenerate(predicted, gold);

  const auto pc = ngram_counts(predicted, un);
  const auto gc = ngram_counts(gold, un);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : pc) {
    if (auto it = gc.find(gram); it != gc.end()) overlap += std::min(count, it->second);
  }
  return from_counts(overlap, pred_total, gold_total);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
  if (predicted.empty() && gold.empty()) return degenerate(predicted, gold);
  return from_counts(lcs_length(predicted, gold), predicted.size(), gold.size());
}

RougeScores rouge(std::string_view predicted, std::string_view gold) {
  const auto p = metric_tokens(predicted);
  const auto g = metric_tokens(gold);
  return {rouge_n(p, g, 1), rouge_n(p, g, 2), rouge_l(p, g)};
}

}  // namespace infogent
