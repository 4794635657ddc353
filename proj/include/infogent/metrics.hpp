#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace infogent {

/// True iff the normalized gold answer occurs in the normalized prediction.
/// A gold answer that normalizes to nothing never matches.
bool string_accuracy(std::string_view predicted, std::string_view gold);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

struct RougeScores {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;

  double rouge1_f() const { return rouge1.f; }
  double rouge2_f() const { return rouge2.f; }
  double rougeL_f() const { return rougeL.f; }
};

/// Tokens used by both metrics: normalize() then split on whitespace.
std::vector<std::string> metric_tokens(std::string_view s);

/// Clipped n-gram overlap. When neither side has an n-gram of this order
/// the score is 1 for identical token lists and 0 otherwise.
RougeScore rouge_n(const std::vector<std::string>& predicted, const std::vector<std::string>& gold, int n);
RougeScore rouge_l(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

RougeScores rouge(std::string_view predicted, std::string_view gold);

}  // namespace infogent
