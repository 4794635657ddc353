#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace infogent::testkit {

/// Tokenizer written independently of the library: ASCII letters and
/// digits lowercased, bytes >= 0x80 kept, everything else separates.
std::vector<std::string> oracle_tokens(const std::string& s);

struct OracleRouge {
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
};

/// ROUGE F-scores by direct enumeration. The LCS is found by trying every
/// subsequence of the shorter list, so keep inputs small (<= 14 tokens).
OracleRouge oracle_rouge(const std::string& predicted, const std::string& gold);

/// Random phrase over a tiny vocabulary with mixed case and punctuation,
/// so that n-gram collisions are frequent.
std::string random_phrase(std::mt19937_64& rng, int max_tokens);

/// Applies 1..4 random byte edits (insert, delete, replace, duplicate span).
std::string mutate(std::mt19937_64& rng, std::string s);

/// Random printable-ish string including braces, quotes and newlines.
std::string random_junk(std::mt19937_64& rng, int max_len);

}  // namespace infogent::testkit
