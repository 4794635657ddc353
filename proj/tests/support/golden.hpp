#pragma once

#include <string>
#include <utility>
#include <vector>

#include "infogent/model.hpp"

namespace infogent::testkit {

/// Text parts verbatim; image parts as "[image image/png N bytes]".
std::string describe_prompt(const Prompt& p);

/// Every prompt the agent sends, rendered from fixed inputs. Names are the
/// golden file stems under tests/golden.
std::vector<std::pair<std::string, std::string>> golden_prompt_cases();

/// Mismatches against the stored files, one message each. With
/// INFOGENT_UPDATE_GOLDEN set in the environment the files are rewritten.
std::vector<std::string> check_golden_prompts();

}  // namespace infogent::testkit
