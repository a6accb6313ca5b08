#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace weatherforge::cli {

struct CheckResult {
  std::string name;
  double max_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// The attention invariance suite behind `attn-check`: softmax row
// normalization, the constant-bias reductions, saturation behavior and
// dense-loop oracle comparisons, all on seeded toy fixtures.
std::vector<CheckResult> run_attention_checks(std::uint64_t seed);

}  // namespace weatherforge::cli
