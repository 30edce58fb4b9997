#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "loclll/lll.hpp"

namespace loclll {

struct RandomCspParams {
  std::size_t ground = 10;
  Value m = 2;
  std::size_t arity = 2;        // b
  std::size_t constraints = 5;
  std::size_t forbidden = 1;    // forbidden tuples per constraint
  std::size_t max_degree = 0;   // reject constraints that would push d above this (0: no limit)
};

Csp random_csp(const RandomCspParams& params, std::uint64_t seed, int cap_bits = kDefaultCapBits);
RandomCspParams random_csp_params(const nlohmann::json& j);

// Smallest k <= kmax with a proper k-coloring, by backtracking; nullopt past kmax.
std::optional<int> chromatic_number(const StructuredGraph& g, int kmax);

struct ExperimentConfig {
  std::string pipeline;  // det | rand | lll-suite | gadget
  std::uint64_t seed = 0;
  int cap_bits = kDefaultCapBits;
  nlohmann::json raw;

  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
};

struct ExperimentReport {
  nlohmann::json body;
  bool ok = false;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct Summary {
  nlohmann::json table;
  std::string text;
};

Summary emit_summary(const std::vector<std::string>& paths);

}  // namespace loclll
