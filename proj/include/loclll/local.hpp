#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loclll/graph.hpp"

namespace loclll {

using LocalRule = std::function<std::int64_t(const CanonicalBall&)>;

struct LocalAlgorithm {
  std::string name;
  LocalRule rule;
  nlohmann::json params = nlohmann::json::object();
};

struct LclProblem {
  std::string name;
  int t = 1;
  LocalAlgorithm verifier;
  nlohmann::json params = nlohmann::json::object();
};

struct RunReport {
  VertexLabeling outputs;
  int rounds_used = 0;
  bool valid = false;
  std::vector<Vertex> violating_vertices;
  std::int64_t trials = 0;
  std::int64_t failures = 0;
  nlohmann::json to_json() const;
};

struct RunOptions {
  std::size_t canonical_cap = kDefaultCanonicalCap;
};

VertexLabeling run_deterministic(const LocalAlgorithm& alg, const StructuredGraph& g, int rounds,
                                 const RunOptions& opt = {});

RunReport verify_lcl(const LclProblem& problem, const StructuredGraph& g, const VertexLabeling& f,
                     const RunOptions& opt = {});

struct PipelineReport {
  RunReport run;
  int radius = 0;                // R = T + t
  std::size_t max_ball = 0;      // max |ball(G, x, 2R)|
  std::int64_t ids_used = 0;     // colors of the greedy coloring of the power graph
  std::size_t canonical_cap = 0;
  nlohmann::json to_json() const;
};

PipelineReport det_pipeline(const LocalAlgorithm& alg, const LclProblem& problem, const StructuredGraph& g,
                            std::int64_t n, int rounds, const std::vector<Vertex>& order);

struct FailureEstimate {
  double rate = 0;
  double radius = 0;  // 99% normal-approximation radius
  std::int64_t trials = 0;
  std::int64_t failures = 0;
};

FailureEstimate estimate_randomized_failure(const LocalAlgorithm& alg, const LclProblem& problem,
                                            const StructuredGraph& g, int rounds, std::int64_t m,
                                            std::int64_t trials, std::uint64_t seed, const RunOptions& opt = {});

// Exact failure probability by enumerating all m^|V| seed maps; requires |V|·log2(m) <= cap_bits.
Rational exact_randomized_failure(const LocalAlgorithm& alg, const LclProblem& problem, const StructuredGraph& g,
                                  int rounds, std::int64_t m, int cap_bits = kDefaultCapBits,
                                  const RunOptions& opt = {});

double binomial_radius(double rate, std::int64_t trials);

// Builtin problems: "proper_coloring" {k}, "trivial", "csp" (the verifier of an encoded graph-CSP).
LclProblem make_problem(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

struct Builtin {
  LocalAlgorithm alg;
  int rounds = 0;
  LclProblem problem;
  std::string graph_class;
};

// Builtins: cole_vishkin_3color {n}, trial_coloring {delta, n, c}, parallel_resample {n, c}, id_echo {layer}.
Builtin builtin_algorithm(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

int cole_vishkin_iterations(std::int64_t n);

}  // namespace loclll
