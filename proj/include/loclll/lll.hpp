#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loclll/csp.hpp"
#include "loclll/reduction.hpp"

namespace loclll {

struct WeightedGroundSet {
  std::map<Elem, Rational> weights;

  static WeightedGroundSet uniform(const std::vector<Elem>& ground);
  static WeightedGroundSet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  Rational of(const std::vector<Elem>& xs) const;
  Rational at(Elem x) const;
  // Restricts to xs and rescales to total 1; nullopt when xs carries no weight.
  std::optional<WeightedGroundSet> conditioned(const std::vector<Elem>& xs) const;
  Rational min_positive() const;
};

struct LllVerdict {
  std::string condition;
  bool holds = false;
  Rational margin;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json to_json() const;
};

// which: symmetric | general | measurable | neighborhood-growth
LllVerdict lll_check(const Csp& c, const std::string& which,
                     const std::optional<std::vector<Rational>>& eta = std::nullopt,
                     const StructuredGraph* graph = nullptr);
// (N, eps)-condition: p (d+1)^N <= eps.
LllVerdict power_check(const Csp& c, unsigned N, const Rational& eps, const std::string& name);
// Precondition of the partial-solution construction: (2, e^{-2}/n^2) with the rational surrogate.
LllVerdict partial_precondition(const Csp& c);

struct MtResult {
  std::optional<Assignment> solution;
  std::size_t resamples = 0;
  bool capped = false;
};

MtResult moser_tardos_solve(const Csp& c, std::uint64_t seed, std::size_t cap);

// Numbers r + s*sqrt(p), compared exactly.
struct Surd {
  Rational r = 0;
  Rational s = 0;
};
int compare(const Surd& a, const Surd& b, const Rational& p);
std::string to_string(const Surd& a);

struct PartialTrace {
  std::vector<std::vector<Elem>> classes;
  std::vector<Value> chosen;                     // i_1..i_N
  std::vector<std::vector<Elem>> dangerous_sets; // D(u) for every prefix u (length 0..N)
  std::vector<std::vector<std::size_t>> dangerous_constraints;
  std::vector<Surd> phi;                         // Phi(u) for every prefix
  Rational p;
  Rational covered_weight;
  std::size_t degree = 0;                        // d(rho)
  std::string mode;
  nlohmann::json to_json() const;
};

struct PartialGuarantees {
  bool p_bound = false;      // P[C/h]^2 <= n^2 p for every constraint
  bool d_bound = false;      // d(C/h) <= d(C)
  bool coverage = false;     // (1 - covered)^2 <= d(rho)^2 p  and covered >= 1 - ...
  bool phi_monotone = false;
  bool phi_start = false;    // Phi(empty) <= d(rho) sqrt p
  bool uncovered_below_phi = false;
  bool all() const { return p_bound && d_bound && coverage && phi_monotone && phi_start && uncovered_below_phi; }
  nlohmann::json to_json() const;
};

struct PartialResult {
  Assignment h;
  Assignment pulled;         // rho(h) on X
  PartialTrace trace;
  PartialGuarantees guarantees;
};

struct PartialOptions {
  std::string mode = "derandomized";  // or "sampled", which does not promise a monotone estimator
  std::size_t samples = 16;
  std::uint64_t seed = 0;
  bool check_precondition = true;
};

// h_w for a given w, following the recursion h_{u i} = h_u + const(A_k \ D(h_u), i).
Assignment partial_for_word(const Csp& c, const std::vector<std::vector<Elem>>& classes, const std::vector<Value>& w,
                            const Rational& p, std::vector<std::vector<Elem>>* dangerous = nullptr);

using WordVisitor = std::function<void(const std::vector<Value>& w, const Assignment& h, const std::vector<Constraint>& restricted)>;
// Every w in [n]^N in lexicographic order, sharing prefixes.
void for_each_word(const Csp& c, const std::vector<std::vector<Elem>>& classes, const Rational& p, const WordVisitor& visit);

PartialResult construct_partial(const Csp& c, const Reduction& rho, const WeightedGroundSet& wts,
                                const PartialOptions& opt = {});

struct StepRecord {
  std::string route;  // bootstrap | a_posteriori
  Rational remaining_before;
  Rational covered;             // covered weight (of the conditioned weights, total 1)
  Rational covered_fraction;    // of the remaining weight
  std::string residual_certificate;
  nlohmann::json bootstrap;
  nlohmann::json checks = nlohmann::json::object();
  nlohmann::json to_json() const;
};

struct StepResult {
  Assignment g;
  Csp residual_source;
  Reduction residual;  // residual_source <- residual target
  StepRecord record;
  PartialTrace trace;
};

struct StepOptions {
  BootstrapOptions boot;
  Rational binary_eps = Rational(1, 16);
  PartialOptions partial;
};

StepResult step(const Csp& b, const Reduction& rho_in, const WeightedGroundSet& wts, const StepOptions& opt = {});

struct SolveResult {
  std::optional<Assignment> solution;
  std::vector<StepRecord> steps;
  std::vector<PartialTrace> traces;
  std::size_t iterations = 0;
  std::size_t iteration_bound = 0;
  bool finished_by_extension = false;
  std::string failure;
  nlohmann::json to_json() const;
};

SolveResult solve_weighted(const Csp& b, const WeightedGroundSet& wts, std::size_t max_iters, const StepOptions& opt = {});

struct CoverFamily {
  std::vector<Assignment> members;
  std::size_t bits = 0;  // N: number of partition classes
  std::map<Elem, std::size_t> coverage;
  bool covers = false;
  bool counts_ok = false;
  bool residuals_ok = false;
  std::size_t bootstrap_routes = 0;
  std::string route;
  nlohmann::json to_json() const;
};

CoverFamily cover_family(const Csp& b, const StepOptions& opt = {}, int budget_bits = kDefaultCapBits);

std::size_t iteration_bound(const Rational& min_weight);

}  // namespace loclll
