#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loclll/common.hpp"
#include "loclll/graph.hpp"
#include "loclll/local.hpp"

namespace loclll {

using Elem = std::int64_t;
using Value = std::int64_t;  // values live in [m] = {1, ..., m}
using Assignment = std::map<Elem, Value>;

// A nonnegative integer weight for every value of [m].
class ValueWeights {
 public:
  virtual ~ValueWeights() = default;
  virtual Integer at(Value v) const = 0;
  virtual Integer total() const = 0;
  // Values of nonzero weight, or nullopt when there are more than limit of them.
  virtual std::optional<std::vector<Value>> support(std::size_t limit) const = 0;
  virtual std::size_t support_size_hint() const = 0;
};

using WeightsPtr = std::shared_ptr<const ValueWeights>;

WeightsPtr ones_weights(Value m);
WeightsPtr pinned_weights(Value v);

// The set of members of a constraint, over an ordered scope of coordinates.
class Body {
 public:
  virtual ~Body() = default;
  virtual std::size_t arity() const = 0;
  virtual bool contains(const std::vector<Value>& phi) const = 0;
  // Sum over members phi of prod_j w[j](phi_j).
  virtual Integer weighted_count(const std::vector<WeightsPtr>& w, int cap_bits) const = 0;
  virtual nlohmann::json describe() const = 0;
  virtual bool explicit_body() const { return false; }
};

using BodyPtr = std::shared_ptr<const Body>;

BodyPtr explicit_body(std::size_t arity, std::vector<std::vector<Value>> members);
BodyPtr predicate_body(std::size_t arity, std::function<bool(const std::vector<Value>&)> pred, nlohmann::json describe);
BodyPtr named_predicate(std::size_t arity, const std::string& name, const nlohmann::json& params);

class Constraint {
 public:
  Constraint() = default;
  Constraint(std::vector<Elem> scope, Value m, BodyPtr body, int cap_bits = kDefaultCapBits);

  static Constraint forbidden(std::vector<Elem> domain, Value m, std::vector<std::vector<Value>> tuples);

  // Free coordinates, in scope order.
  const std::vector<Elem>& domain() const { return domain_; }
  // Domain used for neighbourhoods: empty when the constraint has no members.
  std::vector<Elem> support_domain() const;
  const std::vector<Elem>& scope() const { return scope_; }
  const std::vector<std::optional<Value>>& pins() const { return pins_; }
  Value range() const { return m_; }
  const BodyPtr& body() const { return body_; }

  std::optional<Integer> count() const { return count_; }
  bool known_empty() const { return count_ && *count_ == 0; }
  Rational probability() const;
  // Sum over members of prod of free-coordinate weights (pins are applied).
  Integer weighted_count(const std::vector<WeightsPtr>& free_weights) const;
  bool contains(const std::vector<Value>& free_values) const;
  // f must define every free coordinate.
  bool violated_by(const Assignment& f) const;
  Constraint restrict(const Assignment& g) const;
  bool same_as(const Constraint& o) const;

  std::vector<std::vector<Value>> members(int cap_bits = kDefaultCapBits) const;
  nlohmann::json to_json() const;
  int cap_bits() const { return cap_bits_; }

 private:
  std::vector<Elem> scope_;
  std::vector<std::optional<Value>> pins_;
  std::vector<Elem> domain_;
  Value m_ = 2;
  BodyPtr body_;
  int cap_bits_ = kDefaultCapBits;
  std::optional<Integer> count_;
  void init_count();
};

struct Csp {
  std::vector<Elem> ground;  // sorted
  Value m = 2;
  std::vector<Constraint> constraints;

  std::size_t bound() const;
  void validate() const;
  nlohmann::json to_json() const;
  static Csp from_json(const nlohmann::json& j, int cap_bits = kDefaultCapBits);
};

struct Estimate {
  double value = 0;
  double radius = 0;
  std::int64_t samples = 0;
};

Rational probability(const Constraint& b);
Estimate estimate_probability(const Constraint& b, std::int64_t samples, std::uint64_t seed);

struct CspStats {
  Rational p = 0;
  std::size_t d = 0;
  std::size_t b = 0;
};

CspStats stats(const Csp& c);
// N(B) for every constraint, as constraint indices.
std::vector<std::vector<std::size_t>> neighbourhoods(const Csp& c);

Constraint restrict_constraint(const Constraint& b, const Assignment& g);
Csp restrict_csp(const Csp& c, const Assignment& g);

struct SolutionCheck {
  bool ok = true;
  std::vector<std::size_t> violated;
};

SolutionCheck is_solution(const Csp& c, const Assignment& f);

enum class Verdict { Yes, No, Unknown };
std::string to_string(Verdict v);

// Exhaustive backtracking search; nullopt when unsatisfiable. Throws CapExceeded past m^|X| > 2^cap_bits.
std::optional<Assignment> solve_exhaustive(const Csp& c, int cap_bits = kDefaultCapBits);
std::vector<Assignment> all_solutions(const Csp& c, int cap_bits = kDefaultCapBits);
Verdict check_partial_solution(const Csp& c, const Assignment& g, std::uint64_t seed = 0,
                               int cap_bits = kDefaultCapBits);

// Graph-CSP encoding: constraint bodies are written onto every ordering of their domain tuple.
StructuredGraph graph_csp_encode(const StructuredGraph& g, const Csp& c, int cap_bits = kDefaultCapBits);
Csp graph_csp_decode(const StructuredGraph& h);
StructuredGraph primal_graph(const Csp& c);

struct EncodedConstraint {
  std::vector<Vertex> domain;                 // ascending
  std::vector<std::vector<Value>> forbidden;  // sorted union of the bodies
};

std::vector<EncodedConstraint> encoded_constraints(const StructuredGraph& g);
std::optional<Value> encoded_range(const StructuredGraph& g);

LclProblem csp_to_lcl(Value m, std::size_t b, const Rational& p, std::size_t d);

std::vector<std::vector<Elem>> discrete_partition(const Csp& c);

}  // namespace loclll
