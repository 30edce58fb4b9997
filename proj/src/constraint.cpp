#include <algorithm>
#include <cmath>
#include <set>

#include "loclll/csp.hpp"

namespace loclll {

namespace {

class OnesWeights final : public ValueWeights {
 public:
  explicit OnesWeights(Value m) : m_(m) {}
  Integer at(Value v) const override { return (v >= 1 && v <= m_) ? 1 : 0; }
  Integer total() const override { return m_; }
  std::optional<std::vector<Value>> support(std::size_t limit) const override {
    if (static_cast<std::size_t>(m_) > limit) return std::nullopt;
    std::vector<Value> out;
    for (Value v = 1; v <= m_; ++v) out.push_back(v);
    return out;
  }
  std::size_t support_size_hint() const override { return static_cast<std::size_t>(m_); }

 private:
  Value m_;
};

class PinnedWeights final : public ValueWeights {
 public:
  explicit PinnedWeights(Value v) : v_(v) {}
  Integer at(Value v) const override { return v == v_ ? 1 : 0; }
  Integer total() const override { return 1; }
  std::optional<std::vector<Value>> support(std::size_t) const override { return std::vector<Value>{v_}; }
  std::size_t support_size_hint() const override { return 1; }

 private:
  Value v_;
};

class ExplicitBody final : public Body {
 public:
  ExplicitBody(std::size_t arity, std::vector<std::vector<Value>> members) : arity_(arity), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    for (const auto& t : members_)
      if (t.size() != arity_) throw Error("explicit member has wrong length");
  }
  std::size_t arity() const override { return arity_; }
  bool contains(const std::vector<Value>& phi) const override {
    return std::binary_search(members_.begin(), members_.end(), phi);
  }
  Integer weighted_count(const std::vector<WeightsPtr>& w, int) const override {
    Integer sum = 0;
    for (const auto& t : members_) {
      Integer prod = 1;
      for (std::size_t j = 0; j < arity_ && prod != 0; ++j) prod *= w[j]->at(t[j]);
      sum += prod;
    }
    return sum;
  }
  nlohmann::json describe() const override { return {{"forbidden", members_}}; }
  bool explicit_body() const override { return true; }
  const std::vector<std::vector<Value>>& members() const { return members_; }

 private:
  std::size_t arity_;
  std::vector<std::vector<Value>> members_;
};

class PredicateBody final : public Body {
 public:
  PredicateBody(std::size_t arity, std::function<bool(const std::vector<Value>&)> pred, nlohmann::json d)
      : arity_(arity), pred_(std::move(pred)), describe_(std::move(d)) {}
  std::size_t arity() const override { return arity_; }
  bool contains(const std::vector<Value>& phi) const override { return pred_(phi); }
  Integer weighted_count(const std::vector<WeightsPtr>& w, int cap_bits) const override {
    double bits = 0;
    for (const auto& wj : w) bits += std::log2(static_cast<double>(std::max<std::size_t>(1, wj->support_size_hint())));
    if (bits > cap_bits + 1e-9) throw CapExceeded("predicate enumeration", bits, cap_bits);
    std::size_t limit = std::size_t{1} << cap_bits;
    std::vector<std::vector<Value>> supp;
    for (const auto& wj : w) {
      auto s = wj->support(limit);
      if (!s) throw CapExceeded("predicate enumeration", bits, cap_bits);
      if (s->empty()) return 0;
      supp.push_back(std::move(*s));
    }
    Integer sum = 0;
    std::vector<std::size_t> idx(arity_, 0);
    std::vector<Value> phi(arity_);
    while (true) {
      for (std::size_t j = 0; j < arity_; ++j) phi[j] = supp[j][idx[j]];
      if (pred_(phi)) {
        Integer prod = 1;
        for (std::size_t j = 0; j < arity_; ++j) prod *= w[j]->at(phi[j]);
        sum += prod;
      }
      std::size_t j = 0;
      while (j < arity_ && ++idx[j] == supp[j].size()) idx[j++] = 0;
      if (j == arity_) break;
    }
    return sum;
  }
  nlohmann::json describe() const override { return describe_; }

 private:
  std::size_t arity_;
  std::function<bool(const std::vector<Value>&)> pred_;
  nlohmann::json describe_;
};

}  // namespace

WeightsPtr ones_weights(Value m) { return std::make_shared<OnesWeights>(m); }
WeightsPtr pinned_weights(Value v) { return std::make_shared<PinnedWeights>(v); }

BodyPtr explicit_body(std::size_t arity, std::vector<std::vector<Value>> members) {
  return std::make_shared<ExplicitBody>(arity, std::move(members));
}

BodyPtr predicate_body(std::size_t arity, std::function<bool(const std::vector<Value>&)> pred, nlohmann::json d) {
  return std::make_shared<PredicateBody>(arity, std::move(pred), std::move(d));
}

BodyPtr named_predicate(std::size_t arity, const std::string& name, const nlohmann::json& params) {
  nlohmann::json d{{"name", name}, {"params", params}};
  if (name == "all_equal")
    return predicate_body(arity, [](const std::vector<Value>& phi) {
      return std::adjacent_find(phi.begin(), phi.end(), std::not_equal_to<>()) == phi.end();
    }, d);
  if (name == "all_distinct")
    return predicate_body(arity, [](const std::vector<Value>& phi) {
      std::set<Value> s(phi.begin(), phi.end());
      return s.size() == phi.size();
    }, d);
  if (name == "tuple") {
    auto target = params.at("values").get<std::vector<Value>>();
    if (target.size() != arity) throw Error("tuple predicate has wrong length");
    return predicate_body(arity, [target](const std::vector<Value>& phi) { return phi == target; }, d);
  }
  if (name == "sum_mod") {
    auto q = params.at("modulus").get<Value>();
    auto r = params.value("residue", Value{0});
    if (q < 1) throw Error("sum_mod needs a positive modulus");
    return predicate_body(arity, [q, r](const std::vector<Value>& phi) {
      Value s = 0;
      for (auto v : phi) s += v;
      return ((s % q) + q) % q == ((r % q) + q) % q;
    }, d);
  }
  throw Error("unknown predicate: " + name);
}

Constraint::Constraint(std::vector<Elem> scope, Value m, BodyPtr body, int cap_bits)
    : scope_(std::move(scope)), pins_(scope_.size()), domain_(scope_), m_(m), body_(std::move(body)), cap_bits_(cap_bits) {
  if (m_ < 1) throw Error("range size must be positive");
  if (!body_ || body_->arity() != scope_.size()) throw Error("constraint body arity does not match its domain");
  auto sorted = scope_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error("constraint domain repeats an element");
  init_count();
}

Constraint Constraint::forbidden(std::vector<Elem> domain, Value m, std::vector<std::vector<Value>> tuples) {
  for (const auto& t : tuples) {
    if (t.size() != domain.size()) throw Error("forbidden tuple length differs from the domain size");
    for (auto v : t)
      if (v < 1 || v > m) throw Error("forbidden tuple value outside [m]");
  }
  auto n = domain.size();
  return Constraint(std::move(domain), m, explicit_body(n, std::move(tuples)));
}

void Constraint::init_count() {
  std::vector<WeightsPtr> free(domain_.size(), ones_weights(m_));
  try {
    count_ = weighted_count(free);
  } catch (const CapExceeded&) {
    count_.reset();
  }
}

std::vector<Elem> Constraint::support_domain() const {
  if (known_empty()) return {};
  return domain_;
}

Rational Constraint::probability() const {
  if (!count_)
    throw CapExceeded("exact probability", static_cast<double>(domain_.size()) * std::log2(static_cast<double>(m_)), cap_bits_);
  return frac(*count_, ipow(Integer(m_), domain_.size()));
}

Integer Constraint::weighted_count(const std::vector<WeightsPtr>& free_weights) const {
  if (free_weights.size() != domain_.size()) throw Error("weight vector does not match the free domain");
  std::vector<WeightsPtr> full;
  full.reserve(scope_.size());
  std::size_t k = 0;
  for (const auto& p : pins_) full.push_back(p ? pinned_weights(*p) : free_weights[k++]);
  return body_->weighted_count(full, cap_bits_);
}

bool Constraint::contains(const std::vector<Value>& free_values) const {
  if (free_values.size() != domain_.size()) throw Error("assignment does not match the free domain");
  std::vector<Value> phi;
  phi.reserve(scope_.size());
  std::size_t k = 0;
  for (const auto& p : pins_) phi.push_back(p ? *p : free_values[k++]);
  return body_->contains(phi);
}

bool Constraint::violated_by(const Assignment& f) const {
  std::vector<Value> vals;
  vals.reserve(domain_.size());
  for (Elem e : domain_) {
    auto it = f.find(e);
    if (it == f.end()) throw Error("assignment misses element " + std::to_string(e));
    vals.push_back(it->second);
  }
  return contains(vals);
}

Constraint Constraint::restrict(const Assignment& g) const {
  Constraint out = *this;
  bool changed = false;
  out.domain_.clear();
  for (std::size_t j = 0; j < scope_.size(); ++j) {
    if (pins_[j]) continue;
    auto it = g.find(scope_[j]);
    if (it != g.end()) {
      out.pins_[j] = it->second;
      changed = true;
    } else {
      out.domain_.push_back(scope_[j]);
    }
  }
  if (changed) out.init_count();
  return out;
}

bool Constraint::same_as(const Constraint& o) const {
  return scope_ == o.scope_ && pins_ == o.pins_ && m_ == o.m_ && body_ == o.body_;
}

std::vector<std::vector<Value>> Constraint::members(int cap_bits) const {
  std::vector<std::vector<Value>> out;
  if (auto eb = std::dynamic_pointer_cast<const ExplicitBody>(body_)) {
    for (const auto& t : eb->members()) {
      bool ok = true;
      std::vector<Value> proj;
      for (std::size_t j = 0; j < scope_.size() && ok; ++j) {
        if (pins_[j]) ok = (*pins_[j] == t[j]);
        else proj.push_back(t[j]);
      }
      if (ok) out.push_back(std::move(proj));
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  double bits = static_cast<double>(domain_.size()) * std::log2(static_cast<double>(m_));
  if (bits > cap_bits) throw CapExceeded("constraint member enumeration", bits, cap_bits);
  std::vector<Value> phi(domain_.size(), 1);
  while (true) {
    if (contains(phi)) out.push_back(phi);
    std::size_t j = 0;
    while (j < phi.size() && phi[j] == m_) phi[j++] = 1;
    if (j == phi.size()) break;
    ++phi[j];
  }
  return out;
}

nlohmann::json Constraint::to_json() const {
  nlohmann::json j;
  j["domain"] = domain_;
  if (body_->explicit_body()) {
    j["forbidden"] = members();
    return j;
  }
  j["domain"] = scope_;
  j["predicate"] = body_->describe();
  bool any_pin = std::any_of(pins_.begin(), pins_.end(), [](const auto& p) { return p.has_value(); });
  if (any_pin) {
    auto pins = nlohmann::json::array();
    for (std::size_t k = 0; k < scope_.size(); ++k)
      if (pins_[k]) pins.push_back({scope_[k], *pins_[k]});
    j["pinned"] = pins;
  }
  return j;
}

Rational probability(const Constraint& b) { return b.probability(); }

Estimate estimate_probability(const Constraint& b, std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error("estimate needs at least one sample");
  auto rng = make_rng(seed, "probability_estimate");
  std::int64_t hits = 0;
  std::vector<Value> phi(b.domain().size());
  for (std::int64_t s = 0; s < samples; ++s) {
    for (auto& v : phi) v = uniform_int(rng, 1, b.range());
    hits += b.contains(phi);
  }
  Estimate e;
  e.samples = samples;
  e.value = static_cast<double>(hits) / static_cast<double>(samples);
  e.radius = binomial_radius(e.value, samples);
  return e;
}

Constraint restrict_constraint(const Constraint& b, const Assignment& g) { return b.restrict(g); }

}  // namespace loclll
