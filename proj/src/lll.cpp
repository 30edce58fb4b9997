#include <algorithm>
#include <set>

#include "loclll/lll.hpp"

namespace loclll {

namespace {

Rational parse_weight(const nlohmann::json& v) {
  Rational q;
  if (v.is_number_integer()) {
    q = Rational(Integer(std::to_string(v.get<std::int64_t>())));
  } else if (v.is_string()) {
    if (q.set_str(v.get<std::string>(), 10) != 0) throw Error("bad rational weight: " + v.get<std::string>());
    if (q.get_den() == 0) throw Error("bad rational weight: zero denominator");
    q.canonicalize();
  } else {
    throw Error("weights must be integers or rational strings");
  }
  return q;
}

}  // namespace

WeightedGroundSet WeightedGroundSet::uniform(const std::vector<Elem>& ground) {
  WeightedGroundSet w;
  if (ground.empty()) return w;
  Rational each = frac(1, static_cast<long>(ground.size()));
  for (Elem x : ground) w.weights[x] = each;
  return w;
}

WeightedGroundSet WeightedGroundSet::from_json(const nlohmann::json& j) {
  WeightedGroundSet w;
  const auto& src = j.contains("weights") ? j.at("weights") : j;
  if (src.is_object()) {
    for (const auto& [k, v] : src.items()) w.weights[std::stoll(k)] = parse_weight(v);
  } else if (src.is_array()) {
    for (const auto& e : src) w.weights[e.at(0).get<Elem>()] = parse_weight(e.at(1));
  } else {
    throw Error("weights: expected an object or a list of pairs");
  }
  w.validate();
  return w;
}

nlohmann::json WeightedGroundSet::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [x, q] : weights) out[std::to_string(x)] = q.get_str();
  return {{"weights", out}};
}

void WeightedGroundSet::validate() const {
  Rational total = 0;
  for (const auto& [x, q] : weights) {
    if (q < 0) throw Error("negative weight at element " + std::to_string(x));
    total += q;
  }
  if (total != 1) throw Error("weights sum to " + total.get_str() + ", expected 1");
}

Rational WeightedGroundSet::at(Elem x) const {
  auto it = weights.find(x);
  return it == weights.end() ? Rational(0) : it->second;
}

Rational WeightedGroundSet::of(const std::vector<Elem>& xs) const {
  Rational s = 0;
  for (Elem x : xs) s += at(x);
  return s;
}

std::optional<WeightedGroundSet> WeightedGroundSet::conditioned(const std::vector<Elem>& xs) const {
  Rational total = of(xs);
  if (total == 0) return std::nullopt;
  WeightedGroundSet out;
  for (Elem x : xs) out.weights[x] = at(x) / total;
  return out;
}

Rational WeightedGroundSet::min_positive() const {
  std::optional<Rational> best;
  for (const auto& [x, q] : weights)
    if (q > 0 && (!best || q < *best)) best = q;
  return best ? *best : Rational(1);
}

std::size_t iteration_bound(const Rational& min_weight) {
  if (min_weight <= 0) throw Error("iteration bound needs a positive weight");
  std::size_t k = 0;
  Rational inv = 1 / min_weight;
  Rational pw = 1;
  while (pw < inv) {
    pw *= 2;
    ++k;
  }
  return k + 1;
}

nlohmann::json LllVerdict::to_json() const {
  return {{"condition", condition}, {"holds", holds}, {"margin", margin.get_str()}, {"inputs", inputs}};
}

namespace {

LllVerdict verdict(const std::string& name, const Rational& lhs, const Rational& rhs, nlohmann::json inputs) {
  LllVerdict v;
  v.condition = name;
  v.margin = rhs - lhs;
  v.holds = v.margin >= 0;
  inputs["lhs"] = lhs.get_str();
  inputs["rhs"] = rhs.get_str();
  v.inputs = std::move(inputs);
  return v;
}

std::size_t max_ball2(const StructuredGraph& g) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto dist = g.bfs(i, 2);
    best = std::max<std::size_t>(best, static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [](int d) { return d >= 0; })));
  }
  return best;
}

}  // namespace

LllVerdict power_check(const Csp& c, unsigned N, const Rational& eps, const std::string& name) {
  auto s = stats(c);
  Rational lhs = s.p * rpow(Rational(static_cast<long>(s.d + 1)), N);
  return verdict(name, lhs, eps, {{"p", s.p.get_str()}, {"d", s.d}, {"N", N}, {"eps", eps.get_str()}});
}

LllVerdict partial_precondition(const Csp& c) {
  Rational n = c.m;
  return power_check(c, 2, e_inv2_lower() / (n * n), "partial-precondition");
}

LllVerdict lll_check(const Csp& c, const std::string& which, const std::optional<std::vector<Rational>>& eta,
                     const StructuredGraph* graph) {
  if (which == "symmetric") {
    auto s = stats(c);
    return verdict(which, s.p * static_cast<long>(s.d + 1), e_inv_lower(), {{"p", s.p.get_str()}, {"d", s.d}});
  }
  if (which == "measurable") return power_check(c, 8, frac(1, 32768), which);
  if (which == "neighborhood-growth") {
    auto s = stats(c);
    std::size_t ball = graph ? max_ball2(*graph) : max_ball2(primal_graph(c));
    return verdict(which, s.p * static_cast<long>(ball), e_inv_lower(), {{"p", s.p.get_str()}, {"sup_ball_2", ball}});
  }
  if (which == "general") {
    auto s = stats(c);
    std::vector<Rational> e;
    if (eta) {
      if (eta->size() != c.constraints.size()) throw Error("eta must give one value per constraint");
      e = *eta;
    } else {
      e.assign(c.constraints.size(), s.d == 0 ? frac(1, 2) : frac(1, static_cast<long>(s.d + 1)));
    }
    for (const auto& v : e)
      if (v < 0 || v >= 1) throw Error("eta values must lie in [0,1)");
    auto nb = neighbourhoods(c);
    std::optional<Rational> worst;
    Rational lhs_w = 0, rhs_w = 1;
    for (std::size_t i = 0; i < c.constraints.size(); ++i) {
      Rational rhs = e[i];
      for (auto j : nb[i]) rhs *= 1 - e[j];
      Rational lhs = c.constraints[i].probability();
      if (!worst || rhs - lhs < *worst) {
        worst = rhs - lhs;
        lhs_w = lhs;
        rhs_w = rhs;
      }
    }
    auto arr = nlohmann::json::array();
    for (const auto& v : e) arr.push_back(v.get_str());
    return verdict(which, lhs_w, rhs_w, {{"p", s.p.get_str()}, {"d", s.d}, {"eta", arr}});
  }
  throw Error("unknown LLL condition: " + which);
}

MtResult moser_tardos_solve(const Csp& c, std::uint64_t seed, std::size_t cap) {
  MtResult res;
  auto rng = make_rng(seed, "moser_tardos");
  Assignment f;
  for (Elem x : c.ground) f[x] = uniform_int(rng, 1, c.m);
  while (true) {
    std::optional<std::size_t> bad;
    for (std::size_t i = 0; i < c.constraints.size() && !bad; ++i)
      if (c.constraints[i].violated_by(f)) bad = i;
    if (!bad) {
      res.solution = std::move(f);
      return res;
    }
    if (res.resamples >= cap) {
      res.capped = true;
      return res;
    }
    for (Elem x : c.constraints[*bad].domain()) f[x] = uniform_int(rng, 1, c.m);
    ++res.resamples;
  }
}

}  // namespace loclll
