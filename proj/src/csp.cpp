#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "loclll/csp.hpp"
#include "loclll/lll.hpp"

namespace loclll {

std::size_t Csp::bound() const {
  std::size_t b = 0;
  for (const auto& c : constraints) b = std::max(b, c.domain().size());
  return b;
}

void Csp::validate() const {
  if (m < 1) throw Error("range size must be positive");
  if (!std::is_sorted(ground.begin(), ground.end()) || std::adjacent_find(ground.begin(), ground.end()) != ground.end())
    throw Error("ground set must be sorted and duplicate free");
  for (const auto& c : constraints) {
    if (c.range() != m) throw Error("constraint range differs from the CSP range");
    for (Elem e : c.domain())
      if (!std::binary_search(ground.begin(), ground.end(), e))
        throw Error("constraint domain leaves the ground set at element " + std::to_string(e));
  }
}

nlohmann::json Csp::to_json() const {
  auto cs = nlohmann::json::array();
  for (const auto& c : constraints) cs.push_back(c.to_json());
  return {{"ground", ground}, {"m", m}, {"constraints", cs}};
}

Csp Csp::from_json(const nlohmann::json& j, int cap_bits) {
  Csp c;
  c.ground = j.at("ground").get<std::vector<Elem>>();
  std::sort(c.ground.begin(), c.ground.end());
  c.m = j.at("m").get<Value>();
  for (const auto& cj : j.value("constraints", nlohmann::json::array())) {
    auto dom = cj.at("domain").get<std::vector<Elem>>();
    if (cj.contains("forbidden")) {
      c.constraints.push_back(Constraint::forbidden(dom, c.m, cj.at("forbidden").get<std::vector<std::vector<Value>>>()));
    } else if (cj.contains("predicate")) {
      const auto& pj = cj.at("predicate");
      auto body = named_predicate(dom.size(), pj.at("name").get<std::string>(), pj.value("params", nlohmann::json::object()));
      Constraint con(dom, c.m, body, cap_bits);
      if (cj.contains("pinned")) {
        Assignment pins;
        for (const auto& p : cj.at("pinned")) pins[p.at(0).get<Elem>()] = p.at(1).get<Value>();
        con = con.restrict(pins);
      }
      c.constraints.push_back(std::move(con));
    } else {
      throw Error("constraint needs either forbidden tuples or a predicate");
    }
  }
  c.validate();
  return c;
}

std::vector<std::vector<std::size_t>> neighbourhoods(const Csp& c) {
  std::unordered_map<Elem, std::vector<std::size_t>> by_elem;
  std::vector<std::vector<Elem>> doms;
  for (std::size_t i = 0; i < c.constraints.size(); ++i) {
    doms.push_back(c.constraints[i].support_domain());
    for (Elem e : doms.back()) by_elem[e].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out(c.constraints.size());
  for (std::size_t i = 0; i < c.constraints.size(); ++i) {
    std::set<std::size_t> nb;
    for (Elem e : doms[i])
      for (auto j : by_elem[e])
        if (j != i) nb.insert(j);
    out[i].assign(nb.begin(), nb.end());
  }
  return out;
}

CspStats stats(const Csp& c) {
  CspStats s;
  for (const auto& con : c.constraints) s.p = std::max(s.p, con.probability());
  for (const auto& nb : neighbourhoods(c)) s.d = std::max(s.d, nb.size());
  s.b = c.bound();
  return s;
}

Csp restrict_csp(const Csp& c, const Assignment& g) {
  Csp out;
  out.m = c.m;
  for (Elem e : c.ground)
    if (!g.count(e)) out.ground.push_back(e);
  out.constraints.reserve(c.constraints.size());
  for (const auto& con : c.constraints) out.constraints.push_back(con.restrict(g));
  return out;
}

SolutionCheck is_solution(const Csp& c, const Assignment& f) {
  SolutionCheck r;
  for (Elem e : c.ground)
    if (!f.count(e)) throw Error("assignment is not total: missing element " + std::to_string(e));
  for (std::size_t i = 0; i < c.constraints.size(); ++i)
    if (c.constraints[i].violated_by(f)) r.violated.push_back(i);
  r.ok = r.violated.empty();
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "unknown";
  }
}

namespace {

class Backtracker {
 public:
  Backtracker(const Csp& c, bool collect_all) : c_(c), all_(collect_all) {
    std::unordered_map<Elem, std::size_t> pos;
    for (std::size_t i = 0; i < c.ground.size(); ++i) pos[c.ground[i]] = i;
    checks_.assign(c.ground.size() + 1, {});
    for (std::size_t i = 0; i < c.constraints.size(); ++i) {
      const auto& con = c.constraints[i];
      if (con.known_empty()) continue;
      std::size_t last = 0;
      for (Elem e : con.domain()) last = std::max(last, pos.at(e) + 1);
      checks_[last].push_back(i);
    }
    relevant_.assign(c.ground.size(), false);
    for (const auto& con : c.constraints)
      if (!con.known_empty())
        for (Elem e : con.domain()) relevant_[pos.at(e)] = true;
  }

  void run() {
    for (auto i : checks_[0])
      if (c_.constraints[i].violated_by(f_)) return;
    go(0);
  }

  std::vector<Assignment> solutions;

 private:
  bool go(std::size_t depth) {
    if (depth == c_.ground.size()) {
      solutions.push_back(f_);
      return !all_;
    }
    Elem e = c_.ground[depth];
    Value top = (all_ || relevant_[depth]) ? c_.m : 1;
    for (Value v = 1; v <= top; ++v) {
      f_[e] = v;
      bool ok = true;
      for (auto i : checks_[depth + 1])
        if (c_.constraints[i].violated_by(f_)) {
          ok = false;
          break;
        }
      if (ok && go(depth + 1)) return true;
    }
    f_.erase(e);
    return false;
  }

  const Csp& c_;
  bool all_;
  std::vector<std::vector<std::size_t>> checks_;
  std::vector<bool> relevant_;
  Assignment f_;
};

double search_bits(const Csp& c) {
  return static_cast<double>(c.ground.size()) * std::log2(static_cast<double>(std::max<Value>(c.m, 1)));
}

}  // namespace

std::optional<Assignment> solve_exhaustive(const Csp& c, int cap_bits) {
  if (search_bits(c) > cap_bits) throw CapExceeded("exhaustive search", search_bits(c), cap_bits);
  Backtracker bt(c, false);
  bt.run();
  if (bt.solutions.empty()) return std::nullopt;
  return bt.solutions.front();
}

std::vector<Assignment> all_solutions(const Csp& c, int cap_bits) {
  if (search_bits(c) > cap_bits) throw CapExceeded("exhaustive enumeration", search_bits(c), cap_bits);
  Backtracker bt(c, true);
  bt.run();
  return std::move(bt.solutions);
}

Verdict check_partial_solution(const Csp& c, const Assignment& g, std::uint64_t seed, int cap_bits) {
  auto r = restrict_csp(c, g);
  for (const auto& con : r.constraints)
    if (con.domain().empty() && !con.known_empty()) return Verdict::No;
  if (search_bits(r) <= cap_bits) return solve_exhaustive(r, cap_bits) ? Verdict::Yes : Verdict::No;
  auto res = moser_tardos_solve(r, seed, 1000 * (r.constraints.size() + 1));
  return res.solution ? Verdict::Yes : Verdict::Unknown;
}

std::vector<std::vector<Elem>> discrete_partition(const Csp& c) {
  std::unordered_map<Elem, std::size_t> pos;
  for (std::size_t i = 0; i < c.ground.size(); ++i) pos[c.ground[i]] = i;
  std::vector<std::set<std::size_t>> adj(c.ground.size());
  for (const auto& con : c.constraints) {
    auto dom = con.support_domain();
    for (Elem a : dom)
      for (Elem b : dom)
        if (a != b) adj[pos.at(a)].insert(pos.at(b));
  }
  std::vector<std::size_t> color(c.ground.size(), 0);
  std::size_t classes = 0;
  for (std::size_t i = 0; i < c.ground.size(); ++i) {
    std::set<std::size_t> used;
    for (auto j : adj[i])
      if (j < i) used.insert(color[j]);
    std::size_t col = 0;
    while (used.count(col)) ++col;
    color[i] = col;
    classes = std::max(classes, col + 1);
  }
  std::vector<std::vector<Elem>> out(classes);
  for (std::size_t i = 0; i < c.ground.size(); ++i) out[color[i]].push_back(c.ground[i]);
  return out;
}

}  // namespace loclll
