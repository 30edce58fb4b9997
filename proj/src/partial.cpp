#include <algorithm>
#include <set>
#include <unordered_map>

#include "loclll/lll.hpp"

namespace loclll {

namespace {

int sgn(const Rational& q) { return q > 0 ? 1 : (q < 0 ? -1 : 0); }

}  // namespace

int compare(const Surd& a, const Surd& b, const Rational& p) {
  Rational dr = a.r - b.r, ds = a.s - b.s;
  if (p == 0 || ds == 0) return sgn(dr);
  if (dr == 0) return sgn(ds);
  if (sgn(dr) == sgn(ds)) return sgn(dr);
  Rational lhs = dr * dr, rhs = ds * ds * p;
  if (lhs > rhs) return sgn(dr);
  if (lhs < rhs) return sgn(ds);
  return 0;
}

std::string to_string(const Surd& a) { return a.r.get_str() + " + " + a.s.get_str() + "*sqrt(p)"; }

namespace {

nlohmann::json surd_json(const Surd& a) { return {{"r", a.r.get_str()}, {"s", a.s.get_str()}}; }

struct WalkContext {
  const Csp* c = nullptr;
  const std::vector<std::vector<Elem>>* classes = nullptr;
  Rational p;
  std::unordered_map<Elem, std::vector<std::size_t>> by_elem;  // over domain()
  std::vector<Rational> weight;                                 // W_C
  bool use_phi = false;

  Surd term(std::size_t i, const Rational& prob) const {
    if (!use_phi || p == 0 || weight[i] == 0) return {};
    if (prob * prob > p) return {weight[i], 0};
    return {0, weight[i] * prob / p};
  }
  bool dangerous(const Rational& prob) const { return prob * prob > p; }
};

struct WalkState {
  std::vector<Constraint> cons;
  std::vector<Rational> prob;
  std::vector<char> danger;
  std::set<Elem> D;
  Assignment h;
  Surd phi;
};

WalkState walk_root(const WalkContext& ctx) {
  WalkState s;
  s.cons = ctx.c->constraints;
  for (std::size_t i = 0; i < s.cons.size(); ++i) {
    s.prob.push_back(s.cons[i].probability());
    bool dz = ctx.dangerous(s.prob.back());
    s.danger.push_back(dz);
    if (dz) s.D.insert(s.cons[i].domain().begin(), s.cons[i].domain().end());
    auto t = ctx.term(i, s.prob.back());
    s.phi.r += t.r;
    s.phi.s += t.s;
  }
  return s;
}

// level k is 0-based
WalkState walk_child(const WalkContext& ctx, const WalkState& u, std::size_t k, Value i) {
  WalkState w = u;
  std::vector<Elem> live;
  for (Elem x : (*ctx.classes)[k])
    if (!u.D.count(x)) live.push_back(x);
  std::set<std::size_t> touched;
  for (Elem x : live) {
    w.h[x] = i;
    if (auto it = ctx.by_elem.find(x); it != ctx.by_elem.end()) touched.insert(it->second.begin(), it->second.end());
  }
  for (auto ci : touched) {
    Assignment a;
    for (Elem x : w.cons[ci].domain())
      if (w.h.count(x)) a[x] = i;
    auto old = ctx.term(ci, w.prob[ci]);
    w.cons[ci] = w.cons[ci].restrict(a);
    w.prob[ci] = w.cons[ci].probability();
    auto nw = ctx.term(ci, w.prob[ci]);
    w.phi.r += nw.r - old.r;
    w.phi.s += nw.s - old.s;
    if (!w.danger[ci] && ctx.dangerous(w.prob[ci])) {
      w.danger[ci] = 1;
      const auto& dom = ctx.c->constraints[ci].domain();
      w.D.insert(dom.begin(), dom.end());
    }
  }
  return w;
}

WalkContext make_context(const Csp& c, const std::vector<std::vector<Elem>>& classes, const Rational& p) {
  WalkContext ctx;
  ctx.c = &c;
  ctx.classes = &classes;
  ctx.p = p;
  for (std::size_t i = 0; i < c.constraints.size(); ++i)
    for (Elem e : c.constraints[i].domain()) ctx.by_elem[e].push_back(i);
  ctx.weight.assign(c.constraints.size(), 0);
  return ctx;
}

std::vector<Elem> set_vec(const std::set<Elem>& s) { return {s.begin(), s.end()}; }

std::vector<std::size_t> danger_list(const WalkState& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.danger.size(); ++i)
    if (s.danger[i]) out.push_back(i);
  return out;
}

}  // namespace

Assignment partial_for_word(const Csp& c, const std::vector<std::vector<Elem>>& classes, const std::vector<Value>& w,
                            const Rational& p, std::vector<std::vector<Elem>>* dangerous) {
  if (w.size() > classes.size()) throw Error("word longer than the partition");
  auto ctx = make_context(c, classes, p);
  auto s = walk_root(ctx);
  if (dangerous) dangerous->push_back(set_vec(s.D));
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] < 1 || w[k] > c.m) throw Error("word entry outside [n]");
    s = walk_child(ctx, s, k, w[k]);
    if (dangerous) dangerous->push_back(set_vec(s.D));
  }
  return s.h;
}

namespace {

void dfs(const WalkContext& ctx, const WalkState& s, std::vector<Value>& w, const WordVisitor& visit) {
  if (w.size() == ctx.classes->size()) {
    visit(w, s.h, s.cons);
    return;
  }
  for (Value i = 1; i <= ctx.c->m; ++i) {
    auto child = walk_child(ctx, s, w.size(), i);
    w.push_back(i);
    dfs(ctx, child, w, visit);
    w.pop_back();
  }
}

}  // namespace

void for_each_word(const Csp& c, const std::vector<std::vector<Elem>>& classes, const Rational& p, const WordVisitor& visit) {
  auto ctx = make_context(c, classes, p);
  std::vector<Value> w;
  dfs(ctx, walk_root(ctx), w, visit);
}

nlohmann::json PartialTrace::to_json() const {
  auto ph = nlohmann::json::array();
  for (const auto& f : phi) ph.push_back(surd_json(f));
  return {{"mode", mode},
          {"p", p.get_str()},
          {"degree", degree},
          {"classes", classes},
          {"chosen", chosen},
          {"dangerous_sets", dangerous_sets},
          {"dangerous_constraints", dangerous_constraints},
          {"phi", ph},
          {"covered_weight", covered_weight.get_str()}};
}

nlohmann::json PartialGuarantees::to_json() const {
  return {{"p_bound", p_bound},           {"d_bound", d_bound},     {"coverage", coverage},
          {"phi_monotone", phi_monotone}, {"phi_start", phi_start}, {"uncovered_below_phi", uncovered_below_phi}};
}

PartialResult construct_partial(const Csp& c, const Reduction& rho, const WeightedGroundSet& wts, const PartialOptions& opt) {
  if (opt.check_precondition) {
    auto pre = partial_precondition(c);
    if (!pre.holds)
      throw Error("construct_partial precondition p(C)(d(C)+1)^2 <= 0.1353/n^2 fails: " + pre.inputs.dump());
  }
  if (opt.mode != "derandomized" && opt.mode != "sampled") throw Error("unknown construct_partial mode: " + opt.mode);
  auto st = stats(c);
  const Rational p = st.p;
  const Value n = c.m;
  PartialResult res;
  auto& tr = res.trace;
  tr.mode = opt.mode;
  tr.p = p;
  tr.classes = discrete_partition(c);
  tr.degree = connection_degree(rho.conn, c);

  auto ctx = make_context(c, tr.classes, p);
  ctx.use_phi = true;
  {
    std::unordered_map<Elem, std::vector<std::size_t>> by_support;
    for (std::size_t i = 0; i < c.constraints.size(); ++i)
      for (Elem e : c.constraints[i].support_domain()) by_support[e].push_back(i);
    for (Elem x : rho.conn.source) {
      Rational wx = wts.at(x);
      if (wx == 0) continue;
      std::set<std::size_t> meet;
      for (Elem y : rho.conn.S(x))
        if (auto it = by_support.find(y); it != by_support.end()) meet.insert(it->second.begin(), it->second.end());
      for (auto ci : meet) ctx.weight[ci] += wx;
    }
  }

  auto record = [&tr](const WalkState& s) {
    tr.dangerous_sets.push_back(set_vec(s.D));
    tr.dangerous_constraints.push_back(danger_list(s));
    tr.phi.push_back(s.phi);
  };

  const std::size_t N = tr.classes.size();
  WalkState s = walk_root(ctx);
  if (opt.mode == "derandomized") {
    record(s);
    for (std::size_t k = 0; k < N; ++k) {
      std::optional<WalkState> best;
      Value best_i = 1;
      for (Value i = 1; i <= n; ++i) {
        auto child = walk_child(ctx, s, k, i);
        if (!best || compare(child.phi, best->phi, p) < 0) {
          best = std::move(child);
          best_i = i;
        }
      }
      tr.chosen.push_back(best_i);
      s = std::move(*best);
      record(s);
    }
  } else {
    auto rng = make_rng(opt.seed, "construct_partial_sampled");
    std::optional<std::vector<Value>> best_w;
    Surd best_phi;
    for (std::size_t t = 0; t < std::max<std::size_t>(opt.samples, 1); ++t) {
      std::vector<Value> w;
      auto cur = s;
      for (std::size_t k = 0; k < N; ++k) {
        w.push_back(uniform_int(rng, 1, n));
        cur = walk_child(ctx, cur, k, w.back());
      }
      if (!best_w || compare(cur.phi, best_phi, p) < 0) {
        best_w = w;
        best_phi = cur.phi;
      }
    }
    tr.chosen = *best_w;
    record(s);
    for (std::size_t k = 0; k < N; ++k) {
      s = walk_child(ctx, s, k, tr.chosen[k]);
      record(s);
    }
  }
  res.h = s.h;
  res.pulled = loclll::apply(rho.conn, res.h);

  auto& g = res.guarantees;
  Rational n2p = Rational(n) * Rational(n) * p;
  g.p_bound = std::all_of(s.prob.begin(), s.prob.end(), [&](const Rational& q) { return q * q <= n2p; });
  Csp restricted;
  restricted.ground = c.ground;
  restricted.m = c.m;
  restricted.constraints = s.cons;
  g.d_bound = stats(restricted).d <= st.d;

  Rational covered = 0, claim_uncovered = 0;
  bool claim_ok = true;
  for (Elem x : rho.conn.source) {
    bool in_dom = res.pulled.count(x) > 0;
    if (in_dom) covered += wts.at(x);
    const auto& sx = rho.conn.S(x);
    bool meets = std::any_of(sx.begin(), sx.end(), [&](Elem y) { return s.D.count(y) > 0; });
    if (meets) claim_uncovered += wts.at(x);
    else if (!in_dom) claim_ok = false;
  }
  tr.covered_weight = covered;
  Rational gap = 1 - covered;
  Rational dr = static_cast<long>(tr.degree);
  g.coverage = claim_ok && (gap <= 0 || gap * gap <= dr * dr * p);
  // only the derandomized walk promises a non-increasing estimator
  g.phi_monotone = true;
  if (opt.mode == "derandomized")
    for (std::size_t k = 1; k < tr.phi.size(); ++k)
    if (compare(tr.phi[k], tr.phi[k - 1], p) > 0) g.phi_monotone = false;
  g.phi_start = compare(tr.phi.front(), Surd{0, dr}, p) <= 0;
  g.uncovered_below_phi = compare(Surd{claim_uncovered, 0}, tr.phi.back(), p) <= 0;
  return res;
}

}  // namespace loclll
