#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "loclll/experiment.hpp"
#include "loclll/lll.hpp"
#include "loclll/reduction.hpp"

using namespace loclll;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  std::string first_failure;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) first_failure = what;
    ok = ok && cond;
  }
};

// explicit instances kept next to the library object, for the oracles below
struct RawConstraint {
  std::vector<Elem> dom;
  std::vector<std::vector<Value>> bad;
};

struct RawCsp {
  std::vector<Elem> ground;
  Value m = 2;
  std::vector<RawConstraint> cons;

  Csp lib() const {
    Csp c;
    c.ground = ground;
    c.m = m;
    for (const auto& r : cons) c.constraints.push_back(Constraint::forbidden(r.dom, m, r.bad));
    return c;
  }
};

Rational oracle_prob(const RawConstraint& r, Value m, const Assignment& g) {
  long free = 0;
  for (Elem x : r.dom) free += !g.count(x);
  std::int64_t hits = 0;
  for (const auto& phi : r.bad) {
    bool agree = true;
    for (std::size_t j = 0; j < r.dom.size(); ++j)
      if (auto it = g.find(r.dom[j]); it != g.end() && it->second != phi[j]) agree = false;
    hits += agree;
  }
  return frac(Integer(hits), ipow(Integer(m), static_cast<unsigned long>(free)));
}

bool oracle_solves(const RawCsp& c, const Assignment& f) {
  for (Elem x : c.ground)
    if (!f.count(x) || f.at(x) < 1 || f.at(x) > c.m) return false;
  for (const auto& r : c.cons)
    for (const auto& phi : r.bad) {
      bool hit = true;
      for (std::size_t j = 0; j < r.dom.size(); ++j) hit = hit && f.at(r.dom[j]) == phi[j];
      if (hit) return false;
    }
  return true;
}

Rational oracle_p(const RawCsp& c) {
  Rational p = 0;
  for (const auto& r : c.cons) p = std::max(p, oracle_prob(r, c.m, {}));
  return p;
}

std::size_t oracle_d(const RawCsp& c) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < c.cons.size(); ++i) {
    if (c.cons[i].bad.empty()) continue;
    std::size_t k = 0;
    for (std::size_t j = 0; j < c.cons.size(); ++j) {
      if (i == j || c.cons[j].bad.empty()) continue;
      bool meet = false;
      for (Elem x : c.cons[i].dom) meet = meet || std::count(c.cons[j].dom.begin(), c.cons[j].dom.end(), x);
      k += meet;
    }
    d = std::max(d, k);
  }
  return d;
}

// max number of constraints through one element
std::size_t oracle_multiplicity(const RawCsp& c) {
  std::map<Elem, std::size_t> k;
  std::size_t best = 0;
  for (const auto& r : c.cons)
    if (!r.bad.empty())
      for (Elem x : r.dom) best = std::max(best, ++k[x]);
  return best;
}

std::vector<Value> random_tuple(std::mt19937_64& rng, std::size_t len, Value m) {
  std::vector<Value> t;
  for (std::size_t j = 0; j < len; ++j) t.push_back(1 + static_cast<Value>(rng() % static_cast<std::uint64_t>(m)));
  return t;
}

// random domains of fixed size, skipping any that would push some d above max_degree
RawCsp raw_random(std::mt19937_64& rng, std::size_t ground, Value m, std::size_t arity, std::size_t count,
                  std::size_t max_degree, std::size_t forbidden = 1) {
  RawCsp c;
  c.m = m;
  for (std::size_t i = 0; i < ground; ++i) c.ground.push_back(static_cast<Elem>(i));
  for (std::size_t tries = 0; c.cons.size() < count && tries < 50 * count; ++tries) {
    auto pool = c.ground;
    std::shuffle(pool.begin(), pool.end(), rng);
    RawConstraint r;
    r.dom.assign(pool.begin(), pool.begin() + static_cast<long>(std::min(arity, pool.size())));
    std::sort(r.dom.begin(), r.dom.end());
    std::set<std::vector<Value>> bad;
    while (bad.size() < forbidden) bad.insert(random_tuple(rng, r.dom.size(), m));
    r.bad.assign(bad.begin(), bad.end());
    c.cons.push_back(r);
    if (oracle_d(c) > max_degree) c.cons.pop_back();
  }
  return c;
}

std::vector<Elem> keys(const Assignment& f) {
  std::vector<Elem> out;
  for (auto [x, v] : f) out.push_back(x);
  return out;
}

bool is_subset(const std::vector<Elem>& a, const std::vector<Elem>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome averaging_identities() {
  Outcome o;
  std::mt19937_64 rng(1001);
  std::size_t instances = 0, nfold = 0;
  while (instances < 600) {
    RawCsp c;
    c.m = 2 + static_cast<Value>(rng() % 3);
    std::size_t g = 2 + rng() % 7;
    for (std::size_t i = 0; i < g; ++i) c.ground.push_back(static_cast<Elem>(i));
    std::size_t k = 1 + rng() % 4;
    for (std::size_t i = 0; i < k; ++i) {
      auto pool = c.ground;
      std::shuffle(pool.begin(), pool.end(), rng);
      RawConstraint r;
      r.dom.assign(pool.begin(), pool.begin() + static_cast<long>(1 + rng() % std::min<std::size_t>(4, g)));
      std::sort(r.dom.begin(), r.dom.end());
      std::set<std::vector<Value>> bad;
      std::size_t nb = std::min<std::size_t>(1 + rng() % 3, static_cast<std::size_t>(std::pow(c.m, r.dom.size())));
      while (bad.size() < nb) bad.insert(random_tuple(rng, r.dom.size(), c.m));
      r.bad.assign(bad.begin(), bad.end());
      c.cons.push_back(r);
    }
    auto lib = c.lib();
    Value n = c.m;

    // a random C-discrete set A and a partial g off A
    std::vector<Elem> order = c.ground, A;
    std::shuffle(order.begin(), order.end(), rng);
    for (Elem x : order) {
      bool ok = true;
      for (const auto& r : c.cons)
        if (std::count(r.dom.begin(), r.dom.end(), x))
          for (Elem a : A) ok = ok && !std::count(r.dom.begin(), r.dom.end(), a);
      if (ok && rng() % 2) A.push_back(x);
    }
    Assignment g0;
    for (Elem x : c.ground)
      if (!std::count(A.begin(), A.end(), x) && rng() % 3 == 0) g0[x] = 1 + static_cast<Value>(rng() % static_cast<std::uint64_t>(n));

    for (std::size_t ci = 0; ci < c.cons.size(); ++ci) {
      auto cg = restrict_constraint(lib.constraints[ci], g0);
      o.require(probability(cg) == oracle_prob(c.cons[ci], n, g0), "restricted probability differs from the oracle");
      Rational sum = 0;
      for (Value i = 1; i <= n; ++i) {
        Assignment ai;
        for (Elem a : A) ai[a] = i;
        auto both = g0;
        both.insert(ai.begin(), ai.end());
        auto two_step = restrict_constraint(cg, ai);
        auto one_step = restrict_constraint(lib.constraints[ci], both);
        o.require(two_step.same_as(one_step), "restriction does not concatenate");
        o.require(probability(two_step) == oracle_prob(c.cons[ci], n, both), "concatenated probability differs from the oracle");
        sum += probability(two_step);
      }
      sum /= n;
      sum.canonicalize();
      o.require(sum == probability(cg), "single-level average is not exact");
    }

    // N-fold average over a discrete partition
    auto classes = discrete_partition(lib);
    for (const auto& cls : classes)
      for (const auto& r : c.cons) {
        std::size_t meet = 0;
        for (Elem x : cls) meet += std::count(r.dom.begin(), r.dom.end(), x);
        o.require(meet <= 1, "partition class is not discrete");
      }
    std::size_t N = classes.size();
    double words = std::pow(static_cast<double>(n), static_cast<double>(N));
    if (words <= 4096) {
      ++nfold;
      std::vector<Rational> sums(c.cons.size(), 0);
      std::vector<Value> w(N, 1);
      for (;;) {
        Assignment h;
        for (std::size_t j = 0; j < N; ++j)
          for (Elem x : classes[j]) h[x] = w[j];
        for (std::size_t ci = 0; ci < c.cons.size(); ++ci) sums[ci] += probability(restrict_constraint(lib.constraints[ci], h));
        std::size_t j = 0;
        while (j < N && w[j] == n) w[j++] = 1;
        if (j == N) break;
        ++w[j];
      }
      for (std::size_t ci = 0; ci < c.cons.size(); ++ci) {
        Rational avg = sums[ci] / Rational(ipow(Integer(n), N));
        avg.canonicalize();
        o.require(avg == oracle_prob(c.cons[ci], n, {}), "N-fold average is not exact");
      }
    }
    ++instances;
  }
  o.detail = std::to_string(instances) + " instances, " + std::to_string(nfold) + " with the N-fold average";
  return o;
}

// ---------------------------------------------------------------- 2 and 3

struct PartialCase {
  RawCsp raw;
  Csp csp;
  PartialResult res;
};

std::vector<PartialCase> partial_cases;

Outcome partial_guarantees() {
  Outcome o;
  std::mt19937_64 rng(2002);
  std::size_t generated = 0, cons = 0, classes = 0, dsum = 0, uncovered = 0;
  while (partial_cases.size() < 200 && generated < 1000) {
    ++generated;
    std::size_t ground = 30 + rng() % 31;
    // least arity with 2^-b (d+1)^2 <= e^-2 / 4
    std::size_t dmax = rng() % 5;
    std::size_t arity = std::vector<std::size_t>{5, 7, 8, 9, 10}[dmax];
    auto raw = raw_random(rng, ground, 2, arity, ground / 4, dmax);
    auto csp = raw.lib();
    if (oracle_d(raw) > 4 || !partial_precondition(csp).holds) continue;
    auto res = construct_partial(csp, identity_reduction(csp), WeightedGroundSet::uniform(csp.ground));
    Rational p = oracle_p(raw);
    Rational n2 = 4;
    for (const auto& r : raw.cons) {
      auto q = oracle_prob(r, 2, res.h);
      o.require(q * q <= n2 * p, "P[C/h]^2 > n^2 p");
    }
    Rational covered = frac(Integer(res.h.size()), Integer(csp.ground.size()));
    Rational drho = static_cast<long>(oracle_multiplicity(raw));
    o.require(res.trace.covered_weight == covered, "reported covered weight differs from the count");
    o.require((1 - covered) * (1 - covered) <= drho * drho * p, "(1 - covered)^2 > d(rho)^2 p");
    o.require(res.guarantees.all(), "construction reported a failed guarantee");
    partial_cases.push_back({raw, csp, res});
    cons += raw.cons.size();
    classes += res.trace.classes.size();
    dsum += oracle_d(raw);
    uncovered += csp.ground.size() - res.h.size();
  }
  o.require(partial_cases.size() >= 50, "fewer than 50 instances passed the precondition");
  o.detail = std::to_string(partial_cases.size()) + " instances of " + std::to_string(generated) + " generated, " +
             std::to_string(cons) + " constraints, sum d " + std::to_string(dsum) + ", " + std::to_string(classes) +
             " classes, " + std::to_string(uncovered) + " elements left uncovered";
  return o;
}

Outcome monotone_traces() {
  Outcome o;
  std::size_t frozen_checks = 0;
  for (const auto& pc : partial_cases) {
    const auto& tr = pc.res.trace;
    std::size_t N = tr.classes.size();
    o.require(tr.dangerous_sets.size() == N + 1, "trace has the wrong number of prefixes");
    if (tr.dangerous_sets.size() != N + 1) continue;
    for (std::size_t a = 0; a <= N; ++a)
      for (std::size_t b = a; b <= N; ++b) o.require(is_subset(tr.dangerous_sets[a], tr.dangerous_sets[b]), "D(u) not inside D(w)");
    Rational p = oracle_p(pc.raw);
    std::vector<Assignment> hs;
    std::vector<std::vector<Elem>> ds;
    for (std::size_t k = 0; k <= N; ++k) {
      std::vector<Value> u(tr.chosen.begin(), tr.chosen.begin() + static_cast<long>(k));
      hs.push_back(partial_for_word(pc.csp, tr.classes, u, p, &ds));
      o.require(ds.back() == tr.dangerous_sets[k], "replayed D(u) differs from the trace");
    }
    for (Elem y : pc.csp.ground)
      if (!std::binary_search(tr.dangerous_sets[N].begin(), tr.dangerous_sets[N].end(), y))
        o.require(hs.back().count(y) == 1, "element outside D(w) is unassigned");
    o.require(hs.back() == pc.res.h, "replay of the chosen word differs from h");
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t ci = 0; ci < pc.raw.cons.size(); ++ci) {
        auto q = oracle_prob(pc.raw.cons[ci], 2, hs[a]);
        if (q * q <= p) continue;
        auto ca = restrict_constraint(pc.csp.constraints[ci], hs[a]);
        for (std::size_t b = a + 1; b <= N; ++b) {
          ++frozen_checks;
          o.require(restrict_constraint(pc.csp.constraints[ci], hs[b]).same_as(ca), "dangerous constraint changed");
          for (Elem x : pc.raw.cons[ci].dom) o.require(hs[a].count(x) == hs[b].count(x), "dangerous domain was assigned");
        }
      }
  }
  o.require(!partial_cases.empty(), "no traces");
  o.detail = std::to_string(partial_cases.size()) + " traces, " + std::to_string(frozen_checks) + " frozen-constraint replays";
  return o;
}

// ---------------------------------------------------------------- 4

Outcome binary_checks() {
  Outcome o;
  std::mt19937_64 rng(4004);
  std::size_t instances = 0, decoded = 0;
  for (; instances < 150; ++instances) {
    Value n = std::vector<Value>{3, 5, 6}[rng() % 3];
    Rational eps = instances % 2 ? frac(1, 2) : frac(1, 10);
    RawCsp raw;
    raw.m = n;
    std::size_t g = 2 + rng() % 4;
    for (std::size_t i = 0; i < g; ++i) raw.ground.push_back(static_cast<Elem>(i));
    std::size_t k = 1 + rng() % 4;
    for (std::size_t i = 0; i < k; ++i) {
      auto pool = raw.ground;
      std::shuffle(pool.begin(), pool.end(), rng);
      RawConstraint r;
      r.dom.assign(pool.begin(), pool.begin() + static_cast<long>(1 + rng() % std::min<std::size_t>(3, g)));
      std::sort(r.dom.begin(), r.dom.end());
      std::set<std::vector<Value>> bad;
      std::size_t nb = 1 + rng() % 3;
      while (bad.size() < nb) bad.insert(random_tuple(rng, r.dom.size(), n));
      r.bad.assign(bad.begin(), bad.end());
      raw.cons.push_back(r);
    }
    auto c = raw.lib();
    auto br = binary_reduce(c, eps);
    auto sd = stats(br.target);
    // p(D) from the block sizes: a forbidden value v occupies s_v of the 2^N codes
    Integer total = ipow(Integer(2), static_cast<unsigned long>(br.bits));
    Rational pd = 0;
    for (const auto& r : raw.cons) {
      Rational q = 0;
      for (const auto& phi : r.bad) {
        Rational t = 1;
        for (Value v : phi) t *= frac(br.block_sizes[static_cast<std::size_t>(v - 1)], total);
        q += t;
      }
      pd = std::max(pd, q);
    }
    o.require(sd.p == pd, "p(D) differs from the block-size oracle");
    o.require(sd.p <= (1 + eps) * oracle_p(raw), "p(D) > (1+eps) p(C)");
    o.require(sd.d == oracle_d(raw), "d(D) != d(C)");
    if (br.target.ground.size() <= 12) {
      ++decoded;
      for (const auto& sol : all_solutions(br.target)) o.require(oracle_solves(raw, loclll::apply(br.decode, sol)), "decoded solution fails");
      // every solution of C has a preimage, so D is satisfiable exactly when C is
      o.require(all_solutions(br.target).empty() == !solve_exhaustive(c).has_value(), "satisfiability differs");
    }
  }
  o.detail = std::to_string(instances) + " instances, " + std::to_string(decoded) + " decoded exhaustively";
  return o;
}

// ---------------------------------------------------------------- 5

Connection random_connection(std::mt19937_64& rng, const std::vector<Elem>& xs, const std::vector<Elem>& ys, std::size_t wmax) {
  Connection c;
  c.source = xs;
  c.target = ys;
  for (Elem x : xs) {
    auto pool = ys;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(1 + rng() % std::min(wmax, pool.size()));
    std::sort(pool.begin(), pool.end());
    c.det[x] = pool;
  }
  c.rule = [](Elem x, const View& view) -> std::optional<Value> {
    std::uint64_t h = static_cast<std::uint64_t>(x);
    for (const auto& v : view) {
      if (!v) return std::nullopt;
      h = mix({h, static_cast<std::uint64_t>(*v)});
    }
    return 1 + static_cast<Value>(h % 2);
  };
  return c;
}

std::vector<Elem> span(Elem lo, std::size_t n) {
  std::vector<Elem> v(n);
  std::iota(v.begin(), v.end(), lo);
  return v;
}

Outcome composition_bounds() {
  Outcome o;
  std::mt19937_64 rng(5005);
  std::size_t instances = 0;
  for (; instances < 150; ++instances) {
    auto xs = span(0, 3 + rng() % 4), ys = span(100, 4 + rng() % 6), zs = span(200, 5 + rng() % 8);
    auto rho = random_connection(rng, xs, ys, 1 + rng() % 3);
    auto sigma = random_connection(rng, ys, zs, 1 + rng() % 4);
    auto raw = raw_random(rng, zs.size(), 2, 1 + rng() % 3, 2 + rng() % 5, SIZE_MAX);
    for (auto& r : raw.cons)
      for (auto& x : r.dom) x += 200;
    for (auto& x : raw.ground) x += 200;
    auto target = raw.lib();
    auto comp = compose(rho, sigma);

    // measured width: the smallest set of z that fixes the composed value, found by deleting coordinates
    std::size_t width = 0, degree = 0;
    for (Elem x : xs) {
      std::set<Elem> reach;
      for (Elem y : rho.S(x))
        for (Elem z : sigma.S(y)) reach.insert(z);
      std::vector<Elem> need(reach.begin(), reach.end());
      o.require(comp.S(x) == need, "composed determining set is not the union");
      Assignment full;
      for (Elem z : zs) full[z] = 1 + static_cast<Value>(rng() % 2);
      Assignment local;
      for (Elem z : need) local[z] = full[z];
      o.require(comp.eval(x, local) == loclll::apply(rho, loclll::apply(sigma, full)).at(x), "composition disagrees with nesting");
      width = std::max(width, need.size());
      std::size_t k = 0;
      for (const auto& r : raw.cons) {
        bool meet = false;
        for (Elem z : r.dom) meet = meet || reach.count(z);
        k += meet;
      }
      degree = std::max(degree, k);
    }
    std::size_t wr = 0, ws = 0, ds = 0;
    for (Elem x : xs) wr = std::max(wr, rho.S(x).size());
    for (Elem y : ys) {
      ws = std::max(ws, sigma.S(y).size());
      std::size_t k = 0;
      for (const auto& r : raw.cons) {
        bool meet = false;
        for (Elem z : r.dom) meet = meet || std::binary_search(sigma.S(y).begin(), sigma.S(y).end(), z);
        k += meet;
      }
      ds = std::max(ds, k);
    }
    o.require(width <= wr * ws, "width exceeds w(rho) w(sigma)");
    o.require(degree <= wr * ds, "degree exceeds w(rho) d(sigma)");
    o.require(comp.width() == width && connection_degree(comp, target) == degree, "library measures differ");
  }
  o.detail = std::to_string(instances) + " compositions";
  return o;
}

// ---------------------------------------------------------------- 6

Outcome rand_to_csp_checks() {
  Outcome o;
  std::ostringstream det;
  struct Alg {
    std::string label;
    Builtin b;
  };
  std::vector<Alg> algs = {
      {"id_echo", builtin_algorithm("id_echo", {{"layer", "random"}})},
      {"trial_coloring", builtin_algorithm("trial_coloring", {{"delta", 1}, {"n", 8}, {"rounds", 1}})},
  };
  const std::int64_t trials = 4000;
  for (std::int64_t n : {6, 8}) {
    auto g = generate("directed_cycle", GenerateParams{static_cast<std::size_t>(n), 0, 0, 0}, 0);
    for (const auto& a : algs) {
      auto pc = make_problem("proper_coloring", {{"k", 2}});
      auto rc = rand_to_csp(a.b.alg, pc, g, 2, a.b.rounds);
      o.require(rc.radius <= 2, "radius above T + t");
      // per-vertex failure by simulation on the whole cycle
      std::map<Vertex, std::int64_t> fails;
      auto rng = make_rng(6006, a.label, static_cast<std::uint64_t>(n));
      for (std::int64_t t = 0; t < trials; ++t) {
        VertexLabeling seeds;
        for (Vertex v : g.vertices()) seeds[v] = uniform_int(rng, 1, 2);
        auto f = run_deterministic(a.b.alg, with_labeling(g, seeds, Layer::Random), a.b.rounds);
        for (Vertex v : verify_lcl(pc, g, f).violating_vertices) ++fails[v];
      }
      double worst = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        double exact = to_double(probability(rc.csp.constraints[i]));
        double est = static_cast<double>(fails[g.vertex_at(i)]) / static_cast<double>(trials);
        double r = binomial_radius(est, trials);
        worst = std::max(worst, std::abs(est - exact) / r);
        o.require(std::abs(est - exact) <= 3 * r, "Monte Carlo disagrees with the exact p(B_x)");
      }
      auto sols = all_solutions(rc.csp);
      for (const auto& th : sols) {
        auto f = loclll::apply(rc.decode, th);
        bool proper = true;
        for (auto [u, v] : g.edges()) proper = proper && f.at(u) != f.at(v) && f.at(u) >= 1 && f.at(u) <= 2;
        o.require(proper, "decoded solution is not a proper coloring");
      }
      det << a.label << "@" << n << ": p=" << stats(rc.csp).p.get_str() << " sols=" << sols.size()
          << " dev=" << fmt("%.2f", worst) << "r; ";
    }
  }
  o.detail = det.str();
  return o;
}

// ---------------------------------------------------------------- 7

Outcome cole_vishkin_pipeline() {
  Outcome o;
  std::ostringstream det;
  std::mt19937_64 rng(7007);
  for (std::int64_t n : {64, 128, 256, 512}) {
    auto g = generate("directed_cycle", GenerateParams{static_cast<std::size_t>(n), 0, 0, 0}, 0);
    auto cv = builtin_algorithm("cole_vishkin_3color", {{"n", n}});
    std::size_t max_ball = 0;
    std::int64_t ids = 0;
    int radius = 0;
    for (int t = 0; t < 10; ++t) {
      auto order = g.vertices();
      std::shuffle(order.begin(), order.end(), rng);
      auto rep = det_pipeline(cv.alg, cv.problem, g, n, cv.rounds, order);
      bool proper = rep.run.valid;
      for (auto [u, v] : g.edges()) proper = proper && rep.run.outputs.at(u) != rep.run.outputs.at(v);
      for (auto [v, c] : rep.run.outputs) proper = proper && c >= 1 && c <= 3;
      o.require(proper, "not a proper 3-coloring");
      // a ball of radius 2R on a long cycle has 4R+1 vertices, and ids must fit in [n]
      o.require(rep.max_ball == static_cast<std::size_t>(4 * rep.radius + 1), "ball size precondition mismatch");
      o.require(rep.ids_used >= 1 && rep.ids_used <= n, "more ids than n");
      max_ball = std::max(max_ball, rep.max_ball);
      ids = std::max(ids, rep.ids_used);
      radius = rep.radius;
    }
    det << "n=" << n << " R=" << radius << " ball(2R)=" << max_ball << " ids=" << ids << "; ";
  }
  o.detail = det.str();
  return o;
}

// ---------------------------------------------------------------- 8

Outcome moser_tardos_oracle() {
  Outcome o;
  std::mt19937_64 rng(8008);
  std::size_t instances = 0, generated = 0, resamples = 0;
  while (instances < 100 && generated < 5000) {
    ++generated;
    Value m = 2 + static_cast<Value>(rng() % 3);
    std::size_t arity = 2 + rng() % 3;
    auto raw = raw_random(rng, 20 + rng() % 41, m, arity, 5 + rng() % 20, 2 + rng() % 4, 1);
    auto p = oracle_p(raw);
    if (p * static_cast<long>(oracle_d(raw) + 1) > frac(3678, 10000)) continue;
    auto csp = raw.lib();
    o.require(lll_check(csp, "symmetric").holds, "symmetric check disagrees with the oracle");
    auto res = moser_tardos_solve(csp, rng(), 50 * csp.constraints.size());
    o.require(!res.capped && res.solution.has_value(), "cap-out");
    if (res.solution) o.require(oracle_solves(raw, *res.solution), "invalid solution");
    resamples += res.resamples;
    ++instances;
  }
  o.require(instances >= 100, "too few instances satisfy the surrogate");
  o.detail = std::to_string(instances) + " instances, " + std::to_string(resamples) + " resamples in total";
  return o;
}

// ---------------------------------------------------------------- 9

Outcome weighted_loop() {
  Outcome o;
  std::mt19937_64 rng(9009);
  std::size_t generated = 0, completed = 0, infeasible = 0, max_iters = 0;
  while (generated < 24) {
    std::size_t ground = 20 + 8 * (rng() % 6);
    auto raw = raw_random(rng, ground, 65536, 2, ground / 2, 3);
    auto csp = raw.lib();
    // p (d+1)^8 <= 2^-15
    if (oracle_p(raw) * rpow(Rational(static_cast<long>(oracle_d(raw) + 1)), 8) > frac(1, 32768)) continue;
    ++generated;
    WeightedGroundSet w;
    if (generated % 2) {
      w = WeightedGroundSet::uniform(csp.ground);
    } else {
      std::vector<long> raw_w;
      long total = 0;
      for (std::size_t i = 0; i < ground; ++i) total += raw_w.emplace_back(1 + static_cast<long>(rng() % 9));
      for (std::size_t i = 0; i < ground; ++i) w.weights[csp.ground[i]] = frac(raw_w[i], total);
    }
    Rational minw = w.min_positive();
    std::size_t bound = 1;
    for (Rational pw = 1; pw < 1 / minw; pw *= 2) ++bound;
    auto res = solve_weighted(csp, w, 64);
    if (!res.solution) {
      ++infeasible;
      std::printf("  instance %zu did not complete: %s\n", generated, res.failure.c_str());
      continue;
    }
    o.require(res.iteration_bound == bound, "iteration bound differs from ceil(log2(1/w_min)) + 1");
    o.require(res.iterations <= bound, "too many iterations");
    for (const auto& s : res.steps) o.require(2 * s.covered_fraction >= 1, "a step covered less than half");
    o.require(oracle_solves(raw, *res.solution), "final assignment is not a solution");
    max_iters = std::max(max_iters, res.iterations);
    ++completed;
  }
  o.require(5 * completed >= 4 * generated, "fewer than 80% completed");
  o.detail = std::to_string(completed) + "/" + std::to_string(generated) + " completed, " + std::to_string(infeasible) +
             " infeasible, max iterations " + std::to_string(max_iters);
  return o;
}

// ---------------------------------------------------------------- 10

Outcome covering_families() {
  Outcome o;
  std::mt19937_64 rng(10010);
  std::size_t instances = 0, members = 0;
  for (; instances < 20; ++instances) {
    // disjoint triples over m = 32 (one forbidden tuple each), so d = 0 and b log2 m = 15
    RawCsp raw;
    raw.m = 32;
    std::size_t triples = 2 + rng() % 3;
    for (std::size_t i = 0; i < 3 * triples + rng() % 3; ++i) raw.ground.push_back(static_cast<Elem>(i));
    for (std::size_t k = 0; k < triples; ++k) {
      Elem a = static_cast<Elem>(3 * k);
      raw.cons.push_back({{a, a + 1, a + 2}, {random_tuple(rng, 3, 32)}});
    }
    auto b = raw.lib();
    auto fam = cover_family(b);
    std::size_t expect = std::size_t{1} << fam.bits;
    o.require(fam.members.size() == expect, "family size is not 2^N");
    std::map<Elem, std::size_t> count;
    for (const auto& g : fam.members)
      for (auto [x, v] : g) ++count[x];
    for (Elem x : b.ground) o.require(2 * count[x] >= expect, "coverage below 2^(N-1)");
    o.require(fam.covers && fam.counts_ok && fam.residuals_ok, "family reports a failed check");
    // re-certify every residual by extending to a full solution
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      const auto& g = fam.members[i];
      auto rest = restrict_csp(b, g);
      auto mt = moser_tardos_solve(rest, derive_seed(10010, "residual", i), 1000);
      bool ok = mt.solution.has_value();
      if (ok) {
        auto f = g;
        f.insert(mt.solution->begin(), mt.solution->end());
        ok = oracle_solves(raw, f);
      }
      o.require(ok, "residual could not be extended");
    }
    members += fam.members.size();
  }
  o.detail = std::to_string(instances) + " families, " + std::to_string(members) + " members";
  return o;
}

// ---------------------------------------------------------------- 11

int brute_chromatic(const StructuredGraph& g, int kmax) {
  std::vector<int> col(g.size(), 0);
  for (int k = 1; k <= kmax; ++k) {
    std::function<bool(std::size_t)> go = [&](std::size_t i) {
      if (i == g.size()) return true;
      for (int c = 1; c <= k; ++c) {
        bool ok = true;
        for (auto j : g.adj(i)) ok = ok && !(j < i && col[j] == c);
        if (!ok) continue;
        col[i] = c;
        if (go(i + 1)) return true;
      }
      col[i] = 0;
      return false;
    };
    if (go(0)) return k;
  }
  return kmax + 1;
}

Outcome gadget_sharpness() {
  Outcome o;
  std::size_t graphs = 0, feasible = 0;
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<int> perm(n);
    std::set<std::uint32_t> seen;
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
      // isomorphism class representative: least relabeled mask
      std::iota(perm.begin(), perm.end(), 0);
      std::uint32_t best = mask;
      do {
        std::uint32_t r = 0;
        for (std::size_t e = 0; e < pairs.size(); ++e)
          if (mask >> e & 1) {
            int a = std::min(perm[pairs[e].first], perm[pairs[e].second]);
            int b = std::max(perm[pairs[e].first], perm[pairs[e].second]);
            for (std::size_t f = 0; f < pairs.size(); ++f)
              if (pairs[f].first == a && pairs[f].second == b) r |= 1u << f;
          }
        best = std::min(best, r);
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (!seen.insert(best).second) continue;
      ++graphs;
      std::vector<Vertex> vs(n);
      std::iota(vs.begin(), vs.end(), 0);
      std::vector<std::pair<Vertex, Vertex>> es;
      for (std::size_t e = 0; e < pairs.size(); ++e)
        if (mask >> e & 1) es.emplace_back(pairs[e].first, pairs[e].second);
      auto g = StructuredGraph::build(vs, es);
      int d = static_cast<int>(g.max_degree());
      int chi = brute_chromatic(g, n);
      for (int k = 2; k <= d; ++k) {
        int c = d - k;
        if (c * (c + 1) < d) continue;
        ++feasible;
        auto gad = gadget_build(g, k);
        const auto& h = gad.graph;
        std::size_t hmax = 0;
        for (std::size_t i = 0; i < h.size(); ++i) hmax = std::max(hmax, h.adj(i).size());
        o.require(static_cast<int>(hmax) <= d - 1, "max degree of H above d - 1");
        for (std::size_t x = 0; x < g.size(); ++x)
          for (int i = 1; i < k; ++i) o.require(static_cast<int>(h.degree(gad.v(x, i))) == d - 1, "v-vertex degree is not d - 1");
        if (chi <= k) o.require(brute_chromatic(h, k) <= k, "H is not k-colorable");
      }
    }
  }
  o.require(feasible > 0, "no feasible pairs");
  o.detail = std::to_string(graphs) + " graphs up to isomorphism, " + std::to_string(feasible) + " feasible (k, c) pairs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
    double limit_s;  // 0: no time limit
  };
  std::vector<Criterion> all = {
      {1, "exact averaging identities", averaging_identities, 10},
      {2, "partial-solution guarantees", partial_guarantees, 60},
      {3, "monotone dangerous sets and frozen constraints", monotone_traces, 0},
      {4, "binary reduction", binary_checks, 0},
      {5, "composition width and degree", composition_bounds, 0},
      {6, "randomized algorithm to CSP", rand_to_csp_checks, 0},
      {7, "deterministic pipeline with cole-vishkin", cole_vishkin_pipeline, 0},
      {8, "moser-tardos oracle", moser_tardos_oracle, 0},
      {9, "weighted step loop", weighted_loop, 0},
      {10, "covering families", covering_families, 0},
      {11, "gadget sharpness", gadget_sharpness, 0},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.first_failure = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) o.require(false, "time limit " + fmt("%.0f s", c.limit_s) + " exceeded");
    failed += !o.ok;
    std::printf("criterion %2d %s: %s; %s%s [%.1f s]\n", c.id, o.ok ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                o.ok ? "" : (" first failure: " + o.first_failure).c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
