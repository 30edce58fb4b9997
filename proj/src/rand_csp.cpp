#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "loclll/reduction.hpp"

namespace loclll {

namespace {

struct BallContext {
  LocalAlgorithm alg;
  LclProblem problem;
  StructuredGraph ball_r;  // ball(G, x, R)
  StructuredGraph ball_t;  // ball(G, x, t)
  Vertex x = 0;
  int rounds = 0;
  std::size_t canonical_cap = 64;

  StructuredGraph seeded(const std::vector<Value>& theta) const {
    VertexLabeling th;
    for (std::size_t i = 0; i < ball_r.size(); ++i) th[ball_r.vertex_at(i)] = theta[i];
    return with_labeling(ball_r, th, Layer::Random);
  }

  std::int64_t output_at(const StructuredGraph& seeded_graph, Vertex y) const {
    return alg.rule(canonicalize(ball(seeded_graph, y, rounds), canonical_cap));
  }

  // exact counts re-enumerate the same seed maps (stats, binary encoding), so verdicts are memoized
  mutable std::map<std::vector<Value>, bool> memo;

  bool rejects(const std::vector<Value>& theta) const {
    if (auto it = memo.find(theta); it != memo.end()) return it->second;
    bool r = evaluate(theta);
    if (memo.size() < (std::size_t{1} << 16)) memo.emplace(theta, r);
    return r;
  }

  bool evaluate(const std::vector<Value>& theta) const {
    auto gs = seeded(theta);
    VertexLabeling f;
    for (Vertex y : ball_t.vertices()) f[y] = output_at(gs, y);
    auto gf = with_labeling(ball_t, f, Layer::Input);
    return problem.verifier.rule(canonicalize(ball(gf, x, problem.t), canonical_cap)) == 0;
  }
};

std::size_t max_ball(const StructuredGraph& g, int radius) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto dist = g.bfs(i, radius);
    best = std::max<std::size_t>(best, static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [](int d) { return d >= 0; })));
  }
  return best;
}

}  // namespace

RandCsp rand_to_csp(const LocalAlgorithm& alg, const LclProblem& problem, const StructuredGraph& g, Value m, int rounds,
                    int cap_bits, std::size_t canonical_cap) {
  RandCsp out;
  out.radius = rounds + problem.t;
  out.max_ball_2R = max_ball(g, 2 * out.radius);
  out.csp.ground = g.vertices();
  out.csp.m = m;
  auto contexts = std::make_shared<std::map<Vertex, std::shared_ptr<const BallContext>>>();
  for (Vertex x : g.vertices()) {
    auto ctx = std::make_shared<BallContext>();
    ctx->alg = alg;
    ctx->problem = problem;
    ctx->ball_r = ball(g, x, out.radius).graph;
    ctx->ball_t = ball(g, x, problem.t).graph;
    ctx->x = x;
    ctx->rounds = rounds;
    ctx->canonical_cap = canonical_cap;
    (*contexts)[x] = ctx;
    std::shared_ptr<const BallContext> cctx = ctx;
    auto body = predicate_body(ctx->ball_r.size(), [cctx](const std::vector<Value>& theta) { return cctx->rejects(theta); },
                               {{"name", "lcl_reject"},
                                {"params", {{"alg", alg.name}, {"problem", problem.name}, {"x", x}, {"rounds", rounds}}}});
    out.csp.constraints.emplace_back(ctx->ball_r.vertices(), m, body, cap_bits);
  }
  Connection& tau = out.decode;
  tau.source = g.vertices();
  tau.target = g.vertices();
  for (Vertex x : g.vertices()) tau.det[x] = (*contexts)[x]->ball_r.vertices();
  tau.rule = [contexts](Elem x, const View& view) -> std::optional<Value> {
    std::vector<Value> theta;
    for (const auto& v : view) {
      if (!v) return std::nullopt;
      theta.push_back(*v);
    }
    const auto& ctx = *contexts->at(x);
    return ctx.output_at(ctx.seeded(theta), x);
  };
  tau.descriptor = {{"kind", "rand_to_csp"},
                    {"params", {{"alg", alg.name}, {"alg_params", alg.params}, {"problem", problem.name}, {"m", m}, {"rounds", rounds}}}};
  return out;
}

nlohmann::json BootstrapResult::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& a : attempts)
    arr.push_back({{"candidate", a.candidate}, {"feasible", a.feasible}, {"failing", a.failing}, {"values", a.values}});
  return {{"route", route}, {"feasible", reduction.has_value()}, {"attempts", arr}};
}

namespace {

struct TargetCheck {
  bool ok = true;
  std::string failing;
  nlohmann::json values;
};

TargetCheck check_targets(const CspStats& s, std::size_t d_rho, unsigned N, const Rational& eps) {
  TargetCheck t;
  Rational lhs1 = s.p * rpow(Rational(static_cast<long>(s.d + 1)), N);
  Rational lhs2 = s.p * rpow(Rational(static_cast<long>(d_rho)), N);
  t.values = {{"p", s.p.get_str()}, {"d", s.d}, {"d_rho", d_rho}, {"p(d+1)^N", lhs1.get_str()}, {"p d_rho^N", lhs2.get_str()}, {"eps", eps.get_str()}};
  if (lhs1 > eps) {
    t.ok = false;
    t.failing = "p(C)(d(C)+1)^N <= eps";
  } else if (lhs2 > eps) {
    t.ok = false;
    t.failing = "p(C) d(rho)^N <= eps";
  }
  return t;
}

}  // namespace

BootstrapResult bootstrap(const Csp& b, const Reduction& rho, unsigned N, const Rational& eps, const BootstrapOptions& opt) {
  BootstrapResult res;
  (void)b;
  const Csp& b0 = rho.target;
  if (opt.try_identity) {
    BootstrapAttempt a;
    a.candidate = "identity";
    try {
      auto chk = check_targets(stats(b0), rho.degree(), N, eps);
      a.values = chk.values;
      a.feasible = chk.ok;
      a.failing = chk.failing;
    } catch (const CapExceeded& e) {
      a.failing = e.what();
    }
    res.attempts.push_back(a);
    if (a.feasible) {
      res.reduction = rho;
      res.route = "identity";
      return res;
    }
  }
  StructuredGraph h;
  try {
    h = graph_csp_encode(primal_graph(b0), b0, opt.cap_bits);
  } catch (const Error& e) {
    BootstrapAttempt a;
    a.candidate = "graph_csp_encode";
    a.failing = e.what();
    res.attempts.push_back(a);
    res.route = "infeasible";
    return res;
  }
  for (auto n : opt.n_grid) {
    BootstrapAttempt a;
    a.candidate = "n=" + std::to_string(n);
    auto bi = builtin_algorithm("parallel_resample", {{"n", n}, {"c", opt.c}});
    int T = bi.rounds;
    int R = T + bi.problem.t;
    std::size_t ball_r = max_ball(h, R);
    a.values = {{"T", T}, {"R", R}, {"max_ball_R", ball_r}};
    // seed range: largest power of two keeping every predicate enumeration within the cap
    int budget = std::min(opt.seed_budget_bits, opt.cap_bits);
    int seed_bits = ball_r == 0 ? budget : budget / static_cast<int>(ball_r);
    if (seed_bits < 1) {
      a.failing = "exact p(C) needs 2^" + std::to_string(ball_r) + " seed maps per constraint, budget 2^" + std::to_string(budget);
      res.attempts.push_back(a);
      continue;
    }
    seed_bits = std::min(seed_bits, 16);
    Value m_seed = Value{1} << seed_bits;
    a.values["m_seed"] = m_seed;
    try {
      auto st = stats(b0);
      auto rc = rand_to_csp(bi.alg, csp_to_lcl(b0.m, b0.bound(), st.p, st.d), h, m_seed, T, opt.cap_bits,
                            std::max<std::size_t>(ball_r, kDefaultCanonicalCap));
      auto sc = stats(rc.csp);
      auto composed = compose(rho.conn, rc.decode);
      auto d_rho = connection_degree(composed, rc.csp);
      auto chk = check_targets(sc, d_rho, N, eps);
      a.values.update(chk.values);
      a.values["max_ball_2R"] = rc.max_ball_2R;
      if (sc.p > frac(1, n)) {
        a.failing = "p(C) <= 1/n";
      } else if (sc.d + 1 > rc.max_ball_2R) {
        a.failing = "d(C) <= max|ball(x,2R)| - 1";
      } else if (!chk.ok) {
        a.failing = chk.failing;
      } else {
        a.feasible = true;
        res.attempts.push_back(a);
        res.reduction = Reduction{composed, rc.csp};
        res.route = "grid";
        return res;
      }
    } catch (const CapExceeded& e) {
      a.failing = e.what();
    }
    res.attempts.push_back(a);
  }
  res.route = "infeasible";
  return res;
}

}  // namespace loclll
