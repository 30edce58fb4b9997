#include "loclll/local.hpp"

#include <cmath>
#include <unordered_map>

namespace loclll {

nlohmann::json RunReport::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (auto [v, c] : outputs) out[std::to_string(v)] = c;
  return {{"outputs", out},
          {"rounds_used", rounds_used},
          {"valid", valid},
          {"violating_vertices", violating_vertices},
          {"trials", trials},
          {"failures", failures}};
}

nlohmann::json PipelineReport::to_json() const {
  auto j = run.to_json();
  j["radius"] = radius;
  j["max_ball_2R"] = max_ball;
  j["ids_used"] = ids_used;
  j["canonical_cap"] = canonical_cap;
  return j;
}

VertexLabeling run_deterministic(const LocalAlgorithm& alg, const StructuredGraph& g, int rounds,
                                 const RunOptions& opt) {
  if (rounds < 0) throw Error("negative round count");
  std::unordered_map<std::string, std::int64_t> memo;
  VertexLabeling out;
  for (Vertex x : g.vertices()) {
    auto cb = canonicalize(ball(g, x, rounds), opt.canonical_cap);
    auto it = memo.find(cb.code);
    if (it == memo.end()) it = memo.emplace(cb.code, alg.rule(cb)).first;
    out[x] = it->second;
  }
  return out;
}

RunReport verify_lcl(const LclProblem& problem, const StructuredGraph& g, const VertexLabeling& f,
                     const RunOptions& opt) {
  for (Vertex v : g.vertices())
    if (!f.count(v)) throw Error("labeling is not total: missing vertex " + std::to_string(v));
  auto gf = with_labeling(g, f, Layer::Input);
  auto verdict = run_deterministic(problem.verifier, gf, problem.t, opt);
  RunReport rep;
  rep.outputs = f;
  for (auto [v, b] : verdict) {
    if (b != 0 && b != 1) throw Error("verifier produced a non-boolean output");
    if (b != 1) rep.violating_vertices.push_back(v);
  }
  rep.valid = rep.violating_vertices.empty();
  return rep;
}

namespace {

std::size_t max_ball_size(const StructuredGraph& g, int radius) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto dist = g.bfs(i, radius);
    std::size_t cnt = 0;
    for (int d : dist) cnt += d >= 0;
    best = std::max(best, cnt);
  }
  return best;
}

}  // namespace

PipelineReport det_pipeline(const LocalAlgorithm& alg, const LclProblem& problem, const StructuredGraph& g,
                            std::int64_t n, int rounds, const std::vector<Vertex>& order) {
  PipelineReport rep;
  rep.radius = rounds + problem.t;
  rep.max_ball = max_ball_size(g, 2 * rep.radius);
  if (static_cast<std::int64_t>(rep.max_ball) > n)
    throw Error("ball too large: max |ball(G,x,2R)| = " + std::to_string(rep.max_ball) + " > n = " + std::to_string(n));
  auto gp = rep.radius > 0 ? power_graph(g, 2 * rep.radius) : StructuredGraph::build(g.vertices(), {});
  auto ids = greedy_coloring(gp, order);
  for (auto [v, c] : ids) rep.ids_used = std::max(rep.ids_used, c);
  if (rep.ids_used > n)
    throw Error("greedy coloring of the power graph used " + std::to_string(rep.ids_used) + " > n colors");
  rep.canonical_cap = std::max({kDefaultCanonicalCap, max_ball_size(g, rounds), max_ball_size(g, problem.t)});
  RunOptions opt{rep.canonical_cap};
  auto f = run_deterministic(alg, with_labeling(g, ids, Layer::Id), rounds, opt);
  rep.run = verify_lcl(problem, g, f, opt);
  rep.run.rounds_used = rounds;
  return rep;
}

double binomial_radius(double rate, std::int64_t trials) {
  if (trials <= 0) return 1.0;
  double t = static_cast<double>(trials);
  return 2.576 * std::sqrt(rate * (1 - rate) / t) + 1.0 / t;
}

FailureEstimate estimate_randomized_failure(const LocalAlgorithm& alg, const LclProblem& problem,
                                            const StructuredGraph& g, int rounds, std::int64_t m,
                                            std::int64_t trials, std::uint64_t seed, const RunOptions& opt) {
  if (trials < 1 || m < 1) throw Error("estimate needs trials >= 1 and m >= 1");
  FailureEstimate est;
  est.trials = trials;
  for (std::int64_t k = 0; k < trials; ++k) {
    auto rng = make_rng(seed, "failure_trial", static_cast<std::uint64_t>(k));
    VertexLabeling theta;
    for (Vertex v : g.vertices()) theta[v] = uniform_int(rng, 1, m);
    auto f = run_deterministic(alg, with_labeling(g, theta, Layer::Random), rounds, opt);
    if (!verify_lcl(problem, g, f, opt).valid) ++est.failures;
  }
  est.rate = static_cast<double>(est.failures) / static_cast<double>(trials);
  est.radius = binomial_radius(est.rate, trials);
  return est;
}

Rational exact_randomized_failure(const LocalAlgorithm& alg, const LclProblem& problem, const StructuredGraph& g,
                                  int rounds, std::int64_t m, int cap_bits, const RunOptions& opt) {
  double bits = static_cast<double>(g.size()) * std::log2(static_cast<double>(m));
  if (bits > cap_bits) throw CapExceeded("exact failure enumeration", bits, cap_bits);
  std::vector<std::int64_t> theta(g.size(), 1);
  Integer fails = 0, total = 0;
  while (true) {
    VertexLabeling th;
    for (std::size_t i = 0; i < g.size(); ++i) th[g.vertex_at(i)] = theta[i];
    auto f = run_deterministic(alg, with_labeling(g, th, Layer::Random), rounds, opt);
    if (!verify_lcl(problem, g, f, opt).valid) ++fails;
    ++total;
    std::size_t i = 0;
    while (i < theta.size() && theta[i] == m) theta[i++] = 1;
    if (i == theta.size()) break;
    ++theta[i];
  }
  return frac(fails, total);
}

}  // namespace loclll
