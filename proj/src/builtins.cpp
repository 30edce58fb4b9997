#include <algorithm>
#include <bit>
#include <cmath>

#include "loclll/csp.hpp"
#include "loclll/local.hpp"

namespace loclll {

namespace {

std::int64_t input_at(const StructuredGraph& g, Vertex v) { return layer_value(g, v, Layer::Input).value_or(0); }

LclProblem proper_coloring_problem(std::int64_t k) {
  LocalAlgorithm ver;
  ver.name = "proper_coloring_verifier";
  ver.params = {{"k", k}};
  ver.rule = [k](const CanonicalBall& b) -> std::int64_t {
    const auto& g = b.graph;
    auto c = input_at(g, 0);
    if (c < 1 || (k > 0 && c > k)) return 0;
    for (auto w : g.adj(0))
      if (input_at(g, g.vertex_at(w)) == c) return 0;
    return 1;
  };
  return LclProblem{"proper_coloring", 1, ver, {{"k", k}}};
}

LclProblem trivial_problem() {
  LocalAlgorithm ver{"constant_one", [](const CanonicalBall&) -> std::int64_t { return 1; }, {}};
  return LclProblem{"trivial", 0, ver, nlohmann::json::object()};
}

LclProblem csp_problem(const nlohmann::json& params) {
  LocalAlgorithm ver;
  ver.name = "csp_verifier";
  ver.params = params;
  ver.rule = [](const CanonicalBall& b) -> std::int64_t {
    const auto& g = b.graph;
    auto m = encoded_range(g);
    auto c = input_at(g, 0);
    if (c < 1 || (m && c > *m)) return 0;
    for (const auto& con : encoded_constraints(g)) {
      if (std::find(con.domain.begin(), con.domain.end(), Vertex{0}) == con.domain.end()) continue;
      std::vector<Value> phi;
      for (Vertex v : con.domain) phi.push_back(input_at(g, v));
      if (std::binary_search(con.forbidden.begin(), con.forbidden.end(), phi)) return 0;
    }
    return 1;
  };
  return LclProblem{"csp", 1, ver, params};
}

Vertex successor(const StructuredGraph& g, std::size_t v) {
  for (auto w : g.adj(v)) {
    auto l = base_label(g, {g.vertex_at(v), g.vertex_at(w)});
    if (l && l->is_int() && l->as_int() == 1) return static_cast<Vertex>(w);
  }
  return -1;
}

Builtin cole_vishkin(const nlohmann::json& params) {
  auto n = params.value("n", std::int64_t{64});
  int iters = cole_vishkin_iterations(n);
  LocalAlgorithm alg;
  alg.name = "cole_vishkin_3color";
  alg.params = {{"n", n}};
  alg.rule = [iters](const CanonicalBall& b) -> std::int64_t {
    const auto& g = b.graph;
    std::size_t k = g.size();
    std::vector<std::uint64_t> c(k);
    std::vector<Vertex> succ(k);
    for (std::size_t v = 0; v < k; ++v) {
      auto id = layer_value(g, g.vertex_at(v), Layer::Id).value_or(1);
      c[v] = static_cast<std::uint64_t>(std::max<std::int64_t>(id - 1, 0));
      succ[v] = successor(g, v);
    }
    for (int it = 0; it < iters; ++it) {
      auto next = c;
      for (std::size_t v = 0; v < k; ++v) {
        std::uint64_t diff = succ[v] >= 0 ? (c[v] ^ c[static_cast<std::size_t>(succ[v])]) : 1;
        unsigned i = diff ? static_cast<unsigned>(std::countr_zero(diff)) : 0;
        next[v] = 2 * i + ((c[v] >> i) & 1);
      }
      c = std::move(next);
    }
    for (std::uint64_t x : {5, 4, 3}) {
      auto next = c;
      for (std::size_t v = 0; v < k; ++v) {
        if (c[v] != x) continue;
        std::uint64_t pick = 0;
        while (std::any_of(g.adj(v).begin(), g.adj(v).end(), [&](std::size_t w) { return c[w] == pick; })) ++pick;
        next[v] = pick;
      }
      c = std::move(next);
    }
    return static_cast<std::int64_t>(c[0]) + 1;
  };
  return Builtin{alg, iters + 3, proper_coloring_problem(3), "directed_cycle"};
}

int log_rounds(double c, std::int64_t n) {
  return static_cast<int>(std::ceil(c * std::log2(static_cast<double>(std::max<std::int64_t>(n, 2)))));
}

Builtin trial_coloring(const nlohmann::json& params) {
  auto delta = params.value("delta", std::int64_t{3});
  auto n = params.value("n", std::int64_t{16});
  auto cst = params.value("c", 2.0);
  int rounds = params.contains("rounds") ? params.at("rounds").get<int>() : log_rounds(cst, n);
  std::int64_t palette = delta + 1;
  LocalAlgorithm alg;
  alg.name = "trial_coloring";
  alg.params = {{"delta", delta}, {"n", n}, {"c", cst}, {"rounds", rounds}};
  alg.rule = [palette, rounds](const CanonicalBall& b) -> std::int64_t {
    const auto& g = b.graph;
    std::size_t k = g.size();
    std::vector<std::uint64_t> theta(k);
    for (std::size_t v = 0; v < k; ++v)
      theta[v] = static_cast<std::uint64_t>(layer_value(g, g.vertex_at(v), Layer::Random).value_or(0));
    std::vector<std::int64_t> col(k, 0), cand(k, 0);
    for (int r = 1; r <= rounds; ++r) {
      for (std::size_t v = 0; v < k; ++v)
        cand[v] = col[v] ? 0 : 1 + static_cast<std::int64_t>(mix({theta[v], static_cast<std::uint64_t>(r)}) % static_cast<std::uint64_t>(palette));
      auto next = col;
      for (std::size_t v = 0; v < k; ++v) {
        if (col[v]) continue;
        bool ok = std::none_of(g.adj(v).begin(), g.adj(v).end(),
                               [&](std::size_t w) { return col[w] == cand[v] || cand[w] == cand[v]; });
        if (ok) next[v] = cand[v];
      }
      col = std::move(next);
    }
    return col[0];
  };
  return Builtin{alg, rounds, proper_coloring_problem(palette), "max_degree<=" + std::to_string(delta)};
}

Builtin parallel_resample(const nlohmann::json& params) {
  auto n = params.value("n", std::int64_t{16});
  auto cst = params.value("c", 8.0);
  int rounds = params.contains("rounds") ? params.at("rounds").get<int>() : log_rounds(cst, n);
  int iters = rounds / 2;
  LocalAlgorithm alg;
  alg.name = "parallel_resample";
  alg.params = {{"n", n}, {"c", cst}, {"rounds", rounds}};
  alg.rule = [iters](const CanonicalBall& b) -> std::int64_t {
    const auto& g = b.graph;
    std::size_t k = g.size();
    auto m = static_cast<std::uint64_t>(encoded_range(g).value_or(2));
    auto cons = encoded_constraints(g);
    std::vector<std::uint64_t> theta(k);
    std::vector<std::int64_t> val(k);
    for (std::size_t v = 0; v < k; ++v) {
      theta[v] = static_cast<std::uint64_t>(layer_value(g, g.vertex_at(v), Layer::Random).value_or(0));
      val[v] = 1 + static_cast<std::int64_t>(mix({theta[v], 0}) % m);
    }
    for (int it = 0; it < iters; ++it) {
      std::vector<std::size_t> bad;
      for (std::size_t ci = 0; ci < cons.size(); ++ci) {
        std::vector<Value> phi;
        for (Vertex v : cons[ci].domain) phi.push_back(val[static_cast<std::size_t>(v)]);
        if (std::binary_search(cons[ci].forbidden.begin(), cons[ci].forbidden.end(), phi)) bad.push_back(ci);
      }
      std::vector<std::uint64_t> prio;
      for (auto ci : bad) {
        std::vector<std::uint64_t> ts;
        for (Vertex v : cons[ci].domain) ts.push_back(theta[static_cast<std::size_t>(v)]);
        std::sort(ts.begin(), ts.end());
        std::uint64_t h = mix({static_cast<std::uint64_t>(it), ts.size()});
        for (auto t : ts) h = mix({h, t});
        prio.push_back(h);
      }
      auto next = val;
      for (std::size_t a = 0; a < bad.size(); ++a) {
        const auto& da = cons[bad[a]].domain;
        bool minimal = true;
        for (std::size_t c2 = 0; c2 < bad.size() && minimal; ++c2) {
          if (c2 == a) continue;
          const auto& db = cons[bad[c2]].domain;
          bool meet = std::any_of(da.begin(), da.end(), [&](Vertex v) { return std::find(db.begin(), db.end(), v) != db.end(); });
          if (meet && prio[c2] <= prio[a]) minimal = false;
        }
        if (!minimal) continue;
        for (Vertex v : da) {
          auto vi = static_cast<std::size_t>(v);
          next[vi] = 1 + static_cast<std::int64_t>(mix({theta[vi], static_cast<std::uint64_t>(it) + 1, 0xb}) % m);
        }
      }
      val = std::move(next);
    }
    return val[0];
  };
  return Builtin{alg, rounds, csp_problem(nlohmann::json::object()), "graph_csp"};
}

Builtin id_echo(const nlohmann::json& params) {
  auto layer_name = params.value("layer", std::string("id"));
  if (layer_name != "id" && layer_name != "random") throw Error("id_echo layer must be id or random");
  Layer layer = layer_name == "id" ? Layer::Id : Layer::Random;
  LocalAlgorithm alg;
  alg.name = "id_echo";
  alg.params = {{"layer", layer_name}};
  alg.rule = [layer](const CanonicalBall& b) -> std::int64_t { return layer_value(b.graph, 0, layer).value_or(0); };
  return Builtin{alg, 0, proper_coloring_problem(0), "any"};
}

}  // namespace

int cole_vishkin_iterations(std::int64_t n) {
  std::int64_t bound = std::max<std::int64_t>(n, 1);
  int iters = 0;
  while (bound > 6) {
    std::int64_t bits = 1;
    while ((std::int64_t{1} << bits) < bound) ++bits;
    bound = 2 * bits;
    ++iters;
  }
  return iters;
}

LclProblem make_problem(const std::string& name, const nlohmann::json& params) {
  if (name == "proper_coloring") return proper_coloring_problem(params.value("k", std::int64_t{0}));
  if (name == "trivial") return trivial_problem();
  if (name == "csp") return csp_problem(params);
  throw Error("unknown problem: " + name);
}

Builtin builtin_algorithm(const std::string& name, const nlohmann::json& params) {
  if (name == "cole_vishkin_3color") return cole_vishkin(params);
  if (name == "trial_coloring") return trial_coloring(params);
  if (name == "parallel_resample") return parallel_resample(params);
  if (name == "id_echo") return id_echo(params);
  throw Error("unknown algorithm: " + name);
}

}  // namespace loclll
