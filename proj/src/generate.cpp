#include <algorithm>
#include <numeric>
#include <set>

#include "loclll/graph.hpp"

namespace loclll {

namespace {

std::vector<Vertex> range_ids(std::size_t n) {
  std::vector<Vertex> vs(n);
  std::iota(vs.begin(), vs.end(), Vertex{0});
  return vs;
}

StructuredGraph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d >= n || (n * d) % 2 != 0) throw Error("random_regular needs d < n and n*d even");
  auto rng = make_rng(seed, "random_regular");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<Vertex> points;
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < d; ++k) points.push_back(static_cast<Vertex>(v));
    std::shuffle(points.begin(), points.end(), rng);
    std::set<std::pair<Vertex, Vertex>> seen;
    bool ok = true;
    for (std::size_t i = 0; i < points.size() && ok; i += 2) {
      auto a = std::min(points[i], points[i + 1]);
      auto b = std::max(points[i], points[i + 1]);
      if (a == b || !seen.insert({a, b}).second) ok = false;
    }
    if (ok) return StructuredGraph::build(range_ids(n), {seen.begin(), seen.end()});
  }
  throw Error("random_regular: pairing model kept producing loops or multi-edges");
}

}  // namespace

StructuredGraph generate(const std::string& kind, const GenerateParams& p, std::uint64_t seed) {
  std::vector<std::pair<Vertex, Vertex>> es;
  if (kind == "path") {
    if (p.n < 1) throw Error("path needs n >= 1");
    for (std::size_t i = 0; i + 1 < p.n; ++i) es.emplace_back(i, i + 1);
    return StructuredGraph::build(range_ids(p.n), es);
  }
  if (kind == "cycle" || kind == "directed_cycle") {
    if (p.n < 3) throw Error("cycle needs n >= 3");
    std::vector<std::pair<VertexTuple, Label>> st;
    for (std::size_t i = 0; i < p.n; ++i) {
      Vertex a = static_cast<Vertex>(i), b = static_cast<Vertex>((i + 1) % p.n);
      es.emplace_back(a, b);
      if (kind == "directed_cycle") {
        st.push_back({{a, b}, Label(1)});
        st.push_back({{b, a}, Label(0)});
      }
    }
    return StructuredGraph::build(range_ids(p.n), es, std::move(st), kind == "directed_cycle" ? 2 : 0);
  }
  if (kind == "torus_grid") {
    if (p.width < 3 || p.height < 3) throw Error("torus_grid needs both sides >= 3");
    auto id = [&](std::size_t r, std::size_t c) { return static_cast<Vertex>(r * p.width + c); };
    for (std::size_t r = 0; r < p.height; ++r)
      for (std::size_t c = 0; c < p.width; ++c) {
        es.emplace_back(id(r, c), id(r, (c + 1) % p.width));
        es.emplace_back(id(r, c), id((r + 1) % p.height, c));
      }
    return StructuredGraph::build(range_ids(p.width * p.height), es);
  }
  if (kind == "random_regular") return random_regular(p.n, p.degree, seed);
  if (kind == "random_tree") {
    if (p.n < 1) throw Error("random_tree needs n >= 1");
    auto rng = make_rng(seed, "random_tree");
    for (std::size_t v = 1; v < p.n; ++v)
      es.emplace_back(uniform_int(rng, 0, static_cast<std::int64_t>(v) - 1), static_cast<Vertex>(v));
    return StructuredGraph::build(range_ids(p.n), es);
  }
  throw Error("unknown graph kind: " + kind);
}

StructuredGraph generate(const std::string& kind, const nlohmann::json& params, std::uint64_t seed) {
  GenerateParams p;
  p.n = params.value("n", std::size_t{0});
  p.width = params.value("width", std::size_t{0});
  p.height = params.value("height", p.width);
  p.degree = params.value("d", params.value("degree", std::size_t{0}));
  return generate(kind, p, seed);
}

}  // namespace loclll
