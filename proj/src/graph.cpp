#include "loclll/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace loclll {

StructuredGraph StructuredGraph::build(std::vector<Vertex> vertices,
                                       const std::vector<std::pair<Vertex, Vertex>>& edges,
                                       std::vector<std::pair<VertexTuple, Label>> structure,
                                       int tuple_bound) {
  StructuredGraph g;
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
    throw Error("duplicate vertex id");
  g.vertices_ = std::move(vertices);
  g.adj_.assign(g.vertices_.size(), {});
  for (auto [a, b] : edges) {
    if (a == b) throw Error("self-loop at vertex " + std::to_string(a));
    if (!g.contains(a) || !g.contains(b))
      throw Error("edge endpoint is not a vertex: " + std::to_string(a) + "-" + std::to_string(b));
    g.adj_[g.index_of(a)].push_back(g.index_of(b));
    g.adj_[g.index_of(b)].push_back(g.index_of(a));
  }
  for (auto& nb : g.adj_) {
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) throw Error("duplicate edge");
  }
  std::sort(structure.begin(), structure.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  int longest = 0;
  for (std::size_t i = 0; i < structure.size(); ++i) {
    if (i > 0 && structure[i].first == structure[i - 1].first) throw Error("duplicate structure entry for a tuple");
    for (Vertex v : structure[i].first)
      if (!g.contains(v)) throw Error("structure tuple mentions unknown vertex " + std::to_string(v));
    longest = std::max<int>(longest, static_cast<int>(structure[i].first.size()));
  }
  if (tuple_bound < 0) tuple_bound = longest;
  if (longest > tuple_bound) throw Error("structure tuple longer than tuple_bound");
  g.tuple_bound_ = tuple_bound;
  g.structure_ = std::move(structure);
  g.incident_.assign(g.vertices_.size(), {});
  for (std::size_t e = 0; e < g.structure_.size(); ++e) {
    std::vector<std::size_t> seen;
    for (Vertex v : g.structure_[e].first) seen.push_back(g.index_of(v));
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto i : seen) g.incident_[i].push_back(e);
  }
  return g;
}

bool StructuredGraph::contains(Vertex v) const { return std::binary_search(vertices_.begin(), vertices_.end(), v); }

std::size_t StructuredGraph::index_of(Vertex v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v) throw Error("unknown vertex " + std::to_string(v));
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::vector<Vertex> StructuredGraph::neighbors(Vertex v) const {
  std::vector<Vertex> out;
  for (auto j : adj_[index_of(v)]) out.push_back(vertices_[j]);
  return out;
}

bool StructuredGraph::adjacent(Vertex u, Vertex v) const {
  const auto& nb = adj_[index_of(u)];
  return std::binary_search(nb.begin(), nb.end(), index_of(v));
}

std::size_t StructuredGraph::max_degree() const {
  std::size_t d = 0;
  for (const auto& nb : adj_) d = std::max(d, nb.size());
  return d;
}

std::vector<std::pair<Vertex, Vertex>> StructuredGraph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (std::size_t i = 0; i < adj_.size(); ++i)
    for (auto j : adj_[i])
      if (i < j) out.emplace_back(vertices_[i], vertices_[j]);
  return out;
}

std::optional<Label> StructuredGraph::label(const VertexTuple& t) const {
  auto it = std::lower_bound(structure_.begin(), structure_.end(), t,
                             [](const auto& e, const VertexTuple& key) { return e.first < key; });
  if (it == structure_.end() || it->first != t) return std::nullopt;
  return it->second;
}

std::vector<int> StructuredGraph::bfs(std::size_t source, int max_dist) const {
  std::vector<int> dist(vertices_.size(), -1);
  std::deque<std::size_t> q{source};
  dist[source] = 0;
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    if (max_dist >= 0 && dist[v] >= max_dist) continue;
    for (auto w : adj_[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
  }
  return dist;
}

nlohmann::json StructuredGraph::to_json() const {
  nlohmann::json j;
  j["vertices"] = vertices_;
  auto es = nlohmann::json::array();
  for (auto [a, b] : edges()) es.push_back({a, b});
  j["edges"] = es;
  auto st = nlohmann::json::array();
  for (const auto& [t, l] : structure_) st.push_back({{"tuple", t}, {"label", l.to_json()}});
  j["structure"] = st;
  j["tuple_bound"] = tuple_bound_;
  return j;
}

StructuredGraph StructuredGraph::from_json(const nlohmann::json& j) {
  auto vertices = j.at("vertices").get<std::vector<Vertex>>();
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (const auto& e : j.value("edges", nlohmann::json::array())) {
    if (!e.is_array() || e.size() != 2) throw Error("edge must be a pair: " + e.dump());
    edges.emplace_back(e[0].get<Vertex>(), e[1].get<Vertex>());
  }
  std::vector<std::pair<VertexTuple, Label>> structure;
  for (const auto& s : j.value("structure", nlohmann::json::array()))
    structure.emplace_back(s.at("tuple").get<VertexTuple>(), Label::from_json(s.at("label")));
  int bound = j.contains("tuple_bound") ? j.at("tuple_bound").get<int>() : -1;
  return build(std::move(vertices), edges, std::move(structure), bound);
}

bool StructuredGraph::operator==(const StructuredGraph& o) const {
  return vertices_ == o.vertices_ && adj_ == o.adj_ && structure_ == o.structure_ && tuple_bound_ == o.tuple_bound_;
}

RootedBall ball(const StructuredGraph& g, Vertex x, int radius) {
  if (radius < 0) throw Error("negative radius");
  auto dist = g.bfs(g.index_of(x), radius);
  std::vector<Vertex> vs;
  std::vector<char> in(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (dist[i] >= 0) {
      vs.push_back(g.vertex_at(i));
      in[i] = 1;
    }
  std::vector<std::pair<Vertex, Vertex>> es;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!in[i]) continue;
    for (auto j : g.adj(i))
      if (in[j] && i < j) es.emplace_back(g.vertex_at(i), g.vertex_at(j));
  }
  std::set<std::size_t> entries;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (in[i])
      for (auto e : g.incident(i)) entries.insert(e);
  std::vector<std::pair<VertexTuple, Label>> st;
  const auto& all = g.structure();
  for (std::size_t e = 0; e < all.size() && all[e].first.empty(); ++e) st.push_back(all[e]);
  for (auto e : entries) {
    bool inside = std::all_of(all[e].first.begin(), all[e].first.end(),
                              [&](Vertex v) { return in[g.index_of(v)]; });
    if (inside) st.push_back(all[e]);
  }
  return RootedBall{StructuredGraph::build(std::move(vs), es, std::move(st), g.tuple_bound()), x, radius};
}

StructuredGraph power_graph(const StructuredGraph& g, int k) {
  if (k < 1) throw Error("power_graph needs k >= 1");
  std::vector<std::pair<Vertex, Vertex>> es;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto dist = g.bfs(i, k);
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (dist[j] >= 1) es.emplace_back(g.vertex_at(i), g.vertex_at(j));
  }
  return StructuredGraph::build(g.vertices(), es);
}

VertexLabeling greedy_coloring(const StructuredGraph& g, const std::vector<Vertex>& order) {
  if (order.size() != g.size()) throw Error("greedy order is not a permutation of the vertices");
  std::vector<std::int64_t> color(g.size(), 0);
  for (Vertex v : order) {
    auto i = g.index_of(v);
    if (color[i] != 0) throw Error("greedy order repeats a vertex");
    std::vector<char> used(g.adj(i).size() + 2, 0);
    for (auto j : g.adj(i))
      if (color[j] > 0 && static_cast<std::size_t>(color[j]) < used.size()) used[color[j]] = 1;
    std::int64_t c = 1;
    while (used[c]) ++c;
    color[i] = c;
  }
  VertexLabeling f;
  for (std::size_t i = 0; i < g.size(); ++i) f[g.vertex_at(i)] = color[i];
  return f;
}

bool is_proper_coloring(const StructuredGraph& g, const VertexLabeling& f) {
  for (auto [a, b] : g.edges()) {
    auto ia = f.find(a), ib = f.find(b);
    if (ia == f.end() || ib == f.end() || ia->second == ib->second) return false;
  }
  return true;
}

namespace {

Label wrap_previous(const std::optional<Label>& prev) {
  if (!prev) return Label::tuple({});
  return Label::tuple({*prev});
}

bool is_layer(const Label& l, std::int64_t tag) {
  return l.is_tuple() && l.items().size() == 4 && l.items()[0].is_int() && l.items()[0].as_int() == tag;
}

bool is_marker(const Label& l) {
  return l.is_tuple() && l.items().size() == 3 && l.items()[0].is_int() && l.items()[0].as_int() == kMarkerTag;
}

}  // namespace

StructuredGraph with_labeling(const StructuredGraph& g, const VertexLabeling& f, Layer layer) {
  std::map<VertexTuple, Label> st(g.structure().begin(), g.structure().end());
  auto kind = Label(static_cast<std::int64_t>(layer));
  for (auto [v, val] : f) {
    if (!g.contains(v)) throw Error("labeling mentions unknown vertex " + std::to_string(v));
    VertexTuple key{v};
    std::optional<Label> prev;
    if (auto it = st.find(key); it != st.end()) prev = it->second;
    st[key] = Label::tuple({Label(kLayerTag), kind, Label(val), wrap_previous(prev)});
  }
  std::optional<Label> prev_marker;
  if (auto it = st.find(VertexTuple{}); it != st.end()) prev_marker = it->second;
  st[VertexTuple{}] = Label::tuple({Label(kMarkerTag), kind, wrap_previous(prev_marker)});
  std::vector<std::pair<VertexTuple, Label>> entries(st.begin(), st.end());
  return StructuredGraph::build(g.vertices(), g.edges(), std::move(entries), std::max(1, g.tuple_bound()));
}

std::optional<std::int64_t> layer_value(const StructuredGraph& g, Vertex v, Layer layer) {
  auto l = g.label(VertexTuple{v});
  while (l && is_layer(*l, kLayerTag)) {
    if (l->items()[1].as_int() == static_cast<std::int64_t>(layer)) return l->items()[2].as_int();
    const auto& prev = l->items()[3];
    if (prev.items().empty()) return std::nullopt;
    l = prev.items()[0];
  }
  return std::nullopt;
}

std::optional<Label> base_label(const Label& l0) {
  Label l = l0;
  while (is_layer(l, kLayerTag) || is_marker(l)) {
    const auto& prev = l.items().back();
    if (prev.items().empty()) return std::nullopt;
    l = prev.items()[0];
  }
  return l;
}

std::optional<Label> base_label(const StructuredGraph& g, const VertexTuple& t) {
  auto l = g.label(t);
  if (!l) return std::nullopt;
  return base_label(*l);
}

Vertex Gadget::u(std::size_t x_index, int alpha) const {
  return static_cast<Vertex>(x_index * slots + static_cast<std::size_t>(alpha));
}

Vertex Gadget::v(std::size_t x_index, int i) const {
  return static_cast<Vertex>(x_index * slots + static_cast<std::size_t>(c + 1) + static_cast<std::size_t>(i - 1));
}

Gadget gadget_build(const StructuredGraph& g, int k) {
  if (k < 2) throw Error("gadget needs k >= 2");
  int d = static_cast<int>(g.max_degree());
  if (d < k) throw Error("gadget needs max degree >= k");
  int c = d - k;
  if (c * (c + 1) < d) throw Error("gadget precondition c(c+1) >= d fails for d=" + std::to_string(d) + ", k=" + std::to_string(k));
  Gadget gad;
  gad.k = k;
  gad.c = c;
  gad.slots = static_cast<std::size_t>(c + 1 + k - 1);
  gad.source_order = g.vertices();
  std::vector<Vertex> vs;
  std::vector<std::pair<VertexTuple, Label>> st;
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (int a = 0; a <= c; ++a) {
      vs.push_back(gad.u(x, a));
      st.push_back({{gad.u(x, a)}, Label::tuple({Label(g.vertex_at(x)), Label(0), Label(a)})});
    }
    for (int i = 1; i <= k - 1; ++i) {
      vs.push_back(gad.v(x, i));
      st.push_back({{gad.v(x, i)}, Label::tuple({Label(g.vertex_at(x)), Label(1), Label(i)})});
    }
  }
  // alpha(x, y): class of y among the ascending neighbours of x
  auto alpha = [&](std::size_t x, std::size_t y) {
    const auto& nb = g.adj(x);
    auto pos = static_cast<int>(std::lower_bound(nb.begin(), nb.end(), y) - nb.begin()) + 1;
    return pos % (c + 1);
  };
  std::vector<std::pair<Vertex, Vertex>> es;
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (int i = 1; i <= k - 1; ++i) {
      for (int j = i + 1; j <= k - 1; ++j) es.emplace_back(gad.v(x, i), gad.v(x, j));
      for (int a = 0; a <= c; ++a) es.emplace_back(gad.v(x, i), gad.u(x, a));
    }
    for (auto y : g.adj(x))
      if (x < y) es.emplace_back(gad.u(x, alpha(x, y)), gad.u(y, alpha(y, x)));
  }
  gad.graph = StructuredGraph::build(std::move(vs), es, std::move(st));
  return gad;
}

VertexLabeling gadget_lift(const Gadget& gad, const StructuredGraph& g, const VertexLabeling& f) {
  VertexLabeling h;
  for (std::size_t x = 0; x < g.size(); ++x) {
    auto fx = f.at(g.vertex_at(x));
    for (int a = 0; a <= gad.c; ++a) h[gad.u(x, a)] = fx;
    int i = 1;
    for (std::int64_t col = 1; col <= gad.k; ++col)
      if (col != fx) h[gad.v(x, i++)] = col;
  }
  return h;
}

}  // namespace loclll
