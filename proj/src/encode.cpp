#include <algorithm>
#include <numeric>
#include <set>

#include "loclll/csp.hpp"

namespace loclll {

namespace {

bool is_body_set(const Label& l) {
  return l.is_set() && std::all_of(l.items().begin(), l.items().end(), [](const Label& b) {
    return b.is_set() && std::all_of(b.items().begin(), b.items().end(), [](const Label& t) { return t.is_tuple(); });
  });
}

std::vector<std::vector<Value>> body_tuples(const Label& body) {
  std::vector<std::vector<Value>> out;
  for (const auto& t : body.items()) {
    std::vector<Value> phi;
    for (const auto& v : t.items()) phi.push_back(v.as_int());
    out.push_back(std::move(phi));
  }
  return out;
}

template <typename F>
void for_each_encoded(const StructuredGraph& h, F&& fn) {
  for (const auto& [t, l] : h.structure()) {
    if (t.empty() || !std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end()) continue;
    auto base = base_label(l);
    if (!base || !is_body_set(*base)) continue;
    fn(t, *base);
  }
}

}  // namespace

StructuredGraph primal_graph(const Csp& c) {
  std::set<std::pair<Vertex, Vertex>> es;
  for (const auto& con : c.constraints)
    for (Elem a : con.domain())
      for (Elem b : con.domain())
        if (a < b) es.insert({a, b});
  return StructuredGraph::build(c.ground, {es.begin(), es.end()});
}

StructuredGraph graph_csp_encode(const StructuredGraph& g, const Csp& c, int cap_bits) {
  for (Elem e : c.ground)
    if (!g.contains(e)) throw Error("CSP ground element " + std::to_string(e) + " is not a vertex of the carrier graph");
  std::map<VertexTuple, std::vector<Label>> bodies;
  for (const auto& con : c.constraints) {
    const auto& dom = con.domain();
    if (dom.empty()) {
      if (!con.known_empty()) throw Error("an unsatisfiable constraint with empty domain cannot be encoded");
      continue;
    }
    for (std::size_t a = 0; a < dom.size(); ++a)
      for (std::size_t b = a + 1; b < dom.size(); ++b)
        if (!g.adjacent(dom[a], dom[b]))
          throw Error("constraint domain elements " + std::to_string(dom[a]) + " and " + std::to_string(dom[b]) +
                      " are not adjacent in the carrier graph");
    auto members = con.members(cap_bits);
    std::vector<std::size_t> perm(dom.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      VertexTuple t;
      for (auto i : perm) t.push_back(dom[i]);
      std::vector<Label> rel;
      for (const auto& phi : members) {
        std::vector<Label> row;
        for (auto i : perm) row.push_back(Label(phi[i]));
        rel.push_back(Label::tuple(std::move(row)));
      }
      bodies[t].push_back(Label::set(std::move(rel)));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  std::vector<std::pair<VertexTuple, Label>> st;
  st.push_back({VertexTuple{}, Label::tuple({Label(kRangeTag), Label(c.m)})});
  for (auto& [t, bs] : bodies) st.emplace_back(t, Label::set(std::move(bs)));
  return StructuredGraph::build(g.vertices(), g.edges(), std::move(st), static_cast<int>(std::max<std::size_t>(c.bound(), 1)));
}

std::optional<Value> encoded_range(const StructuredGraph& g) {
  auto l = base_label(g, VertexTuple{});
  if (!l || !l->is_tuple() || l->items().size() != 2 || !l->items()[0].is_int() || l->items()[0].as_int() != kRangeTag)
    return std::nullopt;
  return l->items()[1].as_int();
}

Csp graph_csp_decode(const StructuredGraph& h) {
  Csp c;
  c.ground = h.vertices();
  auto m = encoded_range(h);
  if (!m) throw Error("structured graph carries no range layer");
  c.m = *m;
  for_each_encoded(h, [&](const VertexTuple& t, const Label& bodies) {
    for (const auto& body : bodies.items()) c.constraints.push_back(Constraint::forbidden(t, c.m, body_tuples(body)));
  });
  c.validate();
  return c;
}

std::vector<EncodedConstraint> encoded_constraints(const StructuredGraph& g) {
  std::vector<EncodedConstraint> out;
  for_each_encoded(g, [&](const VertexTuple& t, const Label& bodies) {
    EncodedConstraint ec;
    ec.domain = t;
    for (const auto& body : bodies.items())
      for (auto& phi : body_tuples(body)) ec.forbidden.push_back(std::move(phi));
    std::sort(ec.forbidden.begin(), ec.forbidden.end());
    out.push_back(std::move(ec));
  });
  return out;
}

LclProblem csp_to_lcl(Value m, std::size_t b, const Rational& p, std::size_t d) {
  return make_problem("csp", {{"m", m}, {"b", b}, {"p", p.get_str()}, {"d", d}});
}

}  // namespace loclll
