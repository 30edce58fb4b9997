#include <algorithm>
#include <memory>
#include <set>
#include <unordered_map>

#include "loclll/reduction.hpp"

namespace loclll {

const std::vector<Elem>& Connection::S(Elem x) const {
  auto it = det.find(x);
  if (it == det.end()) throw Error("element " + std::to_string(x) + " is not in the connection source");
  return it->second;
}

std::size_t Connection::width() const {
  std::size_t w = 0;
  for (const auto& [x, s] : det) w = std::max(w, s.size());
  return w;
}

std::optional<Value> Connection::eval(Elem x, const Assignment& f) const {
  const auto& s = S(x);
  View view;
  view.reserve(s.size());
  for (Elem y : s) {
    auto it = f.find(y);
    view.push_back(it == f.end() ? std::nullopt : std::optional<Value>(it->second));
  }
  return rule(x, view);
}

Assignment apply(const Connection& rho, const Assignment& f) {
  Assignment out;
  for (Elem x : rho.source)
    if (auto v = rho.eval(x, f)) out[x] = *v;
  return out;
}

Connection identity_connection(const std::vector<Elem>& ground) {
  Connection c;
  c.source = ground;
  c.target = ground;
  for (Elem x : ground) c.det[x] = {x};
  c.rule = [](Elem, const View& v) { return v.at(0); };
  c.descriptor = {{"kind", "identity"}, {"params", nlohmann::json::object()}};
  return c;
}

Reduction identity_reduction(const Csp& c) { return Reduction{identity_connection(c.ground), c}; }

Connection compose(const Connection& rho, const Connection& sigma) {
  auto r = std::make_shared<const Connection>(rho);
  auto s = std::make_shared<const Connection>(sigma);
  Connection out;
  out.source = rho.source;
  out.target = sigma.target;
  for (Elem x : rho.source) {
    std::set<Elem> zs;
    for (Elem y : rho.S(x)) {
      const auto& sy = sigma.S(y);
      zs.insert(sy.begin(), sy.end());
    }
    out.det[x] = std::vector<Elem>(zs.begin(), zs.end());
  }
  auto det = std::make_shared<const std::map<Elem, std::vector<Elem>>>(out.det);
  out.rule = [r, s, det](Elem x, const View& view) -> std::optional<Value> {
    const auto& sx = det->at(x);
    auto lookup = [&](Elem z) -> std::optional<Value> {
      auto it = std::lower_bound(sx.begin(), sx.end(), z);
      return view[static_cast<std::size_t>(it - sx.begin())];
    };
    View rv;
    for (Elem y : r->S(x)) {
      View sv;
      for (Elem z : s->S(y)) sv.push_back(lookup(z));
      rv.push_back(s->rule(y, sv));
    }
    return r->rule(x, rv);
  };
  auto chain = nlohmann::json::array();
  for (const auto* part : {&rho.descriptor, &sigma.descriptor}) {
    if (part->value("kind", "") == "compose")
      for (const auto& d : part->at("chain")) chain.push_back(d);
    else
      chain.push_back(*part);
  }
  out.descriptor = {{"kind", "compose"}, {"chain", chain}};
  return out;
}

std::size_t connection_degree(const Connection& rho, const Csp& target) {
  std::unordered_map<Elem, std::vector<std::size_t>> by_elem;
  for (std::size_t i = 0; i < target.constraints.size(); ++i)
    for (Elem e : target.constraints[i].support_domain()) by_elem[e].push_back(i);
  std::size_t best = 0;
  for (const auto& [x, s] : rho.det) {
    std::set<std::size_t> touched;
    for (Elem y : s)
      if (auto it = by_elem.find(y); it != by_elem.end()) touched.insert(it->second.begin(), it->second.end());
    best = std::max(best, touched.size());
  }
  return best;
}

std::size_t Reduction::degree() const { return connection_degree(conn, target); }

PulledPartial pull_partial(const Reduction& rho, const Assignment& h) {
  PulledPartial out;
  out.g = loclll::apply(rho.conn, h);
  auto base = std::make_shared<const Connection>(rho.conn);
  auto fixed = std::make_shared<Assignment>();
  Connection res;
  for (Elem x : rho.conn.source) {
    if (out.g.count(x)) continue;
    res.source.push_back(x);
    std::vector<Elem> rest;
    for (Elem y : rho.conn.S(x)) {
      if (auto it = h.find(y); it != h.end()) (*fixed)[y] = it->second;
      else rest.push_back(y);
    }
    res.det[x] = std::move(rest);
  }
  for (Elem y : rho.conn.target)
    if (!h.count(y)) res.target.push_back(y);
  auto det = std::make_shared<const std::map<Elem, std::vector<Elem>>>(res.det);
  res.rule = [base, fixed, det](Elem x, const View& view) -> std::optional<Value> {
    const auto& rest = det->at(x);
    View full;
    for (Elem y : base->S(x)) {
      if (auto it = fixed->find(y); it != fixed->end()) {
        full.push_back(it->second);
      } else {
        auto pos = std::lower_bound(rest.begin(), rest.end(), y) - rest.begin();
        full.push_back(view[static_cast<std::size_t>(pos)]);
      }
    }
    return base->rule(x, full);
  };
  res.descriptor = {{"kind", "residual"}, {"base", rho.conn.descriptor}, {"fixed", fixed->size()}};
  out.residual_source = res.source;
  out.residual = Reduction{std::move(res), restrict_csp(rho.target, h)};
  return out;
}

}  // namespace loclll
