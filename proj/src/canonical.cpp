#include <algorithm>
#include <map>

#include "loclll/graph.hpp"

namespace loclll {

namespace {

using Colors = std::vector<std::int64_t>;

struct Entry {
  std::vector<std::size_t> tuple;
  std::int64_t rank;
};

class Canonizer {
 public:
  Canonizer(const StructuredGraph& g, std::size_t root) : g_(g), n_(g.size()), root_(root) {
    std::vector<Label> labels;
    for (const auto& [t, l] : g.structure()) labels.push_back(l);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (const auto& [t, l] : g.structure()) {
      Entry e;
      for (Vertex v : t) e.tuple.push_back(g.index_of(v));
      e.rank = std::lower_bound(labels.begin(), labels.end(), l) - labels.begin();
      entries_.push_back(std::move(e));
    }
    incident_.assign(n_, {});
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      auto t = entries_[e].tuple;
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      for (auto v : t) incident_[v].push_back(e);
    }
    adj_.assign(n_, std::vector<char>(n_, 0));
    for (std::size_t i = 0; i < n_; ++i)
      for (auto j : g.adj(i)) adj_[i][j] = 1;
  }

  void run() {
    Colors c(n_, 1);
    c[root_] = 0;
    search(c);
  }

  const std::string& best_code() const { return best_; }
  const std::vector<std::size_t>& best_perm() const { return best_perm_; }

 private:
  static std::size_t count_classes(const Colors& c) {
    Colors s = c;
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
  }

  void refine(Colors& c) const {
    std::size_t classes = count_classes(c);
    while (true) {
      std::vector<std::vector<std::int64_t>> sig(n_);
      for (std::size_t v = 0; v < n_; ++v) {
        auto& s = sig[v];
        s.push_back(c[v]);
        std::vector<std::int64_t> nb;
        for (auto w : g_.adj(v)) nb.push_back(c[w]);
        std::sort(nb.begin(), nb.end());
        s.push_back(static_cast<std::int64_t>(nb.size()));
        s.insert(s.end(), nb.begin(), nb.end());
        std::vector<std::vector<std::int64_t>> inc;
        for (auto e : incident_[v]) {
          std::vector<std::int64_t> d{entries_[e].rank, static_cast<std::int64_t>(entries_[e].tuple.size())};
          for (auto w : entries_[e].tuple) {
            d.push_back(c[w]);
            d.push_back(w == v ? 1 : 0);
          }
          inc.push_back(std::move(d));
        }
        std::sort(inc.begin(), inc.end());
        s.push_back(static_cast<std::int64_t>(inc.size()));
        for (auto& d : inc) s.insert(s.end(), d.begin(), d.end());
      }
      auto uniq = sig;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (std::size_t v = 0; v < n_; ++v)
        c[v] = std::lower_bound(uniq.begin(), uniq.end(), sig[v]) - uniq.begin();
      if (uniq.size() == classes) return;
      classes = uniq.size();
    }
  }

  std::string leaf_code(const std::vector<std::size_t>& perm) const {
    std::string out;
    Label(static_cast<std::int64_t>(n_)).encode(out);
    std::vector<std::size_t> inv(n_);
    for (std::size_t v = 0; v < n_; ++v) inv[perm[v]] = v;
    unsigned char acc = 0;
    int bits = 0;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b) {
        acc = static_cast<unsigned char>((acc << 1) | adj_[inv[a]][inv[b]]);
        if (++bits == 8) {
          out.push_back(static_cast<char>(acc));
          acc = 0;
          bits = 0;
        }
      }
    if (bits) out.push_back(static_cast<char>(acc << (8 - bits)));
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> rel;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      std::vector<std::size_t> t;
      for (auto v : entries_[e].tuple) t.push_back(perm[v]);
      rel.emplace_back(std::move(t), e);
    }
    std::sort(rel.begin(), rel.end());
    Label(static_cast<std::int64_t>(rel.size())).encode(out);
    for (const auto& [t, e] : rel) {
      Label(static_cast<std::int64_t>(t.size())).encode(out);
      for (auto v : t) Label(static_cast<std::int64_t>(v)).encode(out);
      g_.structure()[e].second.encode(out);
    }
    return out;
  }

  void search(Colors c) {
    refine(c);
    std::map<std::int64_t, std::vector<std::size_t>> cells;
    for (std::size_t v = 0; v < n_; ++v) cells[c[v]].push_back(v);
    const std::vector<std::size_t>* target = nullptr;
    for (const auto& [col, members] : cells)
      if (members.size() > 1) {
        target = &members;
        break;
      }
    if (!target) {
      std::vector<std::size_t> perm(n_);
      for (std::size_t v = 0; v < n_; ++v) perm[v] = static_cast<std::size_t>(c[v]);
      auto code = leaf_code(perm);
      if (best_perm_.empty() || code < best_) {
        best_ = std::move(code);
        best_perm_ = std::move(perm);
      }
      return;
    }
    for (auto chosen : *target) {
      Colors next(n_);
      for (std::size_t v = 0; v < n_; ++v) next[v] = 2 * c[v] + ((c[v] == c[chosen] && v != chosen) ? 1 : 0);
      search(std::move(next));
    }
  }

  const StructuredGraph& g_;
  std::size_t n_;
  std::size_t root_;
  std::vector<Entry> entries_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<std::vector<char>> adj_;
  std::string best_;
  std::vector<std::size_t> best_perm_;
};

}  // namespace

CanonicalBall canonicalize(const RootedBall& b, std::size_t cap) {
  const auto& g = b.graph;
  if (g.size() > cap)
    throw Error("canonicalization cap exceeded: ball has " + std::to_string(g.size()) + " vertices, cap " + std::to_string(cap));
  Canonizer cz(g, g.index_of(b.root));
  cz.run();
  const auto& perm = cz.best_perm();
  std::vector<Vertex> vs;
  for (std::size_t i = 0; i < g.size(); ++i) vs.push_back(static_cast<Vertex>(i));
  std::vector<std::pair<Vertex, Vertex>> es;
  for (auto [a, bb] : g.edges())
    es.emplace_back(static_cast<Vertex>(perm[g.index_of(a)]), static_cast<Vertex>(perm[g.index_of(bb)]));
  std::vector<std::pair<VertexTuple, Label>> st;
  for (const auto& [t, l] : g.structure()) {
    VertexTuple nt;
    for (Vertex v : t) nt.push_back(static_cast<Vertex>(perm[g.index_of(v)]));
    st.emplace_back(std::move(nt), l);
  }
  return CanonicalBall{cz.best_code(), StructuredGraph::build(std::move(vs), es, std::move(st), g.tuple_bound())};
}

CanonicalForm canonical_type(const RootedBall& b, std::size_t cap) { return CanonicalForm{canonicalize(b, cap).code}; }

std::string CanonicalForm::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char ch : code) {
    out.push_back(digits[ch >> 4]);
    out.push_back(digits[ch & 15]);
  }
  return out;
}

}  // namespace loclll
