#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "loclll/common.hpp"
#include "loclll/label.hpp"

namespace loclll {

using Vertex = std::int64_t;
using VertexTuple = std::vector<Vertex>;
using VertexLabeling = std::map<Vertex, std::int64_t>;

class StructuredGraph {
 public:
  StructuredGraph() = default;

  // Validating constructor. tuple_bound < 0 means "longest tuple present".
  static StructuredGraph build(std::vector<Vertex> vertices,
                               const std::vector<std::pair<Vertex, Vertex>>& edges,
                               std::vector<std::pair<VertexTuple, Label>> structure = {},
                               int tuple_bound = -1);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool contains(Vertex v) const;
  std::size_t index_of(Vertex v) const;
  Vertex vertex_at(std::size_t i) const { return vertices_[i]; }

  const std::vector<std::size_t>& adj(std::size_t i) const { return adj_[i]; }
  std::vector<Vertex> neighbors(Vertex v) const;
  std::size_t degree(Vertex v) const { return adj_[index_of(v)].size(); }
  bool adjacent(Vertex u, Vertex v) const;
  std::size_t max_degree() const;
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  const std::vector<std::pair<VertexTuple, Label>>& structure() const { return structure_; }
  std::optional<Label> label(const VertexTuple& t) const;
  // indices into structure() of entries that mention vertex index i
  const std::vector<std::size_t>& incident(std::size_t i) const { return incident_[i]; }
  int tuple_bound() const { return tuple_bound_; }

  // distances from v (index-based, -1 for unreachable), truncated at max_dist when >= 0
  std::vector<int> bfs(std::size_t source, int max_dist = -1) const;

  nlohmann::json to_json() const;
  static StructuredGraph from_json(const nlohmann::json& j);

  bool operator==(const StructuredGraph& o) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::pair<VertexTuple, Label>> structure_;  // sorted by tuple
  std::vector<std::vector<std::size_t>> incident_;
  int tuple_bound_ = 0;
};

struct RootedBall {
  StructuredGraph graph;
  Vertex root = 0;
  int radius = 0;
};

RootedBall ball(const StructuredGraph& g, Vertex x, int radius);

// Canonical code plus the canonically relabeled graph (vertices 0..k-1, root 0).
struct CanonicalBall {
  std::string code;
  StructuredGraph graph;
};

struct CanonicalForm {
  std::string code;
  std::string hex() const;
  bool operator==(const CanonicalForm& o) const = default;
  auto operator<=>(const CanonicalForm& o) const = default;
};

CanonicalBall canonicalize(const RootedBall& b, std::size_t cap = kDefaultCanonicalCap);
CanonicalForm canonical_type(const RootedBall& b, std::size_t cap = kDefaultCanonicalCap);

StructuredGraph power_graph(const StructuredGraph& g, int k);
VertexLabeling greedy_coloring(const StructuredGraph& g, const std::vector<Vertex>& order);
bool is_proper_coloring(const StructuredGraph& g, const VertexLabeling& f);

// Layers attached through reserved negative tags so that they never collide with user labels.
enum class Layer : std::int64_t { Input = 0, Id = 1, Random = 2 };
inline constexpr std::int64_t kLayerTag = -1;
inline constexpr std::int64_t kMarkerTag = -2;
inline constexpr std::int64_t kRangeTag = -3;

StructuredGraph with_labeling(const StructuredGraph& g, const VertexLabeling& f, Layer layer = Layer::Input);
std::optional<std::int64_t> layer_value(const StructuredGraph& g, Vertex v, Layer layer);
// Strips layer wrappers and returns the underlying label, if any.
std::optional<Label> base_label(const Label& l);
std::optional<Label> base_label(const StructuredGraph& g, const VertexTuple& t);

struct GenerateParams {
  std::size_t n = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t degree = 0;
};

StructuredGraph generate(const std::string& kind, const GenerateParams& params, std::uint64_t seed);
StructuredGraph generate(const std::string& kind, const nlohmann::json& params, std::uint64_t seed);

struct Gadget {
  StructuredGraph graph;
  int k = 0;
  int c = 0;
  std::size_t slots = 0;  // c+1 u-vertices then k-1 v-vertices per source vertex
  std::vector<Vertex> source_order;
  Vertex u(std::size_t x_index, int alpha) const;
  Vertex v(std::size_t x_index, int i) const;  // i in [k-1]
};

Gadget gadget_build(const StructuredGraph& g, int k);
// The lift of a proper k-coloring of G to H.
VertexLabeling gadget_lift(const Gadget& gad, const StructuredGraph& g, const VertexLabeling& f);

}  // namespace loclll
