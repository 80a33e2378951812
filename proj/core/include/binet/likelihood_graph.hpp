#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace binet {

enum class NodeKind { Start, End, Activity, Value };

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::Activity;
  /// Activity nodes: the emitted activity symbol. Several nodes may share one
  /// symbol; their ids act as the disambiguation tag.
  std::string activity;
  /// Value nodes: attribute name and emitted value.
  std::string attribute;
  std::string value;
};

struct GraphEdge {
  std::size_t from;
  std::size_t to;
  double weight;
};

/// Extended likelihood graph: activity nodes interleaved with attribute-value
/// nodes. A walk leaves an activity node through one value node per attribute
/// (in `attributes()` order) before it reaches the next activity or End.
class LikelihoodGraph {
 public:
  LikelihoodGraph() = default;
  explicit LikelihoodGraph(std::vector<std::string> attributes);

  std::size_t add_node(GraphNode node);
  std::size_t add_start(std::string id = "start");
  std::size_t add_end(std::string id = "end");
  std::size_t add_activity(std::string id, std::string activity);
  std::size_t add_value(std::string id, std::string attribute, std::string value);
  /// Throws PreconditionError for unknown nodes or weights outside (0, 1].
  void add_edge(std::size_t from, std::size_t to, double weight);
  void add_edge(const std::string& from, const std::string& to, double weight);

  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  const GraphNode& node(std::size_t index) const { return nodes_.at(index); }
  /// Indices into edges() of the outgoing edges of `node`, in insertion order.
  std::span<const std::size_t> out_edges(std::size_t node) const { return out_[node]; }
  std::optional<std::size_t> find(const std::string& id) const;
  /// Throws PreconditionError when the graph has no (or several) start/end nodes.
  std::size_t start() const;
  std::size_t end() const;

  /// Activity symbols, sorted and unique.
  std::vector<std::string> activity_alphabet() const;
  /// All values of data attribute `attribute` (index into attributes()), sorted and unique.
  std::vector<std::string> value_domain(std::size_t attribute) const;
  /// Index of an attribute name in attributes(), if present.
  std::optional<std::size_t> attribute_index(const std::string& name) const;

 private:
  std::vector<std::string> attributes_;
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct GraphValidation {
  std::vector<std::string> weight_violations;
  std::vector<std::string> unreachable;
  std::vector<std::string> structure_violations;

  bool ok() const noexcept {
    return weight_violations.empty() && unreachable.empty() && structure_violations.empty();
  }
  /// One line per violation.
  std::string summary() const;
};

/// Report-style validation: never throws for malformed graphs.
GraphValidation validate_graph(const LikelihoodGraph& graph, double tolerance = 1e-9);

/// JSON graph files. Throws ParseError on malformed input.
LikelihoodGraph parse_graph(std::string_view json_text);
LikelihoodGraph load_graph(const std::filesystem::path& path);
std::string graph_to_json(const LikelihoodGraph& graph);
void save_graph(const LikelihoodGraph& graph, const std::filesystem::path& path);

}  // namespace binet
