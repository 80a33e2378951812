#include "binet/likelihood_graph.hpp"

#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "binet/errors.hpp"
#include "io_util.hpp"

namespace binet {

LikelihoodGraph::LikelihoodGraph(std::vector<std::string> attributes) : attributes_(std::move(attributes)) {}

std::size_t LikelihoodGraph::add_node(GraphNode node) {
  if (node.id.empty()) throw PreconditionError("graph node id must not be empty");
  if (index_.contains(node.id)) throw PreconditionError("duplicate graph node id '" + node.id + "'");
  const std::size_t index = nodes_.size();
  index_.emplace(node.id, index);
  nodes_.push_back(std::move(node));
  out_.emplace_back();
  return index;
}

std::size_t LikelihoodGraph::add_start(std::string id) {
  return add_node({std::move(id), NodeKind::Start, {}, {}, {}});
}

std::size_t LikelihoodGraph::add_end(std::string id) { return add_node({std::move(id), NodeKind::End, {}, {}, {}}); }

std::size_t LikelihoodGraph::add_activity(std::string id, std::string activity) {
  return add_node({std::move(id), NodeKind::Activity, std::move(activity), {}, {}});
}

std::size_t LikelihoodGraph::add_value(std::string id, std::string attribute, std::string value) {
  return add_node({std::move(id), NodeKind::Value, {}, std::move(attribute), std::move(value)});
}

void LikelihoodGraph::add_edge(std::size_t from, std::size_t to, double weight) {
  if (from >= nodes_.size() || to >= nodes_.size()) throw PreconditionError("edge references unknown node");
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw PreconditionError("edge " + nodes_[from].id + " -> " + nodes_[to].id + " has weight outside (0, 1]");
  }
  out_[from].push_back(edges_.size());
  edges_.push_back({from, to, weight});
}

void LikelihoodGraph::add_edge(const std::string& from, const std::string& to, double weight) {
  auto f = find(from);
  auto t = find(to);
  if (!f) throw PreconditionError("unknown node '" + from + "'");
  if (!t) throw PreconditionError("unknown node '" + to + "'");
  add_edge(*f, *t, weight);
}

std::optional<std::size_t> LikelihoodGraph::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::size_t unique_of_kind(const std::vector<GraphNode>& nodes, NodeKind kind, const char* what) {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind != kind) continue;
    if (found) throw PreconditionError(std::string("graph has more than one ") + what + " node");
    found = i;
  }
  if (!found) throw PreconditionError(std::string("graph has no ") + what + " node");
  return *found;
}

}  // namespace

std::size_t LikelihoodGraph::start() const { return unique_of_kind(nodes_, NodeKind::Start, "start"); }
std::size_t LikelihoodGraph::end() const { return unique_of_kind(nodes_, NodeKind::End, "end"); }

std::vector<std::string> LikelihoodGraph::activity_alphabet() const {
  std::set<std::string> symbols;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Activity) symbols.insert(n.activity);
  }
  return {symbols.begin(), symbols.end()};
}

std::vector<std::string> LikelihoodGraph::value_domain(std::size_t attribute) const {
  std::set<std::string> values;
  const std::string& name = attributes_.at(attribute);
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Value && n.attribute == name) values.insert(n.value);
  }
  return {values.begin(), values.end()};
}

std::optional<std::size_t> LikelihoodGraph::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i] == name) return i;
  }
  return std::nullopt;
}

std::string GraphValidation::summary() const {
  std::ostringstream out;
  for (const auto& v : weight_violations) out << "weight: " << v << '\n';
  for (const auto& v : unreachable) out << "reachability: " << v << '\n';
  for (const auto& v : structure_violations) out << "structure: " << v << '\n';
  return out.str();
}

GraphValidation validate_graph(const LikelihoodGraph& graph, double tolerance) {
  GraphValidation report;
  const auto& nodes = graph.nodes();
  const auto& edges = graph.edges();
  const auto& attributes = graph.attributes();

  std::optional<std::size_t> start;
  std::optional<std::size_t> end;
  std::size_t starts = 0;
  std::size_t ends = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::Start) {
      ++starts;
      start = i;
    } else if (nodes[i].kind == NodeKind::End) {
      ++ends;
      end = i;
    }
  }
  if (starts != 1) report.structure_violations.push_back("expected exactly one start node, found " + std::to_string(starts));
  if (ends != 1) report.structure_violations.push_back("expected exactly one end node, found " + std::to_string(ends));

  auto layer_of = [&](const GraphNode& n) -> std::optional<std::size_t> {
    if (n.kind != NodeKind::Value) return std::nullopt;
    return graph.attribute_index(n.attribute);
  };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const GraphNode& n = nodes[i];
    auto out = graph.out_edges(i);
    if (n.kind == NodeKind::End) {
      if (!out.empty()) report.structure_violations.push_back("end node '" + n.id + "' has outgoing edges");
      continue;
    }
    double total = 0.0;
    for (std::size_t e : out) total += edges[e].weight;
    if (std::abs(total - 1.0) > tolerance) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "outgoing weights of '" << n.id << "' sum to " << total;
      report.weight_violations.push_back(msg.str());
    }
    if (n.kind == NodeKind::Value && !layer_of(n)) {
      report.structure_violations.push_back("value node '" + n.id + "' uses unknown attribute '" + n.attribute + "'");
      continue;
    }
    // Which node kinds may follow this node.
    for (std::size_t e : out) {
      const GraphNode& next = nodes[edges[e].to];
      bool allowed = false;
      if (n.kind == NodeKind::Start) {
        allowed = next.kind == NodeKind::Activity;
      } else if (n.kind == NodeKind::Activity) {
        allowed = attributes.empty() ? (next.kind == NodeKind::Activity || next.kind == NodeKind::End)
                                     : layer_of(next) == std::optional<std::size_t>(0);
      } else {
        const std::size_t layer = *layer_of(n);
        if (layer + 1 < attributes.size()) {
          allowed = layer_of(next) == std::optional<std::size_t>(layer + 1);
        } else {
          allowed = next.kind == NodeKind::Activity || next.kind == NodeKind::End;
        }
      }
      if (!allowed) {
        report.structure_violations.push_back("edge '" + n.id + "' -> '" + next.id +
                                              "' breaks the activity/attribute layering");
      }
    }
    if (out.empty()) report.structure_violations.push_back("node '" + n.id + "' has no successors");
  }

  if (start && end) {
    std::vector<std::vector<std::size_t>> reverse(nodes.size());
    for (const auto& e : edges) reverse[e.to].push_back(e.from);
    std::vector<bool> forward_seen(nodes.size(), false);
    std::vector<bool> backward_seen(nodes.size(), false);
    std::deque<std::size_t> queue{*start};
    forward_seen[*start] = true;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t e : graph.out_edges(i)) {
        const std::size_t j = edges[e].to;
        if (!forward_seen[j]) {
          forward_seen[j] = true;
          queue.push_back(j);
        }
      }
    }
    queue = {*end};
    backward_seen[*end] = true;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j : reverse[i]) {
        if (!backward_seen[j]) {
          backward_seen[j] = true;
          queue.push_back(j);
        }
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!forward_seen[i]) report.unreachable.push_back("'" + nodes[i].id + "' is not reachable from start");
      if (!backward_seen[i]) report.unreachable.push_back("end is not reachable from '" + nodes[i].id + "'");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

using nlohmann::ordered_json;

namespace {

std::string kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Start: return "start";
    case NodeKind::End: return "end";
    case NodeKind::Activity: return "activity";
    case NodeKind::Value: return "value";
  }
  return "activity";
}

std::string get_string(const ordered_json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) throw ParseError(where + ": missing string \"" + key + "\"");
  return it->get<std::string>();
}

}  // namespace

LikelihoodGraph parse_graph(std::string_view json_text) {
  const ordered_json root = detail::parse_json(json_text, "graph");
  if (!root.is_object()) throw ParseError("graph: top level must be an object");
  std::vector<std::string> attributes;
  if (auto it = root.find("attributes"); it != root.end()) {
    if (!it->is_array()) throw ParseError("graph: \"attributes\" must be an array");
    for (const auto& a : *it) {
      if (!a.is_string()) throw ParseError("graph: attribute names must be strings");
      attributes.push_back(a.get<std::string>());
    }
  }
  LikelihoodGraph graph(std::move(attributes));
  auto nodes = root.find("nodes");
  auto edges = root.find("edges");
  if (nodes == root.end() || !nodes->is_array()) throw ParseError("graph: missing \"nodes\" array");
  if (edges == root.end() || !edges->is_array()) throw ParseError("graph: missing \"edges\" array");
  try {
    for (std::size_t i = 0; i < nodes->size(); ++i) {
      const auto& n = (*nodes)[i];
      const std::string where = "nodes[" + std::to_string(i) + "]";
      if (!n.is_object()) throw ParseError(where + ": expected an object");
      const std::string id = get_string(n, "id", where);
      const std::string kind = get_string(n, "kind", where);
      if (kind == "start") {
        graph.add_start(id);
      } else if (kind == "end") {
        graph.add_end(id);
      } else if (kind == "activity") {
        graph.add_activity(id, get_string(n, "activity", where));
      } else if (kind == "value") {
        graph.add_value(id, get_string(n, "attribute", where), get_string(n, "value", where));
      } else {
        throw ParseError(where + ": unknown node kind '" + kind + "'");
      }
    }
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const auto& e = (*edges)[i];
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!e.is_object()) throw ParseError(where + ": expected an object");
      auto w = e.find("w");
      if (w == e.end() || !w->is_number()) throw ParseError(where + ": missing numeric \"w\"");
      graph.add_edge(get_string(e, "from", where), get_string(e, "to", where), w->get<double>());
    }
  } catch (const PreconditionError& error) {
    throw ParseError(std::string("graph: ") + error.what());
  }
  return graph;
}

LikelihoodGraph load_graph(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  try {
    return parse_graph(text);
  } catch (const ParseError& error) {
    throw ParseError(path.string() + ": " + error.message(), error.line(), error.column());
  }
}

std::string graph_to_json(const LikelihoodGraph& graph) {
  ordered_json root;
  root["attributes"] = graph.attributes();
  ordered_json nodes = ordered_json::array();
  for (const auto& n : graph.nodes()) {
    ordered_json node;
    node["id"] = n.id;
    node["kind"] = kind_name(n.kind);
    if (n.kind == NodeKind::Activity) node["activity"] = n.activity;
    if (n.kind == NodeKind::Value) {
      node["attribute"] = n.attribute;
      node["value"] = n.value;
    }
    nodes.push_back(std::move(node));
  }
  ordered_json edges = ordered_json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"from", graph.node(e.from).id}, {"to", graph.node(e.to).id}, {"w", e.weight}});
  }
  root["nodes"] = std::move(nodes);
  root["edges"] = std::move(edges);
  return root.dump(1) + "\n";
}

void save_graph(const LikelihoodGraph& graph, const std::filesystem::path& path) {
  detail::write_atomically(path, graph_to_json(graph));
}

}  // namespace binet
