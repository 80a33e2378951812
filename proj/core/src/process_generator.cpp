#include "binet/process_generator.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "binet/errors.hpp"

namespace binet {

WalkSampler::WalkSampler(const LikelihoodGraph& graph) : graph_(graph) {
  const GraphValidation report = validate_graph(graph);
  if (!report.ok()) throw PreconditionError("invalid likelihood graph:\n" + report.summary());
  start_ = graph.start();
  weights_.resize(graph.nodes().size());
  targets_.resize(graph.nodes().size());
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
    for (std::size_t e : graph.out_edges(i)) {
      weights_[i].push_back(graph.edges()[e].weight);
      targets_[i].push_back(graph.edges()[e].to);
    }
  }
}

std::vector<std::size_t> WalkSampler::walk(Rng& rng, std::size_t max_case_length) const {
  std::vector<std::size_t> path;
  for (std::size_t attempt = 0; attempt < kMaxWalkAttempts; ++attempt) {
    path.clear();
    path.push_back(start_);
    std::size_t events = 0;
    bool rejected = false;
    std::size_t current = start_;
    while (graph_.node(current).kind != NodeKind::End) {
      current = targets_[current][weighted_index(rng, weights_[current])];
      path.push_back(current);
      if (graph_.node(current).kind == NodeKind::Activity && ++events > max_case_length) {
        rejected = true;
        break;
      }
    }
    if (!rejected) return path;
  }
  throw GenerationError("no walk ended within " + std::to_string(max_case_length) + " events after " +
                        std::to_string(kMaxWalkAttempts) + " attempts");
}

Case WalkSampler::to_case(const std::vector<std::size_t>& walk, std::string id) const {
  Case c;
  c.id = std::move(id);
  for (std::size_t index : walk) {
    const GraphNode& n = graph_.node(index);
    if (n.kind == NodeKind::Activity) {
      c.events.push_back(Event{n.activity, {}, std::nullopt});
    } else if (n.kind == NodeKind::Value) {
      c.events.back().attributes.push_back(n.value);
    }
  }
  return c;
}

Case sample_case(const LikelihoodGraph& graph, Rng& rng, std::size_t max_case_length, std::string id) {
  WalkSampler sampler(graph);
  return sampler.to_case(sampler.walk(rng, max_case_length), std::move(id));
}

EventLog generate_log(const LikelihoodGraph& graph, const GeneratorConfig& config, std::string name) {
  if (config.num_cases == 0) throw PreconditionError("generate_log: num_cases must be positive");
  if (config.max_case_length == 0) throw PreconditionError("generate_log: max_case_length must be positive");
  WalkSampler sampler(graph);
  std::vector<Case> cases;
  cases.reserve(config.num_cases);
  for (std::size_t i = 0; i < config.num_cases; ++i) {
    Rng rng = make_stream(config.seed, i);
    cases.push_back(sampler.to_case(sampler.walk(rng, config.max_case_length), std::to_string(i + 1)));
  }
  return EventLog(std::move(name), graph.attributes(), std::move(cases));
}

// ---------------------------------------------------------------------------
// Random graphs

namespace {

struct ControlNode {
  std::string id;
  std::string activity;
  std::vector<std::pair<std::size_t, double>> next;  // index into control nodes; kEndTarget for End
  double self_loop = 0.0;
};

constexpr std::size_t kEndTarget = static_cast<std::size_t>(-1);

struct Segment {
  std::vector<std::pair<std::size_t, double>> entries;
  std::vector<std::size_t> exits;
  double skip_probability = 0.0;
};

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = 0.2 + uniform01(rng);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

std::vector<std::size_t> choose_distinct(Rng& rng, std::size_t population, std::size_t count) {
  std::vector<std::size_t> all(population);
  std::iota(all.begin(), all.end(), 0);
  shuffle(std::span<std::size_t>(all), rng);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

std::string numbered(const char* prefix, std::size_t i) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%s%zu", prefix, i);
  return buffer;
}

}  // namespace

LikelihoodGraph random_graph(const RandomGraphParams& params) {
  if (params.num_activities == 0 || params.values_per_attribute == 0 || params.branching == 0) {
    throw PreconditionError("random_graph: num_activities, values_per_attribute and branching must be >= 1");
  }
  Rng rng(mix_seed(params.seed));

  std::vector<std::string> symbols;
  for (std::size_t i = 1; i <= params.num_activities; ++i) symbols.push_back(numbered("Activity ", i));
  shuffle(std::span<std::string>(symbols), rng);

  std::vector<ControlNode> control;
  std::vector<Segment> segments;
  std::size_t next_symbol = 0;
  std::map<std::string, std::size_t> copies;
  auto add_control = [&](const std::string& activity) {
    const std::size_t n = copies[activity]++;
    control.push_back({n == 0 ? activity : activity + "#" + std::to_string(n + 1), activity, {}, 0.0});
    return control.size() - 1;
  };

  while (next_symbol < symbols.size()) {
    const std::size_t remaining = symbols.size() - next_symbol;
    const double draw = uniform01(rng);
    Segment segment;
    const std::size_t max_width = std::min(params.branching, remaining);
    if (draw < 0.2 && params.branching >= 2 && remaining >= 5) {
      // Long-term dependency: P_i -> M#i -> Q_i, the shared middle symbol M
      // is duplicated so that Q_i depends on the branch taken before M.
      const std::size_t width = std::min<std::size_t>(uniform_between(rng, 2, max_width), (remaining - 1) / 2);
      const std::string middle = symbols[next_symbol++];
      const auto entry_weights = random_weights(rng, width);
      for (std::size_t b = 0; b < width; ++b) {
        const std::size_t p = add_control(symbols[next_symbol++]);
        const std::size_t m = add_control(middle);
        const std::size_t q = add_control(symbols[next_symbol++]);
        control[p].next = {{m, 1.0}};
        control[m].next = {{q, 1.0}};
        segment.entries.emplace_back(p, entry_weights[b]);
        segment.exits.push_back(q);
      }
    } else if (draw < 0.5 && max_width >= 2) {
      const std::size_t width = uniform_between(rng, 2, max_width);
      const auto entry_weights = random_weights(rng, width);
      for (std::size_t b = 0; b < width; ++b) {
        const std::size_t node = add_control(symbols[next_symbol++]);
        segment.entries.emplace_back(node, entry_weights[b]);
        segment.exits.push_back(node);
      }
    } else {
      const std::size_t node = add_control(symbols[next_symbol++]);
      segment.entries.emplace_back(node, 1.0);
      segment.exits.push_back(node);
      if (uniform01(rng) < 0.15) control[node].self_loop = 0.1 + 0.2 * uniform01(rng);
    }
    if (!segments.empty() && uniform01(rng) < 0.15) segment.skip_probability = 0.1 + 0.3 * uniform01(rng);
    segments.push_back(std::move(segment));
  }

  // Successor distribution when leaving segment s - 1 (i.e. entering segment s).
  std::vector<std::vector<std::pair<std::size_t, double>>> entering(segments.size() + 1);
  entering[segments.size()] = {{kEndTarget, 1.0}};
  for (std::size_t s = segments.size(); s-- > 0;) {
    const double skip = segments[s].skip_probability;
    for (const auto& [node, w] : segments[s].entries) entering[s].emplace_back(node, w * (1.0 - skip));
    if (skip > 0.0) {
      for (const auto& [node, w] : entering[s + 1]) entering[s].emplace_back(node, w * skip);
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (std::size_t exit : segments[s].exits) control[exit].next = entering[s + 1];
  }

  LikelihoodGraph graph;
  {
    std::vector<std::string> attributes;
    for (std::size_t a = 1; a <= params.num_attributes; ++a) attributes.push_back(numbered("attr", a));
    graph = LikelihoodGraph(std::move(attributes));
  }
  const std::size_t start = graph.add_start();
  const std::size_t end = graph.add_end();
  std::vector<std::size_t> activity_nodes;
  for (const auto& c : control) activity_nodes.push_back(graph.add_activity(c.id, c.activity));

  auto resolve = [&](std::size_t target) { return target == kEndTarget ? end : activity_nodes[target]; };

  for (const auto& [node, w] : entering[0]) graph.add_edge(start, resolve(node), w);

  for (std::size_t c = 0; c < control.size(); ++c) {
    // Merge duplicate targets (possible when skipping several optional segments).
    std::map<std::size_t, double> successors;
    for (const auto& [node, w] : control[c].next) successors[resolve(node)] += w * (1.0 - control[c].self_loop);
    if (control[c].self_loop > 0.0) successors[activity_nodes[c]] += control[c].self_loop;

    std::vector<std::size_t> frontier{activity_nodes[c]};
    for (std::size_t a = 0; a < params.num_attributes; ++a) {
      std::vector<std::size_t> layer;
      const std::size_t cap = a == 0 ? 4 : 2;
      for (std::size_t parent : frontier) {
        const std::size_t group = uniform_between(rng, 1, std::min(cap, params.values_per_attribute));
        const auto values = choose_distinct(rng, params.values_per_attribute, group);
        const auto weights = random_weights(rng, group);
        for (std::size_t v = 0; v < group; ++v) {
          const std::string value = graph.attributes()[a] + "=v" + std::to_string(values[v] + 1);
          const std::size_t node = graph.add_value(graph.node(parent).id + "/" + value, graph.attributes()[a], value);
          graph.add_edge(parent, node, weights[v]);
          layer.push_back(node);
        }
      }
      frontier = std::move(layer);
    }
    for (std::size_t tail : frontier) {
      // Data-to-control dependency: some value nodes re-weight the next activity.
      std::vector<double> weights;
      for (const auto& [target, w] : successors) weights.push_back(w);
      if (params.num_attributes > 0 && weights.size() > 1 && uniform01(rng) < 0.5) {
        const auto noise = random_weights(rng, weights.size());
        double total = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] *= noise[i];
        for (auto& w : weights) w /= total;
      }
      std::size_t i = 0;
      for (const auto& [target, w] : successors) graph.add_edge(tail, target, weights[i++]);
    }
  }
  const GraphValidation report = validate_graph(graph);
  if (!report.ok()) throw GenerationError("random_graph produced an invalid graph:\n" + report.summary());
  return graph;
}

}  // namespace binet
