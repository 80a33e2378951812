#include "binet/baselines.hpp"

#include <algorithm>
#include <unordered_map>

#include "binet/errors.hpp"
#include "binet/thresholding.hpp"

namespace binet {

namespace {

// Window filler for positions before the first event.
const std::string kBos = "\x01<bos>";

}  // namespace

NgramTable::NgramTable(std::size_t k) : k_(k) {
  if (k < 2) throw PreconditionError("t-STIDE window size must be >= 2");
}

std::vector<std::string> NgramTable::context(const Case& c, std::size_t j) const {
  std::vector<std::string> window;
  window.reserve((k_ - 1) * (width_ + 1));
  for (std::size_t back = k_ - 1; back >= 1; --back) {
    if (j < back) {
      window.insert(window.end(), width_ + 1, kBos);
    } else {
      const Event& e = c.events[j - back];
      window.push_back(e.activity);
      window.insert(window.end(), e.attributes.begin(), e.attributes.end());
    }
  }
  return window;
}

void NgramTable::fit(const EventLog& log) {
  width_ = log.attribute_names().size();
  totals_.clear();
  counts_.clear();
  for (const auto& c : log.cases()) {
    for (std::size_t j = 0; j < c.events.size(); ++j) {
      const auto ctx = context(c, j);
      ++totals_[ctx];
      auto& per_attribute = counts_[ctx];
      if (per_attribute.empty()) per_attribute.resize(width_ + 1);
      for (std::size_t a = 0; a <= width_; ++a) ++per_attribute[a][EventLog::value(c.events[j], a)];
    }
  }
}

std::size_t NgramTable::count(const std::vector<std::string>& ctx, std::size_t attribute,
                              const std::string& value) const {
  const auto it = counts_.find(ctx);
  if (it == counts_.end()) return 0;
  const auto& values = it->second.at(attribute);
  const auto v = values.find(value);
  return v == values.end() ? 0 : v->second;
}

std::size_t NgramTable::context_total(const std::vector<std::string>& ctx) const {
  const auto it = totals_.find(ctx);
  return it == totals_.end() ? 0 : it->second;
}

double NgramTable::probability(const std::vector<std::string>& ctx, std::size_t attribute,
                               const std::string& value) const {
  const std::size_t total = context_total(ctx);
  return total == 0 ? 0.0 : static_cast<double>(count(ctx, attribute, value)) / static_cast<double>(total);
}

ScoreTensor tstide_score(const EventLog& log, std::size_t k) {
  NgramTable table(k);
  table.fit(log);
  ScoreTensor scores = shaped_like<double>(log, 0.0);
  for (std::size_t i = 0; i < log.num_cases(); ++i) {
    const Case& c = log.cases()[i];
    for (std::size_t j = 0; j < c.events.size(); ++j) {
      const auto ctx = table.context(c, j);
      for (std::size_t a = 0; a < log.num_attributes(); ++a) {
        scores(i, j, a) = 1.0 - table.probability(ctx, a, EventLog::value(c.events[j], a));
      }
    }
  }
  return scores;
}

namespace {

std::vector<std::size_t> variant_counts(const EventLog& log) {
  std::map<std::vector<std::string>, std::size_t> counts;
  std::vector<std::vector<std::string>> variants;
  variants.reserve(log.num_cases());
  for (const auto& c : log.cases()) {
    std::vector<std::string> v;
    v.reserve(c.events.size());
    for (const auto& e : c.events) v.push_back(e.activity);
    ++counts[v];
    variants.push_back(std::move(v));
  }
  std::vector<std::size_t> result;
  result.reserve(variants.size());
  for (const auto& v : variants) result.push_back(counts[v]);
  return result;
}

}  // namespace

ScoreTensor naive_score(const EventLog& log) {
  const auto counts = variant_counts(log);
  const double most = counts.empty() ? 1.0 : static_cast<double>(*std::max_element(counts.begin(), counts.end()));
  ScoreTensor scores = shaped_like<double>(log, 0.0);
  for (std::size_t i = 0; i < log.num_cases(); ++i) {
    const double s = 1.0 - static_cast<double>(counts[i]) / most;
    for (std::size_t j = 0; j < scores.case_length(i); ++j) scores(i, j, 0) = s;
  }
  return scores;
}

FlagTensor naive_flags(const EventLog& log, double tau) {
  const auto counts = variant_counts(log);
  const double C = static_cast<double>(log.num_cases());
  FlagTensor flags = shaped_like<std::uint8_t>(log, 0);
  for (std::size_t i = 0; i < log.num_cases(); ++i) {
    if (static_cast<double>(counts[i]) / C >= tau) continue;
    for (std::size_t j = 0; j < flags.case_length(i); ++j) flags(i, j, 0) = 1;
  }
  return flags;
}

LikelihoodGraph mine_likelihood_graph(const EventLog& log) {
  if (log.num_cases() == 0) throw PreconditionError("mine_likelihood_graph: empty log");
  const std::size_t width = log.attribute_names().size();
  LikelihoodGraph graph(log.attribute_names());
  const std::size_t start = graph.add_start("start");
  const std::size_t end = graph.add_end("end");

  std::map<std::string, std::size_t> activity_nodes;
  std::map<std::vector<std::string>, std::size_t> value_nodes;
  auto activity_node = [&](const std::string& a) {
    auto it = activity_nodes.find(a);
    if (it == activity_nodes.end()) it = activity_nodes.emplace(a, graph.add_activity("act:" + a, a)).first;
    return it->second;
  };
  auto value_node = [&](const std::vector<std::string>& chain) {
    auto it = value_nodes.find(chain);
    if (it == value_nodes.end()) {
      std::string id = "val:" + chain[0];
      for (std::size_t n = 1; n < chain.size(); ++n) id += "/" + chain[n];
      const std::size_t attribute = chain.size() - 2;
      it = value_nodes.emplace(chain, graph.add_value(id, log.attribute_names()[attribute], chain.back())).first;
    }
    return it->second;
  };

  // Ordered by (from, to) so edge insertion is deterministic.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> transitions;
  std::map<std::size_t, std::size_t> outgoing;
  auto count = [&](std::size_t from, std::size_t to) {
    ++transitions[{from, to}];
    ++outgoing[from];
  };
  for (const auto& c : log.cases()) {
    std::size_t previous = start;
    for (const auto& e : c.events) {
      const std::size_t a = activity_node(e.activity);
      count(previous, a);
      previous = a;
      std::vector<std::string> chain{e.activity};
      for (std::size_t k = 0; k < width; ++k) {
        chain.push_back(e.attributes[k]);
        const std::size_t v = value_node(chain);
        count(previous, v);
        previous = v;
      }
    }
    count(previous, end);
  }
  for (const auto& [edge, n] : transitions) {
    graph.add_edge(edge.first, edge.second, static_cast<double>(n) / static_cast<double>(outgoing[edge.first]));
  }
  return graph;
}

namespace {

/// Outgoing distribution of a node aggregated by emitted symbol.
struct NodeOutlook {
  std::vector<double> weights;  // per emitted symbol, plus End
  /// Symbol -> (index into weights, heaviest target emitting it).
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> symbol;
};

std::vector<NodeOutlook> outlooks(const LikelihoodGraph& g) {
  std::vector<NodeOutlook> result(g.nodes().size());
  for (std::size_t n = 0; n < g.nodes().size(); ++n) {
    NodeOutlook& o = result[n];
    std::vector<double> best_weight;
    for (std::size_t e : g.out_edges(n)) {
      const GraphEdge& edge = g.edges()[e];
      const GraphNode& to = g.node(edge.to);
      if (to.kind == NodeKind::Start) continue;
      if (to.kind == NodeKind::End) {
        // Ending the case competes with the observed continuation.
        o.weights.push_back(edge.weight);
        best_weight.push_back(edge.weight);
        continue;
      }
      const std::string& s = to.kind == NodeKind::Activity ? to.activity : to.value;
      auto it = o.symbol.find(s);
      if (it == o.symbol.end()) {
        it = o.symbol.emplace(s, std::make_pair(o.weights.size(), edge.to)).first;
        o.weights.push_back(0.0);
        best_weight.push_back(0.0);
      }
      const std::size_t w = it->second.first;
      o.weights[w] += edge.weight;
      if (edge.weight > best_weight[w]) {
        best_weight[w] = edge.weight;
        it->second.second = edge.to;
      }
    }
  }
  return result;
}

constexpr std::size_t kLost = static_cast<std::size_t>(-1);

}  // namespace

ScoreTensor likelihood_score(const LikelihoodGraph& graph, const EventLog& log) {
  if (graph.attributes() != log.attribute_names()) {
    throw SchemaError("likelihood graph attributes do not match the log schema");
  }
  const auto out = outlooks(graph);
  std::unordered_map<std::string, std::size_t> first_node;
  for (std::size_t n = 0; n < graph.nodes().size(); ++n) {
    if (graph.node(n).kind == NodeKind::Activity) first_node.emplace(graph.node(n).activity, n);
  }
  const std::size_t start = graph.start();

  ScoreTensor scores = shaped_like<double>(log, 0.0);
  for (std::size_t i = 0; i < log.num_cases(); ++i) {
    const Case& c = log.cases()[i];
    std::size_t state = start;
    for (std::size_t j = 0; j < c.events.size(); ++j) {
      for (std::size_t k = 0; k < log.num_attributes(); ++k) {
        const std::string& observed = EventLog::value(c.events[j], k);
        if (state == kLost) {
          scores(i, j, k) = 1.0;
          if (k == 0) {
            const auto it = first_node.find(observed);
            if (it != first_node.end()) state = it->second;
          }
          continue;
        }
        const NodeOutlook& o = out[state];
        const auto it = o.symbol.find(observed);
        const double p_v = it == o.symbol.end() ? 0.0 : o.weights[it->second.first];
        scores(i, j, k) = std::min(1.0, sigma_unchecked(o.weights, p_v));
        if (it != o.symbol.end()) {
          state = it->second.second;
        } else if (k == 0) {
          const auto resync = first_node.find(observed);
          state = resync == first_node.end() ? kLost : resync->second;
        } else {
          state = kLost;
        }
      }
    }
  }
  return scores;
}

FlagTensor likelihood_flags(const LikelihoodGraph& graph, const EventLog& log, double delta) {
  return theta(likelihood_score(graph, log), 1.0 - delta);
}

}  // namespace binet
