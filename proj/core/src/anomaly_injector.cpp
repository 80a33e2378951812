#include "binet/anomaly_injector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <unordered_set>

#include "binet/errors.hpp"

namespace binet {

namespace {

constexpr std::size_t kMaxTypeDraws = 1000;

std::vector<AnomalyLabel> normal_labels(std::size_t width) {
  return std::vector<AnomalyLabel>(width + 1, AnomalyLabel::Normal);
}

Case labeled(const Case& c) {
  Case result = c;
  for (auto& event : result.events) {
    if (!event.labels) event.labels = normal_labels(event.attributes.size());
  }
  return result;
}

void set_label(Event& event, std::size_t k, AnomalyLabel label) { (*event.labels)[k] = label; }

/// `count` distinct sorted values from [0, population).
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t population, std::size_t count) {
  std::vector<std::size_t> all(population);
  std::iota(all.begin(), all.end(), 0);
  // Partial Fisher-Yates: only the first `count` slots are needed.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, population - i);
    std::swap(all[i], all[j]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::string> key_of(const Event& event, std::size_t attribute) {
  std::vector<std::string> key;
  key.reserve(attribute + 1);
  key.push_back(event.activity);
  for (std::size_t a = 0; a < attribute; ++a) key.push_back(event.attributes[a]);
  return key;
}

}  // namespace

void InjectionConfig::validate() const {
  if (!(anomaly_fraction >= 0.0 && anomaly_fraction <= 1.0)) {
    throw PreconditionError("anomaly_fraction must lie in [0, 1]");
  }
  double total = 0.0;
  for (const auto& [type, weight] : type_weights) {
    if (!std::isfinite(weight) || weight < 0.0) {
      throw PreconditionError("type weight for " + std::string(to_string(type)) + " must be finite and >= 0");
    }
    if ((type == AnomalyLabel::Normal || type == AnomalyLabel::Shift) && weight != 0.0) {
      throw PreconditionError(std::string(to_string(type)) + " cannot be injected");
    }
    total += weight;
  }
  if (total <= 0.0) throw PreconditionError("at least one anomaly type needs a positive weight");
  if (max_skip == 0 || max_insert == 0 || max_rework == 0 || max_shift == 0 || max_attribute == 0) {
    throw PreconditionError("maximum anomaly sizes must be >= 1");
  }
}

// ---------------------------------------------------------------------------
// Successor oracle

SuccessorOracle SuccessorOracle::from_graph(const LikelihoodGraph& graph) {
  SuccessorOracle oracle;
  const std::size_t width = graph.attributes().size();
  oracle.allowed_.resize(width);
  for (std::size_t a = 0; a < width; ++a) oracle.domains_.push_back(graph.value_domain(a));

  // Walk the value layers below every activity node; nodes sharing a symbol merge.
  struct Frame {
    std::size_t node;
    std::vector<std::string> key;
  };
  for (std::size_t n = 0; n < graph.nodes().size(); ++n) {
    if (graph.node(n).kind != NodeKind::Activity || width == 0) continue;
    std::vector<Frame> stack{{n, {graph.node(n).activity}}};
    while (!stack.empty()) {
      Frame frame = std::move(stack.back());
      stack.pop_back();
      const std::size_t depth = frame.key.size() - 1;
      if (depth >= width) continue;
      for (std::size_t e : graph.out_edges(frame.node)) {
        const std::size_t to = graph.edges()[e].to;
        const GraphNode& child = graph.node(to);
        if (child.kind != NodeKind::Value) continue;
        oracle.allowed_[depth][frame.key].insert(child.value);
        std::vector<std::string> key = frame.key;
        key.push_back(child.value);
        stack.push_back({to, std::move(key)});
      }
    }
  }
  return oracle;
}

SuccessorOracle SuccessorOracle::from_log(const EventLog& log) {
  SuccessorOracle oracle;
  const std::size_t width = log.attribute_names().size();
  oracle.allowed_.resize(width);
  std::vector<std::set<std::string>> domains(width);
  for (const auto& c : log.cases()) {
    for (const auto& event : c.events) {
      for (std::size_t a = 0; a < width; ++a) {
        oracle.allowed_[a][key_of(event, a)].insert(event.attributes[a]);
        domains[a].insert(event.attributes[a]);
      }
    }
  }
  for (auto& d : domains) oracle.domains_.emplace_back(d.begin(), d.end());
  return oracle;
}

std::set<std::string> SuccessorOracle::allowed(const Event& event, std::size_t attribute) const {
  const auto& layer = allowed_.at(attribute);
  const auto it = layer.find(key_of(event, attribute));
  return it == layer.end() ? std::set<std::string>{} : it->second;
}

// ---------------------------------------------------------------------------
// Insert pool

InsertPool::InsertPool(const EventLog& log) {
  const auto alphabet = activity_alphabet(log);
  const std::unordered_set<std::string> taken(alphabet.begin(), alphabet.end());
  const std::size_t n = std::max<std::size_t>(alphabet.size(), 1);
  for (std::size_t r = 1; activities_.size() < n; ++r) {
    std::string name = "Random activity " + std::to_string(r);
    if (!taken.count(name)) activities_.push_back(std::move(name));
  }
  for (std::size_t a = 0; a < log.attribute_names().size(); ++a) {
    std::unordered_set<std::string> seen;
    for (const auto& c : log.cases()) {
      for (const auto& event : c.events) seen.insert(event.attributes[a]);
    }
    std::vector<std::string> values;
    const std::size_t m = std::max<std::size_t>(seen.size(), 1);
    for (std::size_t r = 1; values.size() < m; ++r) {
      std::string value = "Random " + log.attribute_names()[a] + " " + std::to_string(r);
      if (!seen.count(value)) values.push_back(std::move(value));
    }
    values_.push_back(std::move(values));
  }
}

Event InsertPool::draw(Rng& rng) const {
  Event event;
  event.activity = activities_[uniform_index(rng, activities_.size())];
  for (const auto& values : values_) event.attributes.push_back(values[uniform_index(rng, values.size())]);
  return event;
}

// ---------------------------------------------------------------------------
// Deterministic transforms

std::optional<Case> skip_at(const Case& c, std::size_t start, std::size_t k) {
  const std::size_t n = c.events.size();
  if (k == 0 || k >= n || start + k > n) return std::nullopt;
  Case result = labeled(c);
  result.events.erase(result.events.begin() + static_cast<std::ptrdiff_t>(start),
                      result.events.begin() + static_cast<std::ptrdiff_t>(start + k));
  Event& marked = start < result.events.size() ? result.events[start] : result.events.back();
  set_label(marked, 0, AnomalyLabel::Skip);
  return result;
}

std::optional<Case> insert_at(const Case& c, const std::vector<std::size_t>& positions, std::vector<Event> events) {
  if (positions.empty() || positions.size() != events.size()) return std::nullopt;
  const std::size_t total = c.events.size() + events.size();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] >= total || (i > 0 && positions[i] <= positions[i - 1])) return std::nullopt;
  }
  const Case source = labeled(c);
  Case result;
  result.id = c.id;
  result.events.reserve(total);
  std::size_t next_inserted = 0;
  std::size_t next_original = 0;
  for (std::size_t j = 0; j < total; ++j) {
    if (next_inserted < positions.size() && positions[next_inserted] == j) {
      Event inserted = std::move(events[next_inserted++]);
      inserted.labels = std::vector<AnomalyLabel>(inserted.attributes.size() + 1, AnomalyLabel::Insert);
      result.events.push_back(std::move(inserted));
    } else {
      result.events.push_back(source.events[next_original++]);
    }
  }
  return result;
}

std::optional<Case> rework_at(const Case& c, std::size_t start, std::size_t k) {
  const std::size_t n = c.events.size();
  if (k == 0 || start + k > n) return std::nullopt;
  Case result = labeled(c);
  std::vector<Event> copies(result.events.begin() + static_cast<std::ptrdiff_t>(start),
                            result.events.begin() + static_cast<std::ptrdiff_t>(start + k));
  for (auto& event : copies) {
    event.labels = normal_labels(event.attributes.size());
    set_label(event, 0, AnomalyLabel::Rework);
  }
  result.events.insert(result.events.begin() + static_cast<std::ptrdiff_t>(start + k), copies.begin(), copies.end());
  return result;
}

std::optional<Case> move_early(const Case& c, std::size_t start, std::size_t k, std::size_t destination) {
  const std::size_t n = c.events.size();
  if (k == 0 || start + k > n || destination >= start) return std::nullopt;
  const Case source = labeled(c);
  const auto& ev = source.events;
  // The vacated slot is followed by original event start + k, or preceded by start - 1 at the end.
  const std::size_t shifted = start + k < n ? start + k : start - 1;
  Case result;
  result.id = c.id;
  auto append = [&](std::size_t from, std::size_t to, AnomalyLabel label) {
    for (std::size_t i = from; i < to; ++i) {
      result.events.push_back(ev[i]);
      if (label != AnomalyLabel::Normal) set_label(result.events.back(), 0, label);
      if (i == shifted) set_label(result.events.back(), 0, AnomalyLabel::Shift);
    }
  };
  append(0, destination, AnomalyLabel::Normal);
  append(start, start + k, AnomalyLabel::Early);
  append(destination, start, AnomalyLabel::Normal);
  append(start + k, n, AnomalyLabel::Normal);
  return result;
}

std::optional<Case> move_late(const Case& c, std::size_t start, std::size_t k, std::size_t destination) {
  const std::size_t n = c.events.size();
  if (k == 0 || destination < start + k || destination >= n) return std::nullopt;
  const Case source = labeled(c);
  const auto& ev = source.events;
  const std::size_t shifted = start + k;
  Case result;
  result.id = c.id;
  auto append = [&](std::size_t from, std::size_t to, AnomalyLabel label) {
    for (std::size_t i = from; i < to; ++i) {
      result.events.push_back(ev[i]);
      if (label != AnomalyLabel::Normal) set_label(result.events.back(), 0, label);
      if (i == shifted) set_label(result.events.back(), 0, AnomalyLabel::Shift);
    }
  };
  append(0, start, AnomalyLabel::Normal);
  append(start + k, destination + 1, AnomalyLabel::Normal);
  append(start, start + k, AnomalyLabel::Late);
  append(destination + 1, n, AnomalyLabel::Normal);
  return result;
}

std::optional<Case> replace_attribute(const Case& c, std::size_t index, std::size_t attribute, std::string value) {
  if (index >= c.events.size() || attribute >= c.events[index].attributes.size()) return std::nullopt;
  Case result = labeled(c);
  result.events[index].attributes[attribute] = std::move(value);
  set_label(result.events[index], attribute + 1, AnomalyLabel::Attribute);
  return result;
}

// ---------------------------------------------------------------------------
// Randomized transforms

std::optional<Case> apply_skip(const Case& c, std::size_t k, Rng& rng) {
  const std::size_t n = c.events.size();
  if (k == 0 || k >= n) return std::nullopt;
  return skip_at(c, uniform_index(rng, n - k + 1), k);
}

std::optional<Case> apply_insert(const Case& c, std::size_t k, Rng& rng, const InsertPool& pool) {
  if (k == 0) return std::nullopt;
  const auto positions = sample_distinct(rng, c.events.size() + k, k);
  std::vector<Event> events;
  for (std::size_t i = 0; i < k; ++i) events.push_back(pool.draw(rng));
  return insert_at(c, positions, std::move(events));
}

std::optional<Case> apply_rework(const Case& c, std::size_t k, Rng& rng) {
  const std::size_t n = c.events.size();
  if (k == 0 || k > n) return std::nullopt;
  return rework_at(c, uniform_index(rng, n - k + 1), k);
}

std::optional<Case> apply_early(const Case& c, std::size_t k, Rng& rng) {
  const std::size_t n = c.events.size();
  if (k == 0 || n < k + 1) return std::nullopt;
  const std::size_t start = uniform_between(rng, 1, n - k);
  return move_early(c, start, k, uniform_index(rng, start));
}

std::optional<Case> apply_late(const Case& c, std::size_t k, Rng& rng) {
  const std::size_t n = c.events.size();
  if (k == 0 || n < k + 1) return std::nullopt;
  const std::size_t start = uniform_index(rng, n - k);
  return move_late(c, start, k, uniform_between(rng, start + k, n - 1));
}

std::optional<Case> apply_attribute(const Case& c, std::size_t k, Rng& rng, const SuccessorOracle& oracle) {
  if (k == 0 || oracle.num_attributes() == 0) return std::nullopt;
  // Per event: the attributes that have at least one non-successor value.
  std::vector<std::size_t> eligible;
  std::vector<std::vector<std::pair<std::size_t, std::vector<std::string>>>> options(c.events.size());
  for (std::size_t j = 0; j < c.events.size(); ++j) {
    const Event& event = c.events[j];
    if (event.attributes.size() != oracle.num_attributes()) return std::nullopt;
    for (std::size_t a = 0; a < oracle.num_attributes(); ++a) {
      const auto allowed = oracle.allowed(event, a);
      std::vector<std::string> candidates;
      for (const auto& v : oracle.domain(a)) {
        if (!allowed.count(v)) candidates.push_back(v);
      }
      if (!candidates.empty()) options[j].emplace_back(a, std::move(candidates));
    }
    if (!options[j].empty()) eligible.push_back(j);
  }
  if (eligible.size() < k) return std::nullopt;
  std::optional<Case> result = labeled(c);
  for (std::size_t pick : sample_distinct(rng, eligible.size(), k)) {
    const std::size_t j = eligible[pick];
    const auto& [attribute, candidates] = options[j][uniform_index(rng, options[j].size())];
    result = replace_attribute(*result, j, attribute, candidates[uniform_index(rng, candidates.size())]);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Log-level injection

InjectionResult inject_with_records(const EventLog& log, const InjectionConfig& config,
                                    const SuccessorOracle* oracle) {
  config.validate();
  if (log.num_cases() == 0) throw PreconditionError("inject: log has no cases");
  for (const auto& c : log.cases()) {
    for (const auto& event : c.events) {
      if (!event.labels) continue;
      for (AnomalyLabel label : *event.labels) {
        if (label != AnomalyLabel::Normal) throw PreconditionError("inject: log already contains anomalies");
      }
    }
  }

  std::vector<AnomalyLabel> types;
  std::vector<double> weights;
  for (const auto& [type, weight] : config.type_weights) {
    if (weight > 0.0) {
      types.push_back(type);
      weights.push_back(weight);
    }
  }
  auto max_size = [&](AnomalyLabel type) -> std::size_t {
    switch (type) {
      case AnomalyLabel::Skip: return config.max_skip;
      case AnomalyLabel::Insert: return config.max_insert;
      case AnomalyLabel::Rework: return config.max_rework;
      case AnomalyLabel::Early:
      case AnomalyLabel::Late: return config.max_shift;
      default: return config.max_attribute;
    }
  };

  const bool needs_oracle =
      std::find(types.begin(), types.end(), AnomalyLabel::Attribute) != types.end() && !oracle;
  const SuccessorOracle empirical = needs_oracle ? SuccessorOracle::from_log(log) : SuccessorOracle{};
  const SuccessorOracle& successors = oracle ? *oracle : empirical;
  const InsertPool pool(log);

  const std::uint64_t seed = mix_seed(config.seed);
  Rng selection(seed);
  const std::size_t C = log.num_cases();
  const auto count = static_cast<std::size_t>(std::llround(config.anomaly_fraction * static_cast<double>(C)));
  const auto chosen = sample_distinct(selection, C, std::min(count, C));

  std::vector<Case> cases = with_normal_labels(log).cases();
  std::vector<InjectionRecord> records;
  records.reserve(chosen.size());
  for (std::size_t i : chosen) {
    Rng rng = make_stream(seed, i + 1);
    std::optional<Case> altered;
    AnomalyLabel type = AnomalyLabel::Normal;
    std::size_t size = 0;
    for (std::size_t draw = 0; draw < kMaxTypeDraws && !altered; ++draw) {
      type = types[weighted_index(rng, weights)];
      size = uniform_between(rng, 1, max_size(type));
      const Case& c = cases[i];
      switch (type) {
        case AnomalyLabel::Skip: altered = apply_skip(c, size, rng); break;
        case AnomalyLabel::Insert: altered = apply_insert(c, size, rng, pool); break;
        case AnomalyLabel::Rework: altered = apply_rework(c, size, rng); break;
        case AnomalyLabel::Early: altered = apply_early(c, size, rng); break;
        case AnomalyLabel::Late: altered = apply_late(c, size, rng); break;
        case AnomalyLabel::Attribute: altered = apply_attribute(c, size, rng, successors); break;
        default: break;
      }
    }
    if (!altered) {
      throw GenerationError("inject: no enabled anomaly type applies to case '" + cases[i].id + "'");
    }
    records.push_back({i, type, size, cases[i]});
    cases[i] = std::move(*altered);
  }
  return {EventLog(log.name(), log.attribute_names(), std::move(cases)), std::move(records)};
}

EventLog inject(const EventLog& log, const InjectionConfig& config, const SuccessorOracle* oracle) {
  return inject_with_records(log, config, oracle).log;
}

}  // namespace binet
