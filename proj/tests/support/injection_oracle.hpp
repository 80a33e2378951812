#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "binet/anomaly_injector.hpp"
#include "binet/event_log.hpp"

namespace binet::test {

using L = AnomalyLabel;

inline bool same_content(const Event& a, const Event& b) { return a.activity == b.activity && a.attributes == b.attributes; }

inline bool same_content(const std::vector<Event>& a, const std::vector<Event>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_content(a[i], b[i])) return false;
  }
  return true;
}

inline std::vector<Event> slice(const std::vector<Event>& v, std::size_t from, std::size_t to) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to)};
}

inline std::vector<Event> concat(std::initializer_list<std::vector<Event>> parts) {
  std::vector<Event> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::size_t count_label(const Case& c, L label) {
  std::size_t n = 0;
  for (const auto& e : c.events) n += static_cast<std::size_t>(std::count(e.labels->begin(), e.labels->end(), label));
  return n;
}

inline std::size_t count_anomalous(const Case& c) {
  std::size_t n = 0;
  for (const auto& e : c.events) {
    for (L l : *e.labels) n += l != L::Normal ? 1 : 0;
  }
  return n;
}

// An activity label at event j and nothing else on that event.
inline bool only_activity(const Event& e, L label) {
  if ((*e.labels)[0] != label) return false;
  for (std::size_t k = 1; k < e.labels->size(); ++k) {
    if ((*e.labels)[k] != L::Normal) return false;
  }
  return true;
}

// Replays the definition of each anomaly type by exhaustive search over its
// parameters and checks the altered case against it. Returns an empty string
// when some parameter choice explains the case, else a description.
inline std::string replay(const Case& original, const Case& altered, L type, std::size_t k, const SuccessorOracle& oracle,
                   const std::set<std::string>& alphabet) {
  const auto& o = original.events;
  const auto& a = altered.events;
  const std::size_t n = o.size();
  switch (type) {
    case L::Skip:
      if (a.size() + k != n) return "skip: wrong length";
      for (std::size_t s = 0; s + k <= n; ++s) {
        if (!same_content(a, concat({slice(o, 0, s), slice(o, s + k, n)}))) continue;
        const std::size_t marked = s < a.size() ? s : a.size() - 1;
        if (only_activity(a[marked], L::Skip) && count_anomalous(altered) == 1) return "";
      }
      return "skip: no gap explains the case";
    case L::Insert: {
      if (a.size() != n + k) return "insert: wrong length";
      std::vector<Event> kept;
      std::size_t inserted = 0;
      for (const auto& e : a) {
        if ((*e.labels)[0] == L::Insert) {
          ++inserted;
          if (alphabet.count(e.activity)) return "insert: activity from the process alphabet";
          for (L l : *e.labels) {
            if (l != L::Insert) return "insert: inserted event not fully labeled";
          }
        } else {
          kept.push_back(e);
        }
      }
      if (inserted != k) return "insert: wrong number of inserted events";
      if (!same_content(kept, o)) return "insert: original events changed";
      if (count_anomalous(altered) != k * (o[0].attributes.size() + 1)) return "insert: extra labels";
      return "";
    }
    case L::Rework:
      if (a.size() != n + k) return "rework: wrong length";
      for (std::size_t s = 0; s + k <= n; ++s) {
        if (!same_content(a, concat({slice(o, 0, s + k), slice(o, s, s + k), slice(o, s + k, n)}))) continue;
        bool ok = count_anomalous(altered) == k;
        for (std::size_t m = s + k; m < s + 2 * k; ++m) ok = ok && only_activity(a[m], L::Rework);
        if (ok) return "";
      }
      return "rework: no repeated block explains the case";
    case L::Early:
    case L::Late: {
      if (a.size() != n) return "shift: wrong length";
      const L moved_label = type;
      for (std::size_t s = 0; s + k <= n; ++s) {
        for (std::size_t d = 0; d <= n; ++d) {
          std::vector<Event> expected;
          std::size_t landing = 0;  // index of the first moved event in the result
          if (type == L::Early) {
            if (d >= s) continue;
            expected = concat({slice(o, 0, d), slice(o, s, s + k), slice(o, d, s), slice(o, s + k, n)});
            landing = d;
          } else {
            if (d < s + k || d >= n) continue;
            expected = concat({slice(o, 0, s), slice(o, s + k, d + 1), slice(o, s, s + k), slice(o, d + 1, n)});
            landing = d + 1 - k;
          }
          if (!same_content(a, expected)) continue;
          bool ok = count_label(altered, moved_label) == k && count_label(altered, L::Shift) == 1 &&
                    count_anomalous(altered) == k + 1;
          for (std::size_t m = landing; m < landing + k; ++m) ok = ok && only_activity(a[m], moved_label);
          if (ok) return "";
        }
      }
      return "shift: no moved block explains the case";
    }
    case L::Attribute: {
      if (a.size() != n) return "attribute: wrong length";
      std::size_t changed = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (a[j].activity != o[j].activity) return "attribute: activity changed";
        std::size_t diffs = 0;
        for (std::size_t x = 0; x < o[j].attributes.size(); ++x) {
          const bool differs = a[j].attributes[x] != o[j].attributes[x];
          const bool labeled = (*a[j].labels)[x + 1] == L::Attribute;
          if (differs != labeled) return "attribute: label does not match the change";
          if (differs) {
            ++diffs;
            if (oracle.allowed(o[j], x).count(a[j].attributes[x])) return "attribute: value is a direct successor";
            const auto& domain = oracle.domain(x);
            if (std::find(domain.begin(), domain.end(), a[j].attributes[x]) == domain.end()) {
              return "attribute: value outside the domain";
            }
          }
        }
        if ((*a[j].labels)[0] != L::Normal) return "attribute: activity labeled";
        if (diffs > 1) return "attribute: more than one attribute per event";
        changed += diffs;
      }
      return changed == k ? "" : "attribute: wrong number of changes";
    }
    default: return "unexpected type";
  }
}

}  // namespace binet::test
