#include <unordered_set>

#include "binet/errors.hpp"
#include "binet/event_log.hpp"
#include "io_util.hpp"

namespace binet {

using nlohmann::ordered_json;

namespace {

const ordered_json& require(const ordered_json& object, const char* key, const std::string& where) {
  if (!object.is_object()) throw ParseError(where + ": expected an object");
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(where + ": missing \"" + key + "\"");
  return *it;
}

std::string require_string(const ordered_json& value, const std::string& where) {
  if (!value.is_string()) throw ParseError(where + ": expected a string");
  return value.get<std::string>();
}

}  // namespace

EventLog parse_log(std::string_view json_text) {
  const ordered_json root = detail::parse_json(json_text, "event log");
  if (!root.is_object()) throw ParseError("event log: top level must be an object");

  std::string name;
  if (auto it = root.find("name"); it != root.end()) name = require_string(*it, "name");

  std::vector<std::string> attributes;
  if (auto it = root.find("attributes"); it != root.end()) {
    if (!it->is_array()) throw ParseError("\"attributes\" must be an array");
    for (const auto& a : *it) attributes.push_back(require_string(a, "attributes"));
  }
  const ordered_json& cases_json = require(root, "cases", "event log");
  if (!cases_json.is_array()) throw ParseError("\"cases\" must be an array");

  std::vector<Case> cases;
  cases.reserve(cases_json.size());
  for (std::size_t ci = 0; ci < cases_json.size(); ++ci) {
    const std::string where = "cases[" + std::to_string(ci) + "]";
    const ordered_json& case_json = cases_json[ci];
    Case c;
    c.id = require_string(require(case_json, "id", where), where + ".id");
    const ordered_json& events_json = require(case_json, "events", where);
    if (!events_json.is_array()) throw ParseError(where + ".events must be an array");
    for (std::size_t ei = 0; ei < events_json.size(); ++ei) {
      const std::string ewhere = where + ".events[" + std::to_string(ei) + "]";
      const ordered_json& event_json = events_json[ei];
      Event event;
      event.activity = require_string(require(event_json, "activity", ewhere), ewhere + ".activity");
      const ordered_json* attrs = nullptr;
      if (auto it = event_json.find("attrs"); it != event_json.end()) attrs = &*it;
      if (!attributes.empty() && attrs == nullptr) throw ParseError(ewhere + ": missing \"attrs\"");
      if (attrs != nullptr) {
        if (!attrs->is_object()) throw ParseError(ewhere + ".attrs must be an object");
        if (attrs->size() != attributes.size()) {
          throw ParseError(ewhere + ".attrs has " + std::to_string(attrs->size()) + " entries, expected " +
                           std::to_string(attributes.size()));
        }
        for (const auto& attribute : attributes) {
          event.attributes.push_back(require_string(require(*attrs, attribute.c_str(), ewhere + ".attrs"),
                                                    ewhere + ".attrs." + attribute));
        }
      }
      if (auto it = event_json.find("labels"); it != event_json.end()) {
        if (!it->is_object()) throw ParseError(ewhere + ".labels must be an object");
        if (it->size() != attributes.size() + 1) {
          throw ParseError(ewhere + ".labels must cover activity and every attribute");
        }
        std::vector<AnomalyLabel> labels;
        labels.push_back(label_from_string(
            require_string(require(*it, "activity", ewhere + ".labels"), ewhere + ".labels.activity")));
        for (const auto& attribute : attributes) {
          labels.push_back(label_from_string(require_string(require(*it, attribute.c_str(), ewhere + ".labels"),
                                                            ewhere + ".labels." + attribute)));
        }
        event.labels = std::move(labels);
      }
      c.events.push_back(std::move(event));
    }
    cases.push_back(std::move(c));
  }
  try {
    return EventLog(std::move(name), std::move(attributes), std::move(cases));
  } catch (const SchemaError& error) {
    throw ParseError(std::string("event log: ") + error.what());
  }
}

EventLog load_log(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  try {
    return parse_log(text);
  } catch (const ParseError& error) {
    throw ParseError(path.string() + ": " + error.message(), error.line(), error.column());
  }
}

std::string log_to_json(const EventLog& log) {
  ordered_json root;
  root["name"] = log.name();
  root["attributes"] = log.attribute_names();
  ordered_json cases = ordered_json::array();
  for (const auto& c : log.cases()) {
    ordered_json case_json;
    case_json["id"] = c.id;
    ordered_json events = ordered_json::array();
    for (const auto& event : c.events) {
      ordered_json event_json;
      event_json["activity"] = event.activity;
      ordered_json attrs = ordered_json::object();
      for (std::size_t k = 0; k < event.attributes.size(); ++k) {
        attrs[log.attribute_names()[k]] = event.attributes[k];
      }
      event_json["attrs"] = std::move(attrs);
      if (event.labels) {
        ordered_json labels = ordered_json::object();
        labels["activity"] = std::string(to_string((*event.labels)[0]));
        for (std::size_t k = 1; k < event.labels->size(); ++k) {
          labels[log.attribute_names()[k - 1]] = std::string(to_string((*event.labels)[k]));
        }
        event_json["labels"] = std::move(labels);
      }
      events.push_back(std::move(event_json));
    }
    case_json["events"] = std::move(events);
    cases.push_back(std::move(case_json));
  }
  root["cases"] = std::move(cases);
  return root.dump(1) + "\n";
}

void save_log(const EventLog& log, const std::filesystem::path& path) {
  detail::write_atomically(path, log_to_json(log));
}

}  // namespace binet
