#include "binet/report.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "binet/errors.hpp"
#include "io_util.hpp"

namespace binet {

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        current += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("results CSV: '" + s + "' is not a number", line);
  }
}

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << csv_field(r.level) << ','
        << csv_field(r.heuristic) << ',' << csv_field(r.strategy) << ',' << r.seed << ',' << fixed(r.precision)
        << ',' << fixed(r.recall) << ',' << fixed(r.f1) << '\n';
  }
  return out.str();
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kResultsHeader) throw ParseError("results CSV: unexpected header", 1);
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw ParseError("results CSV: expected 9 fields", line_no);
    ResultRow r{f[0], f[1], f[2], f[3], f[4]};
    const auto [ptr, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), r.seed);
    if (ec != std::errc() || ptr != f[5].data() + f[5].size()) {
      throw ParseError("results CSV: seed '" + f[5] + "' is not an unsigned integer", line_no);
    }
    r.precision = parse_double(f[6], line_no);
    r.recall = parse_double(f[7], line_no);
    r.f1 = parse_double(f[8], line_no);
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw ParseError("results CSV is empty");
  return rows;
}

RankTable rank_table(const std::vector<ResultRow>& rows, const std::string& level) {
  RankTable table;
  std::map<std::string, std::size_t> dataset_index, method_index;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> cells;
  for (const auto& r : rows) {
    if (r.level != level) continue;
    auto [d, new_d] = dataset_index.emplace(r.dataset, table.datasets.size());
    if (new_d) table.datasets.push_back(r.dataset);
    auto [m, new_m] = method_index.emplace(r.method, table.methods.size());
    if (new_m) table.methods.push_back(r.method);
    auto& cell = cells[{d->second, m->second}];
    cell.first += r.f1;
    ++cell.second;
  }
  if (table.datasets.empty()) throw PreconditionError("rank_table: no results at level '" + level + "'");
  table.f1.assign(table.datasets.size(), std::vector<double>(table.methods.size(), 0.0));
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
      const auto it = cells.find({d, m});
      if (it == cells.end()) {
        throw PreconditionError("rank_table: no result for " + table.methods[m] + " on " + table.datasets[d]);
      }
      table.f1[d][m] = it->second.first / static_cast<double>(it->second.second);
    }
  }
  return table;
}

std::string f1_matrix_csv(const RankTable& table) {
  std::ostringstream out;
  out << "dataset";
  for (const auto& m : table.methods) out << ',' << csv_field(m);
  out << '\n';
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    out << csv_field(table.datasets[d]);
    for (double v : table.f1[d]) out << ',' << fixed(v);
    out << '\n';
  }
  const auto ranks = table.average_ranks();
  out << "average_rank";
  for (double r : ranks) out << ',' << fixed(r);
  out << '\n';
  return out.str();
}

RankingSummary summarize(const RankTable& table) {
  RankingSummary s;
  s.table = table;
  s.average_ranks = table.average_ranks();
  if (table.datasets.size() >= 2 && table.methods.size() >= 2) s.friedman = friedman_test(table);
  if (table.methods.size() >= 2) {
    s.critical_difference = nemenyi_cd(table.methods.size(), table.datasets.size());
  }
  s.groups = cd_groups(s.average_ranks, s.critical_difference);
  return s;
}

std::string summary_json(const RankingSummary& s) {
  nlohmann::ordered_json root;
  root["datasets"] = s.table.datasets;
  root["methods"] = s.table.methods;
  root["average_ranks"] = s.average_ranks;
  root["friedman"] = {{"statistic", s.friedman.statistic}, {"p_value", s.friedman.p_value}};
  root["critical_difference"] = s.critical_difference;
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : s.groups) {
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (std::size_t m : g) names.push_back(s.table.methods[m]);
    groups.push_back(std::move(names));
  }
  root["groups"] = std::move(groups);
  return root.dump(2) + "\n";
}

std::string cd_diagram_svg(const RankingSummary& s) {
  const std::size_t k = s.table.methods.size();
  const double width = 640.0, left = 150.0, right = width - 150.0, axis_y = 60.0;
  const double row = 22.0;
  const std::size_t half = (k + 1) / 2;
  const double height = axis_y + 40.0 + row * static_cast<double>(half) + 14.0 * static_cast<double>(s.groups.size());
  const double lo = 1.0, hi = static_cast<double>(std::max<std::size_t>(k, 2));
  auto x_of = [&](double rank) { return left + (rank - lo) / (hi - lo) * (right - left); };

  std::vector<std::size_t> order(k);
  for (std::size_t m = 0; m < k; ++m) order[m] = m;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.average_ranks[a] < s.average_ranks[b]; });

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<line x1=\"" << fixed(left, 1) << "\" y1=\"" << fixed(axis_y, 1) << "\" x2=\"" << fixed(right, 1)
      << "\" y2=\"" << fixed(axis_y, 1) << "\" stroke=\"black\"/>\n";
  for (std::size_t r = 1; r <= static_cast<std::size_t>(hi); ++r) {
    const double x = x_of(static_cast<double>(r));
    out << "<line x1=\"" << fixed(x, 1) << "\" y1=\"" << fixed(axis_y - 5, 1) << "\" x2=\"" << fixed(x, 1)
        << "\" y2=\"" << fixed(axis_y, 1) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed(x, 1) << "\" y=\"" << fixed(axis_y - 9, 1) << "\" text-anchor=\"middle\">" << r
        << "</text>\n";
  }
  // CD bar in the top-left corner.
  out << "<line x1=\"" << fixed(left, 1) << "\" y1=\"20.0\" x2=\"" << fixed(x_of(lo + s.critical_difference), 1)
      << "\" y2=\"20.0\" stroke=\"black\" stroke-width=\"2\"/>\n";
  out << "<text x=\"" << fixed(left, 1) << "\" y=\"14.0\">CD = " << fixed(s.critical_difference, 3) << "</text>\n";

  for (std::size_t n = 0; n < k; ++n) {
    const std::size_t m = order[n];
    const bool on_left = n < half;
    const std::size_t slot = on_left ? n : k - 1 - n;
    const double y = axis_y + 30.0 + 14.0 * static_cast<double>(s.groups.size()) + row * static_cast<double>(slot);
    const double x = x_of(s.average_ranks[m]);
    const double end = on_left ? left - 10.0 : right + 10.0;
    out << "<polyline points=\"" << fixed(x, 1) << ',' << fixed(axis_y, 1) << ' ' << fixed(x, 1) << ',' << fixed(y, 1)
        << ' ' << fixed(end, 1) << ',' << fixed(y, 1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed(on_left ? end - 4.0 : end + 4.0, 1) << "\" y=\"" << fixed(y + 4.0, 1)
        << "\" text-anchor=\"" << (on_left ? "end" : "start") << "\">" << xml_escape(s.table.methods[m]) << " ("
        << fixed(s.average_ranks[m], 2) << ")</text>\n";
  }
  for (std::size_t g = 0; g < s.groups.size(); ++g) {
    const auto& group = s.groups[g];
    if (group.size() < 2) continue;
    const double y = axis_y + 16.0 + 14.0 * static_cast<double>(g);
    out << "<line class=\"group\" x1=\"" << fixed(x_of(s.average_ranks[group.front()]) - 3.0, 1) << "\" y1=\""
        << fixed(y, 1) << "\" x2=\"" << fixed(x_of(s.average_ranks[group.back()]) + 3.0, 1) << "\" y2=\""
        << fixed(y, 1) << "\" stroke=\"black\" stroke-width=\"3\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

RankingSummary emit_report(const std::vector<ResultRow>& rows, const std::string& level,
                           const std::filesystem::path& directory) {
  if (rows.empty()) throw PreconditionError("emit_report: no results");
  const RankingSummary summary = summarize(rank_table(rows, level));
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  detail::write_atomically(directory / ("f1_" + level + ".csv"), f1_matrix_csv(summary.table));
  detail::write_atomically(directory / ("ranking_" + level + ".json"), summary_json(summary));
  detail::write_atomically(directory / ("cd_" + level + ".svg"), cd_diagram_svg(summary));
  return summary;
}

}  // namespace binet
