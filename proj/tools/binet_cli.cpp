#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "binet/anomaly_injector.hpp"
#include "binet/baselines.hpp"
#include "binet/binet_model.hpp"
#include "binet/classifier.hpp"
#include "binet/errors.hpp"
#include "binet/evaluation.hpp"
#include "binet/process_generator.hpp"
#include "binet/report.hpp"
#include "binet/tensor_io.hpp"
#include "binet/thresholding.hpp"
#include "binet/version.hpp"

namespace fs = std::filesystem;
using namespace binet;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::map<std::string, std::string> key_values(const std::vector<std::string>& items) {
  std::map<std::string, std::string> kv;
  for (const auto& item : items) {
    std::stringstream parts(item);
    std::string piece;
    while (std::getline(parts, piece, ',')) {
      const auto eq = piece.find('=');
      if (eq == std::string::npos) throw ParseError("expected key=value, got '" + piece + "'");
      kv[piece.substr(0, eq)] = piece.substr(eq + 1);
    }
  }
  return kv;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(key + ": '" + value + "' is not a non-negative integer");
  }
}

LikelihoodGraph random_graph_from(const std::vector<std::string>& spec, std::uint64_t default_seed) {
  RandomGraphParams p;
  p.seed = default_seed;
  for (const auto& [key, value] : key_values(spec)) {
    if (key == "activities") p.num_activities = to_size(key, value);
    else if (key == "attrs" || key == "attributes") p.num_attributes = to_size(key, value);
    else if (key == "values") p.values_per_attribute = to_size(key, value);
    else if (key == "branching") p.branching = to_size(key, value);
    else if (key == "seed") p.seed = to_size(key, value);
    else throw ParseError("unknown random graph parameter '" + key + "'");
  }
  return random_graph(p);
}

struct GraphSource {
  std::string graph_file;
  std::vector<std::string> random;
  std::string mine;

  void add(CLI::App* cmd) {
    auto* g = cmd->add_option("--graph", graph_file, "Likelihood graph JSON file")->check(CLI::ExistingFile);
    auto* r = cmd->add_option("--random", random, "Random graph: activities=N attrs=N values=N branching=N seed=N")
                  ->expected(1, 8);
    g->excludes(r);
  }
  LikelihoodGraph resolve(std::uint64_t seed) const {
    if (!graph_file.empty()) return load_graph(graph_file);
    if (!random.empty()) return random_graph_from(random, seed);
    if (!mine.empty()) return mine_likelihood_graph(load_log(mine));
    return paper_process_graph();
  }
};

// ---------------------------------------------------------------------------

struct GenerateCmd {
  GraphSource source;
  std::size_t cases = 5000;
  std::uint64_t seed = 0;
  std::size_t max_length = 100;
  std::string name;
  std::string output;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "Sample a log by random walks through a likelihood graph");
    source.add(cmd);
    cmd->add_option("--cases", cases, "Number of cases")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--max-length", max_length, "Maximum case length")->capture_default_str();
    cmd->add_option("--name", name, "Log name");
    cmd->add_option("-o,--output", output, "Output log JSON")->required();
    cmd->callback([this] { run(); });
  }
  void run() const {
    const LikelihoodGraph graph = source.resolve(seed);
    GeneratorConfig cfg;
    cfg.num_cases = cases;
    cfg.seed = seed;
    cfg.max_case_length = max_length;
    const EventLog log = generate_log(graph, cfg, name.empty() ? fs::path(output).stem().string() : name);
    save_log(log, output);
    std::cerr << "generated " << log.num_cases() << " cases, " << log.num_events() << " events\n";
  }
};

struct InjectCmd {
  std::string input, output, graph_file, records;
  double fraction = 0.30;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("inject", "Inject labeled anomalies into a log");
    cmd->add_option("input", input, "Input log JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", output, "Output labeled log JSON")->required();
    cmd->add_option("--fraction", fraction, "Fraction of cases to alter")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--graph", graph_file, "Graph supplying the allowed attribute values")->check(CLI::ExistingFile);
    cmd->add_option("--records", records, "Write one JSON record per altered case");
    cmd->callback([this] { run(); });
  }
  void run() const {
    const EventLog log = load_log(input);
    InjectionConfig cfg;
    cfg.anomaly_fraction = fraction;
    cfg.seed = seed;
    std::optional<SuccessorOracle> oracle;
    if (!graph_file.empty()) oracle = SuccessorOracle::from_graph(load_graph(graph_file));
    const InjectionResult result = inject_with_records(log, cfg, oracle ? &*oracle : nullptr);
    if (!records.empty()) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& r : result.records) {
        rows.push_back({{"case", log.cases()[r.case_index].id},
                        {"type", std::string(to_string(r.type))},
                        {"size", r.size}});
      }
      write_text(records, rows.dump(1) + "\n");
    }
    save_log(result.log, output);
    std::cerr << "altered " << result.records.size() << " of " << log.num_cases() << " cases\n";
  }
};

struct TrainCmd {
  std::string input, output, history;
  std::string model = "v1";
  std::size_t epochs = 20, batch = 500, hidden = 0;
  std::uint64_t seed = 0;
  double learning_rate = 0.001;
  bool no_recalibrate = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train a BINet model on a log");
    cmd->add_option("input", input, "Training log JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", output, "Output model file")->required();
    cmd->add_option("--model", model, "BINet version")->capture_default_str()->check(CLI::IsMember({"v1", "v2", "v3"}));
    cmd->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--batch", batch, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--hidden", hidden, "GRU width (0: twice the longest case)")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--learning-rate", learning_rate, "Adam step size")->capture_default_str();
    cmd->add_flag("--no-recalibrate", no_recalibrate, "Keep the running batch-norm statistics from training");
    cmd->add_option("--history", history, "Write per-epoch losses as JSON");
    cmd->callback([this] { run(); });
  }
  void run() const {
    const EventLog log = load_log(input);
    const EncodedLog encoded = encode(log);
    BinetConfig cfg;
    cfg.version = binet_version_from_string(model);
    cfg.epochs = epochs;
    cfg.batch_size = batch;
    cfg.hidden_dim = hidden;
    cfg.seed = seed;
    cfg.adam.learning_rate = learning_rate;
    cfg.recalibrate_batchnorm = !no_recalibrate;
    BinetModel m = BinetModel::build(encoded, cfg);
    const TrainingHistory h = m.train(encoded);
    save_model(m, output);
    if (!history.empty()) {
      nlohmann::ordered_json j;
      j["epoch_loss"] = h.epoch_loss;
      j["updates"] = h.updates;
      j["clipped_probabilities"] = h.clipped_probabilities;
      write_text(history, j.dump(1) + "\n");
    }
    std::cerr << "trained " << to_string(cfg.version) << " for " << epochs << " epochs, final loss "
              << (h.epoch_loss.empty() ? 0.0 : h.epoch_loss.back()) << "\n";
  }
};

struct DetectCmd {
  std::string input, model_file, method;
  std::string heuristic, strategy = "attr";
  std::string scores_out, flags_out, assignment_out, predictions_out;
  std::size_t window = 2;
  std::size_t curve_points = kCurvePoints;
  const std::size_t* threads = nullptr;

  void add(CLI::App& app, const std::size_t* thread_count) {
    threads = thread_count;
    auto* cmd = app.add_subcommand("detect", "Score a log and binarize the scores");
    cmd->add_option("input", input, "Log JSON")->required()->check(CLI::ExistingFile);
    auto* m = cmd->add_option("--model", model_file, "Trained BINet model")->check(CLI::ExistingFile);
    auto* b = cmd->add_option("--method", method, "Baseline method")
                  ->check(CLI::IsMember({"tstide", "naive", "naive+", "likelihood", "likelihood+"}));
    m->excludes(b);
    cmd->add_option("--heuristic", heuristic,
                    "lp-left|lp-center|lp-right|elbow-down|elbow-up|best (default: lp-center, or lp-right with "
                    "--predictions since those flags feed the classifier)");
    cmd->add_option("--strategy", strategy, "global|attr|event|event-attr")->capture_default_str();
    cmd->add_option("--window", window, "t-STIDE+ window size")->capture_default_str();
    cmd->add_option("--curve-points", curve_points, "Sampling points of the anomaly-ratio curve")->capture_default_str();
    cmd->add_option("--scores", scores_out, "Write the anomaly scores");
    cmd->add_option("--flags", flags_out, "Write the binary flags")->required();
    cmd->add_option("--assignment", assignment_out, "Write the threshold assignment");
    cmd->add_option("--predictions", predictions_out, "Write prediction sets of flagged slots (BINet only)");
    cmd->callback([this] { run(); });
  }
  void run() const {
    if (model_file.empty() == method.empty()) throw PreconditionError("detect: give exactly one of --model or --method");
    if (!predictions_out.empty() && model_file.empty()) {
      throw PreconditionError("detect: prediction sets need a BINet model");
    }
    const Heuristic h =
        heuristic_from_string(!heuristic.empty() ? heuristic : predictions_out.empty() ? "lp-center" : "lp-right");
    const Strategy s = strategy_from_string(strategy);
    const EventLog log = load_log(input);
    std::optional<FlagTensor> truth;
    if (log.is_labeled()) truth = anomaly_mask(label_tensor(log));
    if (h == Heuristic::Best && !truth) throw PreconditionError("the best heuristic requires a labeled log");

    ScoreTensor scores;
    std::optional<FlagTensor> fixed_flags;
    Distributions distributions;
    std::optional<BinetModel> model;
    if (!model_file.empty()) {
      model = load_model(model_file);
      scores = model->score(log, predictions_out.empty() ? nullptr : &distributions, *threads);
    } else if (method == "tstide") {
      scores = tstide_score(log, window);
    } else if (method == "naive" || method == "naive+") {
      scores = naive_score(log);
      if (method == "naive") fixed_flags = naive_flags(log);
    } else {
      const LikelihoodGraph graph = mine_likelihood_graph(log);
      scores = likelihood_score(graph, log);
      if (method == "likelihood") fixed_flags = likelihood_flags(graph, log);
    }

    std::optional<ThresholdAssignment> assignment;
    FlagTensor flags;
    if (fixed_flags) {
      flags = *fixed_flags;
    } else {
      assignment = apply_strategy(h, s, scores, truth ? &*truth : nullptr, 10000, curve_points);
      flags = theta(scores, *assignment);
    }
    // Validate everything before writing any file.
    std::string predictions_json;
    if (!predictions_out.empty()) {
      predictions_json = predictions_to_json(prediction_sets(distributions, model->vocabularies(), flags, *assignment));
    }
    if (!scores_out.empty()) write_text(scores_out, scores_to_json(scores));
    if (!assignment_out.empty() && assignment) write_text(assignment_out, assignment_to_json(*assignment) + "\n");
    if (!predictions_out.empty()) write_text(predictions_out, predictions_json);
    write_text(flags_out, flags_to_json(flags));
    std::size_t flagged = 0;
    for (auto v : flags.data()) flagged += v;
    std::cerr << "flagged " << flagged << " of " << flags.num_events() * flags.num_attributes() << " attribute slots\n";
  }
};

struct ClassifyCmd {
  std::string input, flags_file, predictions_file, output, confusion;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("classify", "Assign anomaly classes to flagged slots");
    cmd->add_option("input", input, "Log JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--flags", flags_file, "Flags from detect")->required()->check(CLI::ExistingFile);
    cmd->add_option("--predictions", predictions_file, "Prediction sets from detect")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", output, "Classified log JSON")->required();
    cmd->add_option("--confusion", confusion, "Write the confusion matrix CSV (labeled logs)");
    cmd->callback([this] { run(); });
  }
  void run() const {
    const EventLog log = load_log(input);
    const FlagTensor flags = load_flags(flags_file);
    const PredictionSets predictions = load_predictions(predictions_file);
    const LabelTensor predicted = classify(log, flags, predictions);
    std::optional<ClassificationReport> report;
    if (log.is_labeled()) report = classification_report(predicted, label_tensor(log));
    if (!confusion.empty() && !report) throw PreconditionError("classify: --confusion needs a labeled log");
    write_text(output, classified_log_json(log, predicted));
    if (report) {
      if (!confusion.empty()) write_text(confusion, confusion_csv(*report));
      std::cout << "macro_f1 " << report->macro_f1 << "\njoint_f1 " << report->joint_f1 << "\n";
    }
  }
};

struct EvaluateCmd {
  std::string input, flags_file, output, method = "method", dataset, heuristic, strategy;
  std::uint64_t seed = 0;
  bool append = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Precision, recall and F1 of flags against a labeled log");
    cmd->add_option("input", input, "Labeled log JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--flags", flags_file, "Flags from detect")->required()->check(CLI::ExistingFile);
    cmd->add_option("--method", method, "Method name for the results table")->capture_default_str();
    cmd->add_option("--dataset", dataset, "Dataset name (default: log name)");
    cmd->add_option("--heuristic", heuristic, "Heuristic recorded in the results table");
    cmd->add_option("--strategy", strategy, "Strategy recorded in the results table");
    cmd->add_option("--seed", seed, "Seed recorded in the results table");
    cmd->add_option("-o,--output", output, "Results CSV");
    cmd->add_flag("--append", append, "Append to an existing results CSV");
    cmd->callback([this] { run(); });
  }
  void run() const {
    const EventLog log = load_log(input);
    if (!log.is_labeled()) throw PreconditionError("evaluate: the log has no labels");
    const FlagTensor flags = load_flags(flags_file);
    const LabelTensor truth = label_tensor(log);
    std::vector<ResultRow> rows;
    if (append && !output.empty() && fs::exists(output)) rows = parse_results_csv(read_text(output));
    for (Level level : {Level::Case, Level::Attribute}) {
      const BinaryCounts c = detection_counts(flags, truth, level);
      rows.push_back({dataset.empty() ? log.name() : dataset, method, std::string(to_string(level)), heuristic, strategy,
                      seed, c.precision(), c.recall(), c.f1()});
      std::cout << to_string(level) << " precision " << c.precision() << " recall " << c.recall() << " f1 " << c.f1()
                << "\n";
    }
    if (!output.empty()) write_text(output, results_csv(rows));
  }
};

struct RankCmd {
  std::string input, out_dir = "report";
  std::vector<std::string> levels = {"attribute", "case"};

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("rank", "Friedman test, Nemenyi CD and CD diagram from a results CSV");
    cmd->add_option("input", input, "Results CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--level", levels, "Detection levels to rank")->capture_default_str();
    cmd->add_option("--out-dir", out_dir, "Report directory")->capture_default_str();
    cmd->callback([this] { run(); });
  }
  void run() const {
    const auto rows = parse_results_csv(read_text(input));
    for (const auto& level : levels) {
      const RankingSummary s = emit_report(rows, level, out_dir);
      std::cout << level << ": chi2_F " << s.friedman.statistic << " p " << s.friedman.p_value << " CD "
                << s.critical_difference << "\n";
      for (std::size_t m = 0; m < s.table.methods.size(); ++m) {
        std::cout << "  " << s.table.methods[m] << " " << s.average_ranks[m] << "\n";
      }
    }
  }
};

struct GraphCmd {
  GraphSource source;
  std::uint64_t seed = 0;
  std::string output;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("graph", "Export the paper graph, a random graph or a graph mined from a log");
    source.add(cmd);
    cmd->add_option("--mine", source.mine, "Mine the graph from this log")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Seed for --random")->capture_default_str();
    cmd->add_option("-o,--output", output, "Output graph JSON (default: stdout)");
    cmd->callback([this] { run(); });
  }
  void run() const {
    const LikelihoodGraph graph = source.resolve(seed);
    if (output.empty()) {
      std::cout << graph_to_json(graph);
    } else {
      save_graph(graph, output);
    }
  }
};

std::string error_kind(const binet::Error& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  if (dynamic_cast<const CorruptionError*>(&e)) return "CorruptionError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
  if (dynamic_cast<const NumericError*>(&e)) return "NumericError";
  if (dynamic_cast<const VocabularyError*>(&e)) return "VocabularyError";
  if (dynamic_cast<const GenerationError*>(&e)) return "GenerationError";
  if (dynamic_cast<const FormatError*>(&e)) return "FormatError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  return "Error";
}

// One JSON object per failure so scripts can tell error kinds apart.
std::string diagnostic(const binet::Error& e) {
  nlohmann::ordered_json j;
  j["error"] = error_kind(e);
  j["message"] = e.what();
  if (const auto* p = dynamic_cast<const ParseError*>(&e); p && p->line() > 0) {
    j["line"] = p->line();
    j["column"] = p->column();
  }
  return j.dump();
}

std::string version_text() {
  std::ostringstream s;
  s << "binet " << kVersion << " (model format " << kModelFormatVersion << ", json format " << kJsonFormatVersion
    << ")";
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anomaly detection in business process event logs with BINet"};
  app.set_version_flag("--version", version_text());
  app.set_config("--config", "", "Read options from a TOML file (command line wins)");
  std::string save_config;
  std::size_t threads = 1;
  app.add_option("--save-config", save_config, "Write the effective options to a TOML file");
  app.add_option("--threads", threads, "Worker threads for scoring")->capture_default_str()->check(CLI::PositiveNumber);
  app.require_subcommand(1);

  GenerateCmd generate;
  InjectCmd inject_cmd;
  TrainCmd train;
  DetectCmd detect;
  ClassifyCmd classify_cmd;
  EvaluateCmd evaluate;
  RankCmd rank;
  GraphCmd graph;
  generate.add(app);
  inject_cmd.add(app);
  train.add(app);
  detect.add(app, &threads);
  classify_cmd.add(app);
  evaluate.add(app);
  rank.add(app);
  graph.add(app);

  // Subcommand callbacks run after all parsing; save the config first.
  app.parse_complete_callback([&] {
    if (save_config.empty()) return;
    const std::string selected = app.get_subcommands().front()->get_name() + ".";
    std::istringstream all(app.config_to_str(true, false));
    std::string line, kept;
    while (std::getline(all, line)) {
      const auto eq = line.find('=');
      const std::string key = line.substr(0, eq);
      const std::string value = eq == std::string::npos ? "" : line.substr(eq + 1);
      if (key == "save-config" || value == "\"\"" || value == "[]") continue;
      if (key.find('.') != std::string::npos && key.rfind(selected, 0) != 0) continue;
      kept += line + "\n";
    }
    write_text(save_config, kept);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const binet::Error& e) {
    std::cerr << diagnostic(e) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
  return 0;
}
