// Built-in paper-submission process with a `user` attribute.
//
// Figure-level facts the graph reproduces:
//  * user groups and their probabilities differ per activity;
//  * after Research Related Work by the Main Author, Develop Hypothesis
//    follows with probability 0.6 (Develop Method 0.4);
//  * the users of Develop Hypothesis are Main Author (0.8) and Author (0.2);
//  * if the user of Research Related Work is the Student, the next activity
//    is always Develop Method (data-to-control dependency);
//  * Experiment appears twice: the copy after Develop Hypothesis leads to
//    Conduct Study, the copy after Develop Method to Evaluate, so Conduct Study
//    always eventually follows Develop Hypothesis and never Develop Method;
//  * Conduct Study is only executed by the Student;
//  * Submit can occur several times in one case (revision loop).
//
// Every other weight below is an assumption chosen to give ~5K cases with
// ~66K events (mean case length close to 13.5).

#include "binet/process_generator.hpp"

namespace binet {

namespace {

struct Step {
  const char* id;
  const char* activity;
  std::vector<std::pair<const char*, double>> users;
  /// Successors taken from every user node unless overridden below.
  std::vector<std::pair<const char*, double>> next;
  /// Per-user successor overrides.
  std::vector<std::pair<const char*, std::vector<std::pair<const char*, double>>>> next_by_user = {};
};

const std::vector<Step>& paper_steps() {
  static const std::vector<Step> steps = {
      {"identify_problem", "Identify Problem", {{"Main Author", 0.7}, {"Supervisor", 0.3}}, {{"research", 1.0}}},
      {"research",
       "Research Related Work",
       {{"Main Author", 0.5}, {"Author", 0.3}, {"Student", 0.2}},
       {{"hypothesis", 0.6}, {"method", 0.4}},
       {{"Student", {{"method", 1.0}}}}},
      {"hypothesis", "Develop Hypothesis", {{"Main Author", 0.8}, {"Author", 0.2}}, {{"experiment_h", 1.0}}},
      {"method", "Develop Method", {{"Main Author", 0.4}, {"Author", 0.3}, {"Student", 0.3}}, {{"experiment_m", 1.0}}},
      {"experiment_h", "Experiment", {{"Main Author", 0.3}, {"Author", 0.3}, {"Student", 0.4}}, {{"study", 1.0}}},
      {"experiment_m", "Experiment", {{"Author", 0.5}, {"Student", 0.5}}, {{"evaluate", 1.0}}},
      {"study", "Conduct Study", {{"Student", 1.0}}, {{"conclude", 1.0}}},
      {"evaluate", "Evaluate", {{"Main Author", 0.5}, {"Author", 0.3}, {"Supervisor", 0.2}}, {{"conclude", 1.0}}},
      {"conclude", "Conclude", {{"Main Author", 0.6}, {"Author", 0.4}}, {{"draft", 1.0}}},
      {"draft",
       "Write Draft",
       {{"Main Author", 0.5}, {"Author", 0.3}, {"Co-Author", 0.2}},
       {{"submit", 0.4}, {"internal_review", 0.25}, {"proofread", 0.15}, {"format", 0.2}}},
      {"internal_review",
       "Internal Review",
       {{"Supervisor", 0.7}, {"Co-Author", 0.3}},
       {{"revise", 0.3}, {"figures", 0.2}, {"submit", 0.5}}},
      {"revise", "Revise Draft", {{"Main Author", 0.6}, {"Author", 0.4}}, {{"submit", 1.0}}},
      {"figures", "Create Figures", {{"Designer", 0.6}, {"Student", 0.4}}, {{"submit", 1.0}}},
      {"proofread", "Proofread", {{"Proofreader", 0.8}, {"Co-Author", 0.2}}, {{"submit", 1.0}}},
      {"format", "Format Paper", {{"Main Author", 0.5}, {"Secretary", 0.5}}, {{"submit", 1.0}}},
      {"submit", "Submit", {{"Main Author", 1.0}}, {{"review", 0.8}, {"assign", 0.2}}},
      {"assign", "Assign Reviewers", {{"Editor", 0.6}, {"Chair", 0.4}}, {{"review", 1.0}}},
      {"review",
       "Review",
       {{"Reviewer A", 0.4}, {"Reviewer B", 0.35}, {"Reviewer C", 0.25}},
       {{"decision", 1.0}}},
      {"decision",
       "Final Decision",
       {{"Editor", 0.5}, {"Chair", 0.5}},
       {{"accept", 0.5}, {"reject", 0.3}, {"minor", 0.12}, {"major", 0.08}}},
      {"accept", "Accept", {{"Editor", 0.5}, {"Chair", 0.5}}, {{"camera_ready", 1.0}}},
      {"reject", "Reject", {{"Editor", 0.5}, {"Chair", 0.5}}, {{"end", 1.0}}},
      {"minor", "Minor Revision", {{"Editor", 0.5}, {"Chair", 0.5}}, {{"rebuttal_minor", 1.0}}},
      {"major", "Major Revision", {{"Editor", 0.5}, {"Chair", 0.5}}, {{"discuss", 1.0}}},
      {"discuss",
       "Discuss Reviews",
       {{"Main Author", 0.5}, {"Co-Author", 0.3}, {"Supervisor", 0.2}},
       {{"rebuttal_major", 1.0}}},
      {"rebuttal_major", "Write Rebuttal", {{"Main Author", 0.7}, {"Author", 0.3}}, {{"submit", 1.0}}},
      {"rebuttal_minor", "Write Rebuttal", {{"Main Author", 0.7}, {"Author", 0.3}}, {{"camera_ready", 1.0}}},
      {"camera_ready",
       "Prepare Camera Ready",
       {{"Main Author", 0.6}, {"Author", 0.4}},
       {{"end", 0.6}, {"register", 0.4}}},
      {"register", "Register Conference", {{"Secretary", 0.7}, {"Main Author", 0.3}}, {{"present", 1.0}}},
      {"present", "Present Paper", {{"Main Author", 0.6}, {"Author", 0.4}}, {{"end", 1.0}}},
  };
  return steps;
}

}  // namespace

LikelihoodGraph paper_process_graph() {
  LikelihoodGraph graph({"user"});
  graph.add_start("start");
  graph.add_end("end");
  const auto& steps = paper_steps();
  for (const auto& step : steps) graph.add_activity(step.id, step.activity);
  graph.add_edge("start", "identify_problem", 1.0);
  for (const auto& step : steps) {
    for (const auto& [user, weight] : step.users) {
      const std::string value_id = std::string(step.id) + "/" + user;
      graph.add_value(value_id, "user", user);
      graph.add_edge(step.id, value_id, weight);
      const auto* next = &step.next;
      for (const auto& [override_user, override_next] : step.next_by_user) {
        if (std::string_view(override_user) == user) next = &override_next;
      }
      for (const auto& [target, w] : *next) graph.add_edge(value_id, target, w);
    }
  }
  return graph;
}

}  // namespace binet
