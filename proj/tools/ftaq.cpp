// ftaq — query fault/attack tree models with LangPFL scripts.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ftaq/model_text.hpp"
#include "ftaq/report.hpp"
#include "ftaq/version.hpp"

namespace {

using namespace ftaq;

constexpr int exit_ok = 0;
constexpr int exit_input = 1;      // I/O, model parse, script parse/desugar
constexpr int exit_invalid = 2;    // model validation
constexpr int exit_failed = 3;     // --fail-on-false
constexpr int exit_eval = 4;       // evaluation error

struct CommonFlags {
  std::string format = "text";
  std::string engine = "auto";
  int max_leaves = 24;
  double tolerance = 1e-9;
  bool canonical = false;

  EvalOptions options() const {
    EvalOptions opts;
    opts.max_leaves = max_leaves;
    opts.tolerance = tolerance;
    opts.parallel = engine != "exhaustive";
    return opts;
  }
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--engine", flags.engine, "Evaluation engine")->check(CLI::IsMember({"auto", "exhaustive"}));
  cmd->add_option("--max-leaves", flags.max_leaves, "Exhaustive enumeration guard")
      ->envname("FTAQ_MAX_LEAVES");
  cmd->add_option("--tolerance", flags.tolerance, "Tolerant-equality width");
  cmd->add_flag("--canonical", flags.canonical, "Omit wall-clock timings from JSON output");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorClass::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Loads and validates a model; prints the error and returns the exit code on
/// failure.
int load_model(const std::string& path, TreeModel& out) {
  try {
    out = parse_model({read_file(path), path});
    return exit_ok;
  } catch (const Error& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return e.cls() == ErrorClass::validation ? exit_invalid : exit_input;
  }
}

int cmd_validate(const std::string& model_path, const CommonFlags& flags) {
  TreeModel model;
  try {
    model = parse_model_unvalidated({read_file(model_path), model_path});
  } catch (const Error& e) {
    std::cerr << model_path << ":" << e.what() << "\n";
    return exit_input;
  }
  ValidationReport report = validate_model(model);
  if (flags.format == "json") {
    json out;
    out["tool"] = tool_name;
    out["version"] = tool_version;
    out["model"] = model.name;
    out["valid"] = report.ok();
    json issues = json::array();
    for (const auto& issue : report.issues)
      issues.push_back({{"node", issue.node}, {"rule", issue.rule}, {"detail", issue.detail}});
    out["violations"] = issues;
    std::cout << out.dump(2) << "\n";
  } else {
    if (report.ok()) {
      std::cout << model.name << ": valid\n";
    } else {
      std::cout << model.name << ": " << report.issues.size() << " violation(s)\n";
      for (const auto& issue : report.issues)
        std::cout << "  " << issue.node << ": " << issue.rule << " (" << issue.detail << ")\n";
    }
  }
  return report.ok() ? exit_ok : exit_invalid;
}

std::string span_text(const Script& script) {
  std::ostringstream out;
  out << script.payload_pos.line << ":" << script.payload_pos.col << "-" << script.end_pos.line << ":"
      << script.end_pos.col;
  return out.str();
}

int cmd_query(const std::string& model_path, const std::vector<std::string>& script_paths, const CommonFlags& flags,
              bool fail_on_false) {
  TreeModel model;
  if (int rc = load_model(model_path, model); rc != exit_ok) return rc;

  RunReport report;
  report.model = model.name;
  report.engine = flags.engine;
  EvalOptions opts = flags.options();

  bool any_input_error = false, any_eval_error = false, any_false_check = false;
  for (const std::string& path : script_paths) {
    QueryRecord rec;
    rec.source = std::filesystem::path(path).filename().string();
    auto started = std::chrono::steady_clock::now();
    bool input_phase = true;  // parse + desugar; evaluation errors map to exit 4
    try {
      Script script = parse_script_file(path);
      rec.span = span_text(script);
      DesugaredQuery query = desugar(script, model);
      input_phase = false;
      QueryRecord result = run_query(model, query, opts);
      result.source = rec.source;
      result.span = rec.span;
      rec = std::move(result);
      if (rec.kind == "verdict" && rec.result.is_boolean() && !rec.result.get<bool>()) any_false_check = true;
    } catch (const Error& e) {
      rec.kind = "error";
      rec.result = nullptr;
      rec.error = error_json(e);
      (input_phase ? any_input_error : any_eval_error) = true;
    }
    rec.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
    report.queries.push_back(std::move(rec));
  }

  if (flags.format == "json") {
    std::cout << to_json(report, flags.canonical).dump(2) << "\n";
  } else {
    std::cout << to_text(report);
  }
  if (any_input_error) return exit_input;
  if (any_eval_error) return exit_eval;
  if (fail_on_false && any_false_check) return exit_failed;
  return exit_ok;
}

int cmd_analyze(const std::string& model_path, const std::string& analysis, const std::string& element,
                const std::string& domain_name_arg, const CommonFlags& flags) {
  TreeModel model;
  if (int rc = load_model(model_path, model); rc != exit_ok) return rc;
  EvalOptions opts = flags.options();

  json out;
  out["tool"] = tool_name;
  out["version"] = tool_version;
  out["model"] = model.name;
  out["analysis"] = analysis;
  out["element"] = element;
  try {
    if (analysis == "mcs") {
      out["result"] = sets_json(minimal_cut_sets(model, element, opts));
    } else if (analysis == "mps") {
      out["result"] = sets_json(minimal_path_sets(model, element, opts));
    } else if (analysis == "attacks") {
      out["result"] = sets_json(minimal_attacks(model, element, {}, opts));
    } else if (analysis == "prob") {
      NodeIndex i = model.require(element);
      if (model.side_of(i) == Side::attack) {
        out["result"] = value_json(attack_success_probability(model, element, {}, std::nullopt, opts));
      } else {
        // Attached basic events in the cone resolve from their attack trees.
        PflPtr body = pfl::prob_compare(bfl::atom(element), Cmp::ge, 0.0);
        std::vector<std::string> resolve;
        for (NodeIndex leaf : event_support(model, body->event))
          if (model.is_attached(leaf)) resolve.push_back(model.node(leaf).id);
        if (resolve.empty()) {
          out["result"] = value_json(event_probability(model, body->event, {}, opts));
        } else {
          JointQuery q;
          PflNode node = *body;
          node.resolve = resolve;
          q.body = std::make_shared<const PflNode>(std::move(node));
          q.mode = JointMode::compute;
          JointResult r = eval_joint(model, q, opts);
          out["result"] = value_json(r.value);
          json resolved = json::object();
          for (const auto& t : r.trace)
            for (const auto& [be, p] : t.resolved) resolved[be] = p;
          out["resolved"] = resolved;
        }
      }
    } else if (analysis == "metric") {
      auto domain = domain_from_name(domain_name_arg);
      if (!domain) fail(ErrorClass::invalid_query, "unknown metric domain '" + domain_name_arg + "'");
      double v = metric_value(model, *domain, element, {}, opts);
      out["result"] = value_json(v);
      if (std::isinf(v)) out["flags"] = json::array({"unattackable"});
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_eval;
  }
  for (const auto& a : model.annotations) out["flags"].push_back(a);

  if (flags.format == "json") {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << model.name << " " << analysis << " " << element << ": " << out["result"].dump();
    if (out.contains("resolved")) std::cout << "  resolved=" << out["resolved"].dump();
    std::cout << "\n";
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query fault/attack tree models: validation, LangPFL scripts, direct analyses"};
  app.set_version_flag("--version", std::string(tool_name) + " " + tool_version);
  app.require_subcommand(1);

  CommonFlags flags;

  auto* validate = app.add_subcommand("validate", "Check a model file against the structural rules");
  std::string validate_model_path;
  validate->add_option("model", validate_model_path, "Model file (.ftat)")->required();
  add_common_flags(validate, flags);

  auto* query = app.add_subcommand("query", "Run LangPFL query scripts against a model");
  std::string query_model_path;
  std::vector<std::string> query_scripts;
  bool fail_on_false = false;
  query->add_option("model", query_model_path, "Model file (.ftat)")->required();
  query->add_option("scripts", query_scripts, "Query scripts (.lpfl)")->required();
  query->add_flag("--fail-on-false", fail_on_false, "Exit 3 when any check verdict is false");
  add_common_flags(query, flags);

  auto* analyze = app.add_subcommand("analyze", "Run one direct analysis without a script");
  std::string analyze_model_path, analyze_kind, analyze_element, analyze_domain = "cost";
  analyze->add_option("model", analyze_model_path, "Model file (.ftat)")->required();
  analyze->add_option("analysis", analyze_kind, "One of mcs|mps|prob|metric|attacks")
      ->required()
      ->check(CLI::IsMember({"mcs", "mps", "prob", "metric", "attacks"}));
  analyze->add_option("element", analyze_element, "Target element id")->required();
  analyze->add_option("--domain", analyze_domain, "Metric domain for 'metric'")
      ->check(CLI::IsMember({"cost", "partime", "seqtime", "skill"}));
  add_common_flags(analyze, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(validate_model_path, flags);
    if (query->parsed()) return cmd_query(query_model_path, query_scripts, flags, fail_on_false);
    if (analyze->parsed()) return cmd_analyze(analyze_model_path, analyze_kind, analyze_element, analyze_domain, flags);
  } catch (const ftaq::Error& e) {
    std::cerr << e.what() << "\n";
    return e.cls() == ftaq::ErrorClass::validation ? exit_invalid : exit_input;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_input;
  }
  return exit_ok;
}
