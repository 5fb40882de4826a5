#include "ftaq/report.hpp"

#include <cmath>
#include <sstream>

#include "ftaq/joint.hpp"
#include "ftaq/version.hpp"

namespace ftaq {

json value_json(double value) {
  if (std::isinf(value)) return value > 0 ? "+inf" : "-inf";
  return value;
}

json witness_json(const TreeModel& m, const StatusVector& status) {
  json out = json::object();
  for (size_t i = 0; i < status.domain.size(); ++i) out[m.node(status.domain[i]).id] = status.at(i) ? 1 : 0;
  return out;
}

json sets_json(const std::vector<std::vector<std::string>>& sets) {
  json out = json::array();
  for (const auto& set : sets) out.push_back(set);
  return out;
}

json error_json(const Error& err) {
  json out;
  out["class"] = std::string(error_class_name(err.cls()));
  out["message"] = err.message();
  if (err.pos() && err.pos()->valid()) {
    out["line"] = err.pos()->line;
    out["col"] = err.pos()->col;
  }
  return out;
}

namespace {

json trace_json(const std::vector<ProbeTrace>& trace) {
  json out = json::array();
  for (const ProbeTrace& t : trace) {
    json entry;
    entry["term"] = t.text;
    entry["value"] = value_json(t.value);
    if (t.has_bound) {
      entry["cmp"] = std::string(cmp_text(t.cmp));
      entry["bound"] = t.threshold;
      entry["holds"] = t.holds;
    }
    if (!t.resolved.empty()) {
      json r = json::object();
      for (const auto& [be, p] : t.resolved) r[be] = p;
      entry["resolved"] = r;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

struct RunVisitor {
  const TreeModel& m;
  const EvalOptions& opts;
  QueryRecord& rec;

  void operator()(const BflCheckQuery& q) {
    Verdict v = check_closed(m, q.formula, opts);
    rec.kind = "verdict";
    rec.result = v.holds;
    if (v.witness) rec.witness = witness_json(m, *v.witness);
    rec.trace.push_back({{"term", to_string(q.formula)}, {"holds", v.holds}});
  }

  void operator()(const AllSatQuery& q) {
    auto sets = all_sat(m, q.formula, opts);
    rec.kind = "sets";
    rec.result = sets_json(sets);
    rec.trace.push_back({{"term", to_string(q.formula)}, {"count", sets.size()}});
  }

  void operator()(const PflCheckQuery& q) {
    PflResult r = eval_pfl(m, q.formula, opts);
    rec.kind = "verdict";
    rec.result = r.holds;
    rec.trace = trace_json(r.trace);
  }

  void operator()(const PflComputeQuery& q) {
    double v = q.cond ? conditional_probability(m, q.event, q.cond, q.remap, opts)
                      : event_probability(m, q.event, q.remap, opts);
    rec.kind = "value";
    rec.result = value_json(v);
    json entry;
    entry["term"] = "P[" + to_string(q.event) + (q.cond ? " | " + to_string(q.cond) : "") + "]";
    entry["value"] = value_json(v);
    rec.trace.push_back(std::move(entry));
  }

  void operator()(const AtmCheckQuery& q) {
    AtmVerdict v = eval_atm(m, q.formula, opts);
    rec.kind = "verdict";
    rec.result = v.holds;
    if (v.witness) rec.witness = witness_json(m, *v.witness);
    if (v.unattackable) rec.flags.push_back("unattackable");
    rec.trace = trace_json(v.trace);
    if (rec.trace.empty()) rec.trace.push_back({{"term", to_string(q.formula)}, {"holds", v.holds}});
  }

  void operator()(const AtmComputeQuery& q) {
    double v = q.is_prob ? attack_success_probability(m, q.element, q.prob_remap, std::nullopt, opts)
                         : metric_value(m, q.domain, q.element, q.remap, q.evidence, opts);
    rec.kind = "value";
    rec.result = value_json(v);
    if (!q.is_prob && std::isinf(v)) rec.flags.push_back("unattackable");
    json entry;
    entry["term"] = (q.is_prob ? "Prob[" : std::string(domain_name(q.domain)) + "[") + q.element + "]";
    entry["value"] = value_json(v);
    rec.trace.push_back(std::move(entry));
  }

  void operator()(const JointQuery& q) {
    JointResult r = eval_joint(m, q, opts);
    if (r.is_value) {
      rec.kind = "value";
      rec.result = value_json(r.value);
    } else {
      rec.kind = "verdict";
      rec.result = r.holds;
    }
    rec.trace = trace_json(r.trace);
    if (r.witness_strategy) rec.witness = json(*r.witness_strategy);
    if (!r.sweep.is_null()) rec.trace.push_back({{"sweep", r.sweep}});
    for (const auto& f : r.flags) rec.flags.push_back(f);
  }
};

}  // namespace

QueryRecord run_query(const TreeModel& m, const DesugaredQuery& query, const EvalOptions& opts) {
  QueryRecord rec;
  rec.engine = std::string(engine_name(query));
  std::visit(RunVisitor{m, opts, rec}, query);
  for (const auto& a : m.annotations) rec.flags.push_back(a);
  return rec;
}

json to_json(const RunReport& report, bool canonical) {
  json out;
  out["tool"] = tool_name;
  out["version"] = tool_version;
  out["model"] = report.model;
  out["engine"] = report.engine;
  json queries = json::array();
  for (const QueryRecord& q : report.queries) {
    json rec;
    rec["source"] = q.source;
    rec["span"] = q.span;
    rec["engine"] = q.engine;
    rec["kind"] = q.kind;
    rec["result"] = q.result;
    rec["trace"] = q.trace;
    rec["witness"] = q.witness;
    rec["flags"] = q.flags;
    if (!q.error.is_null()) rec["error"] = q.error;
    if (!canonical) rec["wall_time_ms"] = q.wall_time_ms;
    queries.push_back(std::move(rec));
  }
  out["queries"] = std::move(queries);
  return out;
}

std::string to_text(const RunReport& report) {
  std::ostringstream out;
  out << tool_name << " " << tool_version << " | model " << report.model << " | engine " << report.engine << "\n";
  int i = 0;
  for (const QueryRecord& q : report.queries) {
    out << "[" << ++i << "] " << q.source << " (" << q.engine << ", " << q.kind << "): ";
    if (q.kind == "error") {
      out << "error: " << q.error["message"].get<std::string>();
    } else if (q.kind == "verdict") {
      out << (q.result.get<bool>() ? "true" : "false");
    } else if (q.kind == "value") {
      out << q.result.dump();
    } else {
      out << q.result.dump();
    }
    if (!q.witness.is_null()) out << "  witness=" << q.witness.dump();
    if (!q.flags.empty()) {
      out << "  flags=";
      for (size_t f = 0; f < q.flags.size(); ++f) out << (f ? "," : "") << q.flags[f];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace ftaq
