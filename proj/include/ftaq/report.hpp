#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ftaq/model.hpp"
#include "ftaq/script.hpp"

namespace ftaq {

using nlohmann::json;

/// One evaluated query. `result` is a bool (verdict), number or "+inf"
/// (value), array of id arrays (sets), or null (error).
struct QueryRecord {
  std::string source;  // script file base name
  std::string span;    // payload span "line:col-line:col"
  std::string engine;  // bfl | pfl | atm | joint
  std::string kind;    // verdict | value | sets | error
  json result;
  json trace = json::array();
  json witness;  // status map, strategy array, or null
  std::vector<std::string> flags;
  json error;  // {class, message, line?, col?}
  long long wall_time_ms = 0;
};

struct RunReport {
  std::string model;
  std::string engine;  // exhaustive | auto
  std::vector<QueryRecord> queries;
};

json to_json(const RunReport& report, bool canonical);
std::string to_text(const RunReport& report);

json witness_json(const TreeModel& model, const StatusVector& status);
json sets_json(const std::vector<std::vector<std::string>>& sets);
json error_json(const Error& err);
json value_json(double value);  // +inf renders as the string "+inf"

/// Evaluates one desugared query against a model and fills a record (all
/// fields except source/span/wall_time_ms).
QueryRecord run_query(const TreeModel& model, const DesugaredQuery& query, const EvalOptions& opts);

}  // namespace ftaq
