#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "helpers.hpp"

#ifndef FTAQ_BIN
#define FTAQ_BIN "ftaq"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_raw(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), got);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

RunResult run(const std::string& args) { return run_raw(std::string(FTAQ_BIN) + " " + args); }

std::string model(const std::string& name) { return helpers::data_path("models/" + name + ".ftat"); }
std::string script(const std::string& rel) { return helpers::data_path("scripts/" + rel); }

}  // namespace

TEST_CASE("validate: exit codes per input class") {
  CHECK(run("validate " + model("m1")).exit_code == 0);

  RunResult cyclic = run("validate " + model("cycle"));
  CHECK(cyclic.exit_code == 2);
  CHECK(cyclic.output.find("cycle") != std::string::npos);

  CHECK(run("validate " + model("does_not_exist")).exit_code == 1);
  CHECK(run("validate " + model("badrange")).exit_code == 1);
}

TEST_CASE("query: sets, witnesses and the fail-on-false gate") {
  RunResult mcs = run("query " + model("m2") + " " + script("analog/a07.lpfl") + " --format json");
  CHECK(mcs.exit_code == 0);
  auto parsed = nlohmann::json::parse(mcs.output);
  CHECK(parsed["queries"][0]["result"] == nlohmann::json::array({{"A", "C"}}));

  RunResult ok = run("query " + model("jm") + " " + script("analog/a24.lpfl"));
  CHECK(ok.exit_code == 0);  // a false verdict is still a successful analysis
  RunResult gated = run("query " + model("jm") + " " + script("analog/a24.lpfl") + " --fail-on-false");
  CHECK(gated.exit_code == 3);
}

TEST_CASE("query: documented error classes and exit codes") {
  RunResult null_cond = run("query " + model("m1") + " " + script("errors/err_null_cond.lpfl") + " --format json");
  CHECK(null_cond.exit_code == 4);
  auto parsed = nlohmann::json::parse(null_cond.output);
  CHECK(parsed["queries"][0]["error"]["class"] == "conditioning-on-null");

  RunResult guard = run("query " + model("guard25") + " " + script("errors/err_guard.lpfl") + " --format json");
  CHECK(guard.exit_code == 4);
  CHECK(nlohmann::json::parse(guard.output)["queries"][0]["error"]["class"] == "guard-exceeded");

  RunResult unknown = run("query " + model("m1") + " " + script("errors/err_unknown.lpfl") + " --format json");
  CHECK(unknown.exit_code == 1);
  auto urec = nlohmann::json::parse(unknown.output)["queries"][0];
  CHECK(urec["error"]["class"] == "unknown-element");
  CHECK(urec["error"]["line"] == 3);
  CHECK(urec["error"]["col"] == 10);

  RunResult missing = run("query " + model("water") + " " + script("errors/err_missing_attr.lpfl") + " --format json");
  CHECK(missing.exit_code == 4);
  CHECK(nlohmann::json::parse(missing.output)["queries"][0]["error"]["class"] == "missing-attribute");

  RunResult malformed = run("query " + model("m1") + " " + script("malformed/m06_unclosed_paren.lpfl"));
  CHECK(malformed.exit_code == 1);
}

TEST_CASE("query: the guard is adjustable by flag and environment") {
  std::string base = "query " + model("guard25") + " " + script("errors/err_guard.lpfl");
  CHECK(run(base).exit_code == 4);
  CHECK(run(base + " --max-leaves 25").exit_code == 0);
  CHECK(run_raw("env FTAQ_MAX_LEAVES=25 " + std::string(FTAQ_BIN) + " " + base).exit_code == 0);
}

TEST_CASE("query: canonical JSON output is byte-identical across runs") {
  std::string cmd = "query " + model("water");
  for (const char* name : {"q07", "q08", "q09", "q10", "q14", "q15"})
    cmd += " " + script(std::string("paper/") + name + ".lpfl");
  cmd += " --format json --canonical";
  RunResult a = run(cmd);
  RunResult b = run(cmd);
  CHECK(a.output == b.output);
  CHECK(a.output.find("wall_time_ms") == std::string::npos);

  auto parsed = nlohmann::json::parse(a.output);
  CHECK(parsed["queries"][0]["flags"] == nlohmann::json::array({"reconstruction"}));
}

TEST_CASE("query: auto and exhaustive engines agree") {
  for (const char* pair : {"m2 analog/a07.lpfl", "m2 analog/a08.lpfl", "m2 analog/a09.lpfl", "m2 analog/a10.lpfl",
                           "m1 analog/a11.lpfl", "m1 analog/a12.lpfl", "m3 analog/a13.lpfl", "m3 analog/a14.lpfl",
                           "m3 analog/a15.lpfl", "m3 analog/a16.lpfl", "m3 analog/a17.lpfl", "m3 analog/a18.lpfl",
                           "jm analog/a20.lpfl", "jm analog/a22.lpfl", "jm analog/a24.lpfl", "jm analog/a26.lpfl"}) {
    std::istringstream in{pair};
    std::string model_name, script_rel;
    in >> model_name >> script_rel;
    std::string base = "query " + model(model_name) + " " + script(script_rel) + " --format json --canonical";
    RunResult with_auto = run(base + " --engine auto");
    RunResult exhaustive = run(base + " --engine exhaustive");
    auto ja = nlohmann::json::parse(with_auto.output);
    auto je = nlohmann::json::parse(exhaustive.output);
    // Engines differ only in the reported engine name and float rounding.
    auto ra = ja["queries"][0], re = je["queries"][0];
    CHECK(ra["kind"] == re["kind"]);
    CHECK(ra["witness"] == re["witness"]);
    if (ra["result"].is_number()) {
      CHECK(ra["result"].get<double>() == doctest::Approx(re["result"].get<double>()).epsilon(1e-9));
    } else {
      CHECK(ra["result"] == re["result"]);
    }
  }
}

TEST_CASE("query: JSON reports carry the schema's required fields") {
  auto schema = nlohmann::json::parse(helpers::read_file(helpers::data_path("report.schema.json")));
  RunResult ok = run("query " + model("jm") + " " + script("analog/a26.lpfl") + " --format json");
  RunResult err = run("query " + model("m1") + " " + script("errors/err_null_cond.lpfl") + " --format json");
  for (const RunResult* r : {&ok, &err}) {
    auto report = nlohmann::json::parse(r->output);
    for (const auto& field : schema["required"]) CHECK(report.contains(field.get<std::string>()));
    for (const auto& rec : report["queries"]) {
      for (const auto& field : schema["properties"]["queries"]["items"]["required"])
        CHECK(rec.contains(field.get<std::string>()));
      if (rec["kind"] == "error") CHECK(rec.contains("error"));
    }
  }
}

TEST_CASE("analyze: direct analyses") {
  RunResult mcs = run("analyze " + model("m2") + " mcs TOP --format json");
  CHECK(mcs.exit_code == 0);
  CHECK(nlohmann::json::parse(mcs.output)["result"] == nlohmann::json::array({{"B"}, {"A", "C"}}));

  RunResult metric = run("analyze " + model("m3") + " metric R --domain cost --format json");
  CHECK(nlohmann::json::parse(metric.output)["result"] == 13.0);

  RunResult attacks = run("analyze " + model("m3") + " attacks R --format json");
  CHECK(nlohmann::json::parse(attacks.output)["result"] == nlohmann::json::array({{"a", "b"}, {"a", "c"}}));

  RunResult prob = run("analyze " + model("jm") + " prob TOP --format json");
  auto parsed = nlohmann::json::parse(prob.output);
  CHECK(parsed["result"].get<double>() == doctest::Approx(0.4375).epsilon(1e-12));
  CHECK(parsed["resolved"]["K"].get<double>() == doctest::Approx(0.375).epsilon(1e-12));

  RunResult unattackable = run("analyze " + model("m3") + " metric T --format json");
  CHECK(unattackable.exit_code == 4);  // fault-side element
}
