#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fineq/cli/command.hpp"
#include "fineq/error.hpp"
#include "verbs.hpp"

namespace fineq::cli {

const std::vector<std::string>& known_options() {
  static const std::vector<std::string> names = {
      "potential", "V",  "W",  "F",  "n",  "R",  "lambda", "alpha", "beta",  "s",    "tol",
      "grid",      "seed", "check", "mode", "profile", "rho0", "rho1", "m0", "s0", "m1", "s1",
      "trace",     "in", "verb", "param", "csv"};
  return names;
}

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> names = {"certify-hi", "certify-pair",    "beta",  "rayleigh", "verify",
                                                 "transport-check", "moser", "report", "sweep"};
  return names;
}

std::string Report::payload() const {
  Json j = json;
  j.erase("runtime_ms");
  return j.dump();
}

std::map<std::string, std::string> read_config(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    const auto& known = known_options();
    if (std::find(known.begin(), known.end(), key) == known.end() && key != "out" && key != "cache-dir" &&
        key != "jobs")
      throw InvalidInput("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (key == "param" && out.count(key))
      out[key] += ";" + value;
    else
      out[key] = value;
  }
  return out;
}

Command parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"Numerical workbench for Hardy, transport and Moser-Onofri inequalities", "fineq"};
  app.require_subcommand(1);
  std::map<std::string, std::string> values;
  std::vector<std::string> params;
  std::string out, cache_dir, config;
  int jobs = 1;
  for (const auto& verb : verbs()) {
    CLI::App* sub = app.add_subcommand(verb);
    for (const auto& name : known_options()) {
      if (name == "param")
        sub->add_option("--param", params, "sweep axis name=v1,v2,...");
      else
        sub->add_option("--" + name, values[name]);
    }
    sub->add_option("--out", out, "report path (stdout when absent)");
    sub->add_option("--cache-dir", cache_dir, "content-addressed report cache");
    sub->add_option("--jobs", jobs, "worker threads for sweep")->check(CLI::Range(1, 256));
    sub->add_option("--config", config, "key=value file mirroring the flags");
  }
  app.parse(argc, argv);
  Command cmd;
  cmd.verb = app.get_subcommands().front()->get_name();
  CLI::App* sub = app.get_subcommands().front();
  std::map<std::string, std::string> file;
  if (!config.empty()) {
    std::ifstream is(config);
    if (!is) throw InvalidInput("cannot read config " + config);
    file = read_config(is);
  }
  for (const auto& name : known_options()) {
    if (sub->count("--" + name) > 0) {
      cmd.options[name] = name == "param" ? "" : values[name];
    } else if (file.count(name)) {
      cmd.options[name] = file[name];
    }
  }
  if (sub->count("--param") > 0) {
    std::string joined;
    for (const auto& p : params) joined += (joined.empty() ? "" : ";") + p;
    cmd.options["param"] = joined;
  }
  cmd.out = sub->count("--out") ? out : (file.count("out") ? file["out"] : "");
  cmd.cache_dir = sub->count("--cache-dir") ? cache_dir : (file.count("cache-dir") ? file["cache-dir"] : "");
  cmd.jobs = sub->count("--jobs") ? jobs : (file.count("jobs") ? std::stoi(file["jobs"]) : 1);
  return cmd;
}

namespace {

Json command_echo(const Command& cmd) {
  Json opts = Json::object();
  for (const auto& [k, v] : cmd.options) opts[k] = v;
  return {{"verb", cmd.verb}, {"options", opts}};
}

}  // namespace

Report run(const Command& cmd) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  if (cmd.verb == "sweep") return sweep(cmd);
  Handler handler = handler_for(cmd.verb);
  const std::string key = ResultCache::key_for(cmd);
  std::optional<ResultCache> cache;
  if (!cmd.cache_dir.empty() && cmd.verb != "report") cache.emplace(cmd.cache_dir);
  if (cache && !cmd.options.count("trace")) {
    if (auto hit = cache->load(key)) {
      Report r;
      r.json = std::move(*hit);
      r.json["runtime_ms"] = elapsed();
      r.exit_code = r.json["certificate"].value("exit_code", int(kFail));
      r.from_cache = true;
      return r;
    }
  }
  Report r;
  Json& j = r.json;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command_echo(cmd);
  Inputs in(cmd.options);
  Outcome o;
  bool cacheable = false;
  try {
    if (!handler) throw InvalidInput("unknown verb '" + cmd.verb + "'");
    o = handler(in);
    in.require_all_used(cmd.verb);
    cacheable = true;
  } catch (const InvalidInput& e) {
    o = Outcome{};
    o.result["error"] = e.what();
    o.certificate["status"] = "invalid_input";
    o.exit_code = kInvalidInput;
  } catch (const NumericalFailure& e) {
    o = Outcome{};
    o.result["error"] = e.what();
    o.certificate["status"] = "numerical_failure";
    o.exit_code = kNumericalFailure;
  } catch (const std::exception& e) {
    o = Outcome{};
    o.result["error"] = e.what();
    o.certificate["status"] = "numerical_failure";
    o.exit_code = kNumericalFailure;
  }
  o.certificate["exit_code"] = o.exit_code;
  j["inputs"] = in.normalized();
  j["result"] = std::move(o.result);
  j["certificate"] = std::move(o.certificate);
  j["tolerances"] = std::move(o.tolerances);
  j["runtime_ms"] = 0.0;
  j["artifact_version"] = kArtifactVersion;
  const Json& inputs = j["inputs"];
  j["fingerprints"] = {{"input_hash", key},
                       {"grid", inputs.contains("grid") ? inputs["grid"] : Json(nullptr)},
                       {"seed", inputs.contains("seed") ? inputs["seed"] : Json(nullptr)}};
  r.exit_code = o.exit_code;
  if (cache && cacheable) cache->store(key, j);
  j["runtime_ms"] = elapsed();
  return r;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_command_line(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << "usage: fineq <verb> [--flag value ...]\nverbs:";
    for (const auto& v : verbs()) out << ' ' << v;
    out << "\nflags:";
    for (const auto& f : known_options()) out << " --" << f;
    out << " --out --cache-dir --jobs --config\n";
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "fineq: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const InvalidInput& e) {
    err << "fineq: " << e.what() << '\n';
    return kInvalidInput;
  }
  Report r = run(cmd);
  const std::string text = r.json.dump(2) + '\n';
  if (cmd.out.empty()) {
    out << text;
  } else {
    std::ofstream os(cmd.out, std::ios::trunc);
    if (!os) {
      err << "fineq: cannot write " << cmd.out << '\n';
      return kInvalidInput;
    }
    os << text;
  }
  if (r.exit_code == kInvalidInput || r.exit_code == kNumericalFailure)
    err << "fineq: " << r.json["result"].value("error", std::string{}) << '\n';
  return r.exit_code;
}

}  // namespace fineq::cli
