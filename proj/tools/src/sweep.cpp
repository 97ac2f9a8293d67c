#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "fineq/cli/command.hpp"
#include "fineq/error.hpp"

namespace fineq::cli {

namespace {

struct Axis {
  std::string name;
  std::vector<std::string> values;
};

std::vector<Axis> parse_axes(const std::string& spec) {
  std::vector<Axis> axes;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidInput("--param expects name=v1,v2,...");
    Axis a;
    a.name = item.substr(0, eq);
    const auto& known = known_options();
    if (std::find(known.begin(), known.end(), a.name) == known.end() || a.name == "verb" || a.name == "param")
      throw InvalidInput("cannot sweep over '" + a.name + "'");
    std::stringstream vs(item.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ','))
      if (!v.empty()) a.values.push_back(v);
    axes.push_back(std::move(a));
  }
  return axes;
}

// First scalar of the result that summarises a run.
Json headline(const Json& result) {
  for (const char* key : {"value", "inf_estimate", "margin", "w2", "first_zero", "max_value", "max_difference"})
    if (result.contains(key) && !result[key].is_null()) return result[key];
  return nullptr;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

Report sweep(const Command& cmd) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  Json& j = rep.json;
  j["schema_version"] = kSchemaVersion;
  Json echo = Json::object();
  for (const auto& [k, v] : cmd.options) echo[k] = v;
  j["command"] = {{"verb", cmd.verb}, {"options", echo}};
  Json result = Json::object(), certificate = Json::object();
  try {
    auto it = cmd.options.find("verb");
    if (it == cmd.options.end()) throw InvalidInput("sweep needs --verb");
    const std::string verb = it->second;
    if (verb == "sweep" || verb == "report") throw InvalidInput("cannot sweep '" + verb + "'");
    auto pit = cmd.options.find("param");
    std::vector<Axis> axes = parse_axes(pit == cmd.options.end() ? "" : pit->second);
    std::size_t points = axes.empty() ? 0 : 1;
    for (const auto& a : axes) points *= a.values.size();
    if (points > 100000) throw InvalidInput("sweep grid exceeds 1e5 points");

    Command base;
    base.verb = verb;
    base.cache_dir = cmd.cache_dir;
    for (const auto& [k, v] : cmd.options)
      if (k != "verb" && k != "param" && k != "csv") base.options[k] = v;

    std::vector<Report> reports(points);
    std::vector<std::vector<std::string>> coords(points);
    for (std::size_t p = 0; p < points; ++p) {
      std::size_t rest = p;
      for (std::size_t a = axes.size(); a-- > 0;) {
        coords[p].insert(coords[p].begin(), axes[a].values[rest % axes[a].values.size()]);
        rest /= axes[a].values.size();
      }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t p; (p = next++) < points;) {
        Command c = base;
        for (std::size_t a = 0; a < axes.size(); ++a) c.options[axes[a].name] = coords[p][a];
        reports[p] = run(c);
      }
    };
    std::vector<std::thread> pool;
    const int jobs = std::max(1, std::min<int>(cmd.jobs, int(std::max<std::size_t>(points, 1))));
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Json rows = Json::array();
    int failures = 0;
    std::ostringstream csv;
    for (const auto& a : axes) csv << a.name << ',';
    csv << "exit_code,status,value\n";
    for (std::size_t p = 0; p < points; ++p) {
      const Json& rj = reports[p].json;
      Json row = Json::object();
      for (std::size_t a = 0; a < axes.size(); ++a) row[axes[a].name] = coords[p][a];
      row["exit_code"] = reports[p].exit_code;
      row["status"] = rj["certificate"].value("status", std::string{});
      row["value"] = headline(rj["result"]);
      if (reports[p].exit_code != kPass) {
        ++failures;
        if (rj["result"].contains("error")) row["error"] = rj["result"]["error"];
      }
      for (std::size_t a = 0; a < axes.size(); ++a) csv << coords[p][a] << ',';
      csv << reports[p].exit_code << ',' << csv_cell(row["status"]) << ',' << csv_cell(row["value"]) << '\n';
      rows.push_back(std::move(row));
    }
    if (auto cit = cmd.options.find("csv"); cit != cmd.options.end()) {
      std::ofstream os(cit->second, std::ios::trunc);
      if (!os) throw InvalidInput("cannot write " + cit->second);
      os << csv.str();
    }
    result["verb"] = verb;
    Json names = Json::array();
    for (const auto& a : axes) names.push_back(a.name);
    result["parameters"] = names;
    result["points"] = points;
    result["failures"] = failures;
    result["rows"] = rows;
    rep.exit_code = failures == 0 ? kPass : kFail;
    certificate["status"] = failures == 0 ? "pass" : "fail";
  } catch (const InvalidInput& e) {
    result = {{"error", e.what()}};
    certificate["status"] = "invalid_input";
    rep.exit_code = kInvalidInput;
  }
  certificate["exit_code"] = rep.exit_code;
  j["inputs"] = echo;
  j["result"] = result;
  j["certificate"] = certificate;
  j["tolerances"] = Json::object();
  j["runtime_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  j["artifact_version"] = kArtifactVersion;
  j["fingerprints"] = {{"input_hash", ResultCache::key_for(cmd)}, {"grid", nullptr}, {"seed", nullptr}};
  return rep;
}

}  // namespace fineq::cli
