#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "fineq/cli/command.hpp"
#include "fineq/radial_ode.hpp"

namespace fineq::cli {

namespace {

// Options that only steer where output goes.
bool affects_result(const std::string& key) { return key != "trace" && key != "csv"; }

}  // namespace

ResultCache::ResultCache(std::filesystem::path root) : root_(std::move(root)) {}

std::string ResultCache::key_for(const Command& cmd) {
  std::string text = std::string(kArtifactVersion) + '\n' + cmd.verb + '\n';
  for (const auto& [k, v] : cmd.options)
    if (affects_result(k)) text += k + '=' + v + '\n';
  return fnv1a_hex(text);
}

std::filesystem::path ResultCache::path_for(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".json");
}

std::mutex& ResultCache::lock_for(const std::string& key) const {
  static std::mutex stripes[64];
  return stripes[std::hash<std::string>{}(key) % 64];
}

std::optional<Json> ResultCache::load(const std::string& key) const {
  std::lock_guard<std::mutex> guard(lock_for(key));
  std::ifstream is(path_for(key));
  if (!is) return std::nullopt;
  try {
    Json j = Json::parse(is);
    if (j.value("artifact_version", std::string{}) != kArtifactVersion) return std::nullopt;
    if (j.value("schema_version", 0) != kSchemaVersion) return std::nullopt;
    return j;
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

void ResultCache::store(const std::string& key, const Json& report) const {
  std::lock_guard<std::mutex> guard(lock_for(key));
  const auto target = path_for(key);
  std::filesystem::create_directories(target.parent_path());
  static std::atomic<unsigned> counter{0};
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id() << '.' << counter++;
  const auto tmp = target.string() + suffix.str();
  {
    std::ofstream os(tmp, std::ios::trunc);
    os << report.dump(2) << '\n';
    if (!os) throw std::runtime_error("cannot write cache entry " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace fineq::cli
