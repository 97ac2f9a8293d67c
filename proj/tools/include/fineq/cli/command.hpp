#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fineq::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "fineq-0.1.0";

enum ExitCode : int { kPass = 0, kFail = 1, kInvalidInput = 2, kNumericalFailure = 3 };

// Flags accepted on the command line and as keys of a key=value config file.
const std::vector<std::string>& known_options();
const std::vector<std::string>& verbs();

struct Command {
  std::string verb;
  std::map<std::string, std::string> options;  // flag name without dashes
  std::string out;                             // report path, empty for stdout
  std::string cache_dir;                       // empty disables the cache
  int jobs = 1;
};

struct Report {
  Json json;
  int exit_code = kPass;
  bool from_cache = false;

  // The report without runtime_ms.
  std::string payload() const;
};

// Parses argv (argv[0] is the program name). --config files are merged under explicit flags.
Command parse_command_line(int argc, const char* const* argv);
std::map<std::string, std::string> read_config(std::istream& is);

Report run(const Command& cmd);
Report sweep(const Command& cmd);

// Parses, dispatches and writes the report; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Content-addressed report store, one JSON file per input hash.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path root);

  static std::string key_for(const Command& cmd);
  std::optional<Json> load(const std::string& key) const;
  // Written to a temporary file and renamed into place.
  void store(const std::string& key, const Json& report) const;
  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::mutex& lock_for(const std::string& key) const;
  std::filesystem::path root_;
};

// Number or "inf"/"-inf"/"nan".
Json number(double v);

}  // namespace fineq::cli
