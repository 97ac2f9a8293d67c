#pragma once

#include <map>
#include <optional>
#include <string>

#include "fineq/cli/command.hpp"

namespace fineq::cli {

// Typed access to the raw option strings; every read is recorded as a normalized input.
class Inputs {
 public:
  explicit Inputs(std::map<std::string, std::string> raw) : raw_(std::move(raw)) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::optional<double> maybe_number(const std::string& key);
  int integer(const std::string& key, int fallback);
  std::string text(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);

  const Json& normalized() const { return used_; }
  // Rejects options the verb never read.
  void require_all_used(const std::string& verb) const;

 private:
  std::map<std::string, std::string> raw_;
  Json used_ = Json::object();
};

struct Outcome {
  Json result = Json::object();
  Json certificate = Json::object();
  Json tolerances = Json::object();
  int exit_code = kPass;
};

Json number_or_null(double v);

using Handler = Outcome (*)(Inputs&);
Handler handler_for(const std::string& verb);

}  // namespace fineq::cli
