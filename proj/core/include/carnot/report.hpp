#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace carnot {

struct CheckResult {
  std::string name;
  enum class Status { Pass, Fail, Skip } status = Status::Pass;
  double deviation = 0.0;
  std::string location;  // point or identity the deviation belongs to

  bool passed() const { return status != Status::Fail; }
};

const char* status_name(CheckResult::Status s);

/// Uniform command output: named checks plus a command-specific payload.
/// Machine output is ordered JSON with stable key order, so identical
/// invocations with identical seeds are byte-identical.
struct Report {
  std::string command;
  std::string manifold;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  void add(std::string name, bool pass, double deviation = 0.0, std::string location = {});
  void skip(std::string name, std::string why);
  bool passed() const;
  double worst() const;

  nlohmann::ordered_json to_json() const;
  std::string human() const;
};

}  // namespace carnot
