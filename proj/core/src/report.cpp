#include "carnot/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace carnot {

const char* status_name(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::Pass: return "pass";
    case CheckResult::Status::Fail: return "fail";
    case CheckResult::Status::Skip: return "skip";
  }
  return "?";
}

void Report::add(std::string name, bool pass, double deviation, std::string location) {
  checks.push_back({std::move(name),
                    pass ? CheckResult::Status::Pass : CheckResult::Status::Fail, deviation,
                    std::move(location)});
}

void Report::skip(std::string name, std::string why) {
  checks.push_back({std::move(name), CheckResult::Status::Skip, 0.0, std::move(why)});
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed(); });
}

double Report::worst() const {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.deviation);
  return w;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["manifold"] = manifold;
  j["seed"] = seed;
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["status"] = status_name(c.status);
    e["deviation"] = c.deviation;
    e["location"] = c.location;
    cs.push_back(std::move(e));
  }
  j["checks"] = std::move(cs);
  j["payload"] = payload;
  return j;
}

std::string Report::human() const {
  std::ostringstream os;
  os << command << " on " << manifold << " (seed " << seed << ")\n";
  for (const auto& c : checks) {
    os << "  [" << (c.status == CheckResult::Status::Pass
                        ? "PASS"
                        : c.status == CheckResult::Status::Fail ? "FAIL" : "SKIP")
       << "] " << c.name;
    if (c.deviation != 0.0) os << "  (worst deviation " << std::scientific << std::setprecision(3)
                               << c.deviation << ")" << std::defaultfloat;
    if (!c.location.empty()) os << "  @ " << c.location;
    os << "\n";
  }
  return os.str();
}

}  // namespace carnot
