#pragma once

#include <string>
#include <vector>

namespace kwp {

/// Structured record of one inequality / identity check.
struct BoundReport {
  std::string name;
  std::string check_id;  // stable identifier of the checked statement
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;      // lhs - rhs (oriented so >= 0 means pass)
  double slack_used = 0.0;  // allowed discretization slack
  bool pass = false;        // margin >= -slack_used
  bool hard = true;         // hard assertion vs discretization-limited margin
  std::vector<std::string> provenance;

  void finalize() { pass = margin >= -slack_used; }
};

std::string to_json(const BoundReport& r);
std::string to_json(const std::vector<BoundReport>& rs);
void write_json(const std::string& path, const std::vector<BoundReport>& rs);

}  // namespace kwp
