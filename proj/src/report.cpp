#include "kwp/report.hpp"

#include <fstream>
#include <json.hpp>

namespace kwp {

namespace {
nlohmann::json to_json_obj(const BoundReport& r) {
  return nlohmann::json{
      {"name", r.name},       {"check_id", r.check_id},
      {"lhs", r.lhs},         {"rhs", r.rhs},
      {"margin", r.margin},   {"slack_used", r.slack_used},
      {"pass", r.pass},       {"hard", r.hard},
      {"provenance", r.provenance}};
}
}  // namespace

std::string to_json(const BoundReport& r) { return to_json_obj(r).dump(2); }

std::string to_json(const std::vector<BoundReport>& rs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rs) arr.push_back(to_json_obj(r));
  return arr.dump(2);
}

void write_json(const std::string& path, const std::vector<BoundReport>& rs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report file: " + path);
  out << to_json(rs) << "\n";
}

}  // namespace kwp
