#ifndef tsx_report_hpp
#define tsx_report_hpp

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tsx {

using Fields = std::vector<std::pair<std::string, std::string>>;

struct ReportRow {
  std::string id;
  Fields values;
  bool pass = true;
  // negative controls and informational rows never count toward pass/fail
  bool counted = true;
  std::string note;
};

struct AuditReport {
  std::string suite;
  Fields params;
  std::vector<ReportRow> rows;
  std::uint64_t seed = 0;
  std::string status = "ok";  // or an error code such as BudgetExceeded
  std::vector<std::string> notes;

  std::size_t passed() const;
  std::size_t failed() const;
  std::size_t uncounted() const;
  bool ok() const { return status == "ok" && failed() == 0; }
};

}  // namespace tsx

#endif
