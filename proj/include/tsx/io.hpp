#ifndef tsx_io_hpp
#define tsx_io_hpp

#include "tsx/averages.hpp"
#include "tsx/norm.hpp"
#include "tsx/report.hpp"

#include "json.hpp"

#include <string>

namespace tsx {

using Json = nlohmann::ordered_json;

// "coordinate<TAB>value" lines, '#' comments; errors name the line
SparseVector parse_vector(const std::string& text, Arithmetic mode = Arithmetic::rational);
std::string format_vector(const SparseVector& x);

// key = value config; explicit:<path> is resolved against base_dir
SpaceSpec parse_space(const std::string& text, const std::string& base_dir = ".");
std::string format_space(const SpaceSpec& space);
// preset name, or path of a config file
SpaceSpec load_space(const std::string& arg);

std::string read_file(const std::string& path);

Json to_json(const SpaceSpec& space);
Json to_json(const NormResult& r);
Json to_json(const AuditReport& r);
AuditReport report_from_json(const Json& j);
Json to_json(const SCC& c);
SCC scc_from_json(const Json& j);
Json to_json(const AveragingTree& t);
Json to_json(const TreeCheck& c);

std::string render_table(const AuditReport& r);

}  // namespace tsx

#endif
