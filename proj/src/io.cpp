#include "tsx/io.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace tsx {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  const auto h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error("ParseError", "line " + std::to_string(line) + ": " + msg);
}

Scalar parse_scalar_at(const std::string& text, std::size_t line) {
  try {
    return Scalar::parse(text);
  } catch (const Error& e) {
    parse_fail(line, e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

Arithmetic parse_arith(const std::string& v, std::size_t line) {
  if (v == "rational") return Arithmetic::rational;
  if (v == "float64") return Arithmetic::float64;
  parse_fail(line, "arithmetic must be rational or float64, got '" + v + "'");
}

ThetaSeq parse_explicit_file(const std::string& text) {
  std::vector<Scalar> values;
  std::optional<Scalar> tail;
  std::istringstream in(text);
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (tail) parse_fail(line, "nothing may follow the tail line");
    if (s.rfind("tail", 0) == 0) {
      tail = parse_scalar_at(trim(s.substr(4)), line);
    } else {
      values.push_back(parse_scalar_at(s, line));
    }
  }
  if (!tail) throw Error("ParseError", "explicit theta file needs a final 'tail <ratio>' line");
  return ThetaSeq::explicit_list(std::move(values), *tail);
}

ThetaSeq parse_theta(const std::string& v, const std::string& base_dir, std::size_t line) {
  auto arg = [&](const std::string& prefix) -> std::optional<std::string> {
    if (v.rfind(prefix, 0) == 0) return v.substr(prefix.size());
    return std::nullopt;
  };
  if (auto a = arg("geometric:")) return ThetaSeq::geometric(parse_scalar_at(*a, line));
  if (auto a = arg("powerlaw:")) return ThetaSeq::power_law(parse_scalar_at(*a, line));
  if (auto a = arg("scaledpowerlaw:")) {
    auto parts = split(*a, ',');
    if (parts.size() != 2) parse_fail(line, "scaledpowerlaw needs <c>,<q>");
    return ThetaSeq::scaled_power_law(parse_scalar_at(parts[0], line), parse_scalar_at(parts[1], line));
  }
  if (v == "logreciprocal") return ThetaSeq::log_reciprocal();
  if (auto a = arg("explicit:")) {
    std::filesystem::path p(*a);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return parse_explicit_file(read_file(p.string()));
  }
  // inline form written by format_space: explicit[v1,v2;tail r]
  if (auto a = arg("explicit[")) {
    if (a->empty() || a->back() != ']') parse_fail(line, "unterminated explicit[...]");
    const std::string body = a->substr(0, a->size() - 1);
    const auto semi = body.find(';');
    if (semi == std::string::npos) parse_fail(line, "explicit[...] needs ';tail <ratio>'");
    std::vector<Scalar> values;
    for (auto& s : split(body.substr(0, semi), ',')) values.push_back(parse_scalar_at(s, line));
    std::string t = trim(body.substr(semi + 1));
    if (t.rfind("tail", 0) != 0) parse_fail(line, "explicit[...] needs ';tail <ratio>'");
    return ThetaSeq::explicit_list(std::move(values), parse_scalar_at(trim(t.substr(4)), line));
  }
  parse_fail(line, "unknown theta specification '" + v + "'");
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SparseVector parse_vector(const std::string& text, Arithmetic mode) {
  std::vector<SparseVector::Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::optional<Coord> last;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    std::istringstream fields(s);
    std::string ks, vs, extra;
    if (!(fields >> ks >> vs) || (fields >> extra)) parse_fail(line, "expected 'coordinate<TAB>value'");
    Coord k = 0;
    try {
      std::size_t used = 0;
      k = std::stol(ks, &used);
      if (used != ks.size()) throw std::invalid_argument(ks);
    } catch (const std::exception&) {
      parse_fail(line, "bad coordinate '" + ks + "'");
    }
    if (k < 1) parse_fail(line, "coordinates start at 1");
    if (last && k <= *last) parse_fail(line, "coordinates must be strictly increasing");
    last = k;
    Scalar v = parse_scalar_at(vs, line).in_mode(mode);
    if (!v.is_zero()) entries.emplace_back(k, std::move(v));
  }
  return SparseVector(std::move(entries));
}

std::string format_vector(const SparseVector& x) {
  std::string out;
  for (auto& [k, v] : x.entries()) out += std::to_string(k) + "\t" + v.str() + "\n";
  return out;
}

SpaceSpec parse_space(const std::string& text, const std::string& base_dir) {
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::istringstream in(text);
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    static const char* known[] = {"kind", "theta", "single_family", "single_theta", "inner_ak", "arithmetic",
                                  "preset", "name"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      parse_fail(line, "unknown key '" + key + "'");
    if (kv.count(key)) parse_fail(line, "duplicate key '" + key + "'");
    kv[key] = {trim(s.substr(eq + 1)), line};
  }
  auto get = [&](const std::string& k) -> const std::pair<std::string, std::size_t>* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };

  SpaceSpec sp;
  if (auto p = get("preset")) {
    sp = SpaceSpec::preset(p->first);
  } else {
    auto kind = get("kind");
    if (!kind) throw Error("ParseError", "space config needs 'kind' or 'preset'");
    if (kind->first == "A" || kind->first == "S") {
      auto th = get("theta");
      if (!th) parse_fail(kind->second, "kind " + kind->first + " needs 'theta'");
      sp.kind = kind->first == "A" ? SpaceSpec::Kind::A : SpaceSpec::Kind::S;
      sp.thetas = parse_theta(th->first, base_dir, th->second);
    } else if (kind->first == "single") {
      auto f = get("single_family");
      auto t = get("single_theta");
      if (!f || !t) parse_fail(kind->second, "kind single needs single_family and single_theta");
      sp.kind = SpaceSpec::Kind::Single;
      try {
        sp.single_family = FamilyExpr::parse(f->first);
      } catch (const Error& e) {
        parse_fail(f->second, e.what());
      }
      sp.single_theta = parse_scalar_at(t->first, t->second);
    } else {
      parse_fail(kind->second, "kind must be A, S or single");
    }
  }
  if (auto a = get("inner_ak")) {
    try {
      sp.inner_ak = std::stoi(a->first);
    } catch (const std::exception&) {
      parse_fail(a->second, "inner_ak must be an integer");
    }
  }
  if (auto a = get("arithmetic")) sp.arithmetic = parse_arith(a->first, a->second);
  if (auto n = get("name")) sp.name = n->first;
  sp.validate();
  return sp;
}

std::string format_space(const SpaceSpec& sp) {
  std::ostringstream os;
  switch (sp.kind) {
    case SpaceSpec::Kind::A:
      os << "kind = A\ntheta = " << sp.thetas.str() << "\n";
      break;
    case SpaceSpec::Kind::S:
      os << "kind = S\ntheta = " << sp.thetas.str() << "\n";
      break;
    case SpaceSpec::Kind::Single:
      os << "kind = single\nsingle_family = " << sp.single_family->str() << "\nsingle_theta = " << sp.single_theta.str()
         << "\n";
      break;
  }
  if (sp.inner_ak) os << "inner_ak = " << *sp.inner_ak << "\n";
  os << "arithmetic = " << (sp.arithmetic == Arithmetic::rational ? "rational" : "float64") << "\n";
  if (!sp.name.empty()) os << "name = " << sp.name << "\n";
  return os.str();
}

SpaceSpec load_space(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) {
    auto dir = std::filesystem::path(arg).parent_path();
    return parse_space(read_file(arg), dir.empty() ? "." : dir.string());
  }
  return SpaceSpec::preset(arg);
}

Json to_json(const SpaceSpec& sp) {
  Json j;
  j["description"] = sp.describe();
  j["config"] = format_space(sp);
  return j;
}

Json to_json(const NormResult& r) {
  Json j;
  j["value"] = r.value.str();
  j["witness"] = to_sexpr(r.witness);
  j["max_n_explored"] = r.max_n_explored;
  return j;
}

namespace {

Json fields_json(const Fields& f) {
  Json j = Json::object();
  for (auto& [k, v] : f) j[k] = v;
  return j;
}

Fields fields_from(const Json& j) {
  Fields f;
  for (auto& [k, v] : j.items()) f.emplace_back(k, v.get<std::string>());
  return f;
}

Json scalars_json(const std::vector<Scalar>& v) {
  Json a = Json::array();
  for (auto& s : v) a.push_back(s.str());
  return a;
}

}  // namespace

Json to_json(const AuditReport& r) {
  Json j;
  j["suite"] = r.suite;
  j["params"] = fields_json(r.params);
  j["seed"] = r.seed;
  j["status"] = r.status;
  j["summary"] = {{"passed", r.passed()}, {"failed", r.failed()}, {"uncounted", r.uncounted()}};
  j["notes"] = r.notes;
  Json rows = Json::array();
  for (auto& row : r.rows) {
    Json x;
    x["id"] = row.id;
    x["values"] = fields_json(row.values);
    x["pass"] = row.pass;
    x["counted"] = row.counted;
    if (!row.note.empty()) x["note"] = row.note;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

AuditReport report_from_json(const Json& j) {
  AuditReport r;
  r.suite = j.at("suite").get<std::string>();
  r.params = fields_from(j.at("params"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.status = j.at("status").get<std::string>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  for (auto& x : j.at("rows")) {
    ReportRow row;
    row.id = x.at("id").get<std::string>();
    row.values = fields_from(x.at("values"));
    row.pass = x.at("pass").get<bool>();
    row.counted = x.at("counted").get<bool>();
    if (x.contains("note")) row.note = x.at("note").get<std::string>();
    r.rows.push_back(std::move(row));
  }
  return r;
}

Json to_json(const SCC& c) {
  Json j;
  j["j"] = c.j;
  j["epsilon"] = c.epsilon.str();
  j["requested_start"] = c.requested_start;
  j["support"] = c.support;
  j["coefficients"] = scalars_json(c.coeffs);
  return j;
}

SCC scc_from_json(const Json& j) {
  SCC c;
  c.j = j.at("j").get<int>();
  c.epsilon = Scalar::parse(j.at("epsilon").get<std::string>());
  c.requested_start = j.at("requested_start").get<Coord>();
  c.support = j.at("support").get<FiniteSet>();
  for (auto& s : j.at("coefficients")) c.coeffs.push_back(Scalar::parse(s.get<std::string>()));
  return c;
}

Json to_json(const AveragingTree& t) {
  Json j;
  j["M"] = t.M;
  j["epsilon"] = t.epsilon.str();
  j["theta"] = t.theta.str();
  j["exact"] = t.exact;
  j["scale"] = t.scale.str();
  j["sizes"] = t.sizes();
  Json levels = Json::array();
  for (std::size_t lv = 0; lv < t.levels.size(); ++lv) {
    Json nodes = Json::array();
    for (auto& n : t.levels[lv]) {
      Json x;
      x["interval"] = {n.x.min_coord(), n.x.max_coord()};
      if (lv > 0) {
        x["children"] = {n.first_child, n.last_child};
        x["k"] = n.k;
      } else {
        x["pool_index"] = n.pool_index;
      }
      // leaf coefficients are uniform on each leaf's support
      x["coefficient"] = n.x.entries().front().second.str();
      x["support_size"] = n.x.size();
      nodes.push_back(std::move(x));
    }
    levels.push_back(std::move(nodes));
  }
  j["levels"] = std::move(levels);
  return j;
}

Json to_json(const TreeCheck& c) {
  Json j;
  Json conds = Json::object();
  for (auto& [k, v] : c.conditions) conds[k] = v;
  j["conditions"] = std::move(conds);
  j["well_formed"] = c.well_formed;
  j["conforming"] = c.conforming;
  j["notes"] = c.notes;
  return j;
}

std::string render_table(const AuditReport& r) {
  std::ostringstream os;
  os << "suite " << r.suite << "  seed " << r.seed << "  status " << r.status << "\n";
  for (auto& [k, v] : r.params) os << "  " << k << " = " << v << "\n";
  for (auto& row : r.rows) {
    os << (row.counted ? (row.pass ? "pass " : "FAIL ") : (row.pass ? "info " : "info*")) << " " << row.id;
    for (auto& [k, v] : row.values) os << "  " << k << "=" << v;
    if (!row.note.empty()) os << "  (" << row.note << ")";
    os << "\n";
  }
  for (auto& n : r.notes) os << "note: " << n << "\n";
  os << "passed " << r.passed() << "  failed " << r.failed() << "  uncounted " << r.uncounted() << "\n";
  return os.str();
}

}  // namespace tsx
