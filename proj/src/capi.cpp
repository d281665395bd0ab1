#include "tsx/tsx.h"

#include "tsx/audit.hpp"
#include "tsx/io.hpp"
#include "tsx/surgery.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <set>
#include <sstream>

struct tsx_space {
  tsx::SpaceSpec spec;
};

struct tsx_vector {
  tsx::SparseVector x;
};

namespace {

using tsx::Json;

thread_local std::string g_error;
thread_local std::string g_code;

tsx_status status_for(const std::string& code) {
  static const std::set<std::string> hypothesis = {"HypothesisViolated", "HypothesisUnmet", "IrrationalInRationalMode",
                                                   "NotExact", "Unbounded", "DivisionByZero"};
  static const std::set<std::string> budget = {"SizeOverflow", "PoolExhausted", "InsufficientPool", "SupportTooLarge",
                                               "BudgetExceeded"};
  if (hypothesis.count(code)) return TSX_ERR_HYPOTHESIS;
  if (budget.count(code)) return TSX_ERR_BUDGET;
  if (code == "Internal") return TSX_ERR_INTERNAL;
  return TSX_ERR_USAGE;
}

template <class F>
tsx_status guarded(F f) {
  g_error.clear();
  g_code.clear();
  try {
    f();
    return TSX_OK;
  } catch (const tsx::Error& e) {
    g_error = e.what();
    g_code = e.code();
    return status_for(e.code());
  } catch (const Json::exception& e) {
    g_error = std::string("malformed request: ") + e.what();
    g_code = "InvalidInput";
    return TSX_ERR_USAGE;
  } catch (const std::exception& e) {
    g_error = e.what();
    g_code = "Internal";
    return TSX_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// ---- request helpers ----

std::string need_str(const Json& r, const char* key) {
  if (!r.contains(key)) throw tsx::Error("InvalidInput", std::string("missing field '") + key + "'");
  return r.at(key).get<std::string>();
}

tsx::Arithmetic arith_of(const std::string& s) {
  if (s == "rational") return tsx::Arithmetic::rational;
  if (s == "float64") return tsx::Arithmetic::float64;
  throw tsx::Error("InvalidInput", "arithmetic must be rational or float64");
}

tsx::SpaceSpec space_of(const Json& r) {
  tsx::SpaceSpec sp = tsx::load_space(need_str(r, "space"));
  if (r.contains("arithmetic")) sp.arithmetic = arith_of(r.at("arithmetic").get<std::string>());
  if (r.contains("inner_ak")) {
    sp.inner_ak = r.at("inner_ak").get<int>();
    sp.validate();
  }
  return sp;
}

tsx::SparseVector vector_of(const Json& r, tsx::Arithmetic a, const char* key = "vector") {
  const std::string text_key = std::string(key) + "_text";
  if (r.contains(text_key)) return tsx::parse_vector(r.at(text_key).get<std::string>(), a);
  const std::string path = need_str(r, key);
  try {
    return tsx::parse_vector(tsx::read_file(path), a);
  } catch (const tsx::Error& e) {
    if (e.code() == "ParseError") throw tsx::Error("ParseError", path + ": " + e.what());
    throw;
  }
}

tsx::TreeFunctional functional_of(const Json& r) {
  if (r.contains("functional_text")) return tsx::parse_sexpr(r.at("functional_text").get<std::string>());
  return tsx::parse_sexpr(tsx::read_file(need_str(r, "functional")));
}

// a block starts at each break coordinate
std::vector<tsx::SparseVector> blocks_of(const tsx::SparseVector& v, const std::vector<tsx::Coord>& breaks) {
  std::vector<tsx::SparseVector> out;
  tsx::Coord lo = 1;
  for (std::size_t i = 0; i <= breaks.size(); ++i) {
    const tsx::Coord hi = i < breaks.size() ? breaks[i] - 1 : std::numeric_limits<tsx::Coord>::max();
    auto b = v.restrict_range(lo, hi);
    if (!b.empty()) out.push_back(std::move(b));
    if (i < breaks.size()) lo = breaks[i];
  }
  return out;
}

std::vector<tsx::Coord> breaks_of(const Json& r, const char* key = "breaks") {
  if (!r.contains(key)) return {};
  return tsx::parse_set(r.at(key).get<std::string>());
}

tsx::Scalar scalar_of(const Json& r, const char* key, const std::string& dflt) {
  return tsx::Scalar::parse(r.contains(key) ? r.at(key).get<std::string>() : dflt);
}

Json decomposition_json(const tsx::Decomposition& d) {
  Json j;
  j["set"] = tsx::set_str(d.set);
  Json pieces = Json::array();
  for (auto& p : d.pieces) pieces.push_back(decomposition_json(p));
  j["pieces"] = std::move(pieces);
  return j;
}

struct Response {
  bool ok = true;
  Json result;
  std::string text;
};

Response op_norm(const Json& r, bool witness_only) {
  auto sp = space_of(r);
  auto x = vector_of(r, sp.arithmetic);
  auto res = tsx::norm(sp, x);
  Response out;
  out.result = tsx::to_json(res);
  const std::string w = tsx::to_sexpr(res.witness);
  if (witness_only) {
    auto viol = tsx::validate(sp, res.witness);
    out.result["valid"] = viol.empty();
    out.result["eval"] = tsx::eval_functional(sp, res.witness, x).str();
    out.text = w + "\n";
  } else {
    out.text = res.value.str() + "\n" + w + "\n";
  }
  return out;
}

Response op_family(const Json& r, const std::string& what) {
  const auto fam = tsx::FamilyExpr::parse(need_str(r, "family"));
  Response out;
  if (what == "member") {
    const bool m = tsx::is_member(fam, tsx::parse_set(need_str(r, "set")));
    out.result = {{"member", m}};
    out.text = m ? "true\n" : "false\n";
  } else if (what == "admissible") {
    std::vector<tsx::FiniteSet> sets;
    for (auto& s : r.at("sets")) sets.push_back(tsx::parse_set(s.get<std::string>()));
    const bool a = tsx::is_admissible(fam, sets);
    out.result = {{"admissible", a}};
    out.text = a ? "true\n" : "false\n";
  } else if (what == "decompose") {
    auto d = tsx::decompose(fam, tsx::parse_set(need_str(r, "set")));
    out.result["member"] = d.has_value();
    out.result["decomposition"] = d ? decomposition_json(*d) : Json();
    out.text = d ? out.result["decomposition"].dump() + "\n" : "not a member\n";
  } else if (what == "maxweight") {
    auto x = vector_of(r, r.contains("arithmetic") ? arith_of(r.at("arithmetic").get<std::string>())
                                                    : tsx::Arithmetic::rational);
    std::map<tsx::Coord, tsx::Scalar> w(x.entries().begin(), x.entries().end());
    auto best = tsx::max_weight_subset(fam, w);
    out.result = {{"set", tsx::set_str(best.set)}, {"value", best.value.str()}};
    out.text = tsx::set_str(best.set) + "\t" + best.value.str() + "\n";
  } else {
    throw tsx::Error("InvalidInput", "unknown family operation '" + what + "'");
  }
  return out;
}

tsx::AveragingTree tree_of(const Json& r) {
  std::optional<tsx::Scalar> relaxed;
  if (r.contains("relaxed_scale")) relaxed = scalar_of(r, "relaxed_scale", "1");
  return tsx::build_averaging_tree(tsx::BlockPool::basis(r.value("start", 1L)), r.value("M", 1),
                                   scalar_of(r, "epsilon", "1/2"), scalar_of(r, "theta", "1/2"), relaxed,
                                   r.value("budget", tsx::kDefaultLeafBudget));
}

Response op_avg(const Json& r, bool check) {
  auto tree = tree_of(r);
  auto tc = tsx::check_averaging_tree(tree);
  Response out;
  out.result["tree"] = tsx::to_json(tree);
  out.result["check"] = tsx::to_json(tc);
  std::ostringstream os;
  os << "levels " << tree.levels.size() << "  leaves " << tree.leaf_count() << "  sizes";
  for (long s : tree.sizes()) os << " " << s;
  os << "\nwell_formed " << (tc.well_formed ? "true" : "false") << "  conforming " << (tc.conforming ? "true" : "false")
     << "\n";
  out.ok = tc.well_formed;
  if (check) {
    auto rep = tsx::audit_tav(space_of(r), tree, r.value("delta", 0.5));
    out.result["audit"] = tsx::to_json(rep);
    os << tsx::render_table(rep);
    out.ok = out.ok && rep.ok();
  }
  out.text = os.str();
  return out;
}

Response op_scc(const Json& r, bool check) {
  Response out;
  if (!check) {
    auto c = tsx::build_scc(r.value("j", 1), scalar_of(r, "epsilon", "1/2"), r.value("start", 1L));
    out.result = tsx::to_json(c);
    out.text = out.result.dump() + "\n";
    return out;
  }
  const Json src = r.contains("scc") ? r.at("scc") : Json::parse(tsx::read_file(need_str(r, "scc_path")));
  auto c = tsx::scc_from_json(src);
  const bool valid = tsx::check_scc(c);
  out.result["valid"] = valid;
  if (c.j >= 1 && !c.support.empty() && c.support.size() == c.coeffs.size()) {
    auto mass = tsx::scc_max_mass(c);
    out.result["max_mass_set"] = tsx::set_str(mass.set);
    out.result["max_mass"] = mass.value.str();
  }
  out.ok = valid;
  out.text = valid ? "valid\n" : "invalid\n";
  return out;
}

Response op_split(const Json& r) {
  auto sp = space_of(r);
  auto f = functional_of(r);
  auto parts = tsx::split_xk(sp, f);
  Response out;
  Json arr = Json::array();
  for (auto& p : parts) {
    arr.push_back(tsx::to_sexpr(p));
    out.text += tsx::to_sexpr(p) + "\n";
  }
  out.result["parts"] = std::move(arr);
  out.result["same_leaves"] = tsx::same_leaf_multiset(parts, f);
  return out;
}

Response op_comparable(const Json& r) {
  auto sp = space_of(r);
  auto f = functional_of(r);
  auto blocks = blocks_of(vector_of(r, sp.arithmetic), breaks_of(r));
  auto res = tsx::make_comparable_ex(sp, f, blocks);
  Response out;
  out.result["functional"] = tsx::to_sexpr(res.f);
  out.result["method"] = res.method;
  out.result["before"] = res.before.str();
  out.result["after"] = res.after.str();
  out.result["constant"] = res.constant;
  out.result["comparable"] = tsx::is_comparable(res.f, blocks);
  out.text = tsx::to_sexpr(res.f) + "\n";
  return out;
}

Response op_audit(const Json& r) {
  const std::string suite = need_str(r, "suite");
  const std::uint64_t seed = r.value("seed", std::uint64_t{1});
  const unsigned threads = r.value("threads", 1u);
  tsx::AuditReport rep;
  if (suite == "inclusion") {
    rep = tsx::audit_family_inclusion(tsx::FamilyExpr::parse(need_str(r, "lhs")),
                                      tsx::FamilyExpr::parse(need_str(r, "rhs")), r.value("ground", 10L));
  } else if (suite == "laws") {
    rep = tsx::audit_family_laws(tsx::FamilyExpr::parse(need_str(r, "family")), r.value("ground", 12L));
  } else if (suite == "sch1") {
    rep = tsx::audit_sch1(r.value("ground", 12L), r.value("max_n", 2));
  } else if (suite == "l3") {
    rep = tsx::audit_l3(r.value("m", 2), r.value("trials", std::size_t{500}), seed, threads);
  } else if (suite == "pest") {
    rep = tsx::audit_pest(space_of(r), r.value("trials", std::size_t{500}), seed, threads);
  } else if (suite == "kriv") {
    tsx::KrivOptions o;
    o.N = r.value("N", 1L);
    o.r = r.value("r", 1.0);
    o.seed = seed;
    o.budget = r.value("budget", o.budget);
    o.relaxed = r.value("relaxed", false);
    rep = tsx::audit_kriv(space_of(r), o);
  } else if (suite == "tav") {
    rep = tsx::audit_tav(space_of(r), tree_of(r), r.value("delta", 0.5));
  } else if (suite == "domination") {
    auto sp = space_of(r);
    auto ys = blocks_of(vector_of(r, sp.arithmetic, "ys"), breaks_of(r, "ys_breaks"));
    auto zs = blocks_of(vector_of(r, sp.arithmetic, "zs"), breaks_of(r, "zs_breaks"));
    auto est = tsx::estimate_domination(sp, ys, zs, r.value("trials", std::size_t{1000}), seed);
    rep.suite = "domination";
    rep.seed = seed;
    rep.params = {{"space", sp.describe()}, {"length", std::to_string(ys.size())}};
    tsx::ReportRow row{"estimate", {{"constant", tsx::format_double(est.estimate)},
                                    {"samples", std::to_string(est.samples)}}, true, false, "lower bound"};
    rep.rows.push_back(std::move(row));
  } else {
    throw tsx::Error("InvalidInput", "unknown audit suite '" + suite + "'");
  }
  Response out;
  out.result = tsx::to_json(rep);
  out.text = tsx::render_table(rep);
  out.ok = rep.ok();
  return out;
}

Response op_regularize(const Json& r) {
  tsx::SpaceSpec sp = tsx::parse_space("kind = A\ntheta = " + need_str(r, "theta") + "\n");
  const std::string m = r.value("mode", std::string("product"));
  if (m != "product" && m != "sum") throw tsx::Error("InvalidInput", "mode must be product or sum");
  const auto mode = m == "product" ? tsx::RegMode::product : tsx::RegMode::sum;
  const auto a = arith_of(r.value("arithmetic", std::string("rational")));
  const long horizon = r.value("horizon", 16L);
  auto values = tsx::regularize(sp.thetas, mode, horizon, a);
  auto rep = tsx::check_regularity(sp.thetas, mode, horizon, a);
  Response out;
  Json vals = Json::array();
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    vals.push_back(values[i].str());
    os << i + 1 << "\t" << values[i].str() << "\n";
  }
  out.result["regularized"] = std::move(vals);
  out.result["monotone"] = rep.monotone;
  out.result["super_multiplicative"] = rep.super_multiplicative;
  out.result["ratio_non_increasing"] = rep.ratio_non_increasing;
  out.result["theta_limit_estimate"] = rep.theta_limit_estimate.str();
  out.result["violations"] = rep.violations;
  for (auto& v : rep.violations) os << "violation: " << v << "\n";
  out.text = os.str();
  return out;
}

Response dispatch(const Json& r) {
  const std::string op = need_str(r, "op");
  if (op == "norm") return op_norm(r, false);
  if (op == "witness") return op_norm(r, true);
  if (op.rfind("family.", 0) == 0) return op_family(r, op.substr(7));
  if (op == "avg.build") return op_avg(r, false);
  if (op == "avg.check") return op_avg(r, true);
  if (op == "scc.build") return op_scc(r, false);
  if (op == "scc.check") return op_scc(r, true);
  if (op == "split") return op_split(r);
  if (op == "comparable") return op_comparable(r);
  if (op == "audit") return op_audit(r);
  if (op == "regularize") return op_regularize(r);
  throw tsx::Error("InvalidInput", "unknown operation '" + op + "'");
}

}  // namespace

extern "C" {

const char* tsx_last_error(void) { return g_error.c_str(); }
const char* tsx_last_error_code(void) { return g_code.c_str(); }
const char* tsx_version(void) { return "0.1.0"; }

tsx_status tsx_space_open(const char* name_or_path, tsx_space** out) {
  if (!name_or_path || !out) return TSX_ERR_NULL;
  return guarded([&] { *out = new tsx_space{tsx::load_space(name_or_path)}; });
}

tsx_status tsx_space_parse(const char* config_text, tsx_space** out) {
  if (!config_text || !out) return TSX_ERR_NULL;
  return guarded([&] { *out = new tsx_space{tsx::parse_space(config_text)}; });
}

tsx_status tsx_space_set_arithmetic(tsx_space* space, int float64) {
  if (!space) return TSX_ERR_NULL;
  space->spec.arithmetic = float64 ? tsx::Arithmetic::float64 : tsx::Arithmetic::rational;
  return TSX_OK;
}

void tsx_space_free(tsx_space* space) { delete space; }

tsx_status tsx_vector_parse(const char* text, int float64, tsx_vector** out) {
  if (!text || !out) return TSX_ERR_NULL;
  return guarded([&] {
    *out = new tsx_vector{tsx::parse_vector(text, float64 ? tsx::Arithmetic::float64 : tsx::Arithmetic::rational)};
  });
}

tsx_status tsx_vector_size(const tsx_vector* v, uint64_t* out) {
  if (!v || !out) return TSX_ERR_NULL;
  *out = v->x.size();
  return TSX_OK;
}

void tsx_vector_free(tsx_vector* v) { delete v; }

tsx_status tsx_norm_value(const tsx_space* space, const tsx_vector* v, char** value) {
  if (!space || !v || !value) return TSX_ERR_NULL;
  return guarded([&] { *value = dup(tsx::norm_value(space->spec, v->x.in_mode(space->spec.arithmetic)).str()); });
}

tsx_status tsx_norm_json(const tsx_space* space, const tsx_vector* v, char** json) {
  if (!space || !v || !json) return TSX_ERR_NULL;
  return guarded(
      [&] { *json = dup(tsx::to_json(tsx::norm(space->spec, v->x.in_mode(space->spec.arithmetic))).dump()); });
}

tsx_status tsx_call(const char* request_json, char** response_json) {
  if (!request_json || !response_json) return TSX_ERR_NULL;
  *response_json = nullptr;
  return guarded([&] {
    Json req;
    try {
      req = Json::parse(request_json);
    } catch (const Json::parse_error& e) {
      throw tsx::Error("ParseError", std::string("request: ") + e.what());
    }
    Response res = dispatch(req);
    Json j;
    j["ok"] = res.ok;
    j["result"] = std::move(res.result);
    j["text"] = res.text;
    *response_json = dup(j.dump());
  });
}

void tsx_string_free(char* s) { std::free(s); }

}  // extern "C"
