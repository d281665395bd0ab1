#include "tsx/tsx.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

using Json = nlohmann::ordered_json;

namespace {

enum class Kind { Str, Int, UInt, Real, Flag, List };

struct Binding {
  CLI::Option* opt;
  std::string key;
  Kind kind;
  std::shared_ptr<std::string> s = std::make_shared<std::string>();
  std::shared_ptr<std::vector<std::string>> list = std::make_shared<std::vector<std::string>>();
  std::shared_ptr<bool> flag = std::make_shared<bool>(false);
};

// fills a request object from the options that were given on the command line
class Request {
 public:
  Request(CLI::App* app, std::string op) : app_(app), op_(std::move(op)) {}

  Request& add(const std::string& name, const std::string& key, Kind kind, const std::string& help,
               bool required = false) {
    Binding b{nullptr, key, kind};
    if (kind == Kind::Flag) b.opt = app_->add_flag(name, *b.flag, help);
    else if (kind == Kind::List) b.opt = app_->add_option(name, *b.list, help);
    else b.opt = app_->add_option(name, *b.s, help);
    if (required) b.opt->required();
    bindings_.push_back(b);
    return *this;
  }

  CLI::App* app() const { return app_; }

  Json build() const {
    Json j;
    j["op"] = op_;
    for (auto& b : bindings_) {
      if (b.opt->count() == 0) continue;
      switch (b.kind) {
        case Kind::Str: j[b.key] = *b.s; break;
        case Kind::Int: j[b.key] = std::stoll(*b.s); break;
        case Kind::UInt: j[b.key] = std::stoull(*b.s); break;
        case Kind::Real: j[b.key] = std::stod(*b.s); break;
        case Kind::Flag: j[b.key] = *b.flag; break;
        case Kind::List: j[b.key] = *b.list; break;
      }
    }
    return j;
  }

 private:
  CLI::App* app_;
  std::string op_;
  std::vector<Binding> bindings_;
};

int exit_code(tsx_status st) {
  switch (st) {
    case TSX_OK: return 0;
    case TSX_ERR_USAGE:
    case TSX_ERR_NULL: return 2;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed Tsirelson space toolkit"};
  app.require_subcommand(1);
  std::string json_path;
  auto* json_opt = app.add_option("--json", json_path, "write JSON to the path ('-' for standard output)")
                       ->expected(0, 1)
                       ->default_str("-");
  std::string arithmetic;
  auto* arith_opt = app.add_option("--arithmetic", arithmetic, "override arithmetic mode")
                        ->check(CLI::IsMember({"rational", "float64"}));
  std::string seed;
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized suites");
  app.fallthrough();

  std::vector<std::unique_ptr<Request>> requests;
  auto make = [&](CLI::App* sub, const std::string& op) -> Request& {
    requests.push_back(std::make_unique<Request>(sub, op));
    return *requests.back();
  };

  for (const char* name : {"norm", "witness"}) {
    auto* sub = app.add_subcommand(name, std::string(name) == "norm" ? "norm of a vector" : "norming functional");
    make(sub, name)
        .add("--space", "space", Kind::Str, "preset name or config file", true)
        .add("--vector", "vector", Kind::Str, "vector file", true);
  }

  auto* fam = app.add_subcommand("family", "family membership queries");
  fam->require_subcommand(1);
  make(fam->add_subcommand("member", "is the set a member"), "family.member")
      .add("--family", "family", Kind::Str, "family expression", true)
      .add("--set", "set", Kind::Str, "comma separated coordinates", true);
  make(fam->add_subcommand("admissible", "are the sets admissible"), "family.admissible")
      .add("--family", "family", Kind::Str, "family expression", true)
      .add("--sets", "sets", Kind::List, "successive sets", true);
  make(fam->add_subcommand("decompose", "decomposition witness"), "family.decompose")
      .add("--family", "family", Kind::Str, "family expression", true)
      .add("--set", "set", Kind::Str, "comma separated coordinates", true);
  make(fam->add_subcommand("maxweight", "maximum weight member"), "family.maxweight")
      .add("--family", "family", Kind::Str, "family expression", true)
      .add("--weights", "vector", Kind::Str, "vector file of weights", true);

  auto* avg = app.add_subcommand("avg", "averaging trees");
  avg->require_subcommand(1);
  for (const char* name : {"build", "check"}) {
    auto& r = make(avg->add_subcommand(name, std::string(name) == "build" ? "build a tree" : "build and audit a tree"),
                   std::string("avg.") + name)
                  .add("--M", "M", Kind::Int, "depth")
                  .add("--epsilon", "epsilon", Kind::Str, "epsilon")
                  .add("--theta", "theta", Kind::Str, "theta")
                  .add("--start", "start", Kind::Int, "first pool coordinate")
                  .add("--relaxed-scale", "relaxed_scale", Kind::Str, "divide the size bounds")
                  .add("--budget", "budget", Kind::UInt, "leaf budget");
    if (std::string(name) == "check")
      r.add("--space", "space", Kind::Str, "space", true).add("--delta", "delta", Kind::Real, "delta");
  }

  auto* scc = app.add_subcommand("scc", "special convex combinations");
  scc->require_subcommand(1);
  make(scc->add_subcommand("build", "build a combination"), "scc.build")
      .add("--j", "j", Kind::Int, "level", true)
      .add("--epsilon", "epsilon", Kind::Str, "epsilon", true)
      .add("--start", "start", Kind::Int, "first coordinate");
  make(scc->add_subcommand("check", "check a combination"), "scc.check")
      .add("--file", "scc_path", Kind::Str, "JSON file", true);

  make(app.add_subcommand("split", "split an X_k functional into X parts"), "split")
      .add("--space", "space", Kind::Str, "space", true)
      .add("--inner-ak", "inner_ak", Kind::Int, "k")
      .add("--functional", "functional", Kind::Str, "functional file")
      .add("--sexpr", "functional_text", Kind::Str, "functional text");
  make(app.add_subcommand("comparable", "comparable functional for blocks"), "comparable")
      .add("--space", "space", Kind::Str, "space", true)
      .add("--functional", "functional", Kind::Str, "functional file")
      .add("--sexpr", "functional_text", Kind::Str, "functional text")
      .add("--vector", "vector", Kind::Str, "vector file", true)
      .add("--breaks", "breaks", Kind::Str, "block start coordinates");

  auto* audit = app.add_subcommand("audit", "verification suites");
  std::string suite;
  audit->add_option("suite", suite, "inclusion|laws|sch1|l3|pest|kriv|tav|domination")->required();
  make(audit, "audit")
      .add("--lhs", "lhs", Kind::Str, "left family")
      .add("--rhs", "rhs", Kind::Str, "right family")
      .add("--family", "family", Kind::Str, "family")
      .add("--ground", "ground", Kind::Int, "ground set size")
      .add("--max-n", "max_n", Kind::Int, "largest n")
      .add("--m", "m", Kind::Int, "level")
      .add("--trials", "trials", Kind::UInt, "instances")
      .add("--threads", "threads", Kind::UInt, "worker threads")
      .add("--space", "space", Kind::Str, "space")
      .add("--N", "N", Kind::Int, "number of averages")
      .add("--r", "r", Kind::Real, "exponent r")
      .add("--budget", "budget", Kind::UInt, "support budget")
      .add("--relaxed", "relaxed", Kind::Flag, "desk-scale mode")
      .add("--M", "M", Kind::Int, "tree depth")
      .add("--epsilon", "epsilon", Kind::Str, "epsilon")
      .add("--theta", "theta", Kind::Str, "theta")
      .add("--delta", "delta", Kind::Real, "delta")
      .add("--relaxed-scale", "relaxed_scale", Kind::Str, "divide the size bounds")
      .add("--ys", "ys", Kind::Str, "first block sequence file")
      .add("--zs", "zs", Kind::Str, "second block sequence file")
      .add("--ys-breaks", "ys_breaks", Kind::Str, "block starts in ys")
      .add("--zs-breaks", "zs_breaks", Kind::Str, "block starts in zs");

  make(app.add_subcommand("regularize", "regularize a weight sequence"), "regularize")
      .add("--theta", "theta", Kind::Str, "weight sequence", true)
      .add("--mode", "mode", Kind::Str, "product|sum")
      .add("--horizon", "horizon", Kind::Int, "horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const Request* chosen = nullptr;
  for (auto& r : requests)
    if (r->app()->parsed() && (!chosen || r->app()->get_parent() == chosen->app())) chosen = r.get();
  if (!chosen) {
    std::cerr << "error: no command given\n";
    return 2;
  }

  Json req;
  try {
    req = chosen->build();
  } catch (const std::exception& e) {
    std::cerr << "error: bad option value: " << e.what() << "\n";
    return 2;
  }
  if (chosen->app() == audit) req["suite"] = suite;
  if (arith_opt->count()) req["arithmetic"] = arithmetic;
  if (seed_opt->count()) {
    try {
      req["seed"] = std::stoull(seed);
    } catch (const std::exception&) {
      std::cerr << "error: --seed must be an unsigned 64-bit integer\n";
      return 2;
    }
  }

  char* out = nullptr;
  const tsx_status st = tsx_call(req.dump().c_str(), &out);
  if (st != TSX_OK) {
    std::cerr << "error [" << tsx_last_error_code() << "]: " << tsx_last_error() << "\n";
    return exit_code(st);
  }
  const Json res = Json::parse(out);
  tsx_string_free(out);

  const bool want_json = json_opt->count() > 0;
  if (want_json && json_path != "-" && !json_path.empty()) {
    std::ofstream f(json_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << json_path << "\n";
      return 2;
    }
    f << res["result"].dump(2) << "\n";
    std::cout << res["text"].get<std::string>();
  } else if (want_json) {
    std::cout << res["result"].dump(2) << "\n";
  } else {
    std::cout << res["text"].get<std::string>();
  }
  return res["ok"].get<bool>() ? 0 : 1;
}
