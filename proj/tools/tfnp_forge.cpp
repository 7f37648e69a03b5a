#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tfnp/tfnp.h"

namespace {

struct Opts {
  std::string problem, oracle, reduction, inst, sol, x, w, semantics = "c-star", mode = "auto", format = "text", what;
  std::size_t n = 0, t = 0, k = 0, samples = 0, circuit = 0;
  std::uint64_t seed = 0;
};

int code(tfnp_status s) { return static_cast<int>(s); }

int fail(tfnp_status s) {
  std::cerr << "error: " << tfnp_last_error() << "\n";
  return code(s);
}

void emit(char* s) {
  std::string out = s ? s : "";
  tfnp_string_free(s);
  std::cout << out;
  if (!out.empty() && out.back() != '\n') std::cout << "\n";
}

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

using InstPtr = std::unique_ptr<tfnp_instance, decltype(&tfnp_instance_free)>;

// --inst FILE, or --problem P --x N for numeric problems.
tfnp_status load(const Opts& o, InstPtr& out) {
  tfnp_instance* raw = nullptr;
  tfnp_status s;
  if (!o.inst.empty()) {
    std::string text;
    try {
      text = slurp(o.inst);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return TFNP_MALFORMED;
    }
    s = tfnp_instance_parse(text.c_str(), &raw);
  } else if (!o.problem.empty() && !o.x.empty()) {
    s = tfnp_instance_from_number(o.problem.c_str(), o.x.c_str(), &raw);
  } else {
    std::cerr << "error: give --inst FILE, or --problem and --x for a numeric problem\n";
    return TFNP_MALFORMED;
  }
  if (s != TFNP_OK) return s;
  out.reset(raw);
  return TFNP_OK;
}

tfnp_format fmt(const Opts& o) { return o.format == "json" ? TFNP_FORMAT_JSON : TFNP_FORMAT_TEXT; }

tfnp_family family(const Opts& o) {
  tfnp_family f{};
  f.problem = o.problem.empty() ? nullptr : o.problem.c_str();
  f.oracle = o.oracle.empty() ? nullptr : o.oracle.c_str();
  f.n = o.n;
  f.t = o.t;
  f.k = o.k;
  f.samples = o.samples;
  f.seed = o.seed;
  f.exhaustive = o.mode == "exhaustive" ? 1 : o.mode == "random" ? -1 : 0;
  return f;
}

int run_solve(const Opts& o) {
  InstPtr inst(nullptr, tfnp_instance_free);
  if (auto s = load(o, inst); s != TFNP_OK) return fail(s);
  char* out = nullptr;
  if (auto s = tfnp_solve(inst.get(), fmt(o), &out); s != TFNP_OK) return fail(s);
  emit(out);
  return 0;
}

int run_verify(const Opts& o) {
  InstPtr inst(nullptr, tfnp_instance_free);
  if (auto s = load(o, inst); s != TFNP_OK) return fail(s);
  std::string sol = o.sol;
  if (!sol.empty() && sol[0] == '@') sol = slurp(sol.substr(1));
  char* report = nullptr;
  auto s = tfnp_verify(inst.get(), sol.c_str(), &report);
  if (report) emit(report);
  else if (s != TFNP_OK) std::cerr << "error: " << tfnp_last_error() << "\n";
  return code(s);
}

int run_eval(const Opts& o) {
  InstPtr inst(nullptr, tfnp_instance_free);
  if (auto s = load(o, inst); s != TFNP_OK) return fail(s);
  char* out = nullptr;
  if (auto s = tfnp_eval(inst.get(), o.circuit, o.semantics.c_str(), o.x.c_str(), o.w.c_str(), &out); s != TFNP_OK)
    return fail(s);
  emit(out);
  return 0;
}

int run_gen(const Opts& o) {
  auto f = family(o);
  char* out = nullptr;
  if (auto s = tfnp_generate(&f, &out); s != TFNP_OK) return fail(s);
  emit(out);
  return 0;
}

int run_reduce(const Opts& o, bool round_trip) {
  InstPtr inst(nullptr, tfnp_instance_free);
  if (auto s = load(o, inst); s != TFNP_OK) return fail(s);
  char* out = nullptr;
  auto s = round_trip ? tfnp_round_trip(inst.get(), o.reduction.c_str(), &out)
                      : tfnp_reduce(inst.get(), o.reduction.c_str(), &out);
  if (!out) return fail(s);
  emit(out);
  return code(s);
}

int run_check(const Opts& o) {
  auto f = family(o);
  bool custom = !o.problem.empty() || !o.oracle.empty() || o.n || o.t || o.k || o.samples || o.seed || o.mode != "auto";
  char* out = nullptr;
  double secs = 0;
  auto s = tfnp_check_reduction(o.reduction.c_str(), custom ? &f : nullptr, fmt(o), &out, &secs);
  if (!out) return fail(s);
  emit(out);
  std::cerr << "wall_time_s " << secs << "\n";
  return code(s);
}

int run_totality(const Opts& o) {
  char* out = nullptr;
  double secs = 0;
  auto s = tfnp_totality(o.problem.c_str(), o.n ? o.n : 2, o.samples, o.seed, fmt(o), &out, &secs);
  if (!out) return fail(s);
  emit(out);
  std::cerr << "wall_time_s " << secs << "\n";
  return code(s);
}

int run_list(const Opts& o) {
  char* out = nullptr;
  auto s = o.what == "problems" ? tfnp_list_problems(&out) : tfnp_list_reductions(&out);
  if (s != TFNP_OK) return fail(s);
  emit(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tfnp-forge: build, solve and check TFNP instances and reductions"};
  app.require_subcommand(1);
  Opts o;

  auto fam_opts = [&](CLI::App* c) {
    c->add_option("--problem", o.problem, "problem id");
    c->add_option("--oracle", o.oracle, "oracle problem for lifted families");
    c->add_option("--n", o.n, "size parameter");
    c->add_option("--t", o.t, "oracle gates per instance");
    c->add_option("--k", o.k, "oracle query size parameter");
    c->add_option("--samples", o.samples, "random draws");
    c->add_option("--seed", o.seed, "generator seed");
    c->add_option("--mode", o.mode, "auto, exhaustive or random")->check(CLI::IsMember({"auto", "exhaustive", "random"}));
  };
  auto inst_opts = [&](CLI::App* c) {
    c->add_option("--inst", o.inst, "instance JSON file ('-' for stdin)");
    c->add_option("--problem", o.problem, "numeric problem id (with --x)");
  };
  auto format_opt = [&](CLI::App* c) {
    c->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  };

  auto gen = app.add_subcommand("gen", "print a family of instances as JSON-lines");
  fam_opts(gen);
  gen->get_option("--problem")->required();

  auto solve = app.add_subcommand("solve", "print a solution");
  inst_opts(solve);
  solve->add_option("--x", o.x, "numeric instance value");
  format_opt(solve);

  auto verify = app.add_subcommand("verify", "check a solution; exit 0 accept, 1 reject, 2 malformed");
  inst_opts(verify);
  verify->add_option("--x", o.x, "numeric instance value");
  verify->add_option("--sol", o.sol, "bit string, 0x hex, solution JSON, or @file")->required();

  auto eval = app.add_subcommand("eval", "evaluate an instance circuit");
  eval->add_option("--inst", o.inst, "instance JSON file")->required();
  eval->add_option("--circuit", o.circuit, "circuit index");
  eval->add_option("--semantics", o.semantics, "plain, c-star or c-sub-star")
      ->check(CLI::IsMember({"plain", "c-star", "c-sub-star"}));
  eval->add_option("--x", o.x, "input, decimal")->required();
  eval->add_option("--w", o.w, "comma separated witnesses, decimal");

  auto reduce = app.add_subcommand("reduce", "print the target instance of a reduction");
  inst_opts(reduce);
  reduce->add_option("--x", o.x, "numeric instance value");
  reduce->add_option("--reduction", o.reduction)->required();

  auto rt = app.add_subcommand("round-trip", "reduce, solve the target, map back and verify");
  inst_opts(rt);
  rt->add_option("--x", o.x, "numeric instance value");
  rt->add_option("--reduction", o.reduction)->required();

  auto check = app.add_subcommand("check-reduction", "round-trip a reduction over a family");
  check->add_option("--reduction", o.reduction)->required();
  fam_opts(check);
  format_opt(check);

  auto tot = app.add_subcommand("totality", "solve and verify every member of a family");
  tot->add_option("--problem", o.problem)->required();
  tot->add_option("--n", o.n, "size parameter");
  tot->add_option("--samples", o.samples, "random draws for large families");
  tot->add_option("--seed", o.seed);
  format_opt(tot);

  auto list = app.add_subcommand("list", "list problems or reductions");
  list->add_option("what", o.what)->check(CLI::IsMember({"problems", "reductions"}))->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto start = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    if (*gen) rc = run_gen(o);
    else if (*solve) rc = run_solve(o);
    else if (*verify) rc = run_verify(o);
    else if (*eval) rc = run_eval(o);
    else if (*reduce) rc = run_reduce(o, false);
    else if (*rt) rc = run_reduce(o, true);
    else if (*check) rc = run_check(o);
    else if (*tot) rc = run_totality(o);
    else if (*list) rc = run_list(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 2;
  }
  if (!*check && !*tot) {
    std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    std::cerr << "wall_time_s " << d.count() << "\n";
  }
  return rc;
}
