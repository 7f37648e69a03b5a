#include "tfnp/tfnp.h"

#include <cstring>
#include <sstream>

#include "tfnp/harness.hpp"
#include "tfnp/json_io.hpp"
#include "tfnp/oracle_eval.hpp"

struct tfnp_instance {
  tfnp::Instance inst;
};

namespace {

using namespace tfnp;

thread_local std::string last_error;

char* dup(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename F>
tfnp_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const MalformedError& e) {
    last_error = e.what();
    return TFNP_MALFORMED;
  } catch (const PreconditionError& e) {
    last_error = e.what();
    return TFNP_MALFORMED;
  } catch (const SolveError& e) {
    last_error = e.what();
    return e.kind == SolveError::Kind::CapExceeded ? TFNP_CAP_EXCEEDED : TFNP_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TFNP_INTERNAL;
  }
}

std::uint64_t parse_decimal(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw MalformedError("expected a decimal number: '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw MalformedError("number out of range: " + s);
  }
}

BitVec decimal_bits(const std::string& s, std::size_t width) {
  auto v = parse_decimal(s);
  if (width < 64 && (v >> width) != 0)
    throw MalformedError(s + " does not fit in " + std::to_string(width) + " bits");
  return BitVec::from_uint(v, width);
}

std::vector<std::string> split_commas(const char* w) {
  std::vector<std::string> out;
  if (!w || !*w) return out;
  std::string cur;
  for (const char* p = w; *p; ++p) {
    if (*p == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (*p != ' ') {
      cur.push_back(*p);
    }
  }
  out.push_back(cur);
  return out;
}

std::string number(const BitVec& v) { return v.size() <= 64 ? std::to_string(v.to_uint()) : "0x" + v.to_hex(); }

FamilyParams merge(FamilyParams base, const tfnp_family* f) {
  if (!f) return base;
  if (f->problem && *f->problem) base.problem = f->problem;
  if (f->oracle) base.oracle = f->oracle;
  if (f->n) base.n = f->n;
  if (f->t) base.t = f->t;
  if (f->k) base.k = f->k;
  if (f->samples) base.samples = f->samples;
  base.seed = f->seed;
  if (f->exhaustive > 0) base.exhaustive = true;
  else if (f->exhaustive < 0) base.exhaustive = false;
  else base.exhaustive = base.oracle.empty() &&
                         problem(base.problem).instance_layout(base.n).length() <= kMaxExhaustiveBits;
  return base;
}

std::string render_outcome(const EvalOutcome& o) {
  std::ostringstream s;
  switch (o.kind) {
    case OutcomeKind::Result:
      s << "RESULT " << number(o.output) << "\n";
      break;
    case OutcomeKind::Bottom:
      s << "BOTTOM\n";
      s << "bottom_gate " << o.bottom_gate << "\n";
      break;
    case OutcomeKind::Error:
      s << "ERROR " << o.error_index << " " << number(o.error_query) << "\n";
      s << "error_problem " << o.error_problem << "\n";
      break;
  }
  if (o.inconsistent) s << "inconsistent\n";
  for (const auto& t : o.trace)
    s << "trace gate=" << t.gate + 1 << " problem=" << t.problem << " query=" << number(t.query)
      << " answer=" << number(t.answer) << " witness=" << t.witness << "\n";
  s << "used {";
  bool first = true;
  for (auto i : o.used) {
    s << (first ? "" : ",") << i;
    first = false;
  }
  s << "}\n";
  return s.str();
}

std::size_t uniform_width(const Circuit& c) {
  auto w = c.oracle_widths();
  if (w.empty()) return 0;
  for (auto x : w)
    if (x != w[0]) throw MalformedError("decimal witnesses need equal oracle gate widths");
  return w[0];
}

}  // namespace

extern "C" {

const char* tfnp_last_error(void) { return last_error.c_str(); }

void tfnp_string_free(char* s) { std::free(s); }

tfnp_status tfnp_instance_parse(const char* json, tfnp_instance** out) {
  return guarded([&] {
    if (!json || !out) throw MalformedError("null argument");
    *out = new tfnp_instance{parse_instance(json)};
    return TFNP_OK;
  });
}

tfnp_status tfnp_instance_from_number(const char* prob, const char* decimal, tfnp_instance** out) {
  return guarded([&] {
    if (!prob || !decimal || !out) throw MalformedError("null argument");
    const auto& p = problem(prob);
    auto v = parse_decimal(decimal);
    std::size_t width = 1;
    while (width < 64 && (v >> width) != 0) ++width;
    auto lay = p.instance_layout(width);
    if (!lay.fns.empty()) throw MalformedError(std::string(prob) + " is not a numeric problem");
    Instance inst;
    inst.problem = prob;
    inst.aux = BitVec::from_uint(v, width);
    p.validate(inst);
    *out = new tfnp_instance{std::move(inst)};
    return TFNP_OK;
  });
}

void tfnp_instance_free(tfnp_instance* inst) { delete inst; }

tfnp_status tfnp_instance_json(const tfnp_instance* inst, char** out) {
  return guarded([&] {
    *out = dup(instance_to_json(inst->inst).dump());
    return TFNP_OK;
  });
}

tfnp_status tfnp_instance_problem(const tfnp_instance* inst, char** out) {
  return guarded([&] {
    *out = dup(inst->inst.problem);
    return TFNP_OK;
  });
}

tfnp_status tfnp_solve(const tfnp_instance* inst, tfnp_format format, char** out) {
  return guarded([&] {
    const auto& in = inst->inst;
    auto sol = solve_any(in);
    if (format == TFNP_FORMAT_JSON || in.has_oracle_gates()) {
      *out = dup(solution_to_json(in, sol).dump());
    } else if (in.circuits.empty() && sol.y.size() <= 64) {
      *out = dup(std::to_string(sol.y.to_uint()));
    } else {
      *out = dup(sol.y.to_bits());
    }
    return TFNP_OK;
  });
}

tfnp_status tfnp_verify(const tfnp_instance* inst, const char* solution, char** report) {
  return guarded([&] {
    if (!solution) throw MalformedError("null solution");
    auto sol = parse_solution(inst->inst, solution);
    auto v = verify_solution(inst->inst, sol);
    std::string text = verdict_name(v.verdict);
    if (!v.reason.empty()) text += " (" + v.reason + ")";
    if (report) *report = dup(text);
    switch (v.verdict) {
      case Verdict::Accept:
        return TFNP_OK;
      case Verdict::Malformed:
        last_error = text;
        return TFNP_MALFORMED;
      default:
        return TFNP_REJECT;
    }
  });
}

tfnp_status tfnp_eval(const tfnp_instance* inst, size_t circuit, const char* semantics, const char* x, const char* w,
                      char** out) {
  return guarded([&] {
    const auto& c = inst->inst.circuits.at(circuit);
    std::string sem = semantics ? semantics : "plain";
    auto xv = decimal_bits(x ? x : "", c.n());
    std::vector<BitVec> ws;
    auto width = uniform_width(c);
    for (const auto& s : split_commas(w)) ws.push_back(decimal_bits(s, width ? width : 64));
    EvalOutcome o;
    if (sem == "plain") {
      if (c.oracle_count()) throw MalformedError("plain semantics needs an oracle-free circuit");
      o.output = eval_plain(c, xv);
    } else if (sem == "c-star") {
      if (ws.size() != c.oracle_count())
        throw MalformedError("c-star needs exactly " + std::to_string(c.oracle_count()) + " witnesses");
      o = eval_c_star(c, xv, ws);
    } else if (sem == "c-sub-star") {
      o = eval_c_sub_star(c, xv, ws);
    } else {
      throw MalformedError("unknown semantics: " + sem);
    }
    *out = dup(render_outcome(o));
    return TFNP_OK;
  });
}

tfnp_status tfnp_generate(const tfnp_family* family, char** out) {
  return guarded([&] {
    if (!family || !family->problem) throw MalformedError("generate needs a problem");
    FamilyParams base;
    base.problem = family->problem;
    auto fam = merge(base, family);
    std::string text;
    auto size = family_size(fam);
    for (std::size_t i = 0; i < size; ++i) text += instance_to_json(family_member(fam, i)).dump() + "\n";
    *out = dup(text);
    return TFNP_OK;
  });
}

tfnp_status tfnp_reduce(const tfnp_instance* inst, const char* reduction, char** out) {
  return guarded([&] {
    auto r = find_reduction(reduction ? reduction : "");
    ReductionContext ctx;
    auto img = r.forward(inst->inst, ctx);
    nlohmann::json j;
    if (img.direct) j["direct"] = solution_to_json(inst->inst, *img.direct);
    else j = instance_to_json(img.target);
    *out = dup(j.dump());
    return TFNP_OK;
  });
}

tfnp_status tfnp_round_trip(const tfnp_instance* inst, const char* reduction, char** report) {
  return guarded([&] {
    auto r = find_reduction(reduction ? reduction : "");
    auto rt = round_trip(r, inst->inst);
    nlohmann::json j;
    j["ok"] = rt.ok;
    j["direct"] = rt.direct;
    if (!rt.reason.empty()) j["reason"] = rt.reason;
    if (!rt.direct && !rt.target.problem.empty()) {
      j["target_solution"] = solution_to_json(rt.target, rt.target_solution);
    }
    if (!rt.source_solution.y.empty()) j["solution"] = solution_to_json(inst->inst, rt.source_solution);
    *report = dup(j.dump());
    return rt.ok ? TFNP_OK : TFNP_REJECT;
  });
}

tfnp_status tfnp_check_reduction(const char* reduction, const tfnp_family* family, tfnp_format format, char** report,
                                 double* seconds) {
  return guarded([&] {
    auto r = find_reduction(reduction ? reduction : "");
    auto fam = merge(default_family(r), family);
    auto rep = check_reduction(r, fam);
    if (seconds) *seconds = rep.seconds;
    *report = dup(format == TFNP_FORMAT_JSON ? report_json(rep).dump() + "\n" : report_text(rep));
    return rep.fail == 0 ? TFNP_OK : TFNP_REJECT;
  });
}

tfnp_status tfnp_totality(const char* prob, size_t n, size_t samples, uint64_t seed, tfnp_format format, char** report,
                          double* seconds) {
  return guarded([&] {
    auto rep = totality_check(prob ? prob : "", n, samples ? samples : 256, seed);
    if (seconds) *seconds = rep.seconds;
    *report = dup(format == TFNP_FORMAT_JSON ? report_json(rep).dump() + "\n" : report_text(rep));
    return rep.solved == rep.instances ? TFNP_OK : TFNP_REJECT;
  });
}

tfnp_status tfnp_list_reductions(char** out) {
  return guarded([&] {
    std::string s;
    for (const auto& n : reduction_names()) s += n + "\n";
    *out = dup(s);
    return TFNP_OK;
  });
}

tfnp_status tfnp_list_problems(char** out) {
  return guarded([&] {
    std::string s;
    for (const auto& n : problem_ids()) s += n + "\n";
    *out = dup(s);
    return TFNP_OK;
  });
}

}  // extern "C"
