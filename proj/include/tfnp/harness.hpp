#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfnp/reductions.hpp"

namespace tfnp {

// Parameters of a small-instance family. A non-empty `oracle` makes it a
// family of problem^oracle instances with `t` table-backed oracle gates whose
// queries are size-k instances of `oracle`.
struct FamilyParams {
  std::string problem;
  std::string oracle;
  std::size_t n = 2;
  std::size_t t = 1;
  std::size_t k = 0;  // 0: default size for the oracle problem
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  bool exhaustive = false;
};

// Largest family that gen/check will enumerate exhaustively, in table bits.
inline constexpr std::size_t kMaxExhaustiveBits = 16;

std::size_t default_oracle_param(const std::string& oracle);

Instance random_instance(const std::string& problem, std::size_t n, std::mt19937_64& rng);
Instance random_lifted(const FamilyParams& fam, std::mt19937_64& rng);
// Every instance in the family (exhaustive) or `samples` seeded draws.
// Exhaustive mode throws PreconditionError when the family has more than 2^16 members.
std::vector<Instance> generate(const FamilyParams& fam);
// i-th member of the family, generated without materializing the rest.
std::size_t family_size(const FamilyParams& fam);
Instance family_member(const FamilyParams& fam, std::size_t i);

struct CheckReport {
  std::string reduction;
  FamilyParams family;
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skipped = 0;  // solver cap exceeded
  bool partial = false;
  std::optional<Instance> counterexample;
  std::string failure;
  double seconds = 0;
};

// Family the harness uses for a reduction when the caller gives none.
FamilyParams default_family(const Reduction& r);

CheckReport check_reduction(const std::string& name, const FamilyParams& fam);
CheckReport check_reduction(const Reduction& r, const FamilyParams& fam);

// Greedy minimization keeping `still_fails` true: smaller n (re-drawn from the
// family), then zeroed truth-table entries, then oracle gates replaced by zero.
Instance shrink(const Instance& inst, const FamilyParams& fam, const std::function<bool(const Instance&)>& still_fails,
                std::size_t budget = 400);

struct TotalityReport {
  std::string problem;
  std::size_t n = 0;
  std::size_t instances = 0;
  std::size_t solved = 0;
  std::optional<Instance> counterexample;
  double seconds = 0;
};

// brute_solve + verify on the exhaustive family (or `samples` random draws when too large).
TotalityReport totality_check(const std::string& problem, std::size_t n, std::size_t samples = 256,
                              std::uint64_t seed = 0);

nlohmann::json report_json(const CheckReport& r);
std::string report_text(const CheckReport& r);
nlohmann::json report_json(const TotalityReport& r);
std::string report_text(const TotalityReport& r);

}  // namespace tfnp
