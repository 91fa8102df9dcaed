#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rw/dtree.hpp"
#include "rw/pattern.hpp"
#include "rw/term.hpp"

namespace rw::testing {

// Rule set plus a subject `f t1 ... tn` whose head is the symbol `f`.
struct OracleCase {
  std::vector<Rule> rules;
  Term subject = Term::symb("f");
  bool nonlinear = false;
  bool closedness = false;
  bool partial = false;
  bool abstraction = false;
};

OracleCase random_case(std::mt19937_64& rng);

struct OracleReport {
  std::size_t samples = 0;
  std::size_t rewrites = 0;  // samples where the tree engine rewrote the subject
  std::size_t violations = 0;
  std::size_t nonlinear = 0, closedness = 0, partial = 0, abstraction = 0;
  std::vector<std::string> failures;  // first few, human readable
};

// Empty when the tree engine agrees with the declarative matcher on `c`.
std::string check_case(const OracleCase& c, Heuristic h);

OracleReport run_oracle(std::uint64_t seed, std::size_t samples, Heuristic h);

// RW_SEED when set and numeric, `fallback` otherwise.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace rw::testing
