#include <doctest.h>

#include "support/oracle.hpp"

using namespace rw;
using namespace rw::testing;

namespace {

void check_report(const OracleReport& r) {
  for (const auto& f : r.failures) MESSAGE(f);
  MESSAGE("samples=" << r.samples << " rewrites=" << r.rewrites << " nonlinear=" << r.nonlinear << " closedness=" << r.closedness << " partial=" << r.partial << " abstraction=" << r.abstraction);
  CHECK(r.violations == 0);
  CHECK(r.nonlinear > 0);
  CHECK(r.closedness > 0);
  CHECK(r.partial > 0);
  CHECK(r.abstraction > 0);
  // Enough positive cases for the agreement to mean something.
  CHECK(r.rewrites * 4 > r.samples);
}

}  // namespace

TEST_CASE("tree engine agrees with the declarative matcher on random rule sets") {
  const auto seed = seed_from_env(20261015);
  INFO("RW_SEED=" << seed);
  const auto r = run_oracle(seed, 1000, Heuristic::MaxConstructors);
  CHECK(r.samples == 1000);
  check_report(r);
}

TEST_CASE("left-to-right compilation agrees with the declarative matcher") {
  const auto seed = seed_from_env(20261015) + 1;
  INFO("RW_SEED+1=" << seed);
  check_report(run_oracle(seed, 500, Heuristic::LeftRight));
}
