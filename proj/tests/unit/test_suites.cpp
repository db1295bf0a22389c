#include <gtest/gtest.h>

#include "dps/error.hpp"
#include "dps/suites.hpp"

using namespace dps;

namespace {

std::string describe(const SuiteResult& r) {
  std::string out;
  for (const auto& c : r.checks) {
    out += c.label + (c.pass ? " ok " : " FAIL ") + std::to_string(c.value) + " vs " + std::to_string(c.bound) +
           " (" + c.detail + ")\n";
  }
  return out;
}

}  // namespace

TEST(Suites, NamesAreRegistered) {
  const auto& names = suite_names();
  EXPECT_EQ(names.size(), 9u);
  for (const auto& n : names) EXPECT_FALSE(n.empty());
}

TEST(Suites, UnknownNameIsUsageError) {
  try {
    run_suite("no-such-suite");
    FAIL() << "expected UsageError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UsageError);
  }
}

TEST(Suites, MarkovErrorProbabilityBound) {
  const SuiteResult r = run_suite("markov");
  EXPECT_TRUE(r.pass) << describe(r);
}

TEST(Suites, TailBounds) {
  const SuiteResult r = run_suite("tail-bounds");
  EXPECT_TRUE(r.pass) << describe(r);
}

TEST(Suites, ChernoffDefaults) {
  const SuiteResult r = run_suite("chernoff");
  EXPECT_TRUE(r.pass) << describe(r);
}

TEST(Suites, NegativeMomentWithOverrides) {
  SuiteOptions o;
  o.lattice = Lattice::standard("D4");
  o.dithers = 3000;
  o.run.seed = 99;
  const SuiteResult r = run_suite("negative-moment", o);
  EXPECT_TRUE(r.pass) << describe(r);
  EXPECT_EQ(r.seed, 99u);
}

TEST(Suites, GenieOnSmallRun) {
  SuiteOptions o;
  o.dithers = 100;
  o.trials = 50;
  const SuiteResult r = run_suite("genie", o);
  EXPECT_TRUE(r.pass) << describe(r);
}

TEST(Suites, RepeatableWithSameSeed) {
  SuiteOptions o;
  o.dithers = 500;
  o.run.seed = 5;
  const SuiteResult a = run_suite("negative-moment", o);
  const SuiteResult b = run_suite("negative-moment", o);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].value, b.checks[i].value);
    EXPECT_EQ(a.checks[i].detail, b.checks[i].detail);
  }
}
