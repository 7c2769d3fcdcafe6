#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "spa/verify.hpp"

namespace spa {
namespace {

TEST(PoissonBinomial, MatchesBinomialWhenProbabilitiesEqual) {
  const std::vector<double> probs(12, 0.3);
  const auto pmf = poisson_binomial_pmf(probs);
  ASSERT_EQ(pmf.size(), 13u);
  for (int k = 0; k <= 12; ++k) {
    const double binom = std::tgamma(13) / (std::tgamma(k + 1) * std::tgamma(13 - k)) * std::pow(0.3, k) *
                         std::pow(0.7, 12 - k);
    EXPECT_NEAR(pmf[k], binom, 1e-14);
  }
}

TEST(PoissonBinomial, SumsToOneWithMeanOfProbabilities) {
  std::vector<double> probs;
  for (int k = 1; k <= 200; ++k) probs.push_back(1.0 / std::sqrt(k + 1.0));
  const auto pmf = poisson_binomial_pmf(probs);
  double total = 0, mean = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    total += pmf[k];
    mean += k * pmf[k];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(mean, std::accumulate(probs.begin(), probs.end(), 0.0), 1e-9);
}

TEST(ChiSquare, AcceptsMatchingAndRejectsShiftedSamples) {
  const std::vector<double> pmf{0.25, 0.5, 0.25};
  std::vector<std::uint32_t> good, bad;
  for (int k = 0; k < 1000; ++k) {
    good.push_back(k % 4 == 0 ? 0 : (k % 4 == 3 ? 2 : 1));
    bad.push_back(k % 2 == 0 ? 0 : 2);
  }
  EXPECT_GT(chi_square_gof(good, pmf).p_value, 0.99);
  EXPECT_LT(chi_square_gof(bad, pmf).p_value, 1e-6);
  EXPECT_EQ(chi_square_gof(good, pmf).dof, 2);
}

TEST(VerifyChecks, FastSuiteComponentsPass) {
  EXPECT_TRUE(detail::check_geometry(1).passed);
  EXPECT_TRUE(detail::check_ball_measure(2).passed);
  EXPECT_TRUE(detail::check_expected_degree_contract().passed);
  EXPECT_TRUE(detail::check_contagion(3).passed);
  EXPECT_TRUE(check_bounds().passed);
}

TEST(VerifyChecks, OracleAndCouplingOnSmallBudget) {
  const auto oracle = detail::check_oracle_equivalence(5, 6, 800);
  EXPECT_TRUE(oracle.passed) << oracle.detail;
  const auto coupling = check_percolation_coupling(5, 20, 800);
  EXPECT_TRUE(coupling.passed) << coupling.detail;
}

TEST(VerifyChecks, InDegreeDistributionFitsPoissonBinomial) {
  const auto r = detail::check_in_degree_distribution(0, 500);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(OutcomeViolation, DetectsTamperedOutcome) {
  SpaParams p;
  p.n = 1000;
  p.seed = 6;
  const auto g = generate(p);
  InfectionConfig c;
  c.beta_override = 1.0;
  auto o = run_sir(g, c);
  ASSERT_FALSE(outcome_violation(g, o));
  auto wrong_size = o;
  ++wrong_size.attack_size;
  EXPECT_TRUE(outcome_violation(g, wrong_size));
  auto wrong_duration = o;
  ++wrong_duration.duration;
  EXPECT_TRUE(outcome_violation(g, wrong_duration));
  auto wrong_jump = o;
  wrong_jump.longest_jump = 2 * o.max_displacement + 0.1;
  EXPECT_TRUE(outcome_violation(g, wrong_jump));
}

}  // namespace
}  // namespace spa
