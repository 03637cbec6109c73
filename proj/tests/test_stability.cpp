#include <gtest/gtest.h>

#include <complex>

#include "support.hpp"

using namespace switchcell;
using namespace testing_support;

namespace {

using cd = std::complex<double>;

// Slopes whose product is sign*M, spread unevenly so the Jacobian is not circulant.
std::vector<double> slopes_for(int n, int sign, double m) {
  std::vector<double> s(n, 1.0);
  double rest = m;
  for (int k = 0; k + 1 < n; ++k) {
    s[k] = 0.5 + 0.3 * k;
    rest /= s[k];
  }
  s[n - 1] = sign * rest;
  return s;
}

std::vector<cd> dense_eigenvalues(const Eigen::MatrixXd& j) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(j);
  std::vector<cd> out;
  for (Eigen::Index k = 0; k < j.rows(); ++k) out.push_back(es.eigenvalues()[k]);
  return out;
}

// Every analytic eigenvalue has a distinct dense partner within tolerance.
bool match_sets(std::vector<cd> a, std::vector<cd> b, double rel) {
  if (a.size() != b.size()) return false;
  for (const cd& x : a) {
    auto best = std::min_element(b.begin(), b.end(), [&](const cd& p, const cd& q) { return std::abs(p - x) < std::abs(q - x); });
    if (std::abs(*best - x) > rel * std::max(1.0, std::abs(x))) return false;
    b.erase(best);
  }
  return true;
}

StabilityVerdict verdict_at(const char* stem, const Cell& cell, std::optional<Cell> root = std::nullopt) {
  auto inst = load(stem);
  SwitchingSystem sys(inst.net, inst.z);
  EquilibriumCellRecord rec{cell, cell.regular() ? CellKind::Regular : CellKind::Singular, {}};
  return cell_stability(sys, rec, root.value_or(cell)).overall;
}

}  // namespace

TEST(CharPoly, Examples) {
  std::vector<double> one{1.0};
  EXPECT_EQ(cfs_char_poly<double>(one, 1, 0.0, 0.0), -1.0);
  std::vector<double> three{1, 1, 1};
  EXPECT_DOUBLE_EQ(cfs_char_poly<double>(three, -1, 8.0, 0.0), -9.0);
  Eigen::MatrixXd j = cfs_jacobian(three, std::vector<double>{2, 2, -2});
  EXPECT_NEAR(j.determinant(), -9.0, 1e-12);
  std::vector<double> two{1, 2};
  EXPECT_DOUBLE_EQ(cfs_char_poly<double>(two, 1, 2.0, 0.0), 0.0);
  Eigen::MatrixXd k(2, 2);
  k << -1, 0.5, 4, -2;
  EXPECT_NEAR(k.determinant(), 0.0, 1e-12);
}

TEST(CharPoly, MatchesDenseDeterminant) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 1 + rep % 6;
    int sign = rep % 2 ? 1 : -1;
    std::vector<double> g(n), s(n);
    for (int k = 0; k < n; ++k) {
      g[k] = u(rng);
      s[k] = u(rng);
    }
    s[n - 1] *= sign;
    double m = std::abs(product(s));
    Eigen::MatrixXd j = cfs_jacobian(g, s);
    for (double lam : {-0.7, 0.0, 0.4, 2.5}) {
      Eigen::MatrixXd shifted = j - lam * Eigen::MatrixXd::Identity(n, n);
      EXPECT_NEAR(cfs_char_poly<double>(g, sign, m, lam), shifted.determinant(), 1e-9 * (1 + std::abs(shifted.determinant())));
    }
  }
}

TEST(Eigenvalues, ClosedFormExamples) {
  auto e = cfs_eigenvalues(3, -1, 8.0);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_NEAR(e[0].real(), 0.0, 1e-12);
  EXPECT_NEAR(e[0].imag(), std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(e[1].real(), -3.0, 1e-12);
  EXPECT_NEAR(e[1].imag(), 0.0, 1e-12);
  auto one = cfs_eigenvalues(1, 1, 2.5);
  EXPECT_NEAR(one[0].real(), 1.5, 1e-12);
  EXPECT_NEAR(one[0].imag(), 0.0, 1e-12);
  auto four = cfs_eigenvalues(4, 1, 16.0);
  std::vector<cd> expect{{1, 0}, {-1, 2}, {-3, 0}, {-1, -2}};
  EXPECT_TRUE(match_sets(four, expect, 1e-12));
  std::vector<double> g{1, 2};
  try {
    cfs_eigenvalues(g, 1, 1.0);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::GammaNotIdentity);
  }
}

TEST(Eigenvalues, MatchDenseSolver) {
  for (int n = 1; n <= 6; ++n)
    for (int sign : {1, -1})
      for (double m : {0.1, 1.0, 8.0, 100.0}) {
        std::vector<double> g(n, 1.0);
        auto analytic = cfs_eigenvalues(g, sign, m);
        auto dense = dense_eigenvalues(cfs_jacobian(g, slopes_for(n, sign, m)));
        EXPECT_TRUE(match_sets(analytic, dense, 1e-8)) << n << " " << sign << " " << m;
        // k = 0 has the largest real part.
        for (const cd& l : analytic) EXPECT_LE(l.real(), analytic[0].real() + 1e-12);
        for (const cd& l : analytic)
          EXPECT_LT(std::abs(cfs_char_poly<cd>(g, sign, m, l)), 1e-8 * std::pow(1 + std::abs(l), n));
      }
}

TEST(Verdicts, PositiveCycle) {
  std::vector<double> g{1, 2};
  EXPECT_EQ(positive_cycle_verdict(g, 0.0).value, Stability::Stable);
  EXPECT_EQ(positive_cycle_verdict(g, 1e9).value, Stability::Unstable);
  auto at = positive_cycle_verdict(g, 2.0);
  EXPECT_EQ(at.value, Stability::Undetermined);
  EXPECT_EQ(at.bifurcation, Bifurcation::SteadyState);
  std::vector<Rational> gq{q("1"), q("2")};
  EXPECT_EQ(positive_cycle_verdict(gq, q("2")).bifurcation, Bifurcation::SteadyState);
  EXPECT_EQ(positive_cycle_verdict(gq, q("1.99")).value, Stability::Stable);
  EXPECT_EQ(positive_cycle_verdict(gq, q("2.01")).value, Stability::Unstable);
}

TEST(Verdicts, NegativeCycle) {
  EXPECT_NEAR(secant_bound(3), 8.0, 1e-12);
  EXPECT_NEAR(secant_bound(4), 4.0, 1e-12);
  for (double m : {0.1, 5.0, 1e6}) {
    EXPECT_EQ(negative_cycle_verdict(std::vector<double>{1.0}, m).value, Stability::Stable);
    EXPECT_EQ(negative_cycle_verdict(std::vector<double>{0.5, 3.0}, m).value, Stability::Stable);
  }
  std::vector<double> unit{1, 1, 1};
  EXPECT_EQ(negative_cycle_verdict(unit, 10).value, Stability::Unstable);
  EXPECT_EQ(negative_cycle_verdict(unit, 7).value, Stability::Stable);
  EXPECT_EQ(negative_cycle_verdict(unit, 8).bifurcation, Bifurcation::Hopf);
  auto open = negative_cycle_verdict(std::vector<double>{1, 2, 1}, 100);
  EXPECT_EQ(open.value, Stability::Undetermined);
  EXPECT_FALSE(open.assumptions.empty());
}

TEST(Verdicts, StableRegionIsAnInitialInterval) {
  for (int n = 1; n <= 6; ++n)
    for (int sign : {1, -1}) {
      std::vector<double> g(n, 1.0);
      bool seen_unstable = false;
      for (double m = 0.05; m < 200; m *= 1.07) {
        auto v = sign > 0 ? positive_cycle_verdict(g, m) : negative_cycle_verdict(g, m);
        if (seen_unstable) {
          EXPECT_NE(v.value, Stability::Stable) << n << " " << sign << " " << m;
        }
        seen_unstable |= v.value == Stability::Unstable;
        // The verdict agrees with the sign of the largest eigenvalue's real part.
        double top = cfs_eigenvalues(n, sign, m)[0].real();
        if (std::abs(top) > 1e-9) {
          EXPECT_EQ(v.value == Stability::Stable, top < 0) << n << " " << sign << " " << m;
        }
      }
    }
}

TEST(Verdicts, PositiveCycleHasPositiveRealRootAboveThreshold) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 1 + rep % 6;
    std::vector<double> g(n);
    for (double& x : g) x = u(rng);
    double m = product(g) * (1.05 + u(rng));
    ASSERT_EQ(positive_cycle_verdict(g, m).value, Stability::Unstable);
    double lo = 0, hi = std::pow(m, 1.0 / n) + *std::max_element(g.begin(), g.end());
    // p(lam) = prod(g + lam) - M changes sign on [lo, hi].
    auto p = [&](double lam) {
      double v = 1;
      for (double x : g) v *= x + lam;
      return v - m;
    };
    ASSERT_LT(p(lo), 0);
    ASSERT_GT(p(hi), 0);
    for (int it = 0; it < 200; ++it) {
      double mid = (lo + hi) / 2;
      (p(mid) < 0 ? lo : hi) = mid;
    }
    EXPECT_GT(lo, 0);
    EXPECT_NEAR(cfs_char_poly<double>(g, 1, m, lo), 0.0, 1e-8 * std::pow(1 + lo, n));
  }
}

TEST(CellStability, ToggleplusExamples) {
  const Cell tilde{{3, 3}};
  EXPECT_EQ(verdict_at("toggle_plus", Cell{{4, 2}}, tilde).value, Stability::Stable);
  EXPECT_EQ(verdict_at("toggle_plus", Cell{{3, 2}}, tilde).value, Stability::Unstable);
  EXPECT_EQ(verdict_at("toggle_plus", Cell{{0, 0}}).value, Stability::Stable);

  auto inst = load("toggle_plus");
  SwitchingSystem sys(inst.net, inst.z);
  EquilibriumCellRecord rec{Cell{{3, 2}}, CellKind::Singular, {}};
  auto full = cell_stability(sys, rec, tilde);
  ASSERT_EQ(full.cycles.size(), 2u);
  EXPECT_FALSE(full.cycles[0].local_regular);
  EXPECT_EQ(full.cycles[0].verdict.value, Stability::Unstable);
  EXPECT_TRUE(full.cycles[1].local_regular);
  EXPECT_EQ(full.cycles[1].verdict.value, Stability::Stable);
}

TEST(CellStability, CyclicExamples) {
  EXPECT_EQ(verdict_at("cfs2_positive", Cell{{1, 1}}).value, Stability::Unstable);
  EXPECT_EQ(verdict_at("cfs2_positive", Cell{{0, 0}}).value, Stability::Stable);
  EXPECT_EQ(verdict_at("cfs2_positive", Cell{{2, 2}}).value, Stability::Stable);
  EXPECT_EQ(verdict_at("cfs2_negative", Cell{{1, 1}}).value, Stability::Stable);
  EXPECT_EQ(verdict_at("cfs3_negative", Cell{{1, 1, 1}}).value, Stability::Unstable);
  auto open = verdict_at("cfs3_negative_gamma", Cell{{1, 1, 1}});
  EXPECT_EQ(open.value, Stability::Undetermined);
  EXPECT_EQ(verdict_at("cfs3_inessential", Cell{{0, 0, 0}}).value, Stability::Stable);
}

TEST(CellStability, RecordRootMismatch) {
  auto inst = load("toggle_plus");
  SwitchingSystem sys(inst.net, inst.z);
  EquilibriumCellRecord rec{Cell{{4, 2}}, CellKind::Regular, {}};
  for (const Cell& root : {Cell{{0, 0}}, Cell{{1, 2}}}) {
    try {
      cell_stability(sys, rec, root);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::RecordRootMismatch);
    }
  }
}

TEST(CellStability, VerdictDoesNotDependOnRoot) {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 120; ++rep) {
    auto net = random_network(rng, 1 + rep % 4, 2);
    SwitchingSystem sys(net, random_parameter(rng, net, rep % 2 == 0));
    for (const auto& rec : equilibrium_cells(sys)) {
      auto own = cell_stability(sys, rec).overall.value;
      for (const auto& ev : rec.roots) {
        EXPECT_EQ(cell_stability(sys, rec, ev.root).overall.value, own)
            << serialize(net) << sys.complex().notation(rec.cell) << " via " << sys.complex().notation(ev.root);
      }
      if (rec.cell.regular()) {
        EXPECT_EQ(own, Stability::Stable);
      }
    }
  }
}
