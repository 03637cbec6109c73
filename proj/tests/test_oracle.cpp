#include <gtest/gtest.h>

#include "support.hpp"

using namespace switchcell;
using namespace testing_support;

namespace {

SweepReport sweep(const Instance& inst, OracleOptions opt = {}) {
  SwitchingSystem sys(inst.net, inst.z);
  return epsilon_sweep(sys, equilibrium_cells(sys), opt);
}

std::string describe(const SweepReport& r) {
  std::string s;
  for (const auto& f : r.failures) s += f + "\n";
  return s;
}

}  // namespace

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0, 10);
  for (int rep = 0; rep < 200; ++rep) {
    int rows = 1 + rep % 5;
    int cols = rows + rep % 3;
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (auto& row : cost)
      for (double& c : row) c = u(rng);
    auto pick = min_cost_assignment(cost);
    double got = 0;
    std::vector<bool> used(cols, false);
    for (int r = 0; r < rows; ++r) {
      ASSERT_GE(pick[r], 0);
      ASSERT_FALSE(used[pick[r]]);
      used[pick[r]] = true;
      got += cost[r][pick[r]];
    }
    std::vector<int> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0;
      for (int r = 0; r < rows; ++r) s += cost[r][perm[r]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(got, best, 1e-9);
  }
}

TEST(Newton, SolvesOneDimensionalSelfActivation) {
  // X1 -> X1 with U < gamma*theta: one root below theta, close to L / gamma.
  auto net = parse_network("X1 : (X1)");
  SwitchingParameter z{{q("1")}, {q("3")}, {q("5")}, {q("1")}};
  SwitchingSystem sys(net, z);
  auto cells = equilibrium_cells(sys);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].cell, Cell{{0}});
  for (double eps : {0.2, 0.1, 0.05}) {
    SigmoidSystem sig(net, to_double(z), eps, HillOrder::InverseEpsilonSquared);
    // Independent root by bisection of sigma(x) - x on [0, theta].
    const auto& s = sig.sigmoid(0);
    double lo = 0, hi = 5;
    for (int it = 0; it < 200; ++it) {
      double mid = (lo + hi) / 2;
      (s(mid) - mid > 0 ? lo : hi) = mid;
    }
    // sigma(x) - x changes sign exactly once on a fine grid of [0, U + 1].
    int changes = 0;
    double prev = s(1e-9) - 1e-9;
    for (int k = 1; k <= 40000; ++k) {
      double x = 4.0 * k / 40000;
      double v = s(x) - x;
      if ((v > 0) != (prev > 0)) ++changes;
      prev = v;
    }
    EXPECT_EQ(changes, 1);
    Eigen::VectorXd seed(1);
    seed << 2.5;
    auto r = newton_solve(sig, seed);
    ASSERT_TRUE(r.converged) << r.failure;
    EXPECT_NEAR(r.x[0], lo, 1e-10);
    EXPECT_NEAR(r.x[0], 1.0, 0.05);
  }
  OracleOptions opt;
  auto rep = epsilon_sweep(sys, cells, opt);
  EXPECT_TRUE(rep.passed()) << describe(rep);
}

TEST(Oracle, ToggleplusBijection) {
  auto rep = sweep(load("toggle_plus"));
  EXPECT_TRUE(rep.passed()) << describe(rep);
  EXPECT_EQ(rep.steps.back().eps, 0.005);
  EXPECT_EQ(rep.steps.back().roots.size(), 3u);
  for (const auto& t : rep.tracks) {
    EXPECT_TRUE(t.converged);
    EXPECT_TRUE(t.monotone);
    EXPECT_LT(t.distance.back(), 1e-3 * rep.scale);
  }
  // The singular cell {t11} x (t12,t22): x1 tends to t11 = 2 and x2 stays inside (1, 7).
  for (const auto& root : rep.steps.back().roots) {
    if (root.matched < 0 || rep.tracks[root.matched].cell != Cell{{3, 2}}) continue;
    EXPECT_NEAR(root.x[0], 2.0, 1e-3);
    EXPECT_GT(root.x[1], 1.0);
    EXPECT_LT(root.x[1], 7.0);
    EXPECT_GT(root.max_real, 0);
  }
  EXPECT_EQ(rep.contradictions(), 0);
}

TEST(Oracle, NegativeTwoCycleSingleRoot) {
  auto rep = sweep(load("cfs2_negative"));
  EXPECT_TRUE(rep.passed()) << describe(rep);
  ASSERT_EQ(rep.steps.back().roots.size(), 1u);
  const auto& x = rep.steps.back().roots[0].x;
  EXPECT_NEAR(x[0], 1.5, 1e-3);
  EXPECT_NEAR(x[1], 2.0, 1e-3);
  EXPECT_LT(rep.steps.back().roots[0].max_real, 0);
}

TEST(Oracle, PositiveTwoCycleSpectra) {
  auto rep = sweep(load("cfs2_positive"));
  EXPECT_TRUE(rep.passed()) << describe(rep);
  for (const auto& root : rep.steps.back().roots) {
    ASSERT_GE(root.matched, 0);
    const Cell& c = rep.tracks[root.matched].cell;
    if (c.regular()) {
      // Regular equilibria: spectrum close to -gamma.
      EXPECT_LE(root.max_real, -0.5);
    } else {
      EXPECT_GT(root.max_real, 0);
    }
  }
  for (const auto& s : rep.spectral) EXPECT_LT(s.spectrum_error, 1e-6);
}

TEST(Oracle, SampleDataAllPass) {
  for (const char* stem : {"cfs3_negative", "cfs3_negative_gamma", "cfs3_inessential"}) {
    auto rep = sweep(load(stem));
    EXPECT_TRUE(rep.passed()) << stem << "\n" << describe(rep);
  }
  auto open = sweep(load("cfs3_negative_gamma"));
  for (const auto& s : open.spectral) EXPECT_EQ(s.outcome, "exempt");
}

TEST(Oracle, RandomSystemsBijection) {
  std::mt19937_64 rng(61);
  int systems = 0;
  for (int rep = 0; rep < 24; ++rep) {
    auto net = random_network(rng, 1 + rep % 4, 2);
    auto z = random_parameter(rng, net);
    SwitchingSystem sys(net, z);
    auto cells = equilibrium_cells(sys);
    auto report = epsilon_sweep(sys, cells);
    EXPECT_TRUE(report.passed()) << serialize(net) << describe(report);
    EXPECT_EQ(report.steps.back().roots.size(), cells.size());
    ++systems;
  }
  EXPECT_GE(systems, 20);
}

TEST(Oracle, LateBranchesKeepTheirCells) {
  // Thresholds 4.31..4.36 are not resolved at coarse eps: one stable root exists there, and the
  // pair in ((0,t21), *) is born in a fold further down the schedule.
  auto net = parse_network("X1 : (~X1 + X2)\nX2 : (~X1 + X2)");
  auto z = parse_parameter(net, R"({
    "L": {"X1->X1": "1.09", "X2->X1": "1.48", "X1->X2": "0.25", "X2->X2": "0.38"},
    "U": {"X1->X1": "3.31", "X2->X1": "2.64", "X1->X2": "1.95", "X2->X2": "0.54"},
    "theta": {"X1->X1": "4.36", "X2->X1": "4.36", "X1->X2": "4.34", "X2->X2": "4.31"},
    "gamma": {"X1": "1.3", "X2": "0.55"}})");
  SwitchingSystem sys(net, z);
  auto cells = equilibrium_cells(sys);
  ASSERT_EQ(cells.size(), 3u);
  auto rep = epsilon_sweep(sys, cells);
  EXPECT_TRUE(rep.passed()) << describe(rep);
  ASSERT_EQ(rep.steps[1].roots.size(), 1u);
  int early = rep.steps[1].roots[0].matched;
  ASSERT_GE(early, 0);
  // The coarse root continues into the stable singular corner, not into the cell it happens to sit nearest.
  EXPECT_EQ(rep.tracks[early].stability.overall.value, Stability::Stable);
  EXPECT_FALSE(rep.tracks[early].cell.regular());
  int born = 0;
  for (const auto& t : rep.tracks) born += std::isnan(t.distance[1]);
  EXPECT_EQ(born, 2);
}

TEST(Oracle, MissingPredictionIsCaught) {
  // Drop one predicted cell: the sweep must notice the extra root.
  auto inst = load("toggle_plus");
  SwitchingSystem sys(inst.net, inst.z);
  auto cells = equilibrium_cells(sys);
  cells.erase(cells.begin() + 1);
  auto rep = epsilon_sweep(sys, cells);
  EXPECT_FALSE(rep.passed());
  EXPECT_FALSE(rep.final_bijective());
  ASSERT_FALSE(rep.negative_control.empty());
  EXPECT_NE(rep.negative_control[0].find("({t11}, (t12,t22))"), std::string::npos) << rep.negative_control[0];
}

TEST(Oracle, NoRootNearNonEquilibriumLccs) {
  for (const char* stem : {"toggle_plus", "cfs2_positive", "cfs3_negative"}) {
    auto inst = load(stem);
    SwitchingSystem sys(inst.net, inst.z);
    auto rep = epsilon_sweep(sys, equilibrium_cells(sys));
    for (const Cell& c : loop_characteristic_cells(sys)) {
      if (sys.is_equilibrium_cell(c)) continue;
      for (const auto& root : rep.steps.back().roots) EXPECT_NE(root.snapped, c) << stem << sys.complex().notation(c);
    }
  }
}

TEST(Oracle, RejectsBadSchedule) {
  auto inst = load("toggle_plus");
  SwitchingSystem sys(inst.net, inst.z);
  OracleOptions opt;
  opt.schedule = {0.1, 0.2};
  try {
    epsilon_sweep(sys, equilibrium_cells(sys), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedParameter);
  }
}

TEST(Hopf, NegativeThreeCycleCrossesAtSecantBound) {
  auto inst = load("cfs3_negative");
  SwitchingSystem sys(inst.net, inst.z);
  auto scan = hopf_scan(sys);
  ASSERT_TRUE(scan.found);
  EXPECT_NEAR(scan.bound, 8.0, 1e-12);
  EXPECT_NEAR(scan.gain, 8.0, 1e-4);
  // The leading real part is negative while the gain is below the bound and positive above.
  for (const auto& row : scan.rows) {
    if (std::abs(row.gain - 8.0) < 1e-3) continue;
    EXPECT_EQ(row.max_real < 0, row.gain < 8.0) << row.eps;
  }
}

TEST(Hopf, RequiresNegativeUnitCycle) {
  auto pos = load("cfs2_positive");
  EXPECT_THROW(hopf_scan(SwitchingSystem(pos.net, pos.z)), Error);
  auto gam = load("cfs3_negative_gamma");
  try {
    hopf_scan(SwitchingSystem(gam.net, gam.z));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GammaNotIdentity);
  }
}
