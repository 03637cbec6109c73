#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchcell/equilibria.hpp"
#include "switchcell/parallel.hpp"
#include "switchcell/sigmoid.hpp"
#include "switchcell/stability.hpp"

namespace switchcell {

struct NewtonOptions {
  int max_iterations = 200;
  int max_halvings = 60;
  double tolerance = 1e-12;
};

struct NewtonResult {
  bool converged = false;
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::string failure;
};

/// Normwise backward error |F(x)|_inf / (|J|_inf |x|_inf + size of the decay and production terms).
/// Steep sigmoids make |J| large, and a plain relative |F| cannot drop below |J| ulp(x).
inline double relative_residual(const SigmoidSystem& sys, const Eigen::VectorXd& x) {
  Eigen::VectorXd p = sys.production(x);
  double size = 0, worst = 0;
  for (int i = 0; i < sys.dimension(); ++i) {
    double decay = sys.gamma()[i] * x[i];
    size = std::max({size, std::abs(decay), std::abs(p[i])});
    worst = std::max(worst, std::abs(p[i] - decay));
  }
  double scale = sys.jacobian(x).cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff() + size;
  return scale > 0 ? worst / scale : worst;
}

/// Damped Newton on -Gamma x + Lambda(x) = 0 with step halving on the residual norm.
inline NewtonResult newton_solve(const SigmoidSystem& sys, Eigen::VectorXd x, const NewtonOptions& opt = {}) {
  NewtonResult out;
  Eigen::VectorXd f = sys.rhs(x);
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it;
    double rel = relative_residual(sys, x);
    if (rel <= opt.tolerance) {
      out.converged = true;
      out.x = x;
      out.residual = rel;
      return out;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.jacobian(x));
    if (!lu.isInvertible()) {
      out.failure = "singular Jacobian";
      break;
    }
    Eigen::VectorXd step = lu.solve(-f);
    double norm = f.norm();
    double t = 1;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      Eigen::VectorXd trial = x + t * step;
      if ((trial.array() <= 0).any()) continue;
      Eigen::VectorXd ft = sys.rhs(trial);
      if (ft.norm() < norm) {
        x = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.failure = "no descent after step halving";
      break;
    }
  }
  out.x = x;
  out.residual = relative_residual(sys, x);
  if (out.residual <= opt.tolerance) {
    out.converged = true;
    out.failure.clear();
  } else if (out.failure.empty()) {
    out.failure = "iteration limit";
  }
  return out;
}

/// Real-valued geometry of the cell complex.
class CellGeometry {
 public:
  CellGeometry(const SwitchingSystem& sys) : complex_(&sys.complex()) {
    const auto& z = sys.parameter();
    const auto& net = sys.network();
    const int n = sys.dimension();
    thresholds_.resize(n);
    top_.resize(n);
    for (int j = 0; j < n; ++j) {
      for (int p = 1; p <= complex_->threshold_count(j); ++p) thresholds_[j].push_back(to_double(sys.threshold(j, p)));
      scale_ = std::max(scale_, thresholds_[j].back());
    }
    for (int j = 0; j < n; ++j) {
      const int inputs = input_count(net, j);
      double most = 0;
      for (InputCombination a = 0; a < (InputCombination{1} << inputs); ++a)
        most = std::max(most, to_double(omega(net, z, j, a)));
      top_[j] = thresholds_[j].back() + most / to_double(z.gamma[j]);
    }
  }

  double scale() const { return scale_; }

  /// Value of position p in direction j, with 0 and infinity at the ends.
  double position_value(int j, int p) const {
    if (p == 0) return 0;
    if (p > static_cast<int>(thresholds_[j].size())) return std::numeric_limits<double>::infinity();
    return thresholds_[j][p - 1];
  }

  double lower(int j, int c) const { return c % 2 ? position_value(j, (c + 1) / 2) : position_value(j, c / 2); }
  double upper(int j, int c) const { return c % 2 ? position_value(j, (c + 1) / 2) : position_value(j, c / 2 + 1); }

  /// Euclidean distance from x to the closure of the cell.
  double distance(const Eigen::VectorXd& x, const Cell& c) const {
    double sum = 0;
    for (int j = 0; j < c.size(); ++j) {
      double lo = lower(j, c[j]), hi = upper(j, c[j]);
      double d = x[j] < lo ? lo - x[j] : x[j] > hi ? x[j] - hi : 0;
      sum += d * d;
    }
    return std::sqrt(sum);
  }

  /// Thresholds for singular coordinates, midpoints otherwise; an infinite end is replaced by the attracting bound.
  Eigen::VectorXd representative(const Cell& c) const {
    Eigen::VectorXd x(c.size());
    for (int j = 0; j < c.size(); ++j) {
      double lo = lower(j, c[j]);
      double hi = upper(j, c[j]);
      if (std::isinf(hi)) hi = top_[j];
      x[j] = 0.5 * (lo + hi);
    }
    return x;
  }

  /// A uniformly random point of the cell (singular coordinates exact).
  template <class Rng>
  Eigen::VectorXd sample(const Cell& c, Rng& rng) const {
    Eigen::VectorXd x(c.size());
    for (int j = 0; j < c.size(); ++j) {
      double lo = lower(j, c[j]);
      double hi = upper(j, c[j]);
      if (std::isinf(hi)) hi = top_[j];
      x[j] = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
      if (x[j] <= 0) x[j] = 0.5 * hi;
    }
    return x;
  }

  /// Cell containing x after snapping coordinates within tol of a threshold onto it.
  Cell snap(const Eigen::VectorXd& x, double tol) const {
    Cell c;
    for (int j = 0; j < static_cast<int>(thresholds_.size()); ++j) {
      const auto& t = thresholds_[j];
      int coord = 0;
      bool done = false;
      for (std::size_t p = 0; p < t.size() && !done; ++p) {
        if (std::abs(x[j] - t[p]) <= tol) {
          coord = 2 * static_cast<int>(p) + 1;
          done = true;
        } else if (x[j] < t[p]) {
          coord = 2 * static_cast<int>(p);
          done = true;
        }
      }
      if (!done) coord = 2 * static_cast<int>(t.size());
      c.coord.push_back(coord);
    }
    return c;
  }

 private:
  const CellComplex* complex_;
  std::vector<std::vector<double>> thresholds_;
  std::vector<double> top_;
  double scale_ = 0;
};

/// Minimum-cost assignment of rows to distinct columns (rows <= columns); returns the column of each row.
inline std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost[0].size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(m + 1, 0), way_cost(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(way_cost.begin(), way_cost.end(), inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < way_cost[j]) {
          way_cost[j] = cur;
          way[j] = j0;
        }
        if (way_cost[j] < delta) {
          delta = way_cost[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          way_cost[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> out(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j]) out[p[j] - 1] = j - 1;
  return out;
}

/// Assignment for any rectangular cost matrix; the column of each row, or -1 when rows outnumber columns.
inline std::vector<int> assign_rows(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  std::vector<int> out(rows, -1);
  if (rows == 0 || cols == 0) return out;
  if (rows <= cols) return min_cost_assignment(cost);
  std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
  for (std::size_t a = 0; a < rows; ++a)
    for (std::size_t b = 0; b < cols; ++b) t[b][a] = cost[a][b];
  auto pick = min_cost_assignment(t);
  for (std::size_t b = 0; b < cols; ++b) out[pick[b]] = static_cast<int>(b);
  return out;
}

struct OracleOptions {
  std::vector<double> schedule{0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
  HillOrder law = HillOrder::InverseEpsilonSquared;
  int seeds_per_cell = 1;
  bool grid_seeds = true;
  NewtonOptions newton;
  /// Final-distance tolerance and monotonicity noise, both relative to the threshold scale.
  double distance_tolerance = 1e-3;
  double monotone_noise = 1e-8;
  double dedup = 1e-6;
  double spectral_margin = 1e-6;
  double spectrum_tolerance = 1e-6;
  unsigned rng_seed = 12345;
};

struct NumericalEquilibrium {
  Eigen::VectorXd x;
  double residual = 0;
  Eigen::MatrixXd jacobian;
  std::vector<std::complex<double>> eigenvalues;
  double max_real = 0;
  int seed = -1;
  /// Index into the predicted cells, or -1.
  int matched = -1;
  double distance = 0;
  Cell snapped;
};

struct SpectralCheck {
  double eps = 0;
  int cell = -1;
  double max_real = 0;
  Stability verdict = Stability::Undetermined;
  /// "pass", "fail", "margin", "exempt".
  std::string outcome;
  /// Closed-form spectrum comparison for unit-decay cyclic systems; negative when not applicable.
  double spectrum_error = -1;
  double gain = 0;
};

struct EpsilonStep {
  double eps = 0;
  std::vector<NumericalEquilibrium> roots;
  int failed_seeds = 0;
  int seeds = 0;
  bool bijective = false;
};

struct CellTrack {
  Cell cell;
  CellStability stability;
  /// Distance of the matched root to the closure per schedule entry; NaN when unmatched.
  std::vector<double> distance;
  bool monotone = true;
  bool converged = false;
};

struct SweepReport {
  double scale = 0;
  HillOrder law = HillOrder::InverseEpsilonSquared;
  std::vector<EpsilonStep> steps;
  std::vector<CellTrack> tracks;
  std::vector<SpectralCheck> spectral;
  /// Roots at the final eps that snap onto a cell that is not an equilibrium cell.
  std::vector<std::string> negative_control;
  std::vector<std::string> failures;

  bool final_bijective() const { return !steps.empty() && steps.back().bijective; }
  bool converged() const {
    return std::all_of(tracks.begin(), tracks.end(), [](const CellTrack& t) { return t.converged; });
  }
  bool monotone() const {
    return std::all_of(tracks.begin(), tracks.end(), [](const CellTrack& t) { return t.monotone; });
  }
  int contradictions() const {
    int n = 0;
    for (const auto& s : spectral)
      if (s.outcome == "fail" && s.eps == steps.back().eps) ++n;
    return n;
  }
  bool passed() const {
    return final_bijective() && converged() && monotone() && contradictions() == 0 && negative_control.empty();
  }
};

inline std::vector<std::complex<double>> eigenvalues_of(const Eigen::MatrixXd& j) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(j, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()[k]);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return out;
}

/// Largest relative distance from each closed-form eigenvalue to the nearest computed one.
inline double spectrum_mismatch(const std::vector<std::complex<double>>& analytic,
                                const std::vector<std::complex<double>>& computed) {
  double worst = 0;
  std::vector<bool> used(computed.size(), false);
  for (const auto& a : analytic) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = 0;
    for (std::size_t k = 0; k < computed.size(); ++k) {
      if (used[k]) continue;
      double d = std::abs(a - computed[k]);
      if (d < best) {
        best = d;
        pick = k;
      }
    }
    used[pick] = true;
    worst = std::max(worst, best / std::max(1.0, std::abs(a)));
  }
  return worst;
}

/// Roots of one sigmoidal system from the given seeds, deduplicated at dedup * scale.
inline std::vector<NumericalEquilibrium> find_equilibria(const SigmoidSystem& sys, const std::vector<Eigen::VectorXd>& seeds,
                                                         double dedup_distance, const NewtonOptions& opt,
                                                         int* failed = nullptr) {
  std::vector<NewtonResult> results(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) { results[s] = newton_solve(sys, seeds[s], opt); });
  std::vector<NumericalEquilibrium> out;
  int fails = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const auto& r = results[s];
    if (!r.converged) {
      ++fails;
      continue;
    }
    bool duplicate = false;
    for (auto& e : out)
      if ((e.x - r.x).norm() <= dedup_distance) {
        duplicate = true;
        if (r.residual < e.residual) {
          e.x = r.x;
          e.residual = r.residual;
        }
        break;
      }
    if (duplicate) continue;
    NumericalEquilibrium e;
    e.x = r.x;
    e.residual = r.residual;
    e.seed = static_cast<int>(s);
    out.push_back(std::move(e));
  }
  for (auto& e : out) {
    e.jacobian = sys.jacobian(e.x);
    e.eigenvalues = eigenvalues_of(e.jacobian);
    e.max_real = e.eigenvalues.front().real();
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
  });
  if (failed) *failed = fails;
  return out;
}

/// Product of the cycle derivative magnitudes |dLambda_{k+1}/dx_k| of a cyclic network at J.
/// A self-loop shares its entry with the decay term, which is added back.
inline double cycle_gain(const CyclicFeedbackNetwork& cfn, const Eigen::MatrixXd& j, const std::vector<double>& gamma) {
  double m = 1;
  for (int k = 0; k < cfn.size(); ++k) {
    int a = cfn.order[k];
    int b = cfn.order[(k + 1) % cfn.size()];
    m *= std::abs(j(b, a) + (a == b ? gamma[a] : 0.0));
  }
  return m;
}

/// Solves the sigmoidal system along a decreasing eps schedule and compares the roots
/// with the predicted equilibrium cells and their stability verdicts.
inline SweepReport epsilon_sweep(const SwitchingSystem& sys, const std::vector<EquilibriumCellRecord>& predicted,
                                 const OracleOptions& opt = {}) {
  if (opt.schedule.empty()) throw Error(ErrorKind::MalformedParameter, "epsilon schedule is empty");
  for (std::size_t k = 0; k < opt.schedule.size(); ++k)
    if (!(opt.schedule[k] > 0) || (k && !(opt.schedule[k] < opt.schedule[k - 1])))
      throw Error(ErrorKind::MalformedParameter, "epsilon schedule must be positive and strictly decreasing");

  SweepReport report;
  report.law = opt.law;
  CellGeometry geo(sys);
  const double scale = geo.scale();
  report.scale = scale;
  const auto zd = to_double(sys.parameter());
  const auto cfn = classify_cfn(sys.network());
  const bool unit_decay = std::all_of(zd.gamma.begin(), zd.gamma.end(), [](double g) { return g == 1.0; });

  for (const auto& rec : predicted) {
    CellTrack t;
    t.cell = rec.cell;
    t.stability = cell_stability(sys, rec);
    report.tracks.push_back(std::move(t));
  }

  std::mt19937 rng(opt.rng_seed);
  std::vector<Eigen::VectorXd> base_seeds;
  for (const auto& rec : predicted) {
    base_seeds.push_back(geo.representative(rec.cell));
    for (int s = 1; s < opt.seeds_per_cell; ++s) base_seeds.push_back(geo.sample(rec.cell, rng));
  }
  if (opt.grid_seeds)
    for (const Cell& c : sys.complex().cells()) base_seeds.push_back(geo.representative(c));

  std::vector<Eigen::VectorXd> previous;
  for (double eps : opt.schedule) {
    SigmoidSystem sig(sys.network(), zd, eps, opt.law);
    std::vector<Eigen::VectorXd> seeds = previous;
    seeds.insert(seeds.end(), base_seeds.begin(), base_seeds.end());
    EpsilonStep step;
    step.eps = eps;
    step.seeds = static_cast<int>(seeds.size());
    step.roots = find_equilibria(sig, seeds, opt.dedup * scale, opt.newton, &step.failed_seeds);
    step.bijective = step.roots.size() == predicted.size();
    previous.clear();
    for (auto& root : step.roots) {
      root.snapped = geo.snap(root.x, opt.distance_tolerance * scale);
      previous.push_back(root.x);
    }
    report.steps.push_back(std::move(step));
  }

  // Cells are assigned at the smallest eps only. Earlier roots inherit the cell of the root they
  // continue into, so a branch that has not yet appeared is never confused with a neighbor.
  auto& final_roots = report.steps.back().roots;
  {
    std::vector<std::vector<double>> cost(final_roots.size(), std::vector<double>(predicted.size()));
    for (std::size_t a = 0; a < final_roots.size(); ++a)
      for (std::size_t b = 0; b < predicted.size(); ++b) cost[a][b] = geo.distance(final_roots[a].x, predicted[b].cell);
    auto pick = assign_rows(cost);
    for (std::size_t a = 0; a < final_roots.size(); ++a) final_roots[a].matched = pick[a];
  }
  for (std::size_t k = report.steps.size() - 1; k-- > 0;) {
    auto& here = report.steps[k].roots;
    const auto& next = report.steps[k + 1].roots;
    std::vector<std::vector<double>> cost(here.size(), std::vector<double>(next.size()));
    for (std::size_t a = 0; a < here.size(); ++a)
      for (std::size_t b = 0; b < next.size(); ++b) cost[a][b] = (here[a].x - next[b].x).norm();
    auto pick = assign_rows(cost);
    for (std::size_t a = 0; a < here.size(); ++a) here[a].matched = pick[a] < 0 ? -1 : next[pick[a]].matched;
  }

  for (std::size_t k = 0; k < report.steps.size(); ++k) {
    auto& step = report.steps[k];
    for (auto& root : step.roots) {
      if (root.matched < 0) continue;
      root.distance = geo.distance(root.x, predicted[root.matched].cell);
      auto& track = report.tracks[root.matched];
      track.distance.resize(k, std::numeric_limits<double>::quiet_NaN());
      track.distance.push_back(root.distance);

      SpectralCheck sc;
      sc.eps = step.eps;
      sc.cell = root.matched;
      sc.max_real = root.max_real;
      sc.verdict = track.stability.overall.value;
      if (sc.verdict == Stability::Undetermined) sc.outcome = "exempt";
      else if (std::abs(root.max_real) <= opt.spectral_margin) sc.outcome = "margin";
      else sc.outcome = (root.max_real < 0) == (sc.verdict == Stability::Stable) ? "pass" : "fail";
      if (cfn && unit_decay) {
        sc.gain = cycle_gain(*cfn, root.jacobian, zd.gamma);
        sc.spectrum_error = spectrum_mismatch(cfs_eigenvalues(cfn->size(), cfn->cycle_sign, sc.gain), root.eigenvalues);
        if (sc.spectrum_error > opt.spectrum_tolerance && sc.outcome != "exempt") sc.outcome = "fail";
      }
      report.spectral.push_back(sc);
    }
    for (auto& track : report.tracks) track.distance.resize(k + 1, std::numeric_limits<double>::quiet_NaN());
  }

  const auto& last = report.steps.back();
  const double tol = opt.distance_tolerance * scale;
  const double noise = opt.monotone_noise * scale;
  for (auto& track : report.tracks) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (double d : track.distance) {
      if (std::isnan(d)) continue;
      if (!std::isnan(prev) && d > prev + noise) track.monotone = false;
      prev = d;
    }
    double final_d = track.distance.back();
    track.converged = last.bijective && !std::isnan(final_d) && final_d < tol;
    if (!track.converged)
      report.failures.push_back("ConvergenceFailure: " + sys.complex().notation(track.cell));
    if (!track.monotone)
      report.failures.push_back("distance not monotone: " + sys.complex().notation(track.cell));
  }
  if (!last.bijective)
    report.failures.push_back("bijection: " + std::to_string(last.roots.size()) + " roots for " +
                              std::to_string(predicted.size()) + " equilibrium cells");
  for (const auto& root : last.roots) {
    bool predicted_cell = std::any_of(predicted.begin(), predicted.end(),
                                      [&](const auto& rec) { return rec.cell == root.snapped; });
    if (!predicted_cell) {
      std::string what = sys.complex().is_loop_characteristic(root.snapped) ? "non-equilibrium LCC" : "non-LCC cell";
      report.negative_control.push_back("root persists at " + what + " " + sys.complex().notation(root.snapped));
    }
  }
  for (const auto& s : report.spectral)
    if (s.outcome == "fail" && s.eps == last.eps)
      report.failures.push_back("spectral contradiction at " + sys.complex().notation(predicted[s.cell].cell));
  for (const auto& n : report.negative_control) report.failures.push_back(n);
  return report;
}

struct HopfRow {
  double eps = 0;
  double gain = 0;
  double max_real = 0;
};

struct HopfScan {
  std::vector<HopfRow> rows;
  bool found = false;
  double eps = 0;
  double gain = 0;
  double bound = 0;
};

/// Tracks the unique equilibrium of a negative cyclic system with unit decay rates along eps
/// and locates where the leading real part crosses zero.
inline HopfScan hopf_scan(const SwitchingSystem& sys, HillOrder law = HillOrder::InverseEpsilonSquared, double eps_high = 0.5,
                          double eps_low = 0.005, int rows = 25) {
  auto cfn = classify_cfn(sys.network());
  if (!cfn || cfn->cycle_sign > 0 || cfn->size() < 3)
    throw Error(ErrorKind::UnsupportedDimension, "Hopf scan needs a negative cyclic network with at least three nodes");
  const auto zd = to_double(sys.parameter());
  if (!std::all_of(zd.gamma.begin(), zd.gamma.end(), [](double g) { return g == 1.0; }))
    throw Error(ErrorKind::GammaNotIdentity, "Hopf scan needs unit decay rates");

  CellGeometry geo(sys);
  HopfScan scan;
  scan.bound = secant_bound(cfn->size());
  Eigen::VectorXd x = geo.representative(Cell{std::vector<int>(sys.dimension(), 1)});

  auto evaluate = [&](double eps, Eigen::VectorXd& guess) {
    SigmoidSystem sig(sys.network(), zd, eps, law);
    NewtonResult r = newton_solve(sig, guess);
    if (!r.converged) throw Error(ErrorKind::NewtonDiverged, "no equilibrium at eps=" + std::to_string(eps));
    guess = r.x;
    Eigen::MatrixXd j = sig.jacobian(r.x);
    return HopfRow{eps, cycle_gain(*cfn, j, zd.gamma), eigenvalues_of(j).front().real()};
  };

  for (int k = 0; k < rows; ++k) {
    double eps = eps_high * std::pow(eps_low / eps_high, static_cast<double>(k) / (rows - 1));
    scan.rows.push_back(evaluate(eps, x));
  }
  for (std::size_t k = 1; k < scan.rows.size(); ++k) {
    if ((scan.rows[k - 1].max_real < 0) == (scan.rows[k].max_real < 0)) continue;
    double hi = scan.rows[k - 1].eps, lo = scan.rows[k].eps;
    bool hi_negative = scan.rows[k - 1].max_real < 0;
    Eigen::VectorXd guess = x;
    SigmoidSystem start(sys.network(), zd, hi, law);
    guess = newton_solve(start, geo.representative(Cell{std::vector<int>(sys.dimension(), 1)})).x;
    HopfRow mid{};
    for (int it = 0; it < 80; ++it) {
      double m = std::sqrt(hi * lo);
      mid = evaluate(m, guess);
      if ((mid.max_real < 0) == hi_negative) hi = m;
      else lo = m;
      if (hi / lo - 1 < 1e-14) break;
    }
    scan.found = true;
    scan.eps = mid.eps;
    scan.gain = mid.gain;
    break;
  }
  return scan;
}

}  // namespace switchcell
