#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchcell/equilibria.hpp"

namespace switchcell {

enum class Stability { Stable, Unstable, Undetermined };
enum class Bifurcation { None, SteadyState, Hopf };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Undetermined: return "undetermined";
  }
  return "undetermined";
}

inline std::string to_string(Bifurcation b) {
  switch (b) {
    case Bifurcation::None: return "none";
    case Bifurcation::SteadyState: return "steady-state";
    case Bifurcation::Hopf: return "hopf";
  }
  return "none";
}

struct StabilityVerdict {
  Stability value = Stability::Undetermined;
  Bifurcation bifurcation = Bifurcation::None;
  std::string rule;
  std::vector<std::string> assumptions;
};

inline constexpr double kBifurcationTolerance = 1e-12;

/// Characteristic polynomial of a CFS Jacobian: (-1)^N (prod(gamma_i + lambda) - sign*M).
template <class Scalar>
Scalar cfs_char_poly(std::span<const double> gammas, int sign, double m, Scalar lambda) {
  Scalar product = 1;
  for (double g : gammas) product *= Scalar(g) + lambda;
  Scalar value = product - Scalar(sign * m);
  return gammas.size() % 2 ? -value : value;
}

/// Jacobian of a CFS at a point: -Gamma on the diagonal and the cycle derivatives
/// slope[k] = dLambda_{k+1}/dx_k, with the closing entry (0, N-1).
inline Eigen::MatrixXd cfs_jacobian(std::span<const double> gammas, std::span<const double> slopes) {
  const auto n = static_cast<Eigen::Index>(gammas.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    j(k, k) -= gammas[k];
    j((k + 1) % n, k) += slopes[k];
  }
  return j;
}

inline double product(std::span<const double> values) {
  double p = 1;
  for (double v : values) p *= v;
  return p;
}

inline bool near_equal(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

inline StabilityVerdict positive_cycle_verdict(std::span<const double> gammas, double m) {
  double threshold = product(gammas);
  if (near_equal(m, threshold, kBifurcationTolerance))
    return {Stability::Undetermined, Bifurcation::SteadyState, "positive cycle at gain equal to the decay product", {}};
  if (m < threshold) return {Stability::Stable, Bifurcation::None, "positive cycle with gain below the decay product", {}};
  return {Stability::Unstable, Bifurcation::None, "positive cycle with gain above the decay product", {}};
}

/// Exact variant for gains known as rationals.
inline StabilityVerdict positive_cycle_verdict(std::span<const Rational> gammas, const Rational& m) {
  Rational threshold = 1;
  for (const auto& g : gammas) threshold *= g;
  if (m == threshold)
    return {Stability::Undetermined, Bifurcation::SteadyState, "positive cycle at gain equal to the decay product", {}};
  if (m < threshold) return {Stability::Stable, Bifurcation::None, "positive cycle with gain below the decay product", {}};
  return {Stability::Unstable, Bifurcation::None, "positive cycle with gain above the decay product", {}};
}

inline bool is_identity(std::span<const double> gammas) {
  for (double g : gammas)
    if (g != 1.0) return false;
  return true;
}

/// sec(pi/N)^N, the secant gain bound of a negative cycle with unit decay rates.
inline double secant_bound(int n) { return std::pow(1.0 / std::cos(std::numbers::pi / n), n); }

/// Eigenvalues -1 + M^(1/N) e^(i phi_k) of a CFS with unit decay rates, k = 0..N-1.
inline std::vector<std::complex<double>> cfs_eigenvalues(int n, int sign, double m) {
  std::vector<std::complex<double>> out;
  const double r = std::pow(m, 1.0 / n);
  for (int k = 0; k < n; ++k) {
    double phi = ((sign > 0 ? 0.0 : std::numbers::pi) + 2 * std::numbers::pi * k) / n;
    out.push_back(std::complex<double>(-1.0, 0.0) + std::polar(r, phi));
  }
  return out;
}

inline std::vector<std::complex<double>> cfs_eigenvalues(std::span<const double> gammas, int sign, double m) {
  if (!is_identity(gammas)) throw Error(ErrorKind::GammaNotIdentity, "closed-form eigenvalues need unit decay rates");
  return cfs_eigenvalues(static_cast<int>(gammas.size()), sign, m);
}

inline StabilityVerdict negative_cycle_verdict(std::span<const double> gammas, double m) {
  const int n = static_cast<int>(gammas.size());
  if (n <= 2) return {Stability::Stable, Bifurcation::None, "negative cycle of length at most two", {}};
  if (!is_identity(gammas))
    return {Stability::Undetermined, Bifurcation::None, "negative cycle longer than two with non-unit decay rates",
            {"secant test requires unit decay rates"}};
  double bound = secant_bound(n);
  std::vector<std::string> assumptions{"unit decay rates"};
  if (near_equal(m, bound, kBifurcationTolerance))
    return {Stability::Undetermined, Bifurcation::Hopf, "negative cycle at the secant bound", assumptions};
  if (m < bound) return {Stability::Stable, Bifurcation::None, "negative cycle below the secant bound", assumptions};
  return {Stability::Unstable, Bifurcation::None, "negative cycle above the secant bound", assumptions};
}

struct CycleVerdict {
  int d = 0;
  std::vector<int> nodes;
  int sign = 1;
  /// Whether the cell's restriction to this cycle is a regular cell of the subsystem.
  bool local_regular = true;
  StabilityVerdict verdict;
};

struct CellStability {
  Cell root;
  std::vector<CycleVerdict> cycles;
  StabilityVerdict overall;
};

/// Stability of an equilibrium cell through the cycle decomposition at root tau.
inline CellStability cell_stability(const SwitchingSystem& sys, const EquilibriumCellRecord& record, const Cell& tau) {
  const CellComplex& cx = sys.complex();
  auto lcc = cx.loop_characteristic(tau);
  if (!lcc || !cx.in_closure(tau, record.cell))
    throw Error(ErrorKind::RecordRootMismatch,
                cx.notation(record.cell) + " is not in the neighborhood of " + cx.notation(tau));
  Decomposition dec = decompose_at(sys, tau);
  CellStability out;
  out.root = tau;
  bool any_unstable = false;
  bool all_stable = true;
  for (const auto& sub : dec.cycles) {
    Cell local = sub.local_of(record.cell);
    bool regular = local.regular();
    CycleVerdict cv{sub.d, sub.nodes, sub.sign, regular, {}};
    if (regular) {
      cv.verdict = {Stability::Stable, Bifurcation::None, "cell is regular in the cycle subsystem", {}};
    } else if (sub.sign > 0) {
      cv.verdict = {Stability::Unstable, Bifurcation::None, "singular in a positive cycle", {}};
    } else if (sub.length() <= 2) {
      cv.verdict = {Stability::Stable, Bifurcation::None, "singular in a negative cycle of length at most two", {}};
    } else if (sub.gamma_identity()) {
      cv.verdict = {Stability::Unstable, Bifurcation::None, "singular in a negative cycle longer than two",
                    {"unit decay rates on the cycle"}};
    } else {
      cv.verdict = {Stability::Undetermined, Bifurcation::None,
                    "singular in a negative cycle longer than two with non-unit decay rates",
                    {"secant test requires unit decay rates"}};
    }
    if (cv.verdict.value == Stability::Unstable) any_unstable = true;
    if (cv.verdict.value != Stability::Stable) all_stable = false;
    out.cycles.push_back(std::move(cv));
  }
  if (any_unstable) {
    out.overall = {Stability::Unstable, Bifurcation::None, "unstable in at least one cycle", {}};
  } else if (all_stable) {
    out.overall = {Stability::Stable, Bifurcation::None,
                   dec.cycles.empty() ? "regular equilibrium cell" : "stable in every cycle", {}};
  } else {
    out.overall = {Stability::Undetermined, Bifurcation::None, "some cycle is undetermined", {}};
  }
  for (const auto& cv : out.cycles)
    for (const auto& a : cv.verdict.assumptions) out.overall.assumptions.push_back(a);
  return out;
}

/// The verdict taken at the cell itself as root, which is always a valid root.
inline CellStability cell_stability(const SwitchingSystem& sys, const EquilibriumCellRecord& record) {
  return cell_stability(sys, record, record.cell);
}

}  // namespace switchcell
