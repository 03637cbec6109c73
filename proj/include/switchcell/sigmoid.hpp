#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchcell/error.hpp"
#include "switchcell/network.hpp"
#include "switchcell/switching_parameter.hpp"

namespace switchcell {

/// How the Hill order grows as the perturbation parameter shrinks.
enum class HillOrder { InverseEpsilon, InverseEpsilonSquared };

inline double hill_exponent(double eps, HillOrder law) {
  if (!(eps > 0)) throw Error(ErrorKind::MalformedParameter, "epsilon must be positive");
  return law == HillOrder::InverseEpsilon ? 1.0 / eps : 1.0 / (eps * eps);
}

inline std::string to_string(HillOrder law) {
  return law == HillOrder::InverseEpsilon ? "n=1/eps" : "n=1/eps^2";
}

/// L + (U-L) x^n/(theta^n + x^n) for activation, L + (U-L) theta^n/(theta^n + x^n) for repression.
struct HillSigmoid {
  double lower = 0;
  double upper = 1;
  double theta = 1;
  double n = 1;
  int sign = 1;

  /// Fraction x^n/(theta^n + x^n), evaluated through the logistic of n ln(x/theta).
  double activation(double x) const {
    if (x <= 0) return 0;
    double t = n * std::log(x / theta);
    return t >= 0 ? 1 / (1 + std::exp(-t)) : std::exp(t) / (1 + std::exp(t));
  }

  double operator()(double x) const {
    double h = activation(x);
    return lower + (upper - lower) * (sign > 0 ? h : 1 - h);
  }

  double derivative(double x) const {
    if (x <= 0) return 0;
    double t = std::abs(n * std::log(x / theta));
    double e = std::exp(-t);
    double hh = e / ((1 + e) * (1 + e));
    return sign * (upper - lower) * (n / x) * hh;
  }
};

/// dx/dt = -Gamma x + Lambda(x; eps) with Hill switching functions.
class SigmoidSystem {
 public:
  SigmoidSystem(const RegulatoryNetwork& net, const BasicSwitchingParameter<double>& z, double eps,
                HillOrder law = HillOrder::InverseEpsilon)
      : SigmoidSystem(net, z, std::vector<double>(net.edges().size(), eps), law) {}

  SigmoidSystem(const RegulatoryNetwork& net, const BasicSwitchingParameter<double>& z, std::vector<double> eps,
                HillOrder law = HillOrder::InverseEpsilon)
      : net_(net), gamma_(z.gamma), eps_(std::move(eps)) {
    check_dimensions(net, z);
    if (eps_.size() != net.edges().size())
      throw Error(ErrorKind::DimensionMismatch, "one epsilon per edge is required");
    for (std::size_t e = 0; e < net.edges().size(); ++e) {
      const Edge& ed = net.edge(static_cast<int>(e));
      sigmoids_.push_back({z.L[e], z.U[e], z.theta[e], hill_exponent(eps_[e], law), ed.sign});
    }
  }

  const RegulatoryNetwork& network() const { return net_; }
  int dimension() const { return net_.size(); }
  const std::vector<double>& gamma() const { return gamma_; }
  const HillSigmoid& sigmoid(int edge) const { return sigmoids_.at(edge); }
  double epsilon(int edge) const { return eps_.at(edge); }

  double lambda(int i, const Eigen::VectorXd& x) const {
    double product = 1;
    for (const auto& factor : net_.logic(i)) {
      double sum = 0;
      for (const Input& in : factor) sum += sigmoids_[net_.edge_id(in.source, i)](x[in.source]);
      product *= sum;
    }
    return product;
  }

  Eigen::VectorXd production(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dimension());
    for (int i = 0; i < dimension(); ++i) out[i] = lambda(i, x);
    return out;
  }

  Eigen::VectorXd rhs(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = production(x);
    for (int i = 0; i < dimension(); ++i) out[i] -= gamma_[i] * x[i];
    return out;
  }

  /// Analytic Jacobian of rhs.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    const int n = dimension();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      j(i, i) -= gamma_[i];
      const auto& logic = net_.logic(i);
      std::vector<double> sums;
      for (const auto& factor : logic) {
        double sum = 0;
        for (const Input& in : factor) sum += sigmoids_[net_.edge_id(in.source, i)](x[in.source]);
        sums.push_back(sum);
      }
      for (std::size_t f = 0; f < logic.size(); ++f) {
        double others = 1;
        for (std::size_t g = 0; g < logic.size(); ++g)
          if (g != f) others *= sums[g];
        for (const Input& in : logic[f])
          j(i, in.source) += others * sigmoids_[net_.edge_id(in.source, i)].derivative(x[in.source]);
      }
    }
    return j;
  }

 private:
  RegulatoryNetwork net_;
  std::vector<double> gamma_;
  std::vector<double> eps_;
  std::vector<HillSigmoid> sigmoids_;
};

/// A one-parameter family of switching functions: value and derivative at (x, eps).
struct SigmoidFamily {
  std::function<double(double, double)> value;
  std::function<double(double, double)> derivative;
};

inline SigmoidFamily hill_family(double lower, double upper, double theta, int sign,
                                 HillOrder law = HillOrder::InverseEpsilon) {
  auto make = [=](double eps) { return HillSigmoid{lower, upper, theta, hill_exponent(eps, law), sign}; };
  return {[make](double x, double eps) { return make(eps)(x); },
          [make](double x, double eps) { return make(eps).derivative(x); }};
}

struct AxiomTolerances {
  /// Half-width of the window around theta, relative to theta.
  double delta = 0.5;
  /// Largest accepted C1 = sup|sigma'| eps outside the window, in units of (U-L)/theta.
  double c1_max = 4.0;
  /// Smallest accepted C2 = max|sigma'| eps, in units of (U-L)/theta.
  double c2_min = 0.05;
  /// Monotonicity slack and limit tolerance, relative to U-L.
  double slack = 1e-12;
  double limit = 1e-6;
};

struct AxiomSample {
  double eps = 0;
  double c1 = 0;
  double c2 = 0;
  double image_low = 0;
  double image_high = 0;
};

struct AxiomReport {
  std::vector<AxiomSample> samples;
  /// Items 1..4 that failed, in order.
  std::vector<int> violated;
  std::vector<std::string> messages;
  std::string convention;

  bool passed() const { return violated.empty(); }
};

/// Measures the four sigmoid conditions on a log grid for each eps of a decreasing schedule.
/// Item 3 uses the fixed window theta(1 +- delta); item 4 uses the maximal slope and the
/// image of the same window, which must widen toward (L, U) along the schedule.
inline AxiomReport check_sigmoid_axioms(const SigmoidFamily& family, double lower, double upper, double theta, int sign,
                                        const std::vector<double>& schedule, const AxiomTolerances& tol = {}) {
  AxiomReport report;
  report.convention = "window theta*(1 +- " + std::to_string(tol.delta) + "), slopes scaled by (U-L)/theta";
  const double range = upper - lower;
  const double unit = range / theta;
  auto fail = [&](int item, const std::string& msg) {
    if (std::find(report.violated.begin(), report.violated.end(), item) == report.violated.end())
      report.violated.push_back(item);
    report.messages.push_back("item " + std::to_string(item) + ": " + msg);
  };

  std::vector<double> grid;
  for (int k = -4000; k <= 4000; ++k) grid.push_back(theta * std::pow(10.0, k / 1000.0));

  for (double eps : schedule) {
    AxiomSample s{eps, 0, 0, 0, 0};
    double prev = family.value(grid.front(), eps);
    bool monotone = true;
    double lo = prev, hi = prev;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      double v = family.value(grid[k], eps);
      if (sign * (v - prev) < -tol.slack * range) monotone = false;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      prev = v;
      double x = grid[k];
      double slope = std::abs(family.derivative(x, eps));
      bool inside = x >= theta * (1 - tol.delta) && x <= theta * (1 + tol.delta);
      if (!inside) s.c1 = std::max(s.c1, slope * eps / unit);
      s.c2 = std::max(s.c2, slope * eps / unit);
    }
    if (!monotone) fail(1, "not monotone at eps=" + std::to_string(eps));
    double at_low = family.value(grid.front(), eps);
    double at_high = family.value(grid.back(), eps);
    double inf_v = sign > 0 ? at_low : at_high;
    double sup_v = sign > 0 ? at_high : at_low;
    if (lo < lower - tol.limit * range || hi > upper + tol.limit * range || std::abs(inf_v - lower) > tol.limit * range ||
        std::abs(sup_v - upper) > tol.limit * range)
      fail(2, "range is not (L,U) at eps=" + std::to_string(eps));
    if (s.c1 > tol.c1_max) fail(3, "slope outside the window too large at eps=" + std::to_string(eps));
    if (s.c2 < tol.c2_min) fail(4, "maximal slope too small at eps=" + std::to_string(eps));
    double a = family.value(theta * (1 - tol.delta), eps);
    double b = family.value(theta * (1 + tol.delta), eps);
    s.image_low = std::min(a, b);
    s.image_high = std::max(a, b);
    report.samples.push_back(s);
  }
  for (std::size_t k = 1; k < report.samples.size(); ++k) {
    const auto& p = report.samples[k - 1];
    const auto& q = report.samples[k];
    if (q.image_low > p.image_low + tol.slack * range || q.image_high < p.image_high - tol.slack * range)
      fail(4, "window image does not widen from eps=" + std::to_string(p.eps) + " to eps=" + std::to_string(q.eps));
  }
  return report;
}

inline void require_sigmoid_axioms(const AxiomReport& report) {
  if (!report.passed())
    throw Error(ErrorKind::AxiomViolated, "item " + std::to_string(report.violated.front()) + ": " + report.messages.front());
}

}  // namespace switchcell
