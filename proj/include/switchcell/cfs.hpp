#pragma once

#include <algorithm>
#include <vector>

#include "switchcell/cell_complex.hpp"
#include "switchcell/network.hpp"
#include "switchcell/switching_parameter.hpp"

namespace switchcell {

/// Maps cells of a normalized CFS back to the network it came from.
/// Normalized node k is original node node_of[k]; alpha[k] = -1 marks a reflected coordinate.
struct ReflectionRecord {
  std::vector<int> node_of;
  std::vector<int> alpha;

  bool identity() const {
    for (std::size_t k = 0; k < node_of.size(); ++k)
      if (node_of[k] != static_cast<int>(k) || alpha[k] != 1) return false;
    return true;
  }

  int reflected_count() const { return static_cast<int>(std::count(alpha.begin(), alpha.end(), -1)); }

  /// Every CFS direction has one threshold, so coordinates live in {0,1,2}.
  Cell to_original(const Cell& normalized) const {
    Cell out;
    out.coord.assign(node_of.size(), 0);
    for (std::size_t k = 0; k < node_of.size(); ++k)
      out[node_of[k]] = alpha[k] > 0 ? normalized[static_cast<int>(k)] : 2 - normalized[static_cast<int>(k)];
    return out;
  }

  Cell to_normalized(const Cell& original) const {
    Cell out;
    out.coord.assign(node_of.size(), 0);
    for (std::size_t k = 0; k < node_of.size(); ++k) {
      int c = original[node_of[k]];
      out[static_cast<int>(k)] = alpha[k] > 0 ? c : 2 - c;
    }
    return out;
  }
};

struct NormalizedCfs {
  CyclicFeedbackNetwork cfn;
  SwitchingParameter z;
  ReflectionRecord record;
};

/// Relabels the cycle as 0 -> 1 -> ... -> N-1 -> 0 and reflects coordinates so
/// that every edge activates except N-1 -> 0, which carries the cycle sign.
/// Reflecting node k sends its input levels v to (gamma_k theta_k)^2 / v, which
/// keeps every comparison with gamma_k theta_k and reverses it.
inline NormalizedCfs normalize_cfn_signs(const CyclicFeedbackNetwork& cfn, const SwitchingParameter& z) {
  const RegulatoryNetwork& net = cfn.network;
  check_dimensions(net, z);
  const int n = cfn.size();

  std::vector<int> alpha(n, 1);
  for (int k = 0; k + 1 < n; ++k) alpha[k + 1] = alpha[k] * cfn.edge_signs[k];

  std::vector<std::string> names;
  std::vector<RegulatoryNetwork::Logic> logic;
  for (int k = 0; k < n; ++k) {
    int prev = (k + n - 1) % n;
    names.push_back(net.name(cfn.order[k]));
    int s = alpha[prev] * cfn.edge_signs[prev] * alpha[k];
    logic.push_back({{Input{prev, s}}});
  }
  RegulatoryNetwork out_net(std::move(names), std::move(logic));

  SwitchingParameter out;
  out.L.assign(n, Rational(0));
  out.U.assign(n, Rational(0));
  out.theta.assign(n, Rational(0));
  out.gamma.assign(n, Rational(0));
  for (int k = 0; k < n; ++k) {
    int prev = (k + n - 1) % n;
    int next = (k + 1) % n;
    int in_old = net.edge_id(cfn.order[prev], cfn.order[k]);
    int out_old = net.edge_id(cfn.order[k], cfn.order[next]);
    int in_new = out_net.edge_id(prev, k);
    int out_new = out_net.edge_id(k, next);
    out.gamma[k] = z.gamma[cfn.order[k]];
    out.theta[out_new] = z.theta[out_old];
    if (alpha[k] > 0) {
      out.L[in_new] = z.L[in_old];
      out.U[in_new] = z.U[in_old];
    } else {
      Rational level = z.gamma[cfn.order[k]] * z.theta[out_old];
      Rational c = level * level;
      out.L[in_new] = c / z.U[in_old];
      out.U[in_new] = c / z.L[in_old];
    }
  }

  CyclicFeedbackNetwork normalized{out_net, {}, {}, cfn.cycle_sign};
  for (int k = 0; k < n; ++k) {
    normalized.order.push_back(k);
    normalized.edge_signs.push_back(k + 1 < n ? 1 : cfn.cycle_sign);
  }
  return {std::move(normalized), std::move(out), {cfn.order, std::move(alpha)}};
}

namespace detail {

/// Equilibrium cells of a normalized CFS by the essential-node lemmas, in normalized coordinates.
inline std::vector<Cell> normalized_cfs_equilibria(const RegulatoryNetwork& net, const SwitchingParameter& z,
                                                    int cycle_sign) {
  const int n = net.size();
  // state: -1 low (0,theta), +1 high (theta,inf), 0 essential
  std::vector<int> state(n, 0);
  for (int k = 0; k < n; ++k) {
    int prev = (k + n - 1) % n;
    int in = net.edge_id(prev, k);
    Rational level = z.gamma[k] * z.theta[net.edge_id(k, (k + 1) % n)];
    if (z.U[in] < level) state[k] = -1;
    else if (level < z.L[in]) state[k] = 1;
  }
  bool all_essential = std::all_of(state.begin(), state.end(), [](int s) { return s == 0; });
  std::vector<Cell> out;
  if (all_essential) {
    out.push_back(Cell{std::vector<int>(n, 1)});
    if (cycle_sign > 0) {
      out.push_back(Cell{std::vector<int>(n, 0)});
      out.push_back(Cell{std::vector<int>(n, 2)});
    }
  } else {
    Cell c{std::vector<int>(n, 0)};
    for (int j = 0; j < n; ++j) {
      int k = j;
      while (state[k] == 0) k = (k + n - 1) % n;
      int s = state[k];
      if (cycle_sign < 0 && k > j) s = -s;
      c[j] = s < 0 ? 0 : 2;
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Equilibrium cells of a cyclic feedback system from the essential-node lemmas,
/// in the coordinates of cfn.network.
inline std::vector<Cell> cfs_equilibrium_cells(const CyclicFeedbackNetwork& cfn, const SwitchingParameter& z) {
  require_regular(cfn.network, z);
  NormalizedCfs norm = normalize_cfn_signs(cfn, z);
  std::vector<Cell> out;
  for (const Cell& c : detail::normalized_cfs_equilibria(norm.cfn.network, norm.z, norm.cfn.cycle_sign))
    out.push_back(norm.record.to_original(c));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace switchcell
