#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "switchcell/cell_complex.hpp"
#include "switchcell/cfs.hpp"
#include "switchcell/dynamics.hpp"
#include "switchcell/parallel.hpp"

namespace switchcell {

enum class CellKind { Regular, Singular };

inline std::string to_string(CellKind k) { return k == CellKind::Regular ? "regular" : "singular"; }

/// One cycle of rho at a root LCC, extended to a cyclic feedback system on the whole orthant.
/// Subsystem node k is network node nodes[k]; its edge k -> k+1 is nodes[k] -> rho(nodes[k]).
/// Local coordinates 0, 1, 2 stand for root coordinate c-1, c, c+1.
struct CfsSubsystem {
  Cell root;
  int d = 0;
  std::vector<int> nodes;
  int sign = 1;
  CyclicFeedbackNetwork cfn;
  SwitchingParameter z;

  int length() const { return static_cast<int>(nodes.size()); }

  bool gamma_identity() const {
    return std::all_of(z.gamma.begin(), z.gamma.end(), [](const Rational& g) { return g == 1; });
  }

  Cell local_of(const Cell& k) const {
    Cell out;
    for (int v : nodes) out.coord.push_back(k[v] - root[v] + 1);
    return out;
  }

  /// Writes local coordinates into a copy of base.
  Cell lift(const Cell& local, Cell base) const {
    for (int k = 0; k < length(); ++k) base[nodes[k]] = root[nodes[k]] + local[k] - 1;
    return base;
  }
};

/// Regular directions of the root, held at their intervals.
struct RegularBlock {
  std::vector<int> nodes;
  std::vector<int> phi;
  bool balanced = true;
};

struct Decomposition {
  LoopCharacteristicCell lcc;
  std::vector<CfsSubsystem> cycles;
  RegularBlock rest;
};

inline Decomposition decompose_at(const SwitchingSystem& sys, const Cell& tau) {
  const CellComplex& cx = sys.complex();
  const RegulatoryNetwork& net = sys.network();
  auto lcc = cx.loop_characteristic(tau);
  if (!lcc) throw Error(ErrorKind::NotLoopCharacteristic, cx.notation(tau) + " is not loop characteristic");

  Decomposition dec;
  dec.lcc = *lcc;
  for (std::size_t d = 0; d < lcc->cycles.size(); ++d) {
    const auto& cyc = lcc->cycles[d];
    const int len = static_cast<int>(cyc.size());
    std::vector<std::string> names;
    std::vector<RegulatoryNetwork::Logic> logic;
    for (int k = 0; k < len; ++k) {
      int prev = (k + len - 1) % len;
      names.push_back(net.name(cyc[k]));
      logic.push_back({{Input{prev, net.sign(cyc[prev], cyc[k])}}});
    }
    RegulatoryNetwork sub(std::move(names), std::move(logic));
    SwitchingParameter z;
    z.L.assign(len, Rational(0));
    z.U.assign(len, Rational(0));
    z.theta.assign(len, Rational(0));
    z.gamma.assign(len, Rational(0));
    for (int k = 0; k < len; ++k) {
      int prev = (k + len - 1) % len;
      int j = cyc[k];
      int p = cyc[prev];
      Rational lo = sys.lambda(j, cx.neighbor(tau, p, Side::Minus));
      Rational hi = sys.lambda(j, cx.neighbor(tau, p, Side::Plus));
      int in = sub.edge_id(prev, k);
      z.L[in] = lo < hi ? lo : hi;
      z.U[in] = lo < hi ? hi : lo;
      z.theta[sub.edge_id(k, (k + 1) % len)] = sys.parameter().theta[net.edge_id(j, lcc->rho[j])];
      z.gamma[k] = sys.parameter().gamma[j];
    }
    CyclicFeedbackNetwork cfn{sub, {}, {}, lcc->cycle_signs[d]};
    for (int k = 0; k < len; ++k) {
      cfn.order.push_back(k);
      cfn.edge_signs.push_back(sub.sign(k, (k + 1) % len));
    }
    dec.cycles.push_back({tau, static_cast<int>(d), cyc, lcc->cycle_signs[d], std::move(cfn), std::move(z)});
  }
  FlowDirection flow = sys.flow_direction(tau);
  for (int j = 0; j < sys.dimension(); ++j) {
    if (tau.singular(j)) continue;
    dec.rest.nodes.push_back(j);
    dec.rest.phi.push_back(flow.phi[j]);
    if (flow.phi[j] != 0) dec.rest.balanced = false;
  }
  return dec;
}

/// Eq^d for every cycle (local cells) and whether the regular block admits its own cell.
struct Candidates {
  std::vector<std::vector<Cell>> per_cycle;
  bool regular_balanced = true;
};

inline Candidates candidate_equilibrium_cells(const Decomposition& dec) {
  Candidates out;
  for (const auto& sub : dec.cycles) out.per_cycle.push_back(cfs_equilibrium_cells(sub.cfn, sub.z));
  out.regular_balanced = dec.rest.balanced;
  return out;
}

/// Eq^d by scanning every cell of the subsystem complex; the cross-check for the lemma path.
inline std::vector<Cell> brute_force_candidates(const CfsSubsystem& sub) {
  SwitchingSystem sys(sub.cfn.network, sub.z);
  std::vector<Cell> out;
  for (const Cell& c : sys.complex().cells())
    if (sys.is_equilibrium_cell(c)) out.push_back(c);
  return out;
}

struct ConsistencyCheck {
  bool consistent = true;
  /// One inequality per cycle node, each the one that holds; empty for the singular candidate.
  std::vector<std::string> witnesses;
};

namespace detail {

inline std::string lambda_expression(const SwitchingSystem& sys, int j, const Cell& c) {
  const RegulatoryNetwork& net = sys.network();
  auto a = sys.input_on(j, c);
  std::string out;
  for (const auto& factor : net.logic(j)) {
    if (!out.empty()) out += "*";
    std::string sum;
    for (const Input& in : factor) {
      if (!sum.empty()) sum += "+";
      bool on = (*a >> net.source_position(j, in.source)) & 1u;
      sum += std::string(on ? "U(" : "L(") + net.name(in.source) + "->" + net.name(j) + ")";
    }
    out += factor.size() > 1 && net.logic(j).size() > 1 ? "(" + sum + ")" : sum;
  }
  return out;
}

}  // namespace detail

inline ConsistencyCheck is_d_consistent(const SwitchingSystem& sys, const Decomposition& dec, int d,
                                        const Cell& local) {
  const auto& sub = dec.cycles.at(d);
  auto eq = cfs_equilibrium_cells(sub.cfn, sub.z);
  if (std::find(eq.begin(), eq.end(), local) == eq.end())
    throw Error(ErrorKind::NotCandidate, "local cell is not a candidate equilibrium of cycle " + std::to_string(d));
  ConsistencyCheck out;
  if (std::all_of(local.coord.begin(), local.coord.end(), [](int c) { return c == 1; })) return out;

  const CellComplex& cx = sys.complex();
  const RegulatoryNetwork& net = sys.network();
  const Cell& tau = dec.lcc.cell;
  const int len = sub.length();
  for (int k = 0; k < len; ++k) {
    int j = sub.nodes[k];
    int pk = (k + len - 1) % len;
    int p = sub.nodes[pk];
    Side side = local[pk] == 0 ? Side::Minus : Side::Plus;
    Cell at = cx.neighbor(tau, p, side);
    Rational lam = sys.lambda(j, at);
    std::string lam_text = detail::lambda_expression(sys, j, at);
    int pos = (tau[j] + 1) / 2;
    const Rational& g = sys.parameter().gamma[j];
    std::string g_text = "gamma(" + net.name(j) + ")";
    bool lower = local[k] == 0;
    int bound = lower ? pos - 1 : pos + 1;
    if (bound == 0 || bound == cx.threshold_count(j) + 1) {
      out.witnesses.push_back(lower ? g_text + "*0 < " + lam_text : lam_text + " < inf");
      continue;
    }
    int t = cx.target_at(j, bound);
    Rational level = g * sys.threshold(j, bound);
    std::string level_text = g_text + "*theta(" + net.name(j) + "->" + net.name(t) + ")";
    bool ok = lower ? level < lam : lam < level;
    if (!ok) out.consistent = false;
    bool level_first = lower == ok;
    const Rational& a = level_first ? level : lam;
    const Rational& b = level_first ? lam : level;
    out.witnesses.push_back((level_first ? level_text + " < " + lam_text : lam_text + " < " + level_text) + " [" +
                            to_string(a) + " < " + to_string(b) + "]");
  }
  return out;
}

struct CycleEvidence {
  int d = 0;
  std::vector<int> nodes;
  int sign = 1;
  Cell local;
  bool gamma_identity = false;
  ConsistencyCheck check;
};

/// How a cell was obtained from one root LCC.
struct RootEvidence {
  Cell root;
  std::vector<CycleEvidence> cycles;
};

struct EquilibriumCellRecord {
  Cell cell;
  CellKind kind = CellKind::Regular;
  std::vector<RootEvidence> roots;
};

/// Equilibrium cells in the neighborhood of tau, assembled from consistent candidates of each cycle.
inline std::vector<EquilibriumCellRecord> equilibria_in_neighborhood(const SwitchingSystem& sys, const Cell& tau,
                                                                     bool verify_candidates = false) {
  Decomposition dec = decompose_at(sys, tau);
  Candidates cand = candidate_equilibrium_cells(dec);
  if (verify_candidates) {
    for (std::size_t d = 0; d < dec.cycles.size(); ++d)
      if (brute_force_candidates(dec.cycles[d]) != cand.per_cycle[d])
        throw Error(ErrorKind::Contradiction,
                    "candidate cells of cycle " + std::to_string(d) + " at " + sys.complex().notation(tau) +
                        " differ between the lemma and the cell scan");
  }
  if (!cand.regular_balanced) return {};

  std::vector<std::vector<CycleEvidence>> options(dec.cycles.size());
  for (std::size_t d = 0; d < dec.cycles.size(); ++d) {
    const auto& sub = dec.cycles[d];
    for (const Cell& local : cand.per_cycle[d]) {
      ConsistencyCheck check = is_d_consistent(sys, dec, static_cast<int>(d), local);
      if (!check.consistent) continue;
      options[d].push_back({static_cast<int>(d), sub.nodes, sub.sign, local, sub.gamma_identity(), std::move(check)});
    }
    if (options[d].empty()) return {};
  }

  std::vector<EquilibriumCellRecord> out;
  std::vector<std::size_t> pick(options.size(), 0);
  for (;;) {
    Cell cell = tau;
    RootEvidence ev{tau, {}};
    for (std::size_t d = 0; d < options.size(); ++d) {
      cell = dec.cycles[d].lift(options[d][pick[d]].local, cell);
      ev.cycles.push_back(options[d][pick[d]]);
    }
    out.push_back({cell, cell.regular() ? CellKind::Regular : CellKind::Singular, {std::move(ev)}});
    std::size_t d = 0;
    while (d < pick.size() && ++pick[d] == options[d].size()) pick[d++] = 0;
    if (d == pick.size()) break;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.cell < b.cell; });
  return out;
}

/// Every loop characteristic cell with Phi identically zero, by direct scan.
inline std::vector<Cell> scan_equilibrium_cells(const SwitchingSystem& sys) {
  const CellComplex& cx = sys.complex();
  std::vector<char> hit(cx.cell_count(), 0);
  parallel_for(cx.cell_count(), [&](std::size_t id) { hit[id] = sys.is_equilibrium_cell(cx.cell_at(id)); });
  std::vector<Cell> out;
  for (std::size_t id = 0; id < hit.size(); ++id)
    if (hit[id]) out.push_back(cx.cell_at(id));
  return out;
}

/// Every loop characteristic cell of the complex.
inline std::vector<Cell> loop_characteristic_cells(const SwitchingSystem& sys) {
  std::vector<Cell> out;
  for (const Cell& c : sys.complex().cells())
    if (sys.complex().is_loop_characteristic(c)) out.push_back(c);
  return out;
}

/// Equilibrium cells of the whole system. Each cell is found through every root LCC
/// whose neighborhood contains it; the result is checked against the direct scan.
inline std::vector<EquilibriumCellRecord> equilibrium_cells(const SwitchingSystem& sys,
                                                            bool verify_candidates = false) {
  std::vector<Cell> roots = loop_characteristic_cells(sys);
  std::vector<std::vector<EquilibriumCellRecord>> found(roots.size());
  parallel_for(roots.size(), [&](std::size_t r) { found[r] = equilibria_in_neighborhood(sys, roots[r], verify_candidates); });

  std::map<Cell, EquilibriumCellRecord> merged;
  for (auto& list : found)
    for (auto& rec : list) {
      auto [it, fresh] = merged.try_emplace(rec.cell, rec);
      if (!fresh) it->second.roots.push_back(std::move(rec.roots.front()));
    }

  std::vector<Cell> scanned = scan_equilibrium_cells(sys);
  std::vector<Cell> assembled;
  for (const auto& [cell, rec] : merged) assembled.push_back(cell);
  if (assembled != scanned)
    throw Error(ErrorKind::Contradiction, "neighborhood assembly found " + std::to_string(assembled.size()) +
                                              " equilibrium cells, the direct scan " +
                                              std::to_string(scanned.size()));

  std::vector<EquilibriumCellRecord> out;
  for (auto& [cell, rec] : merged) {
    std::sort(rec.roots.begin(), rec.roots.end(), [](const auto& a, const auto& b) { return a.root < b.root; });
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace switchcell
