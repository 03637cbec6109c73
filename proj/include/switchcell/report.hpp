#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "switchcell/oracle.hpp"
#include "switchcell/stability.hpp"

namespace switchcell {

inline constexpr const char* kSchema = "switchcell-report/1";
inline constexpr const char* kToolVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

/// FNV-1a 64-bit digest, hex encoded.
inline std::string digest(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline ordered_json to_json(const StabilityVerdict& v) {
  ordered_json j;
  j["verdict"] = to_string(v.value);
  j["bifurcation"] = to_string(v.bifurcation);
  j["rule"] = v.rule;
  j["assumptions"] = v.assumptions;
  return j;
}

inline std::vector<std::string> node_names(const RegulatoryNetwork& net, const std::vector<int>& nodes) {
  std::vector<std::string> out;
  for (int v : nodes) out.push_back(net.name(v));
  return out;
}

inline ordered_json to_json(const SwitchingSystem& sys, const EquilibriumCellRecord& rec,
                            const std::optional<CellStability>& stability) {
  const auto& cx = sys.complex();
  ordered_json j;
  j["cell"] = cx.notation(rec.cell);
  j["coordinates"] = rec.cell.coord;
  j["kind"] = to_string(rec.kind);
  ordered_json roots = ordered_json::array();
  for (const auto& r : rec.roots) {
    ordered_json jr;
    jr["root"] = cx.notation(r.root);
    ordered_json cycles = ordered_json::array();
    for (const auto& c : r.cycles) {
      ordered_json jc;
      jc["nodes"] = node_names(sys.network(), c.nodes);
      jc["sign"] = c.sign;
      jc["local"] = c.local.coord;
      jc["consistent"] = c.check.consistent;
      jc["witnesses"] = c.check.witnesses;
      cycles.push_back(jc);
    }
    jr["cycles"] = cycles;
    roots.push_back(jr);
  }
  j["roots"] = roots;
  if (stability) {
    ordered_json s = to_json(stability->overall);
    s["root"] = cx.notation(stability->root);
    ordered_json cycles = ordered_json::array();
    for (const auto& c : stability->cycles) {
      ordered_json jc = to_json(c.verdict);
      jc["nodes"] = node_names(sys.network(), c.nodes);
      jc["sign"] = c.sign;
      jc["local_regular"] = c.local_regular;
      cycles.push_back(jc);
    }
    s["cycles"] = cycles;
    j["stability"] = s;
  }
  return j;
}

inline ordered_json header_json(const std::string& command, const RegulatoryNetwork& net, const std::string& param_text) {
  ordered_json j;
  j["schema"] = kSchema;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["network"] = {{"nodes", net.names()}, {"digest", digest(serialize(net))}};
  j["parameter_digest"] = digest(param_text);
  return j;
}

inline ordered_json to_json(const RegularityReport& r) {
  ordered_json j;
  j["regular"] = r.regular();
  ordered_json v = ordered_json::array();
  for (const auto& x : r.violations) v.push_back({{"condition", x.condition}, {"message", x.message}});
  j["violations"] = v;
  return j;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline ordered_json to_json(const SwitchingSystem& sys, const SweepReport& r,
                            const std::vector<EquilibriumCellRecord>& predicted) {
  const auto& cx = sys.complex();
  ordered_json j;
  j["hill_order"] = to_string(r.law);
  j["scale"] = r.scale;
  ordered_json steps = ordered_json::array();
  for (const auto& s : r.steps) {
    ordered_json js;
    js["eps"] = s.eps;
    js["seeds"] = s.seeds;
    js["failed_seeds"] = s.failed_seeds;
    js["bijective"] = s.bijective;
    ordered_json roots = ordered_json::array();
    for (const auto& root : s.roots) {
      ordered_json jr;
      jr["x"] = std::vector<double>(root.x.data(), root.x.data() + root.x.size());
      jr["residual"] = root.residual;
      jr["max_real"] = root.max_real;
      ordered_json spec = ordered_json::array();
      for (const auto& l : root.eigenvalues) spec.push_back({l.real(), l.imag()});
      jr["spectrum"] = spec;
      jr["cell"] = root.matched >= 0 ? ordered_json(cx.notation(predicted[root.matched].cell)) : ordered_json(nullptr);
      jr["distance"] = root.distance;
      jr["snapped"] = cx.notation(root.snapped);
      roots.push_back(jr);
    }
    js["roots"] = roots;
    steps.push_back(js);
  }
  j["steps"] = steps;
  ordered_json tracks = ordered_json::array();
  for (const auto& t : r.tracks) {
    ordered_json jt;
    jt["cell"] = cx.notation(t.cell);
    jt["verdict"] = to_string(t.stability.overall.value);
    ordered_json d = ordered_json::array();
    for (double v : t.distance) d.push_back(std::isnan(v) ? ordered_json(nullptr) : ordered_json(v));
    jt["distance"] = d;
    jt["monotone"] = t.monotone;
    jt["converged"] = t.converged;
    tracks.push_back(jt);
  }
  j["tracks"] = tracks;
  ordered_json spectral = ordered_json::array();
  for (const auto& s : r.spectral) {
    ordered_json js{{"eps", s.eps},
                    {"cell", cx.notation(predicted[s.cell].cell)},
                    {"verdict", to_string(s.verdict)},
                    {"max_real", s.max_real},
                    {"outcome", s.outcome}};
    if (s.spectrum_error >= 0) {
      js["gain"] = s.gain;
      js["spectrum_error"] = s.spectrum_error;
    }
    spectral.push_back(js);
  }
  j["spectral"] = spectral;
  j["negative_control"] = r.negative_control;
  j["failures"] = r.failures;
  j["passed"] = r.passed();
  return j;
}

inline ordered_json to_json(const HopfScan& h) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const auto& r : h.rows) rows.push_back({{"eps", r.eps}, {"gain", r.gain}, {"max_real", r.max_real}});
  j["rows"] = rows;
  j["found"] = h.found;
  j["bound"] = h.bound;
  if (h.found) {
    j["eps"] = h.eps;
    j["gain"] = h.gain;
  }
  return j;
}

/// One arrow per (wall, sign): wall is an interior singular face between two regular cells
/// of a planar complex, sign is the label a regular neighbor assigns to it.
struct WallArrow {
  Cell wall;
  int direction = 0;
  int sign = 1;
};

inline std::vector<WallArrow> wall_arrows(const SwitchingSystem& sys) {
  const auto& cx = sys.complex();
  if (sys.dimension() != 2) throw Error(ErrorKind::UnsupportedDimension, "flow arrows are drawn for two nodes only");
  std::set<std::tuple<Cell, int, int>> seen;
  std::vector<WallArrow> out;
  for (const Cell& c : cx.cells()) {
    if (!c.regular()) continue;
    for (int j = 0; j < 2; ++j)
      for (Side side : {Side::Minus, Side::Plus}) {
        int next = c[j] + side_sign(side);
        if (next < 1 || next >= cx.extent(j) - 1) continue;
        Cell wall = cx.neighbor(c, j, side);
        int s = sys.label(c, j, side);
        if (seen.insert({wall, j, s}).second) out.push_back({wall, j, s});
      }
  }
  return out;
}

inline std::string dot_graph(const SwitchingSystem& sys) {
  const auto& cx = sys.complex();
  auto arrows = wall_arrows(sys);
  std::ostringstream os;
  os << "digraph complex {\n  node [shape=box, fontsize=9];\n";
  for (const Cell& c : cx.cells()) {
    os << "  c" << cx.id_of(c) << " [label=\"" << cx.notation(c) << "\", pos=\"" << c[0] << "," << c[1] << "!\"";
    if (!c.regular()) os << ", shape=" << (c.singular(0) && c.singular(1) ? "point" : "plaintext");
    if (sys.is_equilibrium_cell(c)) os << ", style=filled, fillcolor=gray80";
    os << "];\n";
  }
  for (const auto& a : arrows) {
    Cell into = cx.neighbor(a.wall, a.direction, a.sign > 0 ? Side::Plus : Side::Minus);
    os << "  c" << cx.id_of(a.wall) << " -> c" << cx.id_of(into) << " [label=\"" << (a.sign > 0 ? "+" : "-")
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace switchcell
