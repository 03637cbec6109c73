#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "switchcell/error.hpp"
#include "switchcell/network.hpp"
#include "switchcell/rational.hpp"

namespace switchcell {

/// Bitmask over sources(i): bit k set means sources(i)[k] is on.
using InputCombination = std::uint32_t;

inline constexpr int kMaxSources = 20;

/// Z = (L, U, theta, Gamma). Edge maps are indexed by RegulatoryNetwork edge id.
template <class T>
struct BasicSwitchingParameter {
  std::vector<T> L;
  std::vector<T> U;
  std::vector<T> theta;
  std::vector<T> gamma;

  template <class V, class Convert>
  BasicSwitchingParameter<V> transform(Convert convert) const {
    BasicSwitchingParameter<V> out;
    auto map = [&](const std::vector<T>& in, std::vector<V>& dst) {
      dst.reserve(in.size());
      for (const T& v : in) dst.push_back(convert(v));
    };
    map(L, out.L);
    map(U, out.U);
    map(theta, out.theta);
    map(gamma, out.gamma);
    return out;
  }

  friend bool operator==(const BasicSwitchingParameter&, const BasicSwitchingParameter&) = default;
};

using SwitchingParameter = BasicSwitchingParameter<Rational>;

inline BasicSwitchingParameter<double> to_double(const SwitchingParameter& z) {
  return z.transform<double>([](const Rational& v) { return to_double(v); });
}

template <class T>
void check_dimensions(const RegulatoryNetwork& net, const BasicSwitchingParameter<T>& z) {
  const std::size_t e = net.edges().size();
  if (z.L.size() != e || z.U.size() != e || z.theta.size() != e)
    throw Error(ErrorKind::DimensionMismatch, "edge parameter count differs from the network edge count");
  if (z.gamma.size() != static_cast<std::size_t>(net.size()))
    throw Error(ErrorKind::DimensionMismatch, "gamma count differs from the node count");
}

inline int input_count(const RegulatoryNetwork& net, int node) {
  int n = static_cast<int>(net.sources(node).size());
  if (n > kMaxSources) throw Error(ErrorKind::DimensionMismatch, "node " + net.name(node) + " has too many sources");
  return n;
}

/// omega_i(A): product over factors of the sum of v_ij(A_j), with v(off) = L, v(on) = U.
template <class T>
T omega(const RegulatoryNetwork& net, const BasicSwitchingParameter<T>& z, int node, InputCombination a) {
  T product = 1;
  for (const auto& factor : net.logic(node)) {
    T sum = 0;
    for (const Input& in : factor) {
      int e = net.edge_id(in.source, node);
      bool on = (a >> net.source_position(node, in.source)) & 1u;
      sum += on ? z.U[e] : z.L[e];
    }
    product *= sum;
  }
  return product;
}

/// Renders an input combination as "(off,on)" in sources(node) order.
inline std::string format_input(const RegulatoryNetwork& net, int node, InputCombination a) {
  std::string out = "(";
  for (std::size_t k = 0; k < net.sources(node).size(); ++k) {
    if (k) out += ',';
    out += ((a >> k) & 1u) ? "on" : "off";
  }
  return out + ")";
}

struct RegularityViolation {
  /// Short tag: "L>0", "L<U", "gamma>0", "theta>0", "theta-distinct", "lambda-avoidance".
  std::string condition;
  std::string message;
};

struct RegularityReport {
  std::vector<RegularityViolation> violations;
  bool regular() const { return violations.empty(); }
};

/// Lists every violated regularity condition; empty means regular.
inline RegularityReport check_regular(const RegulatoryNetwork& net, const SwitchingParameter& z) {
  check_dimensions(net, z);
  RegularityReport report;
  auto add = [&](std::string cond, std::string msg) { report.violations.push_back({std::move(cond), std::move(msg)}); };
  auto edge_name = [&](const Edge& e) { return net.name(e.source) + "->" + net.name(e.target); };

  for (std::size_t id = 0; id < net.edges().size(); ++id) {
    const Edge& e = net.edge(static_cast<int>(id));
    if (sign(z.L[id]) <= 0) add("L>0", "L(" + edge_name(e) + ") = " + to_string(z.L[id]) + " is not positive");
    if (!(z.L[id] < z.U[id]))
      add("L<U", "L<U fails on " + edge_name(e) + ": L = " + to_string(z.L[id]) + ", U = " + to_string(z.U[id]));
    if (sign(z.theta[id]) <= 0)
      add("theta>0", "theta(" + edge_name(e) + ") = " + to_string(z.theta[id]) + " is not positive");
  }
  for (int k = 0; k < net.size(); ++k)
    if (sign(z.gamma[k]) <= 0) add("gamma>0", "gamma(" + net.name(k) + ") = " + to_string(z.gamma[k]) + " is not positive");

  for (int j = 0; j < net.size(); ++j) {
    auto targets = net.targets(j);
    for (std::size_t a = 0; a < targets.size(); ++a)
      for (std::size_t b = a + 1; b < targets.size(); ++b) {
        int ea = net.edge_id(j, targets[a]);
        int eb = net.edge_id(j, targets[b]);
        if (z.theta[ea] == z.theta[eb])
          add("theta-distinct", "thresholds of " + net.name(j) + " on " + net.name(targets[a]) + " and " +
                                    net.name(targets[b]) + " coincide at " + to_string(z.theta[ea]));
      }
  }

  for (int j = 0; j < net.size(); ++j) {
    const int inputs = input_count(net, j);
    std::vector<Rational> values;
    values.reserve(std::size_t{1} << inputs);
    for (InputCombination a = 0; a < (InputCombination{1} << inputs); ++a) values.push_back(omega(net, z, j, a));
    for (int i : net.targets(j)) {
      int e = net.edge_id(j, i);
      Rational level = z.gamma[j] * z.theta[e];
      for (InputCombination a = 0; a < values.size(); ++a)
        if (values[a] == level)
          add("lambda-avoidance", "gamma(" + net.name(j) + ")*theta(" + net.name(j) + "->" + net.name(i) +
                                      ") = omega(" + net.name(j) + ", A=" + format_input(net, j, a) +
                                      ") = " + to_string(level));
    }
  }
  return report;
}

inline void require_regular(const RegulatoryNetwork& net, const SwitchingParameter& z) {
  auto report = check_regular(net, z);
  if (!report.regular()) {
    std::string msg;
    for (const auto& v : report.violations) msg += (msg.empty() ? "" : "; ") + v.message;
    throw Error(ErrorKind::NotRegular, msg);
  }
}

/// L_j(A, i) for every input combination A of node j and every target i of j.
struct LogicParameter {
  /// table[j][A][k] is the sign for target targets(j)[k].
  std::vector<std::vector<std::vector<int>>> table;

  int at(const RegulatoryNetwork& net, int j, InputCombination a, int target) const {
    auto t = net.targets(j);
    auto it = std::lower_bound(t.begin(), t.end(), target);
    return table.at(j).at(a).at(static_cast<std::size_t>(it - t.begin()));
  }

  friend bool operator==(const LogicParameter&, const LogicParameter&) = default;
};

/// order[j] lists targets of j sorted by ascending theta_ij.
struct OrderParameter {
  std::vector<std::vector<int>> order;
  friend bool operator==(const OrderParameter&, const OrderParameter&) = default;
};

struct CombinatorialParameter {
  LogicParameter logic;
  OrderParameter order;
  friend bool operator==(const CombinatorialParameter&, const CombinatorialParameter&) = default;
};

inline LogicParameter logic_parameter(const RegulatoryNetwork& net, const SwitchingParameter& z) {
  require_regular(net, z);
  LogicParameter lp;
  lp.table.resize(net.size());
  for (int j = 0; j < net.size(); ++j) {
    const int inputs = input_count(net, j);
    for (InputCombination a = 0; a < (InputCombination{1} << inputs); ++a) {
      Rational w = omega(net, z, j, a);
      std::vector<int> row;
      for (int i : net.targets(j)) row.push_back(sign(w - z.gamma[j] * z.theta[net.edge_id(j, i)]));
      lp.table[j].push_back(std::move(row));
    }
  }
  return lp;
}

template <class T>
OrderParameter order_parameter(const RegulatoryNetwork& net, const BasicSwitchingParameter<T>& z) {
  check_dimensions(net, z);
  OrderParameter op;
  for (int j = 0; j < net.size(); ++j) {
    auto t = net.targets(j);
    std::vector<int> sorted(t.begin(), t.end());
    std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
      return z.theta[net.edge_id(j, a)] < z.theta[net.edge_id(j, b)];
    });
    op.order.push_back(std::move(sorted));
  }
  return op;
}

inline CombinatorialParameter combinatorial_parameter(const RegulatoryNetwork& net, const SwitchingParameter& z) {
  return {logic_parameter(net, z), order_parameter(net, z)};
}

inline bool same_combinatorial_parameter(const RegulatoryNetwork& net, const SwitchingParameter& z1,
                                         const SwitchingParameter& z2) {
  return combinatorial_parameter(net, z1) == combinatorial_parameter(net, z2);
}

/// Reads the parameter document: sections L, U, theta keyed "source->target", gamma keyed by node name.
/// Values must be decimal strings; every edge and node needs an entry.
inline SwitchingParameter parameter_from_json(const RegulatoryNetwork& net, const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::MalformedParameter, "parameter document must be an object");
  SwitchingParameter z;
  const std::size_t e = net.edges().size();

  auto value_of = [](const std::string& where, const nlohmann::json& v) {
    if (!v.is_string())
      throw Error(ErrorKind::MalformedParameter, where + ": value must be a decimal string, e.g. \"1.5\"");
    try {
      return parse_decimal(v.get<std::string>());
    } catch (const Error& err) {
      throw Error(ErrorKind::MalformedParameter, where + ": " + err.what());
    }
  };

  auto edge_section = [&](const char* key, std::vector<Rational>& dst) {
    if (!doc.contains(key) || !doc[key].is_object())
      throw Error(ErrorKind::MalformedParameter, std::string("missing section '") + key + "'");
    std::vector<bool> seen(e, false);
    dst.assign(e, Rational(0));
    for (const auto& [name, v] : doc[key].items()) {
      auto arrow = name.find("->");
      if (arrow == std::string::npos)
        throw Error(ErrorKind::MalformedParameter, std::string(key) + ": key '" + name + "' is not 'source->target'");
      auto src = net.index_of(detail::trim(std::string_view(name).substr(0, arrow)));
      auto tgt = net.index_of(detail::trim(std::string_view(name).substr(arrow + 2)));
      if (!src || !tgt)
        throw Error(ErrorKind::UnknownNodeReference, std::string(key) + ": unknown node in '" + name + "'");
      int id = net.edge_id(*src, *tgt);
      if (id < 0) throw Error(ErrorKind::MalformedParameter, std::string(key) + ": no edge '" + name + "'");
      dst[id] = value_of(std::string(key) + "[" + name + "]", v);
      seen[id] = true;
    }
    for (std::size_t id = 0; id < e; ++id)
      if (!seen[id]) {
        const Edge& ed = net.edge(static_cast<int>(id));
        throw Error(ErrorKind::MalformedParameter, std::string(key) + ": missing entry for '" + net.name(ed.source) +
                                                        "->" + net.name(ed.target) + "'");
      }
  };
  edge_section("L", z.L);
  edge_section("U", z.U);
  edge_section("theta", z.theta);

  if (!doc.contains("gamma") || !doc["gamma"].is_object())
    throw Error(ErrorKind::MalformedParameter, "missing section 'gamma'");
  std::vector<bool> seen(net.size(), false);
  z.gamma.assign(net.size(), Rational(0));
  for (const auto& [name, v] : doc["gamma"].items()) {
    auto k = net.index_of(name);
    if (!k) throw Error(ErrorKind::UnknownNodeReference, "gamma: unknown node '" + name + "'");
    z.gamma[*k] = value_of("gamma[" + name + "]", v);
    seen[*k] = true;
  }
  for (int k = 0; k < net.size(); ++k)
    if (!seen[k]) throw Error(ErrorKind::MalformedParameter, "gamma: missing entry for '" + net.name(k) + "'");
  return z;
}

inline SwitchingParameter parse_parameter(const RegulatoryNetwork& net, std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw Error(ErrorKind::MalformedParameter, err.what());
  }
  return parameter_from_json(net, doc);
}

/// Canonical parameter document, edges in edge-id order.
inline std::string serialize_parameter(const RegulatoryNetwork& net, const SwitchingParameter& z) {
  check_dimensions(net, z);
  nlohmann::ordered_json doc;
  for (const char* key : {"L", "U", "theta"}) {
    const auto& src = key[0] == 'L' ? z.L : key[0] == 'U' ? z.U : z.theta;
    nlohmann::ordered_json section = nlohmann::ordered_json::object();
    for (std::size_t id = 0; id < net.edges().size(); ++id) {
      const Edge& e = net.edge(static_cast<int>(id));
      section[net.name(e.source) + "->" + net.name(e.target)] = to_string(src[id]);
    }
    doc[key] = section;
  }
  nlohmann::ordered_json gamma = nlohmann::ordered_json::object();
  for (int k = 0; k < net.size(); ++k) gamma[net.name(k)] = to_string(z.gamma[k]);
  doc["gamma"] = gamma;
  return doc.dump(2) + "\n";
}

}  // namespace switchcell
