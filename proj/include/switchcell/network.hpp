#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "switchcell/error.hpp"

namespace switchcell {

/// One term of a node's input logic: the regulating node and whether it activates (+1) or represses (-1).
struct Input {
  int source = 0;
  int sign = 1;
};

struct Edge {
  int source = 0;
  int target = 0;
  int sign = 1;
};

/// Signed regulatory graph with per-node product-of-sums input logic.
///
/// Node i's production rate is a product over its factors of the sum of the
/// switching functions of the sources in that factor. Every source of i
/// appears in exactly one factor, and every node must regulate at least one
/// node. Nodes are indexed 0..N-1 in declaration order.
class RegulatoryNetwork {
 public:
  using Logic = std::vector<std::vector<Input>>;

  RegulatoryNetwork() = default;

  RegulatoryNetwork(std::vector<std::string> names, std::vector<Logic> logic)
      : names_(std::move(names)), logic_(std::move(logic)) {
    const int n = static_cast<int>(names_.size());
    if (static_cast<int>(logic_.size()) != n)
      throw Error(ErrorKind::MalformedLogic, "logic count does not match node count");
    sources_.assign(n, {});
    targets_.assign(n, {});
    for (int i = 0; i < n; ++i) {
      if (logic_[i].empty())
        throw Error(ErrorKind::MalformedLogic, "node " + names_[i] + " has an empty logic expression");
      for (auto& factor : logic_[i]) {
        if (factor.empty())
          throw Error(ErrorKind::MalformedLogic, "node " + names_[i] + " has an empty factor");
        for (const Input& in : factor) {
          if (in.source < 0 || in.source >= n)
            throw Error(ErrorKind::UnknownNodeReference, "node " + names_[i] + " references an unknown node");
          if (in.sign != 1 && in.sign != -1)
            throw Error(ErrorKind::MalformedLogic, "edge sign must be +1 or -1");
          if (std::find(sources_[i].begin(), sources_[i].end(), in.source) != sources_[i].end())
            throw Error(ErrorKind::DuplicateEdge,
                        "edge " + names_[in.source] + " -> " + names_[i] + " appears more than once");
          sources_[i].push_back(in.source);
          targets_[in.source].push_back(i);
        }
        std::sort(factor.begin(), factor.end(), [](const Input& a, const Input& b) { return a.source < b.source; });
      }
      std::sort(sources_[i].begin(), sources_[i].end());
    }
    for (int j = 0; j < n; ++j) {
      if (targets_[j].empty())
        throw Error(ErrorKind::NodeWithoutTarget, "node " + names_[j] + " regulates no node");
      std::sort(targets_[j].begin(), targets_[j].end());
    }
    edge_index_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int i = 0; i < n; ++i) {
      for (int j : sources_[i]) {
        edge_index_[static_cast<std::size_t>(j) * n + i] = static_cast<int>(edges_.size());
        edges_.push_back({j, i, input_sign(i, j)});
      }
    }
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int node) const { return names_.at(node); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<int> index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<int>(it - names_.begin());
  }

  /// Edges ordered by target, then by source index.
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int id) const { return edges_.at(id); }

  /// Edge id of source -> target, or -1.
  int edge_id(int source, int target) const {
    return edge_index_[static_cast<std::size_t>(source) * size() + target];
  }

  int sign(int source, int target) const {
    int id = edge_id(source, target);
    if (id < 0) throw Error(ErrorKind::UnknownNodeReference, "no edge " + name(source) + " -> " + name(target));
    return edges_[id].sign;
  }

  /// S(i), ascending.
  std::span<const int> sources(int node) const { return sources_.at(node); }
  /// T(j), ascending.
  std::span<const int> targets(int node) const { return targets_.at(node); }
  const Logic& logic(int node) const { return logic_.at(node); }

  /// Position of `source` within sources(node); bit positions of input combinations use this order.
  int source_position(int node, int source) const {
    auto s = sources(node);
    auto it = std::lower_bound(s.begin(), s.end(), source);
    if (it == s.end() || *it != source)
      throw Error(ErrorKind::UnknownNodeReference, name(source) + " does not regulate " + name(node));
    return static_cast<int>(it - s.begin());
  }

  friend bool operator==(const RegulatoryNetwork& a, const RegulatoryNetwork& b) {
    if (a.names_ != b.names_ || a.logic_.size() != b.logic_.size()) return false;
    for (std::size_t i = 0; i < a.logic_.size(); ++i) {
      if (a.logic_[i].size() != b.logic_[i].size()) return false;
      for (std::size_t f = 0; f < a.logic_[i].size(); ++f) {
        const auto& x = a.logic_[i][f];
        const auto& y = b.logic_[i][f];
        if (x.size() != y.size()) return false;
        for (std::size_t k = 0; k < x.size(); ++k)
          if (x[k].source != y[k].source || x[k].sign != y[k].sign) return false;
      }
    }
    return true;
  }

 private:
  int input_sign(int target, int source) const {
    for (const auto& factor : logic_[target])
      for (const Input& in : factor)
        if (in.source == source) return in.sign;
    return 0;
  }

  std::vector<std::string> names_;
  std::vector<Logic> logic_;
  std::vector<std::vector<int>> sources_;
  std::vector<std::vector<int>> targets_;
  std::vector<Edge> edges_;
  std::vector<int> edge_index_;
};

namespace detail {

inline bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct RawTerm {
  std::string name;
  int sign;
};

}  // namespace detail

/// Parses the `name : (A + ~B)(C)` line format. Errors cite the offending line.
inline RegulatoryNetwork parse_network(std::string_view text) {
  std::vector<std::string> names;
  std::vector<std::vector<std::vector<detail::RawTerm>>> raw;
  std::vector<int> line_of;

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string body = detail::trim(line);
    if (body.empty()) continue;
    auto where = [&](const std::string& what) { return "line " + std::to_string(line_no) + ": " + what; };

    auto colon = body.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::MalformedLogic, where("expected 'name : logic'"));
    std::string name = detail::trim(std::string_view(body).substr(0, colon));
    if (name.empty() || !detail::is_name_start(name[0]) ||
        !std::all_of(name.begin(), name.end(), detail::is_name_char))
      throw Error(ErrorKind::MalformedLogic, where("invalid node name '" + name + "'"));
    if (std::find(names.begin(), names.end(), name) != names.end())
      throw Error(ErrorKind::MalformedLogic, where("node '" + name + "' declared twice"));

    std::string_view expr = std::string_view(body).substr(colon + 1);
    std::vector<std::vector<detail::RawTerm>> factors;
    std::size_t p = 0;
    auto skip_ws = [&] {
      while (p < expr.size() && std::isspace(static_cast<unsigned char>(expr[p]))) ++p;
    };
    skip_ws();
    if (p == expr.size()) throw Error(ErrorKind::MalformedLogic, where("empty logic expression"));
    while (p < expr.size()) {
      if (expr[p] != '(') throw Error(ErrorKind::MalformedLogic, where("expected '('"));
      ++p;
      std::vector<detail::RawTerm> factor;
      for (;;) {
        skip_ws();
        int sign = 1;
        if (p < expr.size() && expr[p] == '~') {
          sign = -1;
          ++p;
          skip_ws();
        }
        std::size_t start = p;
        if (p < expr.size() && detail::is_name_start(expr[p])) {
          while (p < expr.size() && detail::is_name_char(expr[p])) ++p;
        }
        if (start == p) throw Error(ErrorKind::MalformedLogic, where("expected a node name"));
        factor.push_back({std::string(expr.substr(start, p - start)), sign});
        skip_ws();
        if (p < expr.size() && expr[p] == '+') {
          ++p;
          continue;
        }
        if (p < expr.size() && expr[p] == ')') {
          ++p;
          break;
        }
        throw Error(ErrorKind::MalformedLogic, where("expected '+' or ')'"));
      }
      factors.push_back(std::move(factor));
      skip_ws();
    }
    names.push_back(std::move(name));
    raw.push_back(std::move(factors));
    line_of.push_back(line_no);
  }
  if (names.empty()) throw Error(ErrorKind::MalformedLogic, "network has no nodes");

  std::vector<RegulatoryNetwork::Logic> logic(names.size());
  std::vector<std::vector<int>> targets(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto where = [&](const std::string& what) { return "line " + std::to_string(line_of[i]) + ": " + what; };
    std::vector<int> seen;
    for (const auto& factor : raw[i]) {
      std::vector<Input> group;
      for (const auto& term : factor) {
        auto it = std::find(names.begin(), names.end(), term.name);
        if (it == names.end())
          throw Error(ErrorKind::UnknownNodeReference, where("unknown node '" + term.name + "'"));
        int source = static_cast<int>(it - names.begin());
        if (std::find(seen.begin(), seen.end(), source) != seen.end())
          throw Error(ErrorKind::DuplicateEdge, where("edge " + term.name + " -> " + names[i] + " repeated"));
        seen.push_back(source);
        targets[source].push_back(static_cast<int>(i));
        group.push_back({source, term.sign});
      }
      logic[i].push_back(std::move(group));
    }
  }
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (targets[j].empty())
      throw Error(ErrorKind::NodeWithoutTarget,
                  "line " + std::to_string(line_of[j]) + ": node '" + names[j] + "' regulates no node");
  }
  return RegulatoryNetwork(std::move(names), std::move(logic));
}

/// Canonical text form: declaration-ordered nodes and factors, members sorted by node index.
inline std::string serialize(const RegulatoryNetwork& net) {
  std::string out;
  for (int i = 0; i < net.size(); ++i) {
    out += net.name(i) + " : ";
    for (const auto& factor : net.logic(i)) {
      out += '(';
      for (std::size_t k = 0; k < factor.size(); ++k) {
        if (k) out += " + ";
        if (factor[k].sign < 0) out += '~';
        out += net.name(factor[k].source);
      }
      out += ')';
    }
    out += '\n';
  }
  return out;
}

/// A network whose edges form one directed Hamiltonian cycle.
struct CyclicFeedbackNetwork {
  RegulatoryNetwork network;
  /// order[k] is the network node at cycle position k; order[k] -> order[k+1 mod N].
  std::vector<int> order;
  /// edge_signs[k] is the sign of order[k] -> order[k+1 mod N].
  std::vector<int> edge_signs;
  int cycle_sign = 1;

  int size() const { return static_cast<int>(order.size()); }
};

/// Returns the cycle relabeling when every node has exactly one source and one
/// target and the edges form a single cycle; the cycle starts at node 0.
inline std::optional<CyclicFeedbackNetwork> classify_cfn(const RegulatoryNetwork& net) {
  const int n = net.size();
  for (int i = 0; i < n; ++i)
    if (net.sources(i).size() != 1 || net.targets(i).size() != 1) return std::nullopt;
  CyclicFeedbackNetwork cfn{net, {}, {}, 1};
  std::vector<bool> visited(n, false);
  int node = 0;
  for (int k = 0; k < n; ++k) {
    if (visited[node]) return std::nullopt;
    visited[node] = true;
    cfn.order.push_back(node);
    int next = net.targets(node)[0];
    int s = net.sign(node, next);
    cfn.edge_signs.push_back(s);
    cfn.cycle_sign *= s;
    node = next;
  }
  if (node != 0) return std::nullopt;
  return cfn;
}

}  // namespace switchcell
