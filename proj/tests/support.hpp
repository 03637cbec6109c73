#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "switchcell/switchcell.hpp"

namespace testing_support {

using namespace switchcell;

inline std::string read_data(const std::string& file) {
  std::ifstream in(std::string(SWITCHCELL_DATA_DIR) + "/" + file);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Instance {
  RegulatoryNetwork net;
  SwitchingParameter z;
};

inline Instance load(const std::string& stem) {
  Instance out;
  out.net = parse_network(read_data(stem + ".net"));
  out.z = parse_parameter(out.net, read_data(stem + ".json"));
  return out;
}

inline Rational q(const char* s) { return parse_decimal(s); }

/// Random value k/100 with k uniform in [lo, hi].
inline Rational hundredths(std::mt19937_64& rng, int lo, int hi) {
  return Rational(std::uniform_int_distribution<int>(lo, hi)(rng), 100);
}

inline std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  for (int k = 0; k < n; ++k) names.push_back("X" + std::to_string(k + 1));
  return names;
}

/// Each node gets 1..max_targets targets; retried until every node also has a source.
/// Sources of a node are split at random into summation groups, signs are random.
inline RegulatoryNetwork random_network(std::mt19937_64& rng, int n, int max_targets) {
  for (;;) {
    std::vector<std::vector<int>> sources(n);
    for (int j = 0; j < n; ++j) {
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      std::shuffle(all.begin(), all.end(), rng);
      int count = std::uniform_int_distribution<int>(1, std::min(max_targets, n))(rng);
      for (int k = 0; k < count; ++k) sources[all[k]].push_back(j);
    }
    if (std::any_of(sources.begin(), sources.end(), [](const auto& s) { return s.empty(); })) continue;
    std::vector<RegulatoryNetwork::Logic> logic(n);
    for (int i = 0; i < n; ++i) {
      auto src = sources[i];
      std::shuffle(src.begin(), src.end(), rng);
      std::vector<Input> group;
      for (std::size_t k = 0; k < src.size(); ++k) {
        group.push_back({src[k], std::bernoulli_distribution(0.5)(rng) ? 1 : -1});
        bool cut = k + 1 == src.size() || std::bernoulli_distribution(0.5)(rng);
        if (cut) {
          logic[i].push_back(group);
          group.clear();
        }
      }
    }
    return RegulatoryNetwork(default_names(n), std::move(logic));
  }
}

/// Random regular parameter; gamma is 1 when unit_gamma is set.
inline SwitchingParameter random_parameter(std::mt19937_64& rng, const RegulatoryNetwork& net, bool unit_gamma = false) {
  const std::size_t e = net.edges().size();
  for (;;) {
    SwitchingParameter z;
    for (std::size_t k = 0; k < e; ++k) {
      Rational a = hundredths(rng, 10, 400);
      Rational b = hundredths(rng, 10, 400);
      if (a == b) b += Rational(1, 100);
      z.L.push_back(a < b ? a : b);
      z.U.push_back(a < b ? b : a);
      z.theta.push_back(hundredths(rng, 10, 500));
    }
    for (int k = 0; k < net.size(); ++k) z.gamma.push_back(unit_gamma ? Rational(1) : hundredths(rng, 50, 200));
    if (check_regular(net, z).regular()) return z;
  }
}

/// Cyclic network 0 -> 1 -> ... -> n-1 -> 0 with the given per-edge signs (edge k is k -> k+1).
inline RegulatoryNetwork cycle_network(const std::vector<int>& signs) {
  const int n = static_cast<int>(signs.size());
  std::vector<RegulatoryNetwork::Logic> logic(n);
  for (int k = 0; k < n; ++k) {
    int prev = (k + n - 1) % n;
    logic[k] = {{Input{prev, signs[prev]}}};
  }
  return RegulatoryNetwork(default_names(n), std::move(logic));
}

/// Parameter for a cycle network where node k is essential (0), low (-1) or high (+1)
/// relative to gamma_k theta_k, the level of its out-edge.
inline SwitchingParameter cycle_parameter(std::mt19937_64& rng, const RegulatoryNetwork& net, const std::vector<int>& kind,
                                          bool unit_gamma) {
  const int n = net.size();
  SwitchingParameter z;
  z.L.assign(n, Rational(0));
  z.U.assign(n, Rational(0));
  z.theta.assign(n, Rational(0));
  for (int k = 0; k < n; ++k) z.gamma.push_back(unit_gamma ? Rational(1) : hundredths(rng, 50, 200));
  for (int k = 0; k < n; ++k) {
    int next = (k + 1) % n;
    int prev = (k + n - 1) % n;
    Rational theta = hundredths(rng, 50, 300);
    z.theta[net.edge_id(k, next)] = theta;
    Rational level = z.gamma[k] * theta;
    int in = net.edge_id(prev, k);
    Rational lo_gap = hundredths(rng, 5, 100);
    Rational hi_gap = hundredths(rng, 5, 100);
    if (kind[k] == 0) {
      z.L[in] = level * Rational(1, 2) + (level * Rational(1, 2)) * Rational(1, 3) * lo_gap;
      z.U[in] = level + hi_gap;
    } else if (kind[k] < 0) {
      z.U[in] = level * Rational(9, 10) - level * Rational(1, 10) * lo_gap;
      z.L[in] = z.U[in] / 2;
    } else {
      z.L[in] = level + hi_gap;
      z.U[in] = z.L[in] + lo_gap + Rational(1, 10);
    }
  }
  return z;
}

inline std::string coords(const Cell& c) {
  std::string s;
  for (int x : c.coord) s += std::to_string(x);
  return s;
}

}  // namespace testing_support
