#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <ranges>
#include <string>
#include <vector>

#include "switchcell/error.hpp"
#include "switchcell/network.hpp"
#include "switchcell/switching_parameter.hpp"

namespace switchcell {

enum class Side { Minus, Plus };

inline constexpr int side_sign(Side s) { return s == Side::Minus ? -1 : 1; }

/// A cell as per-direction coordinates. In direction j with m_j thresholds the
/// coordinate ranges over 0..2*m_j: even c is the open interval between sorted
/// threshold positions c/2 and c/2+1, odd c is the threshold at position (c+1)/2.
/// Position 0 is the sentinel 0 and position m_j+1 the sentinel infinity.
struct Cell {
  std::vector<int> coord;

  int size() const { return static_cast<int>(coord.size()); }
  int operator[](int j) const { return coord[j]; }
  int& operator[](int j) { return coord[j]; }
  bool singular(int j) const { return coord[j] % 2 == 1; }
  bool regular() const {
    for (int c : coord)
      if (c % 2 == 1) return false;
    return true;
  }

  friend auto operator<=>(const Cell&, const Cell&) = default;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Singular cell together with the cycle structure of rho on its singular directions.
struct LoopCharacteristicCell {
  Cell cell;
  std::vector<int> sd;
  /// rho[j] is the target of j at its threshold for singular j, j itself otherwise.
  std::vector<int> rho;
  /// Each cycle starts at its smallest node and follows rho; ordered by first node.
  std::vector<std::vector<int>> cycles;
  std::vector<int> cycle_signs;

  /// Index of the cycle containing node j, or -1 for regular directions.
  int cycle_of(int j) const {
    for (std::size_t d = 0; d < cycles.size(); ++d)
      for (int v : cycles[d])
        if (v == j) return static_cast<int>(d);
    return -1;
  }
};

/// Threshold-induced cell complex. Thresholds are compared exactly; cells are
/// enumerated lazily in lexicographic coordinate order.
class CellComplex {
 public:
  CellComplex(const RegulatoryNetwork& net, const SwitchingParameter& z) : net_(net) {
    check_dimensions(net, z);
    const int n = net.size();
    by_position_.resize(n);
    position_.assign(n, std::vector<int>(n, 0));
    for (int j = 0; j < n; ++j) {
      auto t = net.targets(j);
      std::vector<int> sorted(t.begin(), t.end());
      for (int i : sorted)
        if (sign(z.theta[net.edge_id(j, i)]) <= 0)
          throw Error(ErrorKind::NotThresholdRegular,
                      "theta(" + net.name(j) + "->" + net.name(i) + ") is not positive");
      std::sort(sorted.begin(), sorted.end(),
                [&](int a, int b) { return z.theta[net.edge_id(j, a)] < z.theta[net.edge_id(j, b)]; });
      for (std::size_t k = 1; k < sorted.size(); ++k)
        if (z.theta[net.edge_id(j, sorted[k - 1])] == z.theta[net.edge_id(j, sorted[k])])
          throw Error(ErrorKind::NotThresholdRegular,
                      "thresholds of " + net.name(j) + " on " + net.name(sorted[k - 1]) + " and " +
                          net.name(sorted[k]) + " coincide");
      for (std::size_t k = 0; k < sorted.size(); ++k) position_[j][sorted[k]] = static_cast<int>(k) + 1;
      by_position_[j] = std::move(sorted);
    }
    stride_.assign(n, 1);
    count_ = 1;
    for (int j = n - 1; j >= 0; --j) {
      stride_[j] = count_;
      count_ *= static_cast<std::uint64_t>(extent(j));
    }
  }

  const RegulatoryNetwork& network() const { return net_; }
  int dimension() const { return net_.size(); }

  /// m_j, the number of finite thresholds of node j.
  int threshold_count(int j) const { return static_cast<int>(by_position_[j].size()); }
  /// Number of coordinate values in direction j, 2*m_j + 1.
  int extent(int j) const { return 2 * threshold_count(j) + 1; }

  /// Target of j whose threshold sits at position p (1..m_j).
  int target_at(int j, int p) const { return by_position_[j].at(p - 1); }
  /// Sorted position (1..m_j) of theta_ij.
  int position(int j, int target) const {
    int p = position_[j][target];
    if (p == 0) throw Error(ErrorKind::UnknownNodeReference, net_.name(j) + " does not regulate " + net_.name(target));
    return p;
  }
  /// Coordinate of the singular slab {theta_ij}.
  int threshold_coord(int j, int target) const { return 2 * position(j, target) - 1; }

  std::uint64_t cell_count() const { return count_; }

  Cell cell_at(std::uint64_t id) const {
    Cell c;
    c.coord.resize(dimension());
    for (int j = 0; j < dimension(); ++j) {
      c.coord[j] = static_cast<int>(id / stride_[j]);
      id %= stride_[j];
    }
    return c;
  }

  std::uint64_t id_of(const Cell& c) const {
    std::uint64_t id = 0;
    for (int j = 0; j < dimension(); ++j) id += static_cast<std::uint64_t>(c.coord[j]) * stride_[j];
    return id;
  }

  bool contains(const Cell& c) const {
    if (c.size() != dimension()) return false;
    for (int j = 0; j < dimension(); ++j)
      if (c[j] < 0 || c[j] >= extent(j)) return false;
    return true;
  }

  auto cells() const {
    return std::views::iota(std::uint64_t{0}, count_) |
           std::views::transform([this](std::uint64_t id) { return cell_at(id); });
  }

  /// rho(j): the target at j's threshold for singular j, j otherwise.
  int rho(const Cell& c, int j) const { return c.singular(j) ? target_at(j, (c[j] + 1) / 2) : j; }

  std::vector<int> singular_directions(const Cell& c) const {
    std::vector<int> sd;
    for (int j = 0; j < dimension(); ++j)
      if (c.singular(j)) sd.push_back(j);
    return sd;
  }

  std::optional<LoopCharacteristicCell> loop_characteristic(const Cell& c) const {
    LoopCharacteristicCell lcc;
    lcc.cell = c;
    lcc.sd = singular_directions(c);
    lcc.rho.resize(dimension());
    std::vector<int> hits(dimension(), 0);
    for (int j = 0; j < dimension(); ++j) {
      lcc.rho[j] = rho(c, j);
      if (c.singular(j)) {
        int r = lcc.rho[j];
        if (!c.singular(r) || hits[r]++) return std::nullopt;
      }
    }
    std::vector<bool> seen(dimension(), false);
    for (int j : lcc.sd) {
      if (seen[j]) continue;
      std::vector<int> cycle;
      int s = 1;
      for (int v = j; !seen[v]; v = lcc.rho[v]) {
        seen[v] = true;
        cycle.push_back(v);
        s *= net_.sign(v, lcc.rho[v]);
      }
      lcc.cycles.push_back(std::move(cycle));
      lcc.cycle_signs.push_back(s);
    }
    return lcc;
  }

  bool is_loop_characteristic(const Cell& c) const { return loop_characteristic(c).has_value(); }

  /// The j-neighbor of c on the given side.
  Cell neighbor(const Cell& c, int j, Side side) const {
    Cell out = c;
    int next = c[j] + side_sign(side);
    if (next < 0 || next >= extent(j))
      throw Error(ErrorKind::NoSuchNeighbor, "direction " + net_.name(j) + " is bounded by a sentinel on that side");
    out[j] = next;
    return out;
  }

  /// All cells whose closure contains c: 3^|sd(c)| cells, lexicographic.
  std::vector<Cell> neighborhood(const Cell& c) const {
    std::vector<Cell> out{c};
    for (int j = 0; j < dimension(); ++j) {
      if (!c.singular(j)) continue;
      std::vector<Cell> next;
      next.reserve(out.size() * 3);
      for (const Cell& base : out)
        for (int d = -1; d <= 1; ++d) {
          Cell k = base;
          k[j] += d;
          next.push_back(std::move(k));
        }
      out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// True when c lies in the closure of k.
  bool in_closure(const Cell& c, const Cell& k) const {
    for (int j = 0; j < dimension(); ++j) {
      if (k.singular(j)) {
        if (c[j] != k[j]) return false;
      } else if (c[j] < k[j] - 1 || c[j] > k[j] + 1) {
        return false;
      }
    }
    return true;
  }

  /// Name of the threshold at position p of direction j: "0", "inf" or "t<target><source>".
  std::string threshold_name(int j, int p) const {
    if (p == 0) return "0";
    if (p == threshold_count(j) + 1) return "inf";
    int i = target_at(j, p);
    if (dimension() < 10) return "t" + std::to_string(i + 1) + std::to_string(j + 1);
    return "t" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
  }

  /// Canonical notation, e.g. "({t21}, (t12,t22))".
  std::string notation(const Cell& c) const {
    std::string out = "(";
    for (int j = 0; j < dimension(); ++j) {
      if (j) out += ", ";
      if (c.singular(j)) {
        out += "{" + threshold_name(j, (c[j] + 1) / 2) + "}";
      } else {
        int p = c[j] / 2;
        out += "(" + threshold_name(j, p) + "," + threshold_name(j, p + 1) + ")";
      }
    }
    return out + ")";
  }

 private:
  RegulatoryNetwork net_;
  std::vector<std::vector<int>> by_position_;
  std::vector<std::vector<int>> position_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t count_ = 1;
};

}  // namespace switchcell
