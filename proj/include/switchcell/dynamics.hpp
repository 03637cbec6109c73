#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "switchcell/cell_complex.hpp"
#include "switchcell/error.hpp"
#include "switchcell/network.hpp"
#include "switchcell/switching_parameter.hpp"

namespace switchcell {

struct FlowDirection {
  /// labels[j][0] is the minus-side label, labels[j][1] the plus side.
  std::vector<std::array<int, 2>> labels;
  std::vector<int> phi;

  bool balanced() const {
    for (int p : phi)
      if (p != 0) return false;
    return true;
  }
};

/// A regular switching system with its cell complex and memoized labels.
/// Safe for concurrent use; the label memo is guarded by a shared mutex.
class SwitchingSystem {
 public:
  SwitchingSystem(RegulatoryNetwork net, SwitchingParameter z)
      : net_(std::move(net)), z_(std::move(z)), complex_(checked(net_, z_)), memo_(std::make_unique<Memo>()) {}

  SwitchingSystem(const SwitchingSystem& other)
      : net_(other.net_), z_(other.z_), complex_(other.complex_), memo_(std::make_unique<Memo>()) {}

  const RegulatoryNetwork& network() const { return net_; }
  const SwitchingParameter& parameter() const { return z_; }
  const CellComplex& complex() const { return complex_; }
  int dimension() const { return net_.size(); }

  /// Value of theta at sorted position p of direction j; p must be finite (1..m_j).
  const Rational& threshold(int j, int p) const { return z_.theta[net_.edge_id(j, complex_.target_at(j, p))]; }

  /// Input combination of node i on cell c, or nothing when some source of i sits on its threshold to i.
  std::optional<InputCombination> input_on(int i, const Cell& c) const {
    InputCombination a = 0;
    auto sources = net_.sources(i);
    for (std::size_t k = 0; k < sources.size(); ++k) {
      int j = sources[k];
      int t = complex_.threshold_coord(j, i);
      if (c[j] == t) return std::nullopt;
      bool above = c[j] > t;
      if (above == (net_.sign(j, i) > 0)) a |= InputCombination{1} << k;
    }
    return a;
  }

  /// Lambda_i on cell c.
  Rational lambda(int i, const Cell& c) const {
    auto a = input_on(i, c);
    if (!a)
      throw Error(ErrorKind::UndefinedOnCell,
                  "Lambda of " + net_.name(i) + " is undefined on " + complex_.notation(c));
    return omega(net_, z_, i, *a);
  }

  /// Label of the j-neighbor of an LCC on the given side.
  int label(const Cell& c, int j, Side side) const {
    if (!complex_.is_loop_characteristic(c))
      throw Error(ErrorKind::NotLoopCharacteristic, complex_.notation(c) + " is not loop characteristic");
    return label_unchecked(c, j, side);
  }

  FlowDirection flow_direction(const Cell& c) const {
    if (!complex_.is_loop_characteristic(c))
      throw Error(ErrorKind::NotLoopCharacteristic, complex_.notation(c) + " is not loop characteristic");
    FlowDirection f;
    for (int j = 0; j < dimension(); ++j) {
      int lo = label_unchecked(c, j, Side::Minus);
      int hi = label_unchecked(c, j, Side::Plus);
      f.labels.push_back({lo, hi});
      f.phi.push_back(lo == hi ? lo : 0);
    }
    return f;
  }

  /// Loop characteristic with Phi identically zero.
  bool is_equilibrium_cell(const Cell& c) const {
    if (!complex_.is_loop_characteristic(c)) return false;
    for (int j = 0; j < dimension(); ++j)
      if (label_unchecked(c, j, Side::Minus) == label_unchecked(c, j, Side::Plus)) return false;
    return true;
  }

 private:
  static CellComplex checked(const RegulatoryNetwork& net, const SwitchingParameter& z) {
    require_regular(net, z);
    return CellComplex(net, z);
  }

  int label_unchecked(const Cell& c, int j, Side side) const {
    const std::uint64_t key = (complex_.id_of(c) * static_cast<std::uint64_t>(dimension()) + j) * 2 +
                              (side == Side::Plus ? 1 : 0);
    {
      std::shared_lock lock(memo_->mutex);
      auto it = memo_->values.find(key);
      if (it != memo_->values.end()) return it->second;
    }
    int value = compute_label(c, j, side);
    std::unique_lock lock(memo_->mutex);
    memo_->values.emplace(key, static_cast<signed char>(value));
    return value;
  }

  int compute_label(const Cell& c, int j, Side side) const {
    if (!c.singular(j)) {
      int p = c[j] / 2 + (side == Side::Plus ? 1 : 0);
      if (p == 0) return 1;
      if (p == complex_.threshold_count(j) + 1) return -1;
      return sign(lambda(j, c) - z_.gamma[j] * threshold(j, p));
    }
    int r = complex_.rho(c, j);
    Cell n = complex_.neighbor(c, j, side);
    int p = (c[r] + 1) / 2;
    return sign(lambda(r, n) - z_.gamma[r] * threshold(r, p));
  }

  struct Memo {
    std::shared_mutex mutex;
    std::unordered_map<std::uint64_t, signed char> values;
  };

  RegulatoryNetwork net_;
  SwitchingParameter z_;
  CellComplex complex_;
  std::unique_ptr<Memo> memo_;
};

}  // namespace switchcell
