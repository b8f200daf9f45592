#pragma once

#include <cstdint>
#include <vector>

#include "abn/model.hpp"

namespace abn {

// Dense probability table over a set of variables, identified by network ids
// held in strictly ascending order. Values are row-major with the last
// variable varying fastest.
struct Table {
  std::vector<int> vars;
  std::vector<int> cards;
  std::vector<double> values;

  Table() = default;
  Table(std::vector<int> vars_, std::vector<int> cards_, double fill);

  std::size_t size() const { return values.size(); }
  std::vector<std::int64_t> strides() const;
  int position_of(int var) const;  // -1 when absent

  double sum() const;
  void scale(double factor);
  // Divides by the total mass and returns it; a zero-mass table is left as is.
  double normalize();

  // Pointwise multiply by a table over a subset of this table's variables.
  void multiply_in(const Table& factor);
  // Zero every entry inconsistent with var = state.
  void observe(int var, int state);
  // Sum out everything except `onto` (an ascending subset of vars).
  Table marginal(const std::vector<int>& onto) const;
  // Hugin update: multiply by new_sep / old_sep entrywise, with 0/0 -> 0.
  void absorb(const Table& new_sep, const Table& old_sep);
};

// Table form of a CPT: variables are the family, entries are Pr[child|parents].
Table cpt_table(const Network& net, const FullCpt& cpt);

}  // namespace abn
