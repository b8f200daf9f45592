#include "abn/table.hpp"

#include <algorithm>

#include "abn/errors.hpp"

namespace abn {

Table::Table(std::vector<int> vars_, std::vector<int> cards_, double fill)
    : vars(std::move(vars_)), cards(std::move(cards_)) {
  values.assign(static_cast<std::size_t>(config_count(cards)), fill);
}

std::vector<std::int64_t> Table::strides() const {
  std::vector<std::int64_t> s(vars.size(), 1);
  for (std::size_t i = vars.size(); i-- > 1;) {
    s[i - 1] = s[i] * cards[i];
  }
  return s;
}

int Table::position_of(int var) const {
  auto it = std::lower_bound(vars.begin(), vars.end(), var);
  if (it == vars.end() || *it != var) return -1;
  return static_cast<int>(it - vars.begin());
}

double Table::sum() const {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

void Table::scale(double factor) {
  for (double& v : values) v *= factor;
}

double Table::normalize() {
  double total = sum();
  if (total > 0.0) scale(1.0 / total);
  return total;
}

void Table::multiply_in(const Table& factor) {
  std::vector<int> pos(factor.vars.size());
  for (std::size_t i = 0; i < factor.vars.size(); ++i) {
    pos[i] = position_of(factor.vars[i]);
    if (pos[i] < 0) fail(Errc::internal, "factor variable missing from table");
  }
  std::vector<std::int64_t> fstr = factor.strides();
  std::vector<int> digit(vars.size(), 0);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    std::int64_t fidx = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      fidx += digit[static_cast<std::size_t>(pos[i])] * fstr[i];
    }
    values[idx] *= factor.values[static_cast<std::size_t>(fidx)];
    for (std::size_t d = vars.size(); d-- > 0;) {
      if (++digit[d] < cards[d]) break;
      digit[d] = 0;
    }
  }
}

void Table::observe(int var, int state) {
  int p = position_of(var);
  if (p < 0) fail(Errc::internal, "observed variable missing from table");
  std::vector<int> digit(vars.size(), 0);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (digit[static_cast<std::size_t>(p)] != state) values[idx] = 0.0;
    for (std::size_t d = vars.size(); d-- > 0;) {
      if (++digit[d] < cards[d]) break;
      digit[d] = 0;
    }
  }
}

Table Table::marginal(const std::vector<int>& onto) const {
  std::vector<int> ocards;
  std::vector<int> pos;
  ocards.reserve(onto.size());
  pos.reserve(onto.size());
  for (int var : onto) {
    int p = position_of(var);
    if (p < 0) fail(Errc::internal, "marginal variable missing from table");
    pos.push_back(p);
    ocards.push_back(cards[static_cast<std::size_t>(p)]);
  }
  Table out(onto, ocards, 0.0);
  std::vector<std::int64_t> ostr = out.strides();
  std::vector<int> digit(vars.size(), 0);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    std::int64_t oidx = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      oidx += digit[static_cast<std::size_t>(pos[i])] * ostr[i];
    }
    out.values[static_cast<std::size_t>(oidx)] += values[idx];
    for (std::size_t d = vars.size(); d-- > 0;) {
      if (++digit[d] < cards[d]) break;
      digit[d] = 0;
    }
  }
  return out;
}

void Table::absorb(const Table& new_sep, const Table& old_sep) {
  std::vector<int> pos(new_sep.vars.size());
  for (std::size_t i = 0; i < new_sep.vars.size(); ++i) {
    pos[i] = position_of(new_sep.vars[i]);
    if (pos[i] < 0) fail(Errc::internal, "separator variable missing from clique");
  }
  std::vector<std::int64_t> sstr = new_sep.strides();
  std::vector<int> digit(vars.size(), 0);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    std::int64_t sidx = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      sidx += digit[static_cast<std::size_t>(pos[i])] * sstr[i];
    }
    double denom = old_sep.values[static_cast<std::size_t>(sidx)];
    if (denom == 0.0) {
      values[idx] = 0.0;
    } else {
      values[idx] *= new_sep.values[static_cast<std::size_t>(sidx)] / denom;
    }
    for (std::size_t d = vars.size(); d-- > 0;) {
      if (++digit[d] < cards[d]) break;
      digit[d] = 0;
    }
  }
}

Table cpt_table(const Network& net, const FullCpt& cpt) {
  std::vector<int> fam = cpt.parents;
  fam.push_back(cpt.child);
  std::sort(fam.begin(), fam.end());
  std::vector<int> cards;
  cards.reserve(fam.size());
  for (int v : fam) cards.push_back(net.cardinality(v));
  Table out(fam, cards, 0.0);

  std::vector<int> pcards;
  pcards.reserve(cpt.parents.size());
  for (int p : cpt.parents) pcards.push_back(net.cardinality(p));

  // Positions of the ordered parents and the child inside the sorted family.
  std::vector<int> ppos;
  ppos.reserve(cpt.parents.size());
  for (int p : cpt.parents) ppos.push_back(out.position_of(p));
  int cpos = out.position_of(cpt.child);

  std::vector<int> digit(fam.size(), 0);
  std::vector<int> pstate(cpt.parents.size(), 0);
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    for (std::size_t i = 0; i < ppos.size(); ++i) {
      pstate[i] = digit[static_cast<std::size_t>(ppos[i])];
    }
    std::int64_t row = config_row(pstate, pcards);
    out.values[idx] = cpt.rows[static_cast<std::size_t>(row)]
                              [static_cast<std::size_t>(digit[static_cast<std::size_t>(cpos)])];
    for (std::size_t d = fam.size(); d-- > 0;) {
      if (++digit[d] < out.cards[d]) break;
      digit[d] = 0;
    }
  }
  return out;
}

}  // namespace abn
