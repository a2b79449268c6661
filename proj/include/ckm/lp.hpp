#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ckm/types.hpp"

namespace ckm {

/// Minimization LP over named variables with implicit lower bound 0 and
/// optional upper bounds.
template <typename Scalar = double>
struct LinearProgram {
  enum class Sense { le, ge, eq };

  struct Term {
    int var;
    Scalar coeff;
  };

  struct Row {
    std::vector<Term> terms;
    Sense sense;
    Scalar rhs;
  };

  std::vector<std::string> names;
  std::vector<std::optional<Scalar>> upper;
  std::vector<Term> objective;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(names.size()); }

  int add_variable(std::string name, std::optional<Scalar> ub = {}) {
    names.push_back(std::move(name));
    upper.push_back(std::move(ub));
    return num_vars() - 1;
  }

  void add_objective(int var, Scalar coeff) { objective.push_back({var, coeff}); }

  void add_row(std::vector<Term> terms, Sense sense, Scalar rhs) {
    rows.push_back({std::move(terms), sense, std::move(rhs)});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

template <typename Scalar = double>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  VectorX<Scalar> values;
  Scalar objective_value{0};
};

namespace detail {

template <typename Scalar>
Scalar abs_of(Scalar x) {
  return x < Scalar(0) ? -x : x;
}

template <typename Scalar>
void check_lp(const LinearProgram<Scalar>& lp) {
  auto check_term = [&](const typename LinearProgram<Scalar>::Term& t) {
    if (t.var < 0 || t.var >= lp.num_vars())
      throw contract_error("lp: term references undeclared variable");
    if constexpr (!scalar_traits<Scalar>::is_exact) {
      if (!std::isfinite(t.coeff)) throw contract_error("lp: non-finite coefficient");
    }
  };
  for (const auto& t : lp.objective) check_term(t);
  for (const auto& row : lp.rows) {
    for (const auto& t : row.terms) check_term(t);
    if constexpr (!scalar_traits<Scalar>::is_exact) {
      if (!std::isfinite(row.rhs)) throw contract_error("lp: non-finite rhs");
    }
  }
}

// Dense two-phase tableau simplex. Dantzig entering rule with a permanent
// switch to Bland's rule once the objective stalls, which keeps pivoting
// deterministic and cycle-free.
template <typename Scalar>
class SimplexTableau {
 public:
  using RowMajor =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit SimplexTableau(const LinearProgram<Scalar>& lp) : n_(lp.num_vars()) {
    // normalize every constraint to  a.x <= b
    std::vector<std::vector<typename LinearProgram<Scalar>::Term>> terms;
    std::vector<Scalar> rhs;
    auto push = [&](const std::vector<typename LinearProgram<Scalar>::Term>& t,
                    Scalar b, bool negate) {
      terms.push_back(t);
      if (negate)
        for (auto& term : terms.back()) term.coeff = -term.coeff;
      rhs.push_back(negate ? -b : b);
    };
    for (const auto& row : lp.rows) {
      using Sense = typename LinearProgram<Scalar>::Sense;
      if (row.sense == Sense::le || row.sense == Sense::eq)
        push(row.terms, row.rhs, false);
      if (row.sense == Sense::ge || row.sense == Sense::eq)
        push(row.terms, row.rhs, true);
    }
    for (int j = 0; j < n_; ++j)
      if (lp.upper[j])
        push({{j, Scalar(1)}}, *lp.upper[j], false);

    m_ = static_cast<int>(terms.size());
    int art = 0;
    for (int i = 0; i < m_; ++i)
      if (rhs[i] < Scalar(0)) ++art;
    cols_ = n_ + m_ + art + 1;  // structural, slack, artificial, rhs
    tab_ = RowMajor::Zero(m_ + 1, cols_);
    basis_.resize(m_);
    art_begin_ = n_ + m_;

    int next_art = art_begin_;
    for (int i = 0; i < m_; ++i) {
      bool neg = rhs[i] < Scalar(0);
      Scalar sign = neg ? Scalar(-1) : Scalar(1);
      for (const auto& t : terms[i]) tab_(i, t.var) += sign * t.coeff;
      tab_(i, n_ + i) = sign;  // slack
      tab_(i, cols_ - 1) = sign * rhs[i];
      if (neg) {
        tab_(i, next_art) = Scalar(1);
        basis_[i] = next_art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
  }

  LpSolution<Scalar> solve(const LinearProgram<Scalar>& lp, int max_iters) {
    LpSolution<Scalar> out;

    if (art_begin_ < cols_ - 1) {  // artificials exist
      // phase 1: drive the artificial total to zero
      for (int i = 0; i < m_; ++i)
        if (basis_[i] >= art_begin_) tab_.row(m_) -= tab_.row(i);
      if (!pivot_until_optimal(art_begin_, max_iters)) {
        throw solver_error("simplex: iteration cap exceeded in phase 1");
      }
      if (-tab_(m_, cols_ - 1) > phase1_tol()) {
        out.status = LpStatus::infeasible;
        return out;
      }
      // remove leftover artificials from the basis where possible
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] < art_begin_) continue;
        for (int j = 0; j < art_begin_; ++j)
          if (abs_of(tab_(i, j)) > pivot_floor()) {
            pivot(i, j);
            break;
          }
      }
    }

    // phase 2
    tab_.row(m_).setZero();
    for (const auto& t : lp.objective) tab_(m_, t.var) += t.coeff;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_ && abs_of(tab_(m_, basis_[i])) > Scalar(0))
        tab_.row(m_) -= tab_(m_, basis_[i]) * tab_.row(i);
    }
    bland_ = false;
    stall_ = 0;
    if (!pivot_until_optimal(art_begin_, max_iters))
      throw solver_error("simplex: iteration cap exceeded in phase 2");
    if (unbounded_) {
      out.status = LpStatus::unbounded;
      return out;
    }

    out.status = LpStatus::optimal;
    out.values = VectorX<Scalar>::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) {
        Scalar v = tab_(i, cols_ - 1);
        out.values[basis_[i]] = v < Scalar(0) ? Scalar(0) : v;  // round-off
      }
    out.objective_value = Scalar(0);
    for (const auto& t : lp.objective)
      out.objective_value += t.coeff * out.values[t.var];
    return out;
  }

 private:
  Scalar phase1_tol() const {
    if constexpr (scalar_traits<Scalar>::is_exact)
      return Scalar(0);
    else
      return Scalar(1e-7);
  }
  Scalar pivot_floor() const {
    if constexpr (scalar_traits<Scalar>::is_exact)
      return Scalar(0);
    else
      return Scalar(1e-9);
  }

  // entering column among [0, allowed_end), or -1 when reduced costs are
  // all nonnegative
  int entering(int allowed_end) const {
    int best = -1;
    for (int j = 0; j < allowed_end; ++j) {
      Scalar rc = tab_(m_, j);
      if (rc < -pivot_floor()) {
        if (bland_) return j;
        if (best < 0 || rc < tab_(m_, best)) best = j;
      }
    }
    return best;
  }

  int leaving(int col) const {
    int row = -1;
    for (int i = 0; i < m_; ++i) {
      Scalar a = tab_(i, col);
      if (a > pivot_floor()) {
        if (row < 0) {
          row = i;
          continue;
        }
        Scalar lhs = tab_(i, cols_ - 1) * tab_(row, col);
        Scalar rhs = tab_(row, cols_ - 1) * tab_(i, col);
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[row])) row = i;
      }
    }
    return row;
  }

  void pivot(int row, int col) {
    tab_.row(row) /= tab_(row, col);
    for (int i = 0; i <= m_; ++i) {
      if (i == row) continue;
      Scalar f = tab_(i, col);
      if (!(abs_of(f) > Scalar(0))) continue;
      tab_.row(i) -= f * tab_.row(row);
      tab_(i, col) = Scalar(0);
    }
    basis_[row] = col;
  }

  bool pivot_until_optimal(int allowed_end, int max_iters) {
    unbounded_ = false;
    Scalar prev = tab_(m_, cols_ - 1);
    for (int iter = 0; iter < max_iters; ++iter) {
      int col = entering(allowed_end);
      if (col < 0) return true;
      int row = leaving(col);
      if (row < 0) {
        unbounded_ = true;
        return true;
      }
      pivot(row, col);
      if constexpr (!scalar_traits<Scalar>::is_exact) {
        Scalar now = tab_(m_, cols_ - 1);
        if (abs_of(now - prev) <= Scalar(1e-12))
          ++stall_;
        else
          stall_ = 0;
        prev = now;
        if (stall_ > 256) bland_ = true;  // anti-cycling fallback
      }
    }
    return false;
  }

  int n_ = 0, m_ = 0, cols_ = 0, art_begin_ = 0;
  RowMajor tab_;
  std::vector<int> basis_;
  bool bland_ = false;
  bool unbounded_ = false;
  int stall_ = 0;
};

}  // namespace detail

/// Deterministic simplex solve. Infeasible and unbounded are ordinary
/// statuses; only resource exhaustion throws.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp,
                            int max_iters = 400000) {
  detail::check_lp(lp);
  detail::SimplexTableau<Scalar> tableau(lp);
  return tableau.solve(lp, max_iters);
}

/// CPLEX LP text format, for offline debugging of built programs.
template <typename Scalar>
void write_lp_format(const LinearProgram<Scalar>& lp, std::ostream& out) {
  out << "Minimize\n obj:";
  for (const auto& t : lp.objective)
    out << (t.coeff < Scalar(0) ? " - " : " + ")
        << detail::abs_of(t.coeff) << " " << lp.names[t.var];
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    out << " r" << i << ":";
    for (const auto& t : lp.rows[i].terms)
      out << (t.coeff < Scalar(0) ? " - " : " + ")
          << detail::abs_of(t.coeff) << " " << lp.names[t.var];
    using Sense = typename LinearProgram<Scalar>::Sense;
    out << (lp.rows[i].sense == Sense::le   ? " <= "
            : lp.rows[i].sense == Sense::ge ? " >= "
                                            : " = ")
        << lp.rows[i].rhs << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.upper[j])
      out << " 0 <= " << lp.names[j] << " <= " << *lp.upper[j] << "\n";
    else
      out << " 0 <= " << lp.names[j] << "\n";
  }
  out << "End\n";
}

}  // namespace ckm
