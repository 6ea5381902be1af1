#pragma once

#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cat0/errors.hpp"

namespace cat0 {

using Rational = boost::multiprecision::cpp_rational;

enum class Rel { le, ge };

// maximize c.x  subject to  rows (a.x <= / >= rhs)  and  x >= 0.
template <class T>
struct Lp {
  int nvars = 0;
  std::vector<T> c;
  struct Row {
    std::vector<T> a;
    Rel rel = Rel::le;
    T rhs{};
  };
  std::vector<Row> rows;

  void add_row(std::vector<T> a, Rel rel, T rhs) { rows.push_back({std::move(a), rel, std::move(rhs)}); }
};

enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<T> x;  // structural variables (empty unless optimal)
  T obj{};
  long pivots = 0;
};

namespace simplex_detail {

template <class T>
constexpr bool is_float = std::is_floating_point_v<T>;

template <class T>
T opt_tol() {
  if constexpr (is_float<T>) return T(1e-9);
  else return T(0);
}

template <class T>
T pivot_tol() {
  if constexpr (is_float<T>) return T(1e-12);
  else return T(0);
}

template <class T>
T abs_val(const T& v) {
  using std::abs;
  return abs(v);
}

// Dense two-phase tableau.  Columns: structural | slack/surplus | artificial.
template <class T>
class Tableau {
 public:
  explicit Tableau(const Lp<T>& lp) : n_(lp.nvars) {
    const int m = static_cast<int>(lp.rows.size());
    int n_art = 0;
    for (const auto& r : lp.rows) {
      const bool flip = r.rhs < T(0);
      const Rel rel = flip ? (r.rel == Rel::le ? Rel::ge : Rel::le) : r.rel;
      if (rel == Rel::ge) ++n_art;
    }
    cols_ = n_ + m + n_art;
    a_.assign(m, std::vector<T>(cols_ + 1, T(0)));
    basis_.assign(m, -1);
    first_art_ = n_ + m;

    int art = first_art_;
    for (int i = 0; i < m; ++i) {
      const auto& r = lp.rows[i];
      if (static_cast<int>(r.a.size()) != n_)
        fail(Errc::domain_error, "LP row length does not match variable count");
      const bool flip = r.rhs < T(0);
      for (int j = 0; j < n_; ++j) a_[i][j] = flip ? -r.a[j] : r.a[j];
      a_[i][cols_] = flip ? -r.rhs : r.rhs;
      const Rel rel = flip ? (r.rel == Rel::le ? Rel::ge : Rel::le) : r.rel;
      if (rel == Rel::le) {
        a_[i][n_ + i] = T(1);  // slack, initially basic
        basis_[i] = n_ + i;
      } else {
        a_[i][n_ + i] = T(-1);  // surplus
        a_[i][art] = T(1);      // artificial, initially basic
        basis_[i] = art++;
      }
    }
  }

  LpResult<T> solve(const Lp<T>& lp) {
    LpResult<T> res;
    const int m = static_cast<int>(a_.size());
    bland_after_ = 10L * (m + cols_);

    if (first_art_ < cols_) {
      // Phase 1: maximize -sum(artificials).
      std::vector<T> c1(cols_, T(0));
      for (int j = first_art_; j < cols_; ++j) c1[j] = T(-1);
      set_objective(c1);
      if (!iterate(res.pivots)) fail(Errc::domain_error, "phase 1 cannot be unbounded");
      if (obj_value_ < -feas_tol()) {
        res.status = LpStatus::infeasible;
        return res;
      }
      // Pivot surviving artificials out; a row where that is impossible is
      // redundant and keeps its artificial at value zero.
      for (int i = 0; i < m; ++i) {
        if (basis_[i] < first_art_) continue;
        int enter = -1;
        for (int j = 0; j < first_art_; ++j) {
          if (abs_val(a_[i][j]) > pivot_tol<T>()) {
            enter = j;
            break;
          }
        }
        if (enter >= 0) pivot(i, enter);
      }
      banned_from_ = first_art_;
    }

    std::vector<T> c2(cols_, T(0));
    for (int j = 0; j < n_; ++j) c2[j] = lp.c[j];
    set_objective(c2);
    if (!iterate(res.pivots)) {
      res.status = LpStatus::unbounded;
      return res;
    }

    res.status = LpStatus::optimal;
    res.x.assign(n_, T(0));
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < n_) res.x[basis_[i]] = a_[i][cols_];
    }
    res.obj = T(0);
    for (int j = 0; j < n_; ++j) res.obj += lp.c[j] * res.x[j];
    return res;
  }

 private:
  T feas_tol() const {
    if constexpr (is_float<T>) return T(1e-7);
    else return T(0);
  }

  void set_objective(const std::vector<T>& c) {
    red_.assign(cols_, T(0));
    for (int j = 0; j < cols_; ++j) red_[j] = c[j];
    obj_value_ = T(0);
    for (size_t i = 0; i < a_.size(); ++i) {
      const int b = basis_[i];
      if (c[b] == T(0)) continue;
      for (int j = 0; j < cols_; ++j) red_[j] -= c[b] * a_[i][j];
      obj_value_ += c[b] * a_[i][cols_];
    }
  }

  // Runs pivots until optimal (true) or unbounded (false).
  bool iterate(long& pivots) {
    const int m = static_cast<int>(a_.size());
    while (true) {
      const bool bland = pivots >= bland_after_;
      int enter = -1;
      if (bland) {
        for (int j = 0; j < limit(); ++j) {
          if (red_[j] > opt_tol<T>()) {
            enter = j;
            break;
          }
        }
      } else {
        T best = opt_tol<T>();
        for (int j = 0; j < limit(); ++j) {
          if (red_[j] > best) {
            best = red_[j];
            enter = j;
          }
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      T best_ratio{};
      bool tiny_only = false;
      for (int i = 0; i < m; ++i) {
        if (a_[i][enter] <= pivot_tol<T>()) {
          if constexpr (is_float<T>) {
            if (a_[i][enter] > T(0)) tiny_only = true;
          }
          continue;
        }
        const T ratio = a_[i][cols_] / a_[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) {
        if (tiny_only)
          fail(Errc::numerical_breakdown, "pivot candidates below 1e-12; retry in rational mode");
        return false;
      }
      pivot(leave, enter);
      ++pivots;
      if (pivots > k_hard_cap) {
        if constexpr (is_float<T>)
          fail(Errc::numerical_breakdown, "simplex failed to terminate (float cycling)");
        else
          fail(Errc::domain_error, "simplex pivot cap exceeded");
      }
    }
  }

  int limit() const { return banned_from_ >= 0 ? banned_from_ : cols_; }

  void pivot(int row, int col) {
    const T piv = a_[row][col];
    for (int j = 0; j <= cols_; ++j) a_[row][j] /= piv;
    a_[row][col] = T(1);  // exact
    for (size_t i = 0; i < a_.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      const T f = a_[i][col];
      if (f == T(0)) continue;
      for (int j = 0; j <= cols_; ++j) a_[i][j] -= f * a_[row][j];
      a_[i][col] = T(0);
    }
    const T fr = red_[col];
    if (fr != T(0)) {
      for (int j = 0; j < cols_; ++j) red_[j] -= fr * a_[row][j];
      obj_value_ += fr * a_[row][cols_];
      red_[col] = T(0);
    }
    basis_[row] = col;
  }

  static constexpr long k_hard_cap = 2'000'000;
  int n_ = 0;
  int cols_ = 0;
  int first_art_ = 0;
  int banned_from_ = -1;
  long bland_after_ = 0;
  std::vector<std::vector<T>> a_;
  std::vector<int> basis_;
  std::vector<T> red_;
  T obj_value_{};
};

}  // namespace simplex_detail

template <class T>
LpResult<T> solve_lp(const Lp<T>& lp) {
  if (static_cast<int>(lp.c.size()) != lp.nvars)
    fail(Errc::domain_error, "objective length does not match variable count");
  if constexpr (simplex_detail::is_float<T>) {
    for (const auto& v : lp.c) {
      if (!std::isfinite(v)) fail(Errc::domain_error, "objective has a non-finite entry");
    }
    for (const auto& r : lp.rows) {
      if (!std::isfinite(r.rhs)) fail(Errc::domain_error, "row rhs is non-finite");
      for (const auto& v : r.a) {
        if (!std::isfinite(v)) fail(Errc::domain_error, "row has a non-finite entry");
      }
    }
  }
  simplex_detail::Tableau<T> t(lp);
  return t.solve(lp);
}

template <class T>
bool check_feasible(const Lp<T>& lp, const std::vector<T>& x, const T& tol) {
  if (static_cast<int>(x.size()) != lp.nvars) return false;
  for (const auto& v : x) {
    if (v < -tol) return false;
  }
  for (const auto& r : lp.rows) {
    T lhs(0);
    for (int j = 0; j < lp.nvars; ++j) lhs += r.a[j] * x[j];
    if (r.rel == Rel::le && lhs > r.rhs + tol) return false;
    if (r.rel == Rel::ge && lhs < r.rhs - tol) return false;
  }
  return true;
}

}  // namespace cat0
