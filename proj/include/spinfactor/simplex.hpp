#pragma once

// Dense two-phase tableau simplex for small linear programs.
//
// Variables are non-negative; rows are <=, >= or = constraints. Pivoting
// follows Bland's rule (lowest eligible index enters, ties in the ratio test
// broken by lowest basic index), so the method terminates on degenerate
// problems. The scalar type is a template parameter: exact rationals
// (e.g. mpq_class) give exact vertices, double uses a fixed tolerance.

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace spinfactor::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

template <class T>
struct Row {
  std::vector<T> coeffs;
  Sense sense = Sense::LessEqual;
  T rhs{};
};

/// maximize objective . x  subject to rows, x >= 0
template <class T>
struct Program {
  std::size_t num_vars = 0;
  std::vector<T> objective;
  std::vector<Row<T>> rows;
};

enum class Status { Optimal, Infeasible, Unbounded, PivotLimit };

template <class T>
struct Result {
  Status status = Status::PivotLimit;
  T objective{};
  std::vector<T> x;
  /// Phase-one residual (sum of artificials); positive iff infeasible.
  T infeasibility{};
  std::size_t pivots = 0;
};

template <class T>
struct Tolerance {
  static bool positive(const T& v) { return v > T(0); }
  static bool negative(const T& v) { return v < T(0); }
  static bool zero(const T& v) { return v == T(0); }
};

template <>
struct Tolerance<double> {
  static constexpr double eps = 1e-10;
  static bool positive(double v) { return v > eps; }
  static bool negative(double v) { return v < -eps; }
  static bool zero(double v) { return !positive(v) && !negative(v); }
};

namespace detail {

template <class T>
class Tableau {
  using Tol = Tolerance<T>;

 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows, std::vector<T>(cols + 1, T(0))), basis_(rows, 0),
        allowed_(cols, true) {}

  T& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  T& rhs(std::size_t r) { return a_[r][n_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return m_; }
  void forbid(std::size_t c) { allowed_[c] = false; }

  /// Runs the simplex loop maximizing `cost . x`; returns false when
  /// unbounded. `cost` is priced out against the current basis first.
  std::optional<bool> maximize(const std::vector<T>& cost, std::size_t& pivots,
                               std::size_t max_pivots) {
    reduced_.assign(n_ + 1, T(0));
    for (std::size_t c = 0; c < n_; ++c) reduced_[c] = cost[c];
    for (std::size_t r = 0; r < m_; ++r) {
      const T cb = cost[basis_[r]];
      if (Tol::zero(cb)) continue;
      for (std::size_t c = 0; c <= n_; ++c) reduced_[c] -= cb * a_[r][c];
    }
    while (true) {
      std::size_t enter = n_;
      for (std::size_t c = 0; c < n_; ++c) {
        if (allowed_[c] && Tol::positive(reduced_[c])) {
          enter = c;
          break;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      T best{};
      for (std::size_t r = 0; r < m_; ++r) {
        if (!Tol::positive(a_[r][enter])) continue;
        T ratio = a_[r][n_] / a_[r][enter];
        if (leave == m_ || ratio < best || (!(best < ratio) && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      if (pivots >= max_pivots) return std::nullopt;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const T p = a_[r][c];
    for (auto& v : a_[r]) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || Tol::zero(a_[i][c])) continue;
      const T f = a_[i][c];
      for (std::size_t k = 0; k <= n_; ++k) a_[i][k] -= f * a_[r][k];
    }
    if (!reduced_.empty() && !Tol::zero(reduced_[c])) {
      const T f = reduced_[c];
      for (std::size_t k = 0; k <= n_; ++k) reduced_[k] -= f * a_[r][k];
    }
    basis_[r] = c;
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::vector<T>> a_;
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
  std::vector<T> reduced_;
};

}  // namespace detail

template <class T>
Result<T> solve(const Program<T>& prog, std::size_t max_pivots = 200000) {
  using Tol = Tolerance<T>;
  const std::size_t n = prog.num_vars;
  const std::size_t m = prog.rows.size();
  if (prog.objective.size() != n) throw std::invalid_argument("objective length != num_vars");

  // Column layout: [structural | slack/surplus | artificial].
  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  std::vector<int> flip(m, 1);
  std::vector<Sense> sense(m);
  for (std::size_t r = 0; r < m; ++r) {
    if (prog.rows[r].coeffs.size() != n) throw std::invalid_argument("row length != num_vars");
    sense[r] = prog.rows[r].sense;
    if (Tol::negative(prog.rows[r].rhs)) {
      flip[r] = -1;
      if (sense[r] == Sense::LessEqual)
        sense[r] = Sense::GreaterEqual;
      else if (sense[r] == Sense::GreaterEqual)
        sense[r] = Sense::LessEqual;
    }
    if (sense[r] != Sense::Equal) ++num_slack;
    if (sense[r] != Sense::LessEqual) ++num_art;
  }
  const std::size_t cols = n + num_slack + num_art;
  detail::Tableau<T> tab(m, cols);
  std::size_t slack = n;
  std::size_t art = n + num_slack;
  const std::size_t first_art = art;
  for (std::size_t r = 0; r < m; ++r) {
    const T f = T(flip[r]);
    for (std::size_t c = 0; c < n; ++c) tab.at(r, c) = f * prog.rows[r].coeffs[c];
    tab.rhs(r) = f * prog.rows[r].rhs;
    switch (sense[r]) {
      case Sense::LessEqual:
        tab.at(r, slack) = T(1);
        tab.basis(r) = slack++;
        break;
      case Sense::GreaterEqual:
        tab.at(r, slack++) = T(-1);
        tab.at(r, art) = T(1);
        tab.basis(r) = art++;
        break;
      case Sense::Equal:
        tab.at(r, art) = T(1);
        tab.basis(r) = art++;
        break;
    }
  }

  Result<T> result;
  if (num_art > 0) {
    std::vector<T> phase1(cols, T(0));
    for (std::size_t c = first_art; c < cols; ++c) phase1[c] = T(-1);
    auto ok = tab.maximize(phase1, result.pivots, max_pivots);
    if (!ok) {
      result.status = Status::PivotLimit;
      return result;
    }
    T residual(0);
    for (std::size_t r = 0; r < tab.rows(); ++r)
      if (tab.basis(r) >= first_art) residual += tab.rhs(r);
    result.infeasibility = residual;
    if (Tol::positive(residual)) {
      result.status = Status::Infeasible;
      return result;
    }
    // Pivot zero-level artificials out of the basis; rows with no
    // structural entry left are redundant.
    for (std::size_t r = 0; r < tab.rows();) {
      if (tab.basis(r) < first_art) {
        ++r;
        continue;
      }
      std::size_t c = 0;
      while (c < first_art && Tol::zero(tab.at(r, c))) ++c;
      if (c == first_art) {
        tab.drop_row(r);
      } else {
        tab.pivot(r, c);
        ++r;
      }
    }
    for (std::size_t c = first_art; c < cols; ++c) tab.forbid(c);
  }

  std::vector<T> phase2(cols, T(0));
  for (std::size_t c = 0; c < n; ++c) phase2[c] = prog.objective[c];
  auto ok = tab.maximize(phase2, result.pivots, max_pivots);
  if (!ok) {
    result.status = Status::PivotLimit;
    return result;
  }
  if (!*ok) {
    result.status = Status::Unbounded;
    return result;
  }
  result.x.assign(n, T(0));
  for (std::size_t r = 0; r < tab.rows(); ++r)
    if (tab.basis(r) < n) result.x[tab.basis(r)] = tab.rhs(r);
  result.objective = T(0);
  for (std::size_t c = 0; c < n; ++c) result.objective += prog.objective[c] * result.x[c];
  result.status = Status::Optimal;
  return result;
}

}  // namespace spinfactor::lp
