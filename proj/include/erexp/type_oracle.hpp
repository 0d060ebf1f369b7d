#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "erexp/ensemble.hpp"
#include "erexp/errors.hpp"
#include "erexp/exponents.hpp"

// Independent re-derivation of the exponents by brute-force optimization over
// conditional types Q(x|y).  The clipped exponent satisfies
//   Lambda(R, s) = -(R + max f(Q))  over Q with R + H_Q(X|Y) + E_Q ln P(X) <= 0,
// with f(Q) = H_Q(X|Y) + E_Q ln P(X) + s E_Q ln P(Y|X), and the linear-branch
// slope is Delta(R) = min E_Q ln[1/P(Y|X)] over the complementary region.
// Alphabets are tiny, so exhaustive grids over the column simplices beat any
// descent method and double as an oracle that shares no code with the closed
// forms they check.

namespace erexp::types {

struct conditional_type {
  std::vector<std::vector<double>> q;  // q[y][x], each column a distribution over x
  std::vector<double> composition;     // weights over y, sum 1
};

struct oracle_result {
  double value = 0.0;
  conditional_type maximizer;
  bool on_boundary = false;
};

inline std::vector<double> uniform_composition(std::size_t ny) {
  return std::vector<double>(ny, 1.0 / static_cast<double>(ny));
}

inline void validate_type(const ensemble& ens, const conditional_type& ct) {
  if (ct.q.size() != ens.ny() || ct.composition.size() != ens.ny()) {
    throw domain_error("conditional type has wrong output arity");
  }
  double wsum = 0.0;
  for (double w : ct.composition) {
    if (!(w >= 0.0)) throw domain_error("composition weights must be nonnegative");
    wsum += w;
  }
  if (std::fabs(wsum - 1.0) > 1e-12) throw domain_error("composition must sum to 1");
  for (const auto& col : ct.q) {
    if (col.size() != ens.nx()) throw domain_error("conditional type has wrong input arity");
    double csum = 0.0;
    for (double v : col) {
      if (!(v >= 0.0 && v <= 1.0)) throw domain_error("type entries must lie in [0,1]");
      csum += v;
    }
    if (std::fabs(csum - 1.0) > 1e-12) throw domain_error("type columns must sum to 1");
  }
}

// H_Q(X|Y) + E_Q ln P(X) + s E_Q ln P(Y|X) under composition x column law.
// Mass on zero-probability pairs makes the value -inf, which is an ordinary
// value for the maximizations here.
inline double objective(const ensemble& ens, const conditional_type& ct, double s) {
  validate_type(ens, ct);
  double total = 0.0;
  for (std::size_t y = 0; y < ens.ny(); ++y) {
    const double w = ct.composition[y];
    if (w == 0.0) continue;
    double col = 0.0;
    for (std::size_t x = 0; x < ens.nx(); ++x) {
      const double v = ct.q[y][x];
      if (v == 0.0) continue;
      col += v * (-std::log(v) + ens.log_input(x) + s * ens.log_channel(x, y));
    }
    total += w * col;
  }
  return total;
}

// The tilted type Q^(s)(x|y) ~ P(x) P(y|x)^s, the unconstrained maximizer of
// the objective; at s = s_R it sits exactly on the region boundary.
inline conditional_type tilted_q(const ensemble& ens, double s) {
  conditional_type ct;
  ct.composition = uniform_composition(ens.ny());
  ct.q.resize(ens.ny());
  for (std::size_t y = 0; y < ens.ny(); ++y) ct.q[y] = ens.tilted_column(y, s);
  return ct;
}

inline double default_grid_res(std::size_t nx) { return nx == 2 ? 1e-3 : 1e-2; }

namespace detail {

// One column-simplex grid: distributions over x in steps of ~res, along with
// base_g(q) = H(q) + sum_x q(x) ln P(x), which is column-independent.
struct simplex_grid {
  std::vector<std::vector<double>> points;
  std::vector<double> base_g;
};

inline double plogp(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

inline simplex_grid make_simplex_grid(const ensemble& ens, double res) {
  const std::size_t nx = ens.nx();
  const int steps = std::max(1, static_cast<int>(std::lround(1.0 / res)));
  simplex_grid grid;
  auto push = [&](std::vector<double> q) {
    double g = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (q[x] == 0.0) continue;
      g += -plogp(q[x]) + q[x] * ens.log_input(x);  // -inf if P(x) = 0 carries mass
    }
    grid.base_g.push_back(g);
    grid.points.push_back(std::move(q));
  };
  if (nx == 2) {
    for (int i = 0; i <= steps; ++i) {
      const double a = static_cast<double>(i) / steps;
      push({a, 1.0 - a});
    }
  } else {  // nx == 3
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j + i <= steps; ++j) {
        const double a = static_cast<double>(i) / steps;
        const double b = static_cast<double>(j) / steps;
        push({a, b, 1.0 - a - b});
      }
    }
  }
  return grid;
}

// Per-column tables: g = w_y * base_g(q), v = the per-column term of the
// function being optimized.
struct column_table {
  std::vector<double> g;
  std::vector<double> v;
};

// Sorted view of a column for budgeted lookups: entries ordered by g with
// either prefix or suffix running maxima of v (earliest index wins ties, for
// deterministic maximizers).
struct sorted_column {
  std::vector<double> g;        // ascending
  std::vector<double> best_v;   // prefix_max ? running max up to i : running max from i
  std::vector<std::size_t> best_idx;
  std::vector<std::size_t> order;

  static sorted_column build(const column_table& col, bool prefix_max) {
    sorted_column sc;
    const std::size_t n = col.g.size();
    sc.order.resize(n);
    std::iota(sc.order.begin(), sc.order.end(), std::size_t{0});
    std::sort(sc.order.begin(), sc.order.end(), [&](std::size_t a, std::size_t b) {
      if (col.g[a] != col.g[b]) return col.g[a] < col.g[b];
      return a < b;
    });
    sc.g.resize(n);
    sc.best_v.resize(n);
    sc.best_idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) sc.g[i] = col.g[sc.order[i]];
    if (prefix_max) {
      double run = -std::numeric_limits<double>::infinity();
      std::size_t run_idx = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = col.v[sc.order[i]];
        if (v > run) {
          run = v;
          run_idx = sc.order[i];
        }
        sc.best_v[i] = run;
        sc.best_idx[i] = run_idx;
      }
    } else {
      double run = -std::numeric_limits<double>::infinity();
      std::size_t run_idx = 0;
      for (std::size_t i = n; i-- > 0;) {
        const double v = col.v[sc.order[i]];
        if (v > run) {
          run = v;
          run_idx = sc.order[i];
        }
        sc.best_v[i] = run;
        sc.best_idx[i] = run_idx;
      }
    }
    return sc;
  }

  // Largest position with g <= budget, or npos.
  std::size_t last_at_most(double budget) const {
    auto it = std::upper_bound(g.begin(), g.end(), budget);
    if (it == g.begin()) return npos;
    return static_cast<std::size_t>(it - g.begin()) - 1;
  }

  // Smallest position with g >= budget, or npos.
  std::size_t first_at_least(double budget) const {
    auto it = std::lower_bound(g.begin(), g.end(), budget);
    if (it == g.end()) return npos;
    return static_cast<std::size_t>(it - g.begin());
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct constrained_best {
  double total = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick;  // grid index per output column
};

// Maximize sum_y v_y subject to sum_y g_y <= budget (upper = true) or
// sum_y g_y >= budget (upper = false), by exhausting all but the last column
// and answering the last with the sorted view.
inline constrained_best optimize(const std::vector<column_table>& cols, double budget,
                                 bool upper) {
  const std::size_t ny = cols.size();
  constrained_best best;
  best.pick.assign(ny, 0);
  const sorted_column last = sorted_column::build(cols[ny - 1], upper);
  auto consider = [&](double acc_g, double acc_v, const std::size_t* picks) {
    const double rem = budget - acc_g;
    if (std::isnan(rem)) return;  // -inf budget against a -inf column
    const std::size_t pos = upper ? last.last_at_most(rem) : last.first_at_least(rem);
    if (pos == sorted_column::npos) return;
    const double total = acc_v + last.best_v[pos];
    if (total > best.total) {
      best.total = total;
      for (std::size_t y = 0; y + 1 < ny; ++y) best.pick[y] = picks[y];
      best.pick[ny - 1] = last.best_idx[pos];
    }
  };
  std::size_t picks[2] = {0, 0};
  if (ny == 2) {
    for (std::size_t i = 0; i < cols[0].g.size(); ++i) {
      picks[0] = i;
      consider(cols[0].g[i], cols[0].v[i], picks);
    }
  } else {  // ny == 3
    for (std::size_t i = 0; i < cols[0].g.size(); ++i) {
      for (std::size_t j = 0; j < cols[1].g.size(); ++j) {
        picks[0] = i;
        picks[1] = j;
        consider(cols[0].g[i] + cols[1].g[j], cols[0].v[i] + cols[1].v[j], picks);
      }
    }
  }
  return best;
}

inline std::vector<column_table> make_tables(const ensemble& ens, const simplex_grid& grid,
                                             const std::vector<double>& comp, double s_weight) {
  std::vector<column_table> cols(ens.ny());
  for (std::size_t y = 0; y < ens.ny(); ++y) {
    const std::size_t n = grid.points.size();
    cols[y].g.resize(n);
    cols[y].v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double l = 0.0;
      for (std::size_t x = 0; x < ens.nx(); ++x) {
        if (grid.points[i][x] == 0.0) continue;
        l += grid.points[i][x] * ens.log_channel(x, y);
      }
      const double g = comp[y] * grid.base_g[i];
      const double lw = comp[y] * l;
      cols[y].g[i] = g;
      // v carries the full per-column term being optimized; the caller sets
      // s_weight = s for the clipped-exponent search and 1 for the slope search.
      cols[y].v[i] = s_weight == 0.0 ? lw : g + s_weight * lw;
    }
  }
  return cols;
}

inline conditional_type assemble(const simplex_grid& grid, const std::vector<std::size_t>& pick,
                                 const std::vector<double>& comp) {
  conditional_type ct;
  ct.composition = comp;
  ct.q.reserve(pick.size());
  for (std::size_t idx : pick) ct.q.push_back(grid.points[idx]);
  return ct;
}

inline void require_small_alphabets(const ensemble& ens) {
  if (ens.nx() > 3 || ens.ny() > 3) {
    throw alphabet_too_large("type oracle supports |X| <= 3 and |Y| <= 3");
  }
}

}  // namespace detail

// Grid re-derivation of Lambda(R, s): the negated (R + max objective) over the
// region H_Q + E ln P(X) <= -R, with the given output composition.
inline oracle_result b_exponent_oracle(const ensemble& ens, double rate, double s,
                                       double grid_res, const std::vector<double>& composition) {
  detail::require_small_alphabets(ens);
  if (!(s > 0.0)) throw domain_error("b_exponent_oracle: s must be positive");
  const double s_r = solve_s_r(ens, rate);  // validates rate and symmetry
  const detail::simplex_grid grid = detail::make_simplex_grid(ens, grid_res);
  const auto cols = detail::make_tables(ens, grid, composition, s);
  const auto best = detail::optimize(cols, -rate + 1e-12, /*upper=*/true);
  oracle_result res;
  res.value = -(rate + best.total);
  res.maximizer = detail::assemble(grid, best.pick, composition);
  res.on_boundary = s <= s_r;
  return res;
}

inline oracle_result b_exponent_oracle(const ensemble& ens, double rate, double s,
                                       double grid_res = 0.0) {
  const double res = grid_res > 0.0 ? grid_res : default_grid_res(ens.nx());
  return b_exponent_oracle(ens, rate, s, res, uniform_composition(ens.ny()));
}

// Closed-form linear-branch slope Delta(R) = gamma'(s_R).
inline double delta_r(const ensemble& ens, double rate) {
  return ens.gamma_prime(solve_s_r(ens, rate));
}

// Grid re-derivation of Delta(R) = min E_Q ln[1/P(Y|X)] over the region
// H_Q + E ln P(X) >= -R.  The reported flag says whether the constraint
// binds, i.e. whether the unconstrained minimizer falls outside the region.
inline oracle_result delta_r_oracle(const ensemble& ens, double rate, double grid_res,
                                    const std::vector<double>& composition) {
  detail::require_small_alphabets(ens);
  if (!(rate >= 0.0)) throw rate_out_of_range("delta_r_oracle: rate must be nonnegative");
  const detail::simplex_grid grid = detail::make_simplex_grid(ens, grid_res);
  const auto cols = detail::make_tables(ens, grid, composition, 0.0);  // v = weighted l
  const auto best = detail::optimize(cols, -rate - 1e-12, /*upper=*/false);
  oracle_result res;
  res.value = -best.total;  // min of E ln(1/P) = -(max of E ln P)
  res.maximizer = detail::assemble(grid, best.pick, composition);

  // Unconstrained comparison point: maximize the same v with no budget.
  const auto free_best = detail::optimize(cols, -std::numeric_limits<double>::infinity(),
                                          /*upper=*/false);
  double free_g = 0.0;
  for (std::size_t y = 0; y < cols.size(); ++y) free_g += cols[y].g[free_best.pick[y]];
  res.on_boundary = free_g < -rate;  // free optimum infeasible -> constraint binds
  return res;
}

inline oracle_result delta_r_oracle(const ensemble& ens, double rate, double grid_res = 0.0) {
  const double res = grid_res > 0.0 ? grid_res : default_grid_res(ens.nx());
  return delta_r_oracle(ens, rate, res, uniform_composition(ens.ny()));
}

// Grid re-derivation of the linear-branch moment exponent s * Delta(R).
inline oracle_result a_exponent_oracle(const ensemble& ens, double rate, double s,
                                       double grid_res = 0.0) {
  if (!(s > 0.0)) throw domain_error("a_exponent_oracle: s must be positive");
  oracle_result res = delta_r_oracle(ens, rate, grid_res);
  res.value *= s;
  return res;
}

}  // namespace erexp::types
