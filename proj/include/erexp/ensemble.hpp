#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "erexp/errors.hpp"

namespace erexp {

// Result of probing the output-symmetry property: whether every output letter
// produces the same tilted log-moment curve gamma_y(s) over a grid of s values.
struct symmetry_report {
  bool symmetric = false;
  double max_deviation = 0.0;  // max over grid and y of |gamma_y(s) - gamma_0(s)|
  double tolerance = 0.0;
  double worst_s = 0.0;
  std::size_t worst_y = 0;
};

// A discrete memoryless channel P(y|x) together with the random-coding input
// distribution P(x).  Construction validates the probability constraints and
// caches log tables plus a default symmetry report.
class ensemble {
 public:
  ensemble(std::vector<double> input_dist, std::vector<std::vector<double>> channel) {
    px_ = std::move(input_dist);
    pyx_ = std::move(channel);
    validate();
    build_tables();
    default_symmetry_ = run_symmetry_check(default_symmetry_grid(), kDefaultSymmetryTol);
  }

  std::size_t nx() const { return px_.size(); }
  std::size_t ny() const { return pyx_[0].size(); }

  double input(std::size_t x) const { return px_[x]; }
  double channel(std::size_t x, std::size_t y) const { return pyx_[x][y]; }
  double log_input(std::size_t x) const { return log_px_[x]; }
  double log_channel(std::size_t x, std::size_t y) const { return log_pyx_[x][y]; }

  bool has_zero_transition() const { return has_zero_; }
  const symmetry_report& default_symmetry() const { return default_symmetry_; }
  bool is_symmetric() const { return default_symmetry_.symmetric; }

  // gamma_y(s) = -ln sum_x P(x) P(y|x)^s, computed by log-sum-exp.
  // Zero channel entries drop out of the sum for s > 0; for s <= 0 they make
  // the value undefined and we refuse to evaluate.
  double gamma_y(std::size_t y, double s) const {
    if (y >= ny()) throw domain_error("gamma_y: output index out of range");
    double tmax = -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (px_[x] == 0.0) continue;
      if (pyx_[x][y] == 0.0) {
        if (s <= 0.0) {
          throw domain_error("gamma_y: zero channel entry with tilt s <= 0");
        }
        continue;
      }
      const double t = log_px_[x] + s * log_pyx_[x][y];
      tmax = std::max(tmax, t);
      ++used;
    }
    if (used == 0) throw domain_error("gamma_y: empty sum (all terms vanish)");
    double acc = 0.0;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (px_[x] == 0.0 || pyx_[x][y] == 0.0) continue;
      acc += std::exp(log_px_[x] + s * log_pyx_[x][y] - tmax);
    }
    return -(tmax + std::log(acc));
  }

  // gamma(s): the common value of gamma_y(s) for output-symmetric ensembles,
  // evaluated at the first output letter.
  double gamma(double s) const {
    require_symmetric("gamma");
    return gamma_y(0, s);
  }

  // d/ds gamma(s) = sum_x Q_s(x|y) ln(1/P(y|x)) with Q_s the tilted
  // conditional type; equals the expected log-loss under the tilt.
  double gamma_prime(double s) const {
    require_symmetric("gamma_prime");
    const std::size_t y = 0;
    double tmax = -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (px_[x] == 0.0) continue;
      if (pyx_[x][y] == 0.0) {
        if (s <= 0.0) throw domain_error("gamma_prime: zero channel entry with tilt s <= 0");
        continue;
      }
      tmax = std::max(tmax, log_px_[x] + s * log_pyx_[x][y]);
      ++used;
    }
    if (used == 0) throw domain_error("gamma_prime: empty sum");
    double wsum = 0.0;
    double num = 0.0;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (px_[x] == 0.0 || pyx_[x][y] == 0.0) continue;
      const double w = std::exp(log_px_[x] + s * log_pyx_[x][y] - tmax);
      wsum += w;
      num += w * (-log_pyx_[x][y]);
    }
    return num / wsum;
  }

  // The tilted conditional distribution Q_s(x|y) ~ P(x) P(y|x)^s for one
  // output column.  Zero channel entries get probability zero (s > 0).
  std::vector<double> tilted_column(std::size_t y, double s) const {
    if (y >= ny()) throw domain_error("tilted_column: output index out of range");
    std::vector<double> q(nx(), 0.0);
    double tmax = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (px_[x] == 0.0) continue;
      if (pyx_[x][y] == 0.0) {
        if (s <= 0.0) throw domain_error("tilted_column: zero channel entry with tilt s <= 0");
        continue;
      }
      tmax = std::max(tmax, log_px_[x] + s * log_pyx_[x][y]);
      any = true;
    }
    if (!any) throw domain_error("tilted_column: empty sum");
    double z = 0.0;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (px_[x] == 0.0 || pyx_[x][y] == 0.0) continue;
      q[x] = std::exp(log_px_[x] + s * log_pyx_[x][y] - tmax);
      z += q[x];
    }
    for (double& v : q) v /= z;
    return q;
  }

  // I(X;Y) in nats.  No symmetry needed.
  double mutual_information() const {
    std::vector<double> py(ny(), 0.0);
    for (std::size_t x = 0; x < nx(); ++x) {
      for (std::size_t y = 0; y < ny(); ++y) py[y] += px_[x] * pyx_[x][y];
    }
    double info = 0.0;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (px_[x] == 0.0) continue;
      for (std::size_t y = 0; y < ny(); ++y) {
        const double p = pyx_[x][y];
        if (p == 0.0) continue;
        info += px_[x] * p * (std::log(p) - std::log(py[y]));
      }
    }
    return info;
  }

  // Probes |gamma_y(s) - gamma_0(s)| over the given s grid.  Grid points where
  // gamma is undefined for this channel (zero entries with s <= 0) are skipped
  // so that deterministic channels can still be classified.
  symmetry_report run_symmetry_check(const std::vector<double>& s_grid, double tol) const {
    symmetry_report rep;
    rep.tolerance = tol;
    for (double s : s_grid) {
      double g0;
      try {
        g0 = gamma_y(0, s);
      } catch (const domain_error&) {
        continue;
      }
      for (std::size_t y = 1; y < ny(); ++y) {
        double gy;
        try {
          gy = gamma_y(y, s);
        } catch (const domain_error&) {
          continue;
        }
        const double dev = std::fabs(gy - g0);
        if (dev > rep.max_deviation) {
          rep.max_deviation = dev;
          rep.worst_s = s;
          rep.worst_y = y;
        }
      }
    }
    rep.symmetric = rep.max_deviation <= tol;
    return rep;
  }

  static constexpr double kDefaultSymmetryTol = 1e-9;

  static std::vector<double> default_symmetry_grid() {
    std::vector<double> grid(21);
    for (int i = 0; i <= 20; ++i) grid[i] = static_cast<double>(i) / 20.0;
    return grid;
  }

 private:
  void validate() const {
    if (px_.size() < 2) throw invalid_ensemble("input alphabet needs at least 2 letters");
    if (pyx_.size() != px_.size()) {
      throw invalid_ensemble("channel row count must match input alphabet size");
    }
    const std::size_t cols = pyx_[0].size();
    if (cols < 2) throw invalid_ensemble("output alphabet needs at least 2 letters");
    double psum = 0.0;
    for (double p : px_) {
      if (!(p >= 0.0) || p > 1.0) throw invalid_ensemble("input probabilities must lie in [0,1]");
      psum += p;
    }
    if (std::fabs(psum - 1.0) > 1e-12) {
      throw invalid_ensemble("input distribution must sum to 1 (got " + std::to_string(psum) + ")");
    }
    for (const auto& row : pyx_) {
      if (row.size() != cols) throw invalid_ensemble("channel rows must have equal length");
      double rsum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0) || p > 1.0) throw invalid_ensemble("channel entries must lie in [0,1]");
        rsum += p;
      }
      if (std::fabs(rsum - 1.0) > 1e-12) {
        throw invalid_ensemble("channel rows must sum to 1 (got " + std::to_string(rsum) + ")");
      }
    }
  }

  void build_tables() {
    const double ninf = -std::numeric_limits<double>::infinity();
    log_px_.resize(px_.size());
    log_pyx_.resize(px_.size());
    has_zero_ = false;
    for (std::size_t x = 0; x < px_.size(); ++x) {
      log_px_[x] = px_[x] > 0.0 ? std::log(px_[x]) : ninf;
      log_pyx_[x].resize(pyx_[x].size());
      for (std::size_t y = 0; y < pyx_[x].size(); ++y) {
        if (pyx_[x][y] > 0.0) {
          log_pyx_[x][y] = std::log(pyx_[x][y]);
        } else {
          log_pyx_[x][y] = ninf;
          if (px_[x] > 0.0) has_zero_ = true;
        }
      }
    }
  }

  void require_symmetric(const char* op) const {
    if (!default_symmetry_.symmetric) {
      throw not_symmetric(std::string(op) + ": ensemble failed the output-symmetry check (max deviation " +
                          std::to_string(default_symmetry_.max_deviation) + ")");
    }
  }

  std::vector<double> px_;
  std::vector<std::vector<double>> pyx_;
  std::vector<double> log_px_;
  std::vector<std::vector<double>> log_pyx_;
  bool has_zero_ = false;
  symmetry_report default_symmetry_;
};

// Convenience wrappers mirroring the free-function style used elsewhere.
inline double gamma_y(const ensemble& ens, std::size_t y, double s) { return ens.gamma_y(y, s); }
inline double gamma(const ensemble& ens, double s) { return ens.gamma(s); }
inline double gamma_prime(const ensemble& ens, double s) { return ens.gamma_prime(s); }
inline double mutual_information(const ensemble& ens) { return ens.mutual_information(); }

inline symmetry_report check_symmetry(const ensemble& ens) {
  return ens.run_symmetry_check(ensemble::default_symmetry_grid(), ensemble::kDefaultSymmetryTol);
}

inline symmetry_report check_symmetry(const ensemble& ens, const std::vector<double>& s_grid,
                                      double tol) {
  return ens.run_symmetry_check(s_grid, tol);
}

// Binary symmetric channel with crossover probability p and uniform inputs.
inline ensemble make_bsc(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw invalid_ensemble("BSC crossover must lie in [0,1]");
  return ensemble({0.5, 0.5}, {{1.0 - p, p}, {p, 1.0 - p}});
}

}  // namespace erexp
