#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "simsig/errors.hpp"
#include "simsig/normal.hpp"

// Numerical evaluation of the detectable region (the four Q suprema), the
// undetectable region (the two U conditions), and the boundary curve
// beta*(beta1, beta2, r1, r2) separating them. Essential suprema over
// Lebesgue measure are replaced by suprema over dense grids; all objectives
// in the Gaussian model are continuous, so nothing is lost up to grid
// resolution. Open feasible-set boundaries are closed to within one grid
// step; the verdict tolerance absorbs the difference.

namespace simsig {

/// Sparsity/strength calibration: pi_k = p^-beta_k, eps = pi1*pi2 + p^-beta,
/// Gaussian signal strengths r_k (mean sqrt(2 r_k log p)).
struct Calibration {
  std::int64_t p = 0;  // used only for count conversion
  double beta = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

inline void validate_calibration(const Calibration& c) {
  auto fail = [](const std::string& msg) {
    throw_error(ErrorKind::invalid_calibration, msg);
  };
  if (c.p < 2) fail("calibration requires p >= 2");
  if (!(c.beta1 >= 0.5 && c.beta1 <= 1.0)) fail("beta1 must lie in [1/2, 1]");
  if (!(c.beta2 >= 0.5 && c.beta2 <= 1.0)) fail("beta2 must lie in [1/2, 1]");
  if (!(c.beta > 0.5 && c.beta < 1.0)) fail("beta must lie in (1/2, 1)");
  if (std::max(c.beta1, c.beta2) > c.beta) fail("beta must be >= max(beta1, beta2)");
  if (!(c.r1 >= 0.0) || !(c.r2 >= 0.0)) fail("signal strengths r_k must be >= 0");
}

/// Limiting log-likelihood-ratio exponents for the Gaussian model:
/// alpha^-(a) = -2 sqrt(a r) - r, alpha^+(a) = 2 sqrt(a r) - r.
inline std::pair<double, double> alpha_normal(double a, double r) {
  if (!(a > 0.0)) throw_error(ErrorKind::invalid_calibration, "alpha_normal: a must be > 0");
  if (!(r >= 0.0)) throw_error(ErrorKind::invalid_calibration, "alpha_normal: r must be >= 0");
  const double s = 2.0 * std::sqrt(a * r);
  return {-s - r, s - r};
}

/// v^+(x) = -(sqrt(x) - sqrt(r))_+^2 : sup_{a >= x} of alpha^+(a) - a.
inline double v_plus_normal(double x, double r) {
  if (r == 0.0) return -x;  // exact, avoids sqrt(x)^2 rounding
  const double d = std::sqrt(x) - std::sqrt(r);
  return d > 0.0 ? -d * d : 0.0;
}

/// v^-(x) = -(sqrt(x) + sqrt(r))^2 : the objective alpha^-(a) - a decreases
/// in a, so the supremum over a >= x sits at a = x.
inline double v_minus_normal(double x, double r) {
  if (r == 0.0) return -x;
  const double s = std::sqrt(x) + std::sqrt(r);
  return -s * s;
}

/// Tail-exponent functions of one sequence. Closed-form for the Gaussian
/// model; arbitrary mixtures can supply tabulated alpha functions, with the
/// v functions recovered by grid suprema.
struct AlphaFunctions {
  std::function<double(double)> alpha_minus;
  std::function<double(double)> alpha_plus;
  std::function<double(double)> v_minus;
  std::function<double(double)> v_plus;

  double alpha(double a) const { return std::max(alpha_minus(a), alpha_plus(a)); }

  static AlphaFunctions gaussian(double r) {
    AlphaFunctions f;
    f.alpha_minus = [r](double a) { return -2.0 * std::sqrt(a * r) - r; };
    f.alpha_plus = [r](double a) { return 2.0 * std::sqrt(a * r) - r; };
    f.v_minus = [r](double x) { return v_minus_normal(x, r); };
    f.v_plus = [r](double x) { return v_plus_normal(x, r); };
    return f;
  }

  /// Builds the v functions from user-supplied alpha functions by scanning
  /// a dense grid over [x, a_max].
  static AlphaFunctions from_alpha(std::function<double(double)> alpha_minus,
                                   std::function<double(double)> alpha_plus,
                                   double a_max = 8.0, int grid = 4096) {
    AlphaFunctions f;
    f.alpha_minus = alpha_minus;
    f.alpha_plus = alpha_plus;
    auto sup_of = [a_max, grid](const std::function<double(double)>& alpha, double x) {
      double best = alpha(x) - x;
      const double hi = std::max(a_max, x);
      for (int i = 1; i <= grid; ++i) {
        const double a = x + (hi - x) * static_cast<double>(i) / grid;
        best = std::max(best, alpha(a) - a);
      }
      return best;
    };
    f.v_minus = [alpha_minus, sup_of](double x) { return sup_of(alpha_minus, x); };
    f.v_plus = [alpha_plus, sup_of](double x) { return sup_of(alpha_plus, x); };
    return f;
  }
};

/// Numerical outcome of the region checks. `q_values` are the four
/// detectable-region suprema; `u1_values` and `u2_value` are the left-hand
/// sides of the two undetectable-region conditions.
struct RegionVerdict {
  std::array<double, 4> q_values{std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN()};
  bool detectable = false;
  std::array<double, 2> u1_values{std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN()};
  double u2_value = std::numeric_limits<double>::quiet_NaN();
  bool undetectable = false;
  int grid_resolution = 0;
  double tol = 0.0;
};

namespace detail {

struct QTerms {
  // Indexed by grid point i = 1..res, x = i/res.
  std::vector<double> plus_term;   // (-x) v v+ + (x ^ (beta_k - v+)) / 2
  std::vector<double> minus_term;  // (-x) v v-
};

inline QTerms q_terms(const AlphaFunctions& af, double beta_k, int res) {
  QTerms t;
  t.plus_term.resize(res + 1, -std::numeric_limits<double>::infinity());
  t.minus_term.resize(res + 1, -std::numeric_limits<double>::infinity());
  for (int i = 1; i <= res; ++i) {
    const double x = static_cast<double>(i) / res;
    const double vp = af.v_plus(x);
    const double vm = af.v_minus(x);
    t.plus_term[i] = std::max(-x, vp) + 0.5 * std::min(x, beta_k - vp);
    t.minus_term[i] = std::max(-x, vm);
  }
  return t;
}

/// Supremum term of Q1 (independent of beta): max over x1 + x2 <= 1 of the
/// summed plus-terms, via a prefix maximum over one axis.
inline double q1_sup_term(const QTerms& t1, const QTerms& t2, int res) {
  std::vector<double> prefix(res + 1, -std::numeric_limits<double>::infinity());
  for (int j = 1; j <= res; ++j) {
    prefix[j] = std::max(prefix[j - 1], t2.plus_term[j]);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < res; ++i) {
    best = std::max(best, t1.plus_term[i] + prefix[res - i]);
  }
  return best;
}

}  // namespace detail

/// Evaluates the four detectable-region suprema on a res-per-axis grid and
/// sets `detectable` when any exceeds `tol`. Under stochastic ordering the
/// first supremum alone decides the region; all four are still reported.
inline RegionVerdict check_detectable(const Calibration& c,
                                      const AlphaFunctions& af1,
                                      const AlphaFunctions& af2, int res = 512,
                                      double tol = 1e-9) {
  validate_calibration(c);
  if (res < 8) throw_error(ErrorKind::invalid_config, "grid resolution too small");

  const detail::QTerms t1 = detail::q_terms(af1, c.beta1, res);
  const detail::QTerms t2 = detail::q_terms(af2, c.beta2, res);
  const double base = 0.5 - c.beta;

  RegionVerdict v;
  v.grid_resolution = res;
  v.tol = tol;

  v.q_values[0] = base + detail::q1_sup_term(t1, t2, res);

  double m_minus1 = -std::numeric_limits<double>::infinity();
  double m_minus2 = m_minus1, m_plus1 = m_minus1, m_plus2 = m_minus1;
  for (int i = 1; i <= res; ++i) {
    m_minus1 = std::max(m_minus1, t1.minus_term[i]);
    m_minus2 = std::max(m_minus2, t2.minus_term[i]);
    m_plus1 = std::max(m_plus1, t1.plus_term[i]);
    m_plus2 = std::max(m_plus2, t2.plus_term[i]);
  }
  v.q_values[1] = base + m_minus1 + m_plus2;
  v.q_values[2] = base + m_plus1 + m_minus2;

  double q4 = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= res; ++i) {
    const double x1 = static_cast<double>(i) / res;
    const double c1 = std::min(x1, c.beta1);
    for (int j = 1; j <= res; ++j) {
      const double x2 = static_cast<double>(j) / res;
      const double term = t1.minus_term[i] + t2.minus_term[j] +
                          0.5 * std::min(c1, std::min(x2, c.beta2));
      q4 = std::max(q4, term);
    }
  }
  v.q_values[3] = base + q4;

  v.detectable = false;
  for (double q : v.q_values) v.detectable = v.detectable || q > tol;
  return v;
}

inline RegionVerdict check_detectable(const Calibration& c, int res = 512,
                                      double tol = 1e-9) {
  return check_detectable(c, AlphaFunctions::gaussian(c.r1),
                          AlphaFunctions::gaussian(c.r2), res, tol);
}

/// Evaluates the two undetectable-region conditions by grid search over the
/// a-axis (default [1e-4, 8] with 2048 points) and sets `undetectable` when
/// all three expressions fall below -tol.
inline RegionVerdict check_undetectable(const Calibration& c,
                                        const AlphaFunctions& af1,
                                        const AlphaFunctions& af2,
                                        int a_points = 2048, double tol = 1e-9,
                                        double a_min = 1e-4, double a_max = 8.0) {
  validate_calibration(c);
  if (a_points < 8) throw_error(ErrorKind::invalid_config, "a-grid too small");

  const int n = a_points;
  std::vector<double> f1(n), g1(n), f2(n), g2(n);
  std::array<double, 2> u1{};
  for (int k = 0; k < 2; ++k) {
    const AlphaFunctions& af = (k == 0) ? af1 : af2;
    const double beta_k = (k == 0) ? c.beta1 : c.beta2;
    std::vector<double>& f = (k == 0) ? f1 : f2;
    std::vector<double>& g = (k == 0) ? g1 : g2;
    double sup1 = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double a = a_min + (a_max - a_min) * static_cast<double>(i) / (n - 1);
      const double alpha = af.alpha(a);
      f[i] = alpha - a;
      g[i] = std::min(alpha, beta_k);
      sup1 = std::max(sup1, alpha + g[i] - a);
    }
    u1[k] = 1.0 - 2.0 * c.beta + sup1;
  }

  // inner objective: f1 + f2 + min(-beta, -2 beta + g1 + g2)
  double sup2 = -std::numeric_limits<double>::infinity();
  bool g2_monotone = true;
  for (int j = 1; j < n; ++j) {
    if (g2[j] < g2[j - 1]) {
      g2_monotone = false;
      break;
    }
  }
  if (g2_monotone) {
    // Split on g1 + g2 >= beta; g2 is nondecreasing so the split point is a
    // binary search, with suffix maxima of f2 and prefix maxima of f2 + g2.
    std::vector<double> suf_f2(n + 1, -std::numeric_limits<double>::infinity());
    std::vector<double> pre_fg2(n + 1, -std::numeric_limits<double>::infinity());
    for (int j = n - 1; j >= 0; --j) suf_f2[j] = std::max(suf_f2[j + 1], f2[j]);
    for (int j = 0; j < n; ++j) pre_fg2[j + 1] = std::max(pre_fg2[j], f2[j] + g2[j]);
    for (int i = 0; i < n; ++i) {
      const double cutoff = c.beta - g1[i];
      const auto j_star = static_cast<int>(
          std::lower_bound(g2.begin(), g2.end(), cutoff) - g2.begin());
      if (j_star < n) {
        sup2 = std::max(sup2, f1[i] + suf_f2[j_star] - c.beta);
      }
      if (j_star > 0) {
        sup2 = std::max(sup2, f1[i] + g1[i] - 2.0 * c.beta + pre_fg2[j_star]);
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double m = std::min(-c.beta, -2.0 * c.beta + g1[i] + g2[j]);
        sup2 = std::max(sup2, f1[i] + f2[j] + m);
      }
    }
  }

  RegionVerdict v;
  v.grid_resolution = a_points;
  v.tol = tol;
  v.u1_values = u1;
  v.u2_value = 1.0 + sup2;
  v.undetectable = u1[0] < -tol && u1[1] < -tol && v.u2_value < -tol;
  return v;
}

inline RegionVerdict check_undetectable(const Calibration& c, int a_points = 2048,
                                        double tol = 1e-9) {
  return check_undetectable(c, AlphaFunctions::gaussian(c.r1),
                            AlphaFunctions::gaussian(c.r2), a_points, tol);
}

/// Runs both region checks and merges them into one verdict.
inline RegionVerdict classify_region(const Calibration& c, int res = 512,
                                     int a_points = 2048, double tol = 1e-9) {
  RegionVerdict det = check_detectable(c, res, tol);
  const RegionVerdict und = check_undetectable(c, a_points, tol);
  det.u1_values = und.u1_values;
  det.u2_value = und.u2_value;
  det.undetectable = und.undetectable;
  return det;
}

namespace detail {

inline double q1_value(double beta, double beta1, double beta2, double r1,
                       double r2, int res) {
  const AlphaFunctions af1 = AlphaFunctions::gaussian(r1);
  const AlphaFunctions af2 = AlphaFunctions::gaussian(r2);
  const QTerms t1 = q_terms(af1, beta1, res);
  const QTerms t2 = q_terms(af2, beta2, res);
  return 0.5 - beta + q1_sup_term(t1, t2, res);
}

}  // namespace detail

/// Boundary beta*(beta1, beta2, r1, r2): bisection on beta over (1/2, 1]
/// against the sign of the first detectable-region supremum. Clamps to 1
/// when every admissible beta is detectable; returns 1/2 when none is.
inline double boundary_beta(double beta1, double beta2, double r1, double r2,
                            double tol = 1e-4, int res = 512) {
  if (!(beta1 >= 0.5 && beta1 <= 1.0 && beta2 >= 0.5 && beta2 <= 1.0)) {
    throw_error(ErrorKind::invalid_calibration, "beta_k must lie in [1/2, 1]");
  }
  if (!(r1 >= 0.0 && r2 >= 0.0)) {
    throw_error(ErrorKind::invalid_calibration, "signal strengths must be >= 0");
  }
  if (!(tol > 0.0)) {
    throw_error(ErrorKind::invalid_config, "boundary_beta tolerance must be > 0");
  }
  auto q1 = [&](double beta) {
    return detail::q1_value(beta, beta1, beta2, r1, r2, res);
  };
  if (q1(1.0) >= 0.0) return 1.0;
  if (q1(0.5) <= 0.0) return 0.5;
  double lo = 0.5, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (q1(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Classical single-sequence sparse-normal-mixture detection boundary.
inline double single_seq_boundary(double beta) {
  if (!(beta > 0.5 && beta < 1.0)) {
    throw_error(ErrorKind::invalid_calibration,
                "single_seq_boundary requires beta in (1/2, 1)");
  }
  if (beta <= 0.75) return beta - 0.5;
  const double s = 1.0 - std::sqrt(1.0 - beta);
  return s * s;
}

struct TailCheck {
  double lhs_exponent = 0.0;  // log_p F1((F0)^{-1}(p^{-x})) at finite p
  double v_minus = 0.0;       // limiting exponent
};

/// Finite-p check of the tail approximation F1((F0)^{-1}(p^{-x})) ~ p^{v^-(x)}
/// for the Gaussian model; the gap is the o(1) convergence diagnostic.
inline TailCheck tail_approx_check(double x, double r, std::int64_t p) {
  if (p < 2) throw_error(ErrorKind::invalid_config, "tail_approx_check requires p >= 2");
  if (!(r >= 0.0)) throw_error(ErrorKind::invalid_config, "r must be >= 0");
  const double lp = std::log(static_cast<double>(p));
  if (!(x >= std::log(2.0) / lp)) {
    throw_error(ErrorKind::invalid_config, "tail_approx_check requires x >= log_p(2)");
  }
  TailCheck out;
  out.v_minus = v_minus_normal(x, r);
  if (r == 0.0) {
    out.lhs_exponent = -x;  // F1 = F0 makes the exponent exact
    return out;
  }
  const double q = norm_quantile(std::exp(-x * lp));
  const double mu = std::sqrt(2.0 * r * lp);
  out.lhs_exponent = norm_log_cdf(q - mu) / lp;
  return out;
}

}  // namespace simsig
