#include "dsp/lsf.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dsp/lpc.hpp"
#include "util/error.hpp"

namespace exknet::dsp {

namespace {

constexpr int kGridIntervals = 2048;
constexpr double kBisectTol = 1e-14;

// All polynomial arithmetic runs in 80-bit long double: the sum/difference
// construction, deflation and the factor products cancel intermediates much
// larger than the result, and double precision alone leaves ~1e-7 residue
// on order-40 round trips.
using Poly = std::vector<long double>;

// Divides by (1 - r*z^-1) in place, dropping the last coefficient. Exact for
// the structural roots at z = +1 (r = 1) and z = -1 (r = -1).
Poly deflate(const Poly& poly, long double r) {
  Poly out(poly.size() - 1);
  long double carry = 0.0L;
  for (std::size_t j = 0; j + 1 < poly.size(); ++j) {
    out[j] = poly[j] + r * carry;
    carry = out[j];
  }
  return out;
}

// Chebyshev coefficients of a palindromic polynomial of even degree 2m:
// on the unit circle R(e^-iw) * e^imw = g[0] + sum_k g[k] T_k(cos w)
// with g[0] = R[m], g[k] = 2 R[m-k].
Poly chebyshev_series(const Poly& palindromic) {
  const std::size_t m = (palindromic.size() - 1) / 2;
  Poly g(m + 1);
  g[0] = palindromic[m];
  for (std::size_t k = 1; k <= m; ++k) g[k] = 2.0L * palindromic[m - k];
  return g;
}

// Clenshaw evaluation of sum_k g[k] T_k(x).
double eval_chebyshev(const Poly& g, double x) {
  long double b1 = 0.0L, b2 = 0.0L;
  const long double lx = x;
  for (std::size_t k = g.size(); k-- > 1;) {
    const long double b0 = 2.0L * lx * b1 - b2 + g[k];
    b2 = b1;
    b1 = b0;
  }
  return static_cast<double>(lx * b1 - b2 + g[0]);
}

struct SumDiff {
  Poly p;  // deflated, palindromic
  Poly q;  // deflated, palindromic
};

SumDiff sum_diff_polynomials(const LpcCoefficients& lpc) {
  const int p = lpc.order;
  // A(z) = 1 - sum a_k z^-k, padded with a zero so c[p+1-j] is defined.
  Poly c(static_cast<std::size_t>(p) + 2, 0.0L);
  c[0] = 1.0L;
  for (int k = 1; k <= p; ++k) c[k] = -static_cast<long double>(lpc.a[k - 1]);

  Poly sum(p + 2), diff(p + 2);
  for (int j = 0; j <= p + 1; ++j) {
    sum[j] = c[j] + c[p + 1 - j];
    diff[j] = c[j] - c[p + 1 - j];
  }

  SumDiff out;
  if (p % 2 == 0) {
    out.p = deflate(sum, -1.0L);  // remove root at z = -1
    out.q = deflate(diff, 1.0L);  // remove root at z = +1
  } else {
    out.p = sum;
    out.q = deflate(deflate(diff, 1.0L), -1.0L);
  }
  return out;
}

// One grid pass. The zeros of P and Q interleave, with the lowest belonging
// to P; after each root the search switches polynomial and rescans the
// remainder of the current interval, so two interleaved roots inside one
// interval are still caught.
std::vector<double> scan_roots(const Poly& gp, const Poly& gq, int order, int grid_intervals) {
  std::vector<double> roots;
  roots.reserve(order);
  const Poly* series = &gp;
  const double step = M_PI / grid_intervals;
  double w_lo = 0.0;
  double v_lo = eval_chebyshev(*series, std::cos(w_lo));
  int i = 1;
  while (i <= grid_intervals && static_cast<int>(roots.size()) < order) {
    const double w_hi = step * i;
    const double v_hi = eval_chebyshev(*series, std::cos(w_hi));
    if (v_hi == 0.0) {
      roots.push_back(w_hi);
      series = (series == &gp) ? &gq : &gp;
      w_lo = w_hi;
      v_lo = eval_chebyshev(*series, std::cos(w_hi));
      ++i;
    } else if (v_lo * v_hi < 0.0) {
      double lo = w_lo, hi = w_hi, f_lo = v_lo;
      while (hi - lo > kBisectTol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = eval_chebyshev(*series, std::cos(mid));
        if (f_lo * f_mid <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          f_lo = f_mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      roots.push_back(root);
      series = (series == &gp) ? &gq : &gp;
      w_lo = root;
      v_lo = eval_chebyshev(*series, std::cos(root));
    } else {
      w_lo = w_hi;
      v_lo = v_hi;
      ++i;
    }
  }
  return roots;
}

}  // namespace

LsfVector lpc_to_lsf(const LpcCoefficients& lpc) {
  if (lpc.order <= 0) throw_argument("lpc_to_lsf: order must be positive");
  if (!is_minimum_phase(lpc)) {
    throw Error(ErrorKind::Stability, "lpc_to_lsf: predictor is not minimum phase");
  }

  const SumDiff sd = sum_diff_polynomials(lpc);
  const Poly gp = chebyshev_series(sd.p);
  const Poly gq = chebyshev_series(sd.q);

  LsfVector out;
  out.order = lpc.order;

  // Tightly clustered root pairs (very peaky filters) can slip through one
  // grid interval; refine until the full set is found.
  for (int grid = kGridIntervals; grid <= kGridIntervals * 64; grid *= 4) {
    out.freqs = scan_roots(gp, gq, lpc.order, grid);
    if (static_cast<int>(out.freqs.size()) == lpc.order) return out;
  }
  throw_numeric("lpc_to_lsf: root search found " + std::to_string(out.freqs.size()) + " of " +
                std::to_string(lpc.order) + " line spectral frequencies");
}

LpcCoefficients lsf_to_lpc(const LsfVector& lsf) {
  const int p = lsf.order;
  if (p <= 0 || static_cast<int>(lsf.freqs.size()) != p) {
    throw_argument("lsf_to_lpc: order/frequency count mismatch");
  }
  double prev = 0.0;
  for (double f : lsf.freqs) {
    if (!(f > prev && f < M_PI)) {
      throw_stability("lsf_to_lpc: frequencies must be strictly ascending in (0, pi)");
    }
    prev = f;
  }

  // Polynomial product of (1 - 2 cos(w) z^-1 + z^-2) factors.
  auto build = [](const std::vector<double>& roots) {
    Poly poly{1.0L};
    for (double w : roots) {
      const long double c = -2.0L * static_cast<long double>(std::cos(w));
      Poly next(poly.size() + 2, 0.0L);
      for (std::size_t j = 0; j < poly.size(); ++j) {
        next[j] += poly[j];
        next[j + 1] += c * poly[j];
        next[j + 2] += poly[j];
      }
      poly = std::move(next);
    }
    return poly;
  };

  std::vector<double> p_roots, q_roots;
  for (int i = 0; i < p; ++i) ((i % 2 == 0) ? p_roots : q_roots).push_back(lsf.freqs[i]);

  Poly sum = build(p_roots);
  Poly diff = build(q_roots);

  // Restore the structural roots removed during analysis. Multiplying by
  // (1 - r z^-1) is the inverse of deflate().
  auto mul_root = [](Poly& poly, long double r) {
    poly.push_back(0.0L);
    for (std::size_t j = poly.size() - 1; j >= 1; --j) poly[j] -= r * poly[j - 1];
  };
  if (p % 2 == 0) {
    mul_root(sum, -1.0L);
    mul_root(diff, 1.0L);
  } else {
    mul_root(diff, 1.0L);
    mul_root(diff, -1.0L);
  }

  LpcCoefficients out;
  out.order = p;
  out.a.resize(p);
  for (int k = 1; k <= p; ++k) {
    out.a[k - 1] = static_cast<double>(-0.5L * (sum[k] + diff[k]));
  }
  out.prediction_error_power = 0.0;  // not defined by angles alone
  return out;
}

}  // namespace exknet::dsp
