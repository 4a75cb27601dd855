#include "gridmix/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace gridmix {

namespace {

std::vector<int> row_deltas(const BranchingMatrix& m) {
  std::vector<int> d(m.t, 0);
  for (int j = 0; j < m.t; ++j)
    for (int l = 0; l < m.t; ++l) d[j] += m.m[j][l];
  return d;
}

double f_val(double lam, double s, double th, int delta, double a) {
  double psi = (1.0 - a) / (lam * a);
  return (1.0 - a) * (1.0 - th * std::pow(psi, 1.0 / delta)) / (s - a);
}

double sampled_D(double lam, double s, double th, int delta, int samples) {
  double lo = 1.0 / (1.0 + lam);
  double best = 0.0;
  for (int i = 1; i <= samples; ++i) {
    double a = lo + (1.0 - lo) * i / (samples + 1);
    best = std::max(best, f_val(lam, s, th, delta, a));
  }
  return best;
}

// theta_j in floating point; returns -1 when ill-defined or outside (0,1].
double theta_float(const BranchingMatrix& m, const std::vector<double>& c,
                   const std::vector<double>& s, int j, int delta) {
  double prod = 1.0, denom = 0.0;
  for (int l = 0; l < m.t; ++l) {
    if (!m.m[j][l]) continue;
    prod *= std::pow(c[l], m.m[j][l]);
    denom += c[l] * s[l] * m.m[j][l];
  }
  denom /= delta;
  if (!(denom > 0) || !(prod > 0)) return -1.0;
  double th = std::pow(prod, 1.0 / delta) / denom;
  if (!(th > 0) || th > 1.0) return -1.0;
  return th;
}

// min_j (c_j - (D M S c)_j) / c_j with D from dense sampling.
double objective(const BranchingMatrix& m, double lam,
                 const std::vector<double>& s, const std::vector<double>& c,
                 const std::vector<int>& deltas, int samples) {
  double worst = 1.0;
  for (int j = 0; j < m.t; ++j) {
    if (deltas[j] == 0) continue;
    double th = theta_float(m, c, s, j, deltas[j]);
    if (th < 0) return -1e9;
    double D = sampled_D(lam, s[j], th, deltas[j], samples);
    double row = 0.0;
    for (int l = 0; l < m.t; ++l)
      if (m.m[j][l]) row += m.m[j][l] * s[l] * c[l];
    worst = std::min(worst, (c[j] - D * row) / c[j]);
  }
  return worst;
}

// Power-iteration style rebalance: with A = D(c) M S, move c toward the
// Perron vector of A, which equalizes the per-type slack ratios.
void rebalance(const BranchingMatrix& m, double lam, const std::vector<double>& s,
               std::vector<double>& c, const std::vector<int>& deltas,
               int rounds, int samples) {
  for (int r = 0; r < rounds; ++r) {
    std::vector<double> nc(m.t, 0.0);
    for (int j = 0; j < m.t; ++j) {
      if (deltas[j] == 0) continue;
      double th = theta_float(m, c, s, j, deltas[j]);
      if (th < 0) return;
      double D = sampled_D(lam, s[j], th, deltas[j], samples);
      double row = 0.0;
      for (int l = 0; l < m.t; ++l)
        if (m.m[j][l]) row += m.m[j][l] * s[l] * c[l];
      nc[j] = D * row;
    }
    double mx = 0.0;
    for (double v : nc) mx = std::max(mx, v);
    if (!(mx > 0)) return;
    // Leaf types get no mass from A; keep them barely positive.
    for (int j = 0; j < m.t; ++j) c[j] = std::max(nc[j] / mx, 1e-9);
  }
}

struct ClimbResult {
  bool found = false;
  std::vector<double> s, c;
  double obj = -1e9;
};

ClimbResult climb(const BranchingMatrix& m, double lam,
                  const std::vector<int>& deltas, const SearchConfig& cfg) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
  auto unit = [&]() { return (rng() >> 11) * 0x1.0p-53; };

  const double s_min = 1.0201, s_max = 4.0;
  const int obj_samples = std::max(64, cfg.sample_points);
  const int reb_samples = std::max(64, cfg.sample_points / 8);
  ClimbResult best;

  auto fresh_start = [&](std::vector<double>& s, std::vector<double>& c) {
    s.assign(m.t, 0.0);
    for (int j = 0; j < m.t; ++j) s[j] = 1.05 + 0.8 * unit();
    c.assign(m.t, 1.0);
    rebalance(m, lam, s, c, deltas, 10, reb_samples);
  };

  std::vector<double> s, c;
  fresh_start(s, c);
  double cur = objective(m, lam, s, c, deltas, obj_samples);
  long since_improve = 0;
  long restart_every = std::max<long>(1, cfg.budget / 10);

  for (long it = 0; it < cfg.budget; ++it) {
    double frac = static_cast<double>(it) / std::max<long>(1, cfg.budget);
    double scale =
        cfg.step_init * std::pow(cfg.step_min / cfg.step_init, frac);

    std::vector<double> s2 = s, c2 = c;
    bool move_c = (rng() % 5 == 0);
    if (move_c) {
      for (int j = 0; j < m.t; ++j)
        if (rng() % 2) c2[j] = std::max(c2[j] * std::exp(scale * (2 * unit() - 1)), 1e-9);
    } else {
      for (int j = 0; j < m.t; ++j)
        if (rng() % 2)
          s2[j] = std::clamp(s2[j] * std::exp(scale * (2 * unit() - 1)),
                             s_min, s_max);
    }
    rebalance(m, lam, s2, c2, deltas, 6, reb_samples);
    double obj2 = objective(m, lam, s2, c2, deltas, obj_samples);
    if (obj2 > cur) {
      s = std::move(s2);
      c = std::move(c2);
      cur = obj2;
      if (cur > best.obj) {
        best.found = true;
        best.s = s;
        best.c = c;
        best.obj = cur;
        since_improve = 0;
      }
    } else if (++since_improve >= restart_every) {
      fresh_start(s, c);
      cur = objective(m, lam, s, c, deltas, obj_samples);
      since_improve = 0;
    }
  }
  if (best.found) {
    // Final polish pass at full sampling resolution.
    rebalance(m, lam, best.s, best.c, deltas, 10, cfg.sample_points);
    best.obj = objective(m, lam, best.s, best.c, deltas, cfg.sample_points);
  }
  return best;
}

double golden_argmax(double lam, double s, double th, int delta, double a,
                     double b) {
  const double phi = 0.6180339887498949;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f_val(lam, s, th, delta, x1), f2 = f_val(lam, s, th, delta, x2);
  for (int i = 0; i < 80; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f_val(lam, s, th, delta, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f_val(lam, s, th, delta, x1);
    }
  }
  return (a + b) / 2;
}

// Smallest multiple of 1/den strictly above x (exact comparison).
Rat ceil_above(const Rat& x, unsigned long den) {
  Rat step(1, den);
  Rat r = rat_ceil_den(rat_to_double(x), den);
  while (!(r > x)) r += step;
  return r;
}

// Largest multiple of 1/den strictly below x.
Rat floor_below(const Rat& x, unsigned long den) {
  Rat step(1, den);
  Rat r = rat_floor_den(rat_to_double(x), den);
  while (!(r < x)) r -= step;
  return r;
}

}  // namespace

DmsCertificate fit_certificate(const BranchingMatrix& m, const Rat& lambda_star,
                               const std::vector<Rat>& s,
                               const std::vector<Rat>& c,
                               unsigned long den_cap) {
  std::vector<int> deltas = row_deltas(m);
  DmsCertificate cert;
  cert.lambda_star = lambda_star;
  cert.s = s;
  cert.c = c;
  // Callers may hand in p/q literals with common factors; exact equality on
  // mpq requires canonical form, so normalize everything we store.
  cert.lambda_star.canonicalize();
  for (Rat& v : cert.s) v.canonicalize();
  for (Rat& v : cert.c) v.canonicalize();
  cert.envelopes.assign(m.t, std::nullopt);

  double lam = rat_to_double(lambda_star);
  double lo_end_d = 1.0 / (1.0 + lam);
  double span = 1.0 - lo_end_d;
  Rat lo_end = Rat(1) / (1 + lambda_star);

  for (int j = 0; j < m.t; ++j) {
    if (deltas[j] == 0) continue;
    RatInterval th = theta(m, c, s, j);
    RatInterval th_pt(th.lo);  // conservative end for an upper bound on f
    double thd = rat_to_double(th.lo);
    double sj = rat_to_double(s[j]);

    // Locate the concave maximum in floating point.
    double abar = lo_end_d + span * 0.5, fbar = -1.0;
    const int coarse = 2048;
    for (int i = 1; i <= coarse; ++i) {
      double a = lo_end_d + span * i / (coarse + 1);
      double v = f_val(lam, sj, thd, deltas[j], a);
      if (v > fbar) {
        fbar = v;
        abar = a;
      }
    }
    abar = golden_argmax(lam, sj, thd, deltas[j], abar - span / coarse,
                         std::min(abar + span / coarse, 1.0 - 1e-12));

    bool fitted = false;
    Rat best_D;
    EnvelopeSpec best_env;
    for (double w : {span / 400, span / 200, span / 100, span / 50}) {
      double alo_d = std::max(abar - w, lo_end_d + span * 1e-4);
      double ahi_d = std::min(abar + w, 1.0 - span * 1e-4);
      if (alo_d >= ahi_d) continue;
      EnvelopeSpec env;
      env.alpha_lo = rationalize(alo_d, den_cap);
      env.alpha_hi = rationalize(ahi_d, den_cap);
      if (!(lo_end < env.alpha_lo) || !(env.alpha_lo < env.alpha_hi) ||
          !(env.alpha_hi < 1))
        continue;
      try {
        RatInterval flo =
            f_enclosure(lambda_star, s[j], th_pt, deltas[j], env.alpha_lo);
        RatInterval fhi =
            f_enclosure(lambda_star, s[j], th_pt, deltas[j], env.alpha_hi);
        RatInterval fplo = f_prime_enclosure(lambda_star, s[j], th_pt,
                                             deltas[j], env.alpha_lo);
        RatInterval fphi = f_prime_enclosure(lambda_star, s[j], th_pt,
                                             deltas[j], env.alpha_hi);
        if (!(fplo.lo > 0) || !(fphi.hi < 0)) continue;
        env.B_lo = ceil_above(flo.hi, den_cap);
        env.B_hi = ceil_above(fhi.hi, den_cap);
        // Slopes: the certified 1% inflation of the derivative enclosure.
        env.b_lo = ceil_above(fplo.hi * Rat(101, 100), den_cap);
        env.b_hi = floor_below(fphi.lo * Rat(101, 100), den_cap);
        Rat D = envelope_bound_D(lambda_star, s[j], th_pt, deltas[j], env);
        if (!fitted || D < best_D) {
          fitted = true;
          best_D = D;
          best_env = env;
        }
      } catch (const std::exception&) {
        continue;  // this half-width failed a rigorous check; try the next
      }
    }
    if (!fitted)
      throw std::runtime_error("envelope fitting failed for type " +
                               std::to_string(j));
    cert.envelopes[j] = best_env;
  }
  return cert;
}

std::optional<DmsCertificate> search_certificate(const BranchingMatrix& m,
                                                 const Rat& lambda_star,
                                                 const SearchConfig& cfg) {
  if (m.t < 1 || !(lambda_star > 0)) return std::nullopt;
  std::vector<int> deltas = row_deltas(m);

  if (!(lambda_star > Rat(27, 16))) {
    // The envelope machinery is defined only above 27/16. Below it, a
    // single-type matrix is still decidable exactly through its fixed point;
    // anything larger is out of scope for this certificate form.
    if (m.t == 1) {
      bool ok = deltas[0] <= 1 || check_single_type(deltas[0], lambda_star);
      if (!ok) return std::nullopt;
      DmsCertificate cert;
      cert.lambda_star = lambda_star;
      cert.s = {Rat(deltas[0] + 1, std::max(deltas[0], 1))};
      cert.c = {Rat(1)};
      cert.envelopes = {std::nullopt};
      return cert;
    }
    return std::nullopt;
  }

  bool all_leaf = true;
  for (int d : deltas) all_leaf = all_leaf && d == 0;
  if (all_leaf) {
    DmsCertificate cert;
    cert.lambda_star = lambda_star;
    cert.s.assign(m.t, Rat(2));
    cert.c.assign(m.t, Rat(1));
    cert.envelopes.assign(m.t, std::nullopt);
    return check_dms(m, cert).pass ? std::optional(cert) : std::nullopt;
  }

  ClimbResult r = climb(m, rat_to_double(lambda_star), deltas, cfg);
  if (!r.found || r.obj <= 0) return std::nullopt;

  std::vector<Rat> s(m.t), c(m.t);
  double cmax = 0;
  for (double v : r.c) cmax = std::max(cmax, v);
  for (int j = 0; j < m.t; ++j) {
    s[j] = rationalize(r.s[j], cfg.rationalize_denominator_cap);
    if (!(s[j] > Rat(51, 50))) s[j] = Rat(51, 50) + Rat(1, 1000);
    c[j] = rationalize(r.c[j] / cmax, cfg.rationalize_denominator_cap);
    if (!(c[j] > 0)) c[j] = Rat(1, cfg.rationalize_denominator_cap);
  }

  try {
    DmsCertificate cert =
        fit_certificate(m, lambda_star, s, c, cfg.rationalize_denominator_cap);
    if (check_dms(m, cert).pass) return cert;
  } catch (const std::exception&) {
    // fall through: no certificate
  }
  return std::nullopt;
}

Rat max_lambda(const BranchingMatrix& m, const Rat& lo, const Rat& hi,
               const Rat& tol, const SearchConfig& cfg) {
  if (!(lo < hi)) throw std::invalid_argument("max_lambda requires lo < hi");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  if (search_certificate(m, hi, cfg)) return hi;
  if (!search_certificate(m, lo, cfg)) return lo;
  Rat good = lo, bad = hi;
  while (bad - good > tol) {
    Rat mid = (good + bad) / 2;
    if (search_certificate(m, mid, cfg))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

}  // namespace gridmix
