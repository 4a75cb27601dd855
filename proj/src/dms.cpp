#include "gridmix/dms.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gridmix {

namespace {

int row_delta(const BranchingMatrix& m, int j) {
  int d = 0;
  for (int l = 0; l < m.t; ++l) d += m.m[j][l];
  return d;
}

double f_double(double lambda, double s, double th, int delta, double a) {
  double psi = (1.0 - a) / (lambda * a);
  double h = std::pow(psi, 1.0 / delta);
  return (1.0 - a) * (1.0 - th * h) / (s - a);
}

// Falsification-style concavity probe (doubles): second differences of f at
// `points` interior nodes must be non-positive up to float noise.
bool concavity_spot_check(double lambda, double s, double th, int delta,
                          int points, double* bad_alpha) {
  double lo = 1.0 / (1.0 + lambda);
  double span = 1.0 - lo;
  int n = points + 2;
  double prev2 = 0, prev1 = 0;
  for (int i = 0; i < n; ++i) {
    double a = lo + span * (i + 1) / (n + 1);
    double v = f_double(lambda, s, th, delta, a);
    if (i >= 2) {
      double second = prev2 - 2.0 * prev1 + v;
      if (second > 1e-12) {
        if (bad_alpha) *bad_alpha = a - span / (n + 1);
        return false;
      }
    }
    prev2 = prev1;
    prev1 = v;
  }
  return true;
}

Rat parse_kv(const std::string& tok, const char* key) {
  std::string k(key);
  if (tok.size() <= k.size() + 1 || tok.compare(0, k.size(), k) != 0 ||
      tok[k.size()] != '=')
    throw std::runtime_error("expected " + k + "=<rational>, got '" + tok +
                             "'");
  return rat_from_string(tok.substr(k.size() + 1));
}

Verdict fail(FailKind kind, std::string witness) {
  Verdict v;
  v.pass = false;
  v.kind = kind;
  v.witness = std::move(witness);
  return v;
}

}  // namespace

RatInterval theta(const BranchingMatrix& m, const std::vector<Rat>& c,
                  const std::vector<Rat>& s, int j, unsigned prec_bits) {
  if (j < 0 || j >= m.t) throw std::invalid_argument("type index out of range");
  if (static_cast<int>(c.size()) != m.t || static_cast<int>(s.size()) != m.t)
    throw std::invalid_argument("c/s dimension mismatch");
  int delta = row_delta(m, j);
  if (delta < 1)
    throw std::invalid_argument("theta undefined for leaf type (Delta_j = 0)");

  Rat prod(1);
  Rat denom(0);
  for (int l = 0; l < m.t; ++l) {
    if (m.m[j][l] == 0) continue;
    prod *= rat_pow(c[l], static_cast<unsigned>(m.m[j][l]));
    denom += c[l] * s[l] * m.m[j][l];
  }
  denom /= delta;
  if (denom <= 0) throw std::invalid_argument("theta denominator not positive");
  return nth_root(prod, static_cast<unsigned>(delta), prec_bits) / denom;
}

RatInterval f_enclosure(const Rat& lambda_star, const Rat& s_j,
                        const RatInterval& theta_j, int delta_j,
                        const Rat& alpha, unsigned prec_bits) {
  if (delta_j < 1) throw std::invalid_argument("Delta_j must be >= 1");
  Rat lo_end = Rat(1) / (1 + lambda_star);
  if (alpha < lo_end || alpha > 1)
    throw std::domain_error("alpha outside [1/(1+lambda*), 1]");
  if (s_j <= alpha) throw std::domain_error("s_j - alpha must be positive");
  Rat psi = (1 - alpha) / (lambda_star * alpha);
  RatInterval h = nth_root(psi, static_cast<unsigned>(delta_j), prec_bits);
  return (Rat(1) - theta_j * h) * ((1 - alpha) / (s_j - alpha));
}

RatInterval f_prime_enclosure(const Rat& lambda_star, const Rat& s_j,
                              const RatInterval& theta_j, int delta_j,
                              const Rat& alpha, unsigned prec_bits) {
  if (delta_j < 1) throw std::invalid_argument("Delta_j must be >= 1");
  Rat lo_end = Rat(1) / (1 + lambda_star);
  if (alpha <= lo_end || alpha >= 1)
    throw std::domain_error("alpha must lie strictly inside (1/(1+lambda*), 1)");
  if (s_j <= alpha) throw std::domain_error("s_j - alpha must be positive");
  Rat psi = (1 - alpha) / (lambda_star * alpha);
  RatInterval h = nth_root(psi, static_cast<unsigned>(delta_j), prec_bits);
  RatInterval th = theta_j * h;
  Rat sma = s_j - alpha;
  RatInterval rise = th / (Rat(delta_j) * alpha * sma);
  RatInterval drop = (Rat(1) - th) * ((s_j - 1) / (sma * sma));
  return rise - drop;
}

Rat envelope_bound_D(const Rat& lambda_star, const Rat& s_j,
                     const RatInterval& theta_j, int delta_j,
                     const EnvelopeSpec& env) {
  auto reject = [](const char* what) {
    throw std::runtime_error(std::string("envelope check failed: ") + what);
  };
  if (!(theta_j.lo > 0) || !(theta_j.hi <= 1))
    reject("theta enclosure not within (0,1]");
  Rat lo_end = Rat(1) / (1 + lambda_star);
  if (!(lo_end < env.alpha_lo && env.alpha_lo < env.alpha_hi &&
        env.alpha_hi < 1))
    reject("anchors must satisfy 1/(1+lambda*) < alpha_lo < alpha_hi < 1");
  if (!(env.b_lo > 0)) reject("b_lo must be positive");
  if (!(env.b_hi < 0)) reject("b_hi must be negative");

  RatInterval f_lo =
      f_enclosure(lambda_star, s_j, theta_j, delta_j, env.alpha_lo);
  RatInterval f_hi =
      f_enclosure(lambda_star, s_j, theta_j, delta_j, env.alpha_hi);
  RatInterval fp_lo =
      f_prime_enclosure(lambda_star, s_j, theta_j, delta_j, env.alpha_lo);
  RatInterval fp_hi =
      f_prime_enclosure(lambda_star, s_j, theta_j, delta_j, env.alpha_hi);

  if (!(env.B_lo > f_lo.hi)) reject("B_lo does not dominate f(alpha_lo)");
  if (!(env.B_hi > f_hi.hi)) reject("B_hi does not dominate f(alpha_hi)");
  if (!(env.b_lo > fp_lo.hi)) reject("b_lo does not dominate f'(alpha_lo)");
  if (!(fp_lo.lo > 0)) reject("f'(alpha_lo) not provably positive");
  if (!(env.b_hi < fp_hi.lo)) reject("b_hi does not undercut f'(alpha_hi)");
  if (!(fp_hi.hi < 0)) reject("f'(alpha_hi) not provably negative");

  // Concavity makes each tangent-like line an upper bound on its side, so
  // sup f <= max(left plateau, right plateau, crossing of the two lines).
  Rat best = std::max(env.B_lo, env.B_hi);
  Rat x_cross = (env.B_hi - env.B_lo + env.b_lo * env.alpha_lo -
                 env.b_hi * env.alpha_hi) /
                (env.b_lo - env.b_hi);
  if (env.alpha_lo < x_cross && x_cross < env.alpha_hi) {
    Rat y_cross = env.B_lo + env.b_lo * (x_cross - env.alpha_lo);
    best = std::max(best, y_cross);
  }
  return best;
}

Verdict check_dms(const BranchingMatrix& m, const DmsCertificate& cert) {
  if (m.t < 1 || static_cast<int>(cert.s.size()) != m.t ||
      static_cast<int>(cert.c.size()) != m.t ||
      static_cast<int>(cert.envelopes.size()) != m.t)
    return fail(FailKind::Precondition, "certificate dimensions do not match");
  if (!(cert.lambda_star > 0))
    return fail(FailKind::Precondition, "lambda* must be positive");
  for (int j = 0; j < m.t; ++j) {
    if (!(cert.c[j] > 0))
      return fail(FailKind::Precondition,
                  "c_" + std::to_string(j) + " must be positive");
    if (!(cert.s[j] > 1))
      return fail(FailKind::Precondition,
                  "s_" + std::to_string(j) + " must exceed 1");
  }
  if (!(cert.lambda_star > Rat(27, 16)))
    return fail(FailKind::Precondition,
                "lambda* = " + rat_to_string(cert.lambda_star) +
                    " <= 27/16; envelope verification requires lambda* > 27/16");

  std::vector<Rat> dhat(m.t, Rat(0));
  for (int j = 0; j < m.t; ++j) {
    int delta = row_delta(m, j);
    if (delta == 0) continue;  // leaf type: no survival factor, D_jj := 0
    if (!(cert.s[j] > Rat(51, 50)))
      return fail(FailKind::Precondition,
                  "s_" + std::to_string(j) + " = " + rat_to_string(cert.s[j]) +
                      " <= 51/50 (concavity precondition)");
    if (!cert.envelopes[j])
      return fail(FailKind::Envelope,
                  "missing envelope for type " + std::to_string(j));

    RatInterval th = theta(m, cert.c, cert.s, j);
    if (!(th.lo > 0) || !(th.hi <= 1))
      return fail(FailKind::Precondition,
                  "theta_" + std::to_string(j) + " enclosure [" +
                      rat_to_decimal(th.lo, 9) + ", " +
                      rat_to_decimal(th.hi, 9) + "] not within (0,1]");

    double bad_alpha = 0;
    if (!concavity_spot_check(rat_to_double(cert.lambda_star),
                              rat_to_double(cert.s[j]), rat_to_double(th.lo),
                              delta, 1000, &bad_alpha)) {
      std::ostringstream os;
      os << "concavity spot-check failed for type " << j << " near alpha="
         << bad_alpha;
      return fail(FailKind::Precondition, os.str());
    }

    // f_j decreases in theta, so bounding with the lower interval end keeps
    // D^_jj an upper bound for the true theta.
    try {
      dhat[j] = envelope_bound_D(cert.lambda_star, cert.s[j],
                                 RatInterval(th.lo), delta,
                                 *cert.envelopes[j]);
    } catch (const std::runtime_error& e) {
      return fail(FailKind::Envelope,
                  std::string(e.what()) + " (type " + std::to_string(j) + ")");
    }
  }

  Verdict v;
  v.per_type_slack.resize(m.t);
  int worst = -1;
  for (int j = 0; j < m.t; ++j) {
    Rat row(0);
    for (int l = 0; l < m.t; ++l)
      if (m.m[j][l]) row += Rat(m.m[j][l]) * cert.s[l] * cert.c[l];
    v.per_type_slack[j] = cert.c[j] - dhat[j] * row;
    if (worst < 0 || v.per_type_slack[j] < v.per_type_slack[worst]) worst = j;
  }
  if (v.per_type_slack[worst] > 0) {
    v.pass = true;
    v.kind = FailKind::None;
    return v;
  }
  v.pass = false;
  v.kind = FailKind::Inequality;
  Rat lhs = cert.c[worst] - v.per_type_slack[worst];
  v.witness = "(D^ M S c)_" + std::to_string(worst) + " = " +
              rat_to_decimal(lhs, 12) + " >= c_" + std::to_string(worst) +
              " = " + rat_to_decimal(cert.c[worst], 12);
  return v;
}

bool check_single_type(int delta, const Rat& lambda) {
  if (delta < 2) throw std::invalid_argument("Delta must be >= 2");
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  Rat threshold = rat_pow(Rat(delta), static_cast<unsigned>(delta)) /
                  rat_pow(Rat(delta - 1), static_cast<unsigned>(delta + 1));
  bool closed_form = lambda < threshold;

  // Cross-check through the fixed point: omega*(1+omega)^Delta = lambda has a
  // unique positive root, and the condition is Delta*omega/(1+omega) < 1.
  Rat lo(0), hi = lambda < 1 ? Rat(1) : lambda;
  Rat width_target(1, 1000000);
  width_target /= 1000000;  // 1e-12
  // Explicit Rat return: a deduced type would be a GMP expression template
  // referencing the rat_pow temporary.
  auto g = [&](const Rat& w) -> Rat {
    return w * rat_pow(1 + w, static_cast<unsigned>(delta));
  };
  while (hi - lo > width_target) {
    Rat mid = (lo + hi) / 2;
    if (g(mid) < lambda)
      lo = mid;
    else
      hi = mid;
  }
  Rat k_lo = Rat(delta) * lo / (1 + lo);
  Rat k_hi = Rat(delta) * hi / (1 + hi);
  bool lo_says = k_lo < 1, hi_says = k_hi < 1;
  if (lo_says == hi_says && lo_says != closed_form)
    throw std::logic_error(
        "single-type fixed-point cross-check disagrees with the closed form");
  return closed_form;
}

double sample_max_f(const Rat& lambda_star, const Rat& s_j, double theta_lo,
                    int delta_j, int samples) {
  if (delta_j < 1) throw std::invalid_argument("Delta_j must be >= 1");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  double lam = rat_to_double(lambda_star);
  double s = rat_to_double(s_j);
  double lo = 1.0 / (1.0 + lam);
  double best = 0.0;  // f(1) = 0 is always attained at the right endpoint
  for (int i = 1; i <= samples; ++i) {
    double a = lo + (1.0 - lo) * i / (samples + 1);
    best = std::max(best, f_double(lam, s, theta_lo, delta_j, a));
  }
  return best;
}

void save_certificate(std::ostream& os, const DmsCertificate& cert) {
  os << "cert lambda=" << rat_to_string(cert.lambda_star) << "\n";
  os << "s:";
  for (const Rat& v : cert.s) os << " " << rat_to_string(v);
  os << "\nc:";
  for (const Rat& v : cert.c) os << " " << rat_to_string(v);
  os << "\n";
  for (std::size_t j = 0; j < cert.envelopes.size(); ++j) {
    if (!cert.envelopes[j]) continue;
    const EnvelopeSpec& e = *cert.envelopes[j];
    os << "env " << j << ": alo=" << rat_to_string(e.alpha_lo)
       << " ahi=" << rat_to_string(e.alpha_hi)
       << " Blo=" << rat_to_string(e.B_lo) << " Bhi=" << rat_to_string(e.B_hi)
       << " blo=" << rat_to_string(e.b_lo) << " bhi=" << rat_to_string(e.b_hi)
       << "\n";
  }
}

DmsCertificate load_certificate(std::istream& is) {
  DmsCertificate cert;
  std::map<int, EnvelopeSpec> envs;
  bool saw_header = false;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "cert") {
      std::string kv;
      if (!(ls >> kv)) throw std::runtime_error("bad cert header");
      cert.lambda_star = parse_kv(kv, "lambda");
      saw_header = true;
    } else if (tag == "s:") {
      std::string tok;
      while (ls >> tok) cert.s.push_back(rat_from_string(tok));
    } else if (tag == "c:") {
      std::string tok;
      while (ls >> tok) cert.c.push_back(rat_from_string(tok));
    } else if (tag == "env") {
      int j;
      char colon;
      if (!(ls >> j >> colon) || colon != ':' || j < 0)
        throw std::runtime_error("bad env line");
      EnvelopeSpec e;
      std::string tok;
      const char* keys[6] = {"alo", "ahi", "Blo", "Bhi", "blo", "bhi"};
      Rat* slots[6] = {&e.alpha_lo, &e.alpha_hi, &e.B_lo,
                       &e.B_hi,     &e.b_lo,     &e.b_hi};
      for (int k = 0; k < 6; ++k) {
        if (!(ls >> tok)) throw std::runtime_error("truncated env line");
        *slots[k] = parse_kv(tok, keys[k]);
      }
      envs[j] = e;
    } else {
      throw std::runtime_error("unrecognized certificate line: " + line);
    }
  }
  if (!saw_header) throw std::runtime_error("missing cert header");
  if (cert.s.size() != cert.c.size())
    throw std::runtime_error("s and c length mismatch");
  int t = static_cast<int>(cert.c.size());
  cert.envelopes.assign(t, std::nullopt);
  for (auto& [j, e] : envs) {
    if (j >= t) throw std::runtime_error("env index out of range");
    cert.envelopes[j] = e;
  }
  return cert;
}

}  // namespace gridmix
