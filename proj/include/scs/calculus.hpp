#pragma once

#include <fftw3.h>

#include <array>
#include <functional>
#include <vector>

#include "scs/opnorms.hpp"
#include "scs/semigroup.hpp"
#include "scs/weighted_space.hpp"

namespace scs {

namespace detail {

// Lanczos approximation (g = 7, n = 9), ~1e-13 relative on Re z > 0.
inline Complex gamma_fn(Complex z) {
  static constexpr std::array<double, 9> coef = {
      0.99999999999980993,     676.5203681218851,    -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,  12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5)  // reflection
    return M_PI / (std::sin(M_PI * z) * gamma_fn(1.0 - z));
  z -= 1.0;
  Complex x = coef[0];
  for (int i = 1; i < 9; ++i) x += coef[i] / (z + double(i));
  Complex t = z + 7.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGL16Nodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGL16Weights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// Composite 16-point Gauss-Legendre over [a, b] with panel width <= h.
template <class F>
Complex composite_gl(F&& f, double a, double b, double h) {
  if (!(b > a)) return 0.0;
  int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  double w = (b - a) / panels;
  Complex acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * w;
    for (int k = 0; k < 8; ++k) {
      double d = 0.5 * w * kGL16Nodes[k];
      acc += kGL16Weights[k] * (f(c + d) + f(c - d));
    }
  }
  return acc * (0.5 * w);
}

}  // namespace detail

/// Euler Gamma on the complex plane.
inline Complex gamma_fn(Complex z) { return detail::gamma_fn(z); }

/// Smooth cutoff: 0 outside (1/4, 4), 1 on [1/2, 2], exp(-1/x) transitions.
inline double bump_psi(double t) {
  auto ramp = [](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
  };
  if (t <= 0.25 || t >= 4.0) return 0.0;
  if (t < 0.5) return ramp((t - 0.25) / 0.25);
  if (t <= 2.0) return 1.0;
  return ramp((4.0 - t) / 2.0);
}

struct HormanderConfig {
  double J = 2.0;
  int fft_size = 8192;
  int padding = 16;       // domain length = 4 * padding
  int r_count = 64;       // log-spaced scales for the sup over R
  double r_min = 2.5e-3;  // default spans [lambda_min/4, 4 lambda_max] for [1e-2, 1e2]
  double r_max = 4.0e2;
};

struct HormanderResult {
  double value = 0.0;
  bool converged = true;
};

namespace detail {

// Sobolev H^J norm of t -> psi(t) m(c t), sampled on [0, L) and zero-padded
// by construction (psi vanishes outside (1/4, 4)).
inline double sobolev_norm(const std::function<Complex(Complex)>& m, Complex ray_dir,
                           double R, double J, int N, double L) {
  std::vector<Complex> in(N);
  double dt = L / N;
  for (int j = 0; j < N; ++j) {
    double t = j * dt;
    double w = bump_psi(t);
    in[j] = (w == 0.0) ? Complex(0.0) : w * m(ray_dir * (R * t));
  }
  std::vector<Complex> out(N);
  fftw_plan plan = fftw_plan_dft_1d(N, reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  double acc = 0.0;
  for (int k = 0; k < N; ++k) {
    int ks = (k <= N / 2) ? k : k - N;
    double tau = 2.0 * M_PI * ks / L;
    acc += std::pow(1.0 + tau * tau, J) * std::norm(out[k]);
  }
  return std::sqrt(acc * dt * dt / L);
}

inline double hormander_norm_at(const MultiplierSpec& m, double phi,
                                const HormanderConfig& cfg, int N) {
  double L = 4.0 * cfg.padding;
  double best_plus = 0.0, best_minus = 0.0;
  Complex up(std::cos(phi), std::sin(phi));
  for (int i = 0; i < cfg.r_count; ++i) {
    double R = cfg.r_min *
               std::pow(cfg.r_max / cfg.r_min, cfg.r_count == 1 ? 0.0 : double(i) / (cfg.r_count - 1));
    best_plus = std::max(best_plus, sobolev_norm(m.spectral_fn, up, R, cfg.J, N, L));
    best_minus = std::max(best_minus, sobolev_norm(m.spectral_fn, std::conj(up), R, cfg.J, N, L));
  }
  return best_plus + best_minus;
}

}  // namespace detail

/// sup_R ||psi m(e^{i phi} R .)||_{H^J} + sup_R ||psi m(e^{-i phi} R .)||_{H^J},
/// the sups taken over a log grid of scales. Non-convergence under resolution
/// doubling is reported through the flag.
inline HormanderResult hormander_norm(const MultiplierSpec& m, double phi,
                                      const HormanderConfig& cfg = {}) {
  HormanderResult res;
  res.value = detail::hormander_norm_at(m, phi, cfg, cfg.fft_size);
  double refined = detail::hormander_norm_at(m, phi, cfg, 2 * cfg.fft_size);
  res.converged = std::abs(refined - res.value) <= 1e-4 * std::max(1e-300, refined);
  res.value = refined;
  return res;
}

/// Mellin transform of m_tau(t, .) at frequency s:
///   integral_0^inf (t lambda)^tau e^{-t lambda} m(lambda) lambda^{-is} dlambda/lambda,
/// evaluated by log-substitution quadrature.
inline Complex mellin_m_tau(const MultiplierSpec& m, double tau, double s, double t,
                            bool* converged = nullptr) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("mellin_m_tau: requires tau in (0,1)");
  if (!(t > 0.0)) throw std::invalid_argument("mellin_m_tau: requires t > 0");
  const double u_hi = std::log(50.0 / t);
  const double u_lo = -42.0 / tau - std::log(t);
  auto integrand = [&](double u) {
    double lam = std::exp(u);
    return std::pow(t * lam, tau) * std::exp(-t * lam) * m(Complex(lam, 0.0)) *
           std::exp(Complex(0.0, -s * u));
  };
  double h = std::min(0.5, 4.0 / (1.0 + std::abs(s)));
  Complex v = detail::composite_gl(integrand, u_lo, u_hi, h);
  if (converged) {
    Complex v2 = detail::composite_gl(integrand, u_lo, u_hi, 0.5 * h);
    *converged = std::abs(v - v2) <= 1e-8 * std::max(1e-300, std::abs(v2));
    v = v2;
  }
  return v;
}

struct LaplaceOptions {
  double log_freq = 0.0;            // oscillation frequency of M in ln t, if known
  std::vector<double> breakpoints;  // discontinuities of M, panel edges are aligned
};

/// Laplace-transform-type multiplier: lambda -> lambda * integral_0^inf M(t) e^{-t lambda} dt.
/// Defined for Re lambda > 0; the value at zero is 0.
inline MultiplierSpec laplace_type_multiplier(std::function<Complex(double)> M,
                                              LaplaceOptions opt = {}) {
  auto fn = [M = std::move(M), opt = std::move(opt)](Complex lambda) -> Complex {
    double x = lambda.real();
    if (!(x > 0.0))
      throw std::invalid_argument("laplace_type_multiplier: requires Re lambda > 0");
    double w_hi = std::log(50.0 / x);
    double w_lo = std::log(1e-18) - std::log(std::abs(lambda));
    auto integrand = [&](double w) {
      double t = std::exp(w);
      return M(t) * std::exp(-t * lambda) * t;  // dt = t dw
    };
    double h = std::min(0.5, 4.0 / (1.0 + opt.log_freq));
    std::vector<double> edges = {w_lo};
    for (double b : opt.breakpoints)
      if (b > 0.0 && std::log(b) > w_lo && std::log(b) < w_hi)
        edges.push_back(std::log(b));
    edges.push_back(w_hi);
    std::sort(edges.begin(), edges.end());
    Complex acc = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      acc += detail::composite_gl(integrand, edges[i], edges[i + 1], h);
    return lambda * acc;
  };
  return {std::move(fn), 0.0};
}

struct ReconstructResult {
  Vec value;
  double s_used = 0.0;  // half-width of the s-interval actually integrated
  bool tail_ok = true;  // truncation tail fell below tolerance before s_max
};

/// Reconstruction of m(A) f through the representation
///   m(A) f = 2^tau / (pi Gamma(tau+1)) * integral_R  L_s(A) A^{is} f ds,
/// where L_s is the Laplace-transform-type multiplier built from the Mellin
/// transform t -> [M_s m_tau](t). Expects f in the range of A.
inline ReconstructResult meda_reconstruct(const Generator& gen, const MultiplierSpec& m,
                                          double tau, double s_max, const Vec& f,
                                          double tail_tol = 1e-9) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("meda_reconstruct: requires tau in (0,1)");
  const Eigen::Index n = gen.size();
  const RVec& lam = gen.eigenvalues();

  double lam_min = 0.0, lam_max = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (lam[k] > Generator::kZeroEigTol) {
      lam_min = (lam_min == 0.0) ? lam[k] : std::min(lam_min, lam[k]);
      lam_max = std::max(lam_max, lam[k]);
    }
  ReconstructResult res;
  res.value = Vec::Zero(n);
  if (lam_max == 0.0) return res;  // f has no range component to act on

  const Vec c = gen.analyze(f);
  const double gamma_tau1 = gamma_fn(Complex(tau + 1.0)).real();

  Vec acc = Vec::Zero(n);  // eigenbasis coefficients of the integral
  double acc_norm = 0.0;

  // Exact integral over an s-panel of e^{i s a}:
  // (e^{i s1 a} - e^{i s0 a}) / (i a) in a cancellation-free form.
  auto s_factor = [](double s0, double s1, double a) {
    double mid = 0.5 * (s0 + s1), w = s1 - s0;
    double x = 0.5 * a * w;
    double sinc = (std::abs(x) < 1e-8) ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return w * sinc * std::exp(Complex(0.0, a * mid));
  };

  // The t-integral of the outer Laplace transform is done in closed form:
  //   lambda int_0^inf t^tau e^{-t (lambda + e^u)} dt
  //     = Gamma(tau+1) lambda / (lambda + e^u)^{tau+1},
  // leaving one log-substituted integral over the Mellin variable per panel
  // and eigenvalue.
  auto panel_contribution = [&](double s0, double s1) {
    Vec panel = Vec::Zero(n);
    double h = std::min(0.5, 4.0 / (1.0 + std::max(std::abs(s0), std::abs(s1))));
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(lam[k] > Generator::kZeroEigTol)) continue;
      double a = std::log(lam[k]);
      auto integrand = [&](double u) {
        double lu = std::exp(u);
        double kernel = std::exp(tau * u - (tau + 1.0) * std::log(lam[k] + lu));
        return m(Complex(lu, 0.0)) * kernel * s_factor(s0, s1, a - u);
      };
      Complex val =
          detail::composite_gl(integrand, a - 38.0 / tau, a + 38.0, h);
      panel[k] = gamma_tau1 * lam[k] * val * c[k];
    }
    return panel;
  };

  bool stopped = false;
  for (int k0 = 0; k0 < static_cast<int>(std::ceil(s_max)); ++k0) {
    double s1 = std::min<double>(k0 + 1.0, s_max);
    Vec contrib = panel_contribution(k0, s1);
    if (k0 > 0) contrib += panel_contribution(-s1, -double(k0));
    else contrib += panel_contribution(-s1, 0.0);
    acc += contrib;
    acc_norm = acc.norm();
    res.s_used = s1;
    if (k0 >= 2 && contrib.norm() <= tail_tol * std::max(1e-300, acc_norm)) {
      stopped = true;
      break;
    }
  }
  res.tail_ok = stopped;

  double prefactor = std::pow(2.0, tau) / (M_PI * gamma_fn(Complex(tau + 1.0)).real());
  res.value = gen.synthesize(Vec(prefactor * acc));
  return res;
}

/// Numerical evaluation of the constant bounding the reconstruction:
///   C1 = pref(tau) * 120 (p*-1) * inf_tau integral ||M_s m_tau||_inf ||A^{is}|| ds,
/// with pref(tau) = 2^tau / (pi Gamma(tau+1)) and the norms measured on the
/// range of A. A genuine upper bound for || m(A) ||_p up to quadrature error.
inline double meda_constant(const Generator& gen, const MultiplierSpec& m, double p,
                            [[maybe_unused]] double J, double tau_hint = 0.5) {
  const double p_star = std::max(p, p / (p - 1.0));
  const double c2 = 120.0 * (p_star - 1.0);
  const RVec& lam = gen.eigenvalues();
  double lam_min = 0.0, lam_max = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (lam[k] > Generator::kZeroEigTol) {
      lam_min = (lam_min == 0.0) ? lam[k] : std::min(lam_min, lam[k]);
      lam_max = std::max(lam_max, lam[k]);
    }
  if (lam_max == 0.0) return 0.0;

  // sup_t |M_s m_tau| over a log grid of times around the spectral window.
  auto sup_mellin = [&](double tau, double s) {
    double best = 0.0;
    for (int i = 0; i < 24; ++i) {
      double t = (1e-3 / lam_max) *
                 std::pow(1e6 * lam_max / lam_min, double(i) / 23.0);
      best = std::max(best, std::abs(mellin_m_tau(m, tau, s, t)));
    }
    return best;
  };

  // || A^{is} (I - P0) ||_p, a lower-bound estimate; adequate for a constant
  // that is dominated by the Mellin decay.
  Mat proj(gen.size(), gen.size());
  for (Eigen::Index j = 0; j < gen.size(); ++j) {
    Vec e = Vec::Zero(gen.size());
    e[j] = 1.0;
    proj.col(j) = e - gen.projection_P0(e);
  }
  auto imag_power_norm = [&](double s) {
    Mat B(gen.size(), gen.size());
    for (Eigen::Index j = 0; j < gen.size(); ++j)
      B.col(j) = gen.imaginary_power(s, Vec(proj.col(j)));
    NormRequest req;
    req.multistarts = 8;
    req.max_iter = 200;
    return op_norm(gen.space(), B, p, req).value;
  };

  std::vector<double> taus = {0.25, 0.5, 0.75};
  if (std::find(taus.begin(), taus.end(), tau_hint) == taus.end() && tau_hint > 0.0 &&
      tau_hint < 1.0)
    taus.push_back(tau_hint);

  double best = -1.0;
  for (double tau : taus) {
    double integral = 0.0, ds = 0.5;
    double running_max = 0.0;
    for (double s = 0.0; s <= 40.0; s += ds) {
      double g = sup_mellin(tau, s) * imag_power_norm(s);
      if (s > 0.0) g += sup_mellin(tau, -s) * imag_power_norm(-s);
      running_max = std::max(running_max, g);
      integral += g * ds;
      if (s > 5.0 && g < 1e-9 * running_max) break;
    }
    double pref = std::pow(2.0, tau) / (M_PI * gamma_fn(Complex(tau + 1.0)).real());
    double c1 = pref * c2 * integral;
    if (best < 0.0 || c1 < best) best = c1;
  }
  return best;
}

}  // namespace scs
