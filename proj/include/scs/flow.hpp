#pragma once

#include "scs/bellman.hpp"
#include "scs/calculus.hpp"
#include "scs/semigroup.hpp"

namespace scs {

/// Heat-flow functional E(t) = sum_i Q(T_{t e^{i phi}} f, T_{t e^{-i phi}} g)_i nu_i
/// and the associated inequality suite.
struct FlowSetup {
  const Generator& gen;
  BellmanParams params;
  double phi;
  Vec f;
  Vec g;

  FlowSetup(const Generator& generator, BellmanParams bp, double angle, Vec ff, Vec gg)
      : gen(generator), params(bp), phi(angle), f(std::move(ff)), g(std::move(gg)) {
    if (!(std::abs(phi) <= bp.phi_p_eps + 1e-15))
      throw std::invalid_argument("FlowSetup: requires |phi| <= phi_{p_eps}");
    if (f.size() != gen.size() || g.size() != gen.size())
      throw std::invalid_argument("FlowSetup: vector/space size mismatch");
  }

  Complex z_plus(double t) const { return t * Complex(std::cos(phi), std::sin(phi)); }
};

inline double flow_E(const FlowSetup& s, double t) {
  if (t < 0.0) throw std::invalid_argument("flow_E: requires t >= 0");
  Vec F = s.gen.evolve(s.z_plus(t), s.f);
  Vec G = s.gen.evolve(std::conj(s.z_plus(t)), s.g);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.gen.size(); ++i)
    acc += eval_Q(s.params, {F[i], G[i]}) * s.gen.space().nu[i];
  return acc;
}

/// E'(t) through the chain rule and the C^1 gradient of Q; valid for all t > 0.
inline double flow_E_derivative(const FlowSetup& s, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("flow_E_derivative: requires t > 0");
  Vec F = s.gen.evolve(s.z_plus(t), s.f);
  Vec G = s.gen.evolve(std::conj(s.z_plus(t)), s.g);
  Vec AF = s.gen.apply(F);
  Vec AG = s.gen.apply(G);
  Complex ephi(std::cos(s.phi), std::sin(s.phi));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.gen.size(); ++i) {
    auto [dz, de] = grad_Q(s.params, {F[i], G[i]});
    acc += 2.0 * (ephi * dz * AF[i] + std::conj(ephi) * de * AG[i]).real() *
           s.gen.space().nu[i];
  }
  return -acc;
}

/// -E'(t) - 2 delta cos(phi) |<A T_{t e^{i phi}} f, T_{t e^{-i phi}} g>|;
/// quantitative monotonicity asserts this is >= 0.
inline double monotonicity_gap(const FlowSetup& s, double t) {
  Vec F = s.gen.evolve(s.z_plus(t), s.f);
  Vec G = s.gen.evolve(std::conj(s.z_plus(t)), s.g);
  double pair = std::abs(pairing(s.gen.space(), s.gen.apply(F), G));
  return -flow_E_derivative(s, t) -
         2.0 * s.params.delta * std::cos(s.phi) * pair;
}

struct ContourQuadrature {
  double tol = 1e-10;      // absolute bound required of the analytic tail
  double grading = 0.7;    // geometric panel grading towards t = 0
};

struct BilinearResult {
  double value = 0.0;
  double t_max = 0.0;
  double tail_bound = 0.0;
  bool tail_ok = true;
};

/// integral_0^inf |<A T_{t e^{i phi}} f, T_{t e^{-i phi}} g>| dt. The integrand
/// reduces to |sum_k a_k e^{-2 t cos(phi) lambda_k}|; the tail beyond t_max is
/// bounded by the spectral-gap decay applied to the range components.
inline BilinearResult bilinear_integral(const FlowSetup& s,
                                        const ContourQuadrature& quad = {}) {
  const RVec& lam = s.gen.eigenvalues();
  const Vec fc = s.gen.analyze(s.f), gc = s.gen.analyze(s.g);
  const double c = 2.0 * std::cos(s.phi);

  std::vector<double> rates;
  std::vector<Complex> coef;
  for (Eigen::Index k = 0; k < s.gen.size(); ++k)
    if (lam[k] > Generator::kZeroEigTol) {
      rates.push_back(c * lam[k]);
      coef.push_back(lam[k] * fc[k] * std::conj(gc[k]));
    }
  BilinearResult res;
  if (rates.empty()) return res;

  auto integrand = [&](double t) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k)
      acc += coef[k] * std::exp(-rates[k] * t);
    return Complex(std::abs(acc), 0.0);
  };

  const double gap = s.gen.spectral_gap();
  Vec df = s.f - s.gen.projection_P0(s.f);
  Vec dg = s.g - s.gen.projection_P0(s.g);
  double amp = 2.0 * lp_norm(s.gen.space(), Vec(s.gen.apply(df)), 2.0) *
               lp_norm(s.gen.space(), dg, 2.0) / (c * gap);
  // amp * exp(-c * gap * T) < tol  determines the cutoff
  double t_max = (amp > quad.tol) ? std::log(amp / quad.tol) / (c * gap) : 1.0;
  res.t_max = t_max;
  res.tail_bound = amp * std::exp(-c * gap * t_max);
  res.tail_ok = res.tail_bound <= quad.tol * 1.0000001;

  double rate_max = *std::max_element(rates.begin(), rates.end());
  double t_min = std::min(0.01 / rate_max, t_max * 1e-3);
  std::vector<double> edges = {0.0, t_min};
  while (edges.back() < t_max) edges.push_back(edges.back() / quad.grading);
  edges.back() = t_max;

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    acc += detail::composite_gl(integrand, edges[i], edges[i + 1],
                                edges[i + 1] - edges[i])
               .real();
  res.value = acc;
  return res;
}

/// Finite-scale increment inequality for a single symmetric contraction T:
/// returns RHS - LHS of
///   2 delta cos(phi) |<(I-T) f, g>|  <=
///   2 Re sum nu_i [e^{i phi} dQ_zeta (f,g) ((I-T)f) + e^{-i phi} dQ_eta (f,g) ((I-T)g)].
inline double prop_p4_gap(const WeightedSpace& sp, const Mat& T,
                          const BellmanParams& bp, double phi, const Vec& f,
                          const Vec& g) {
  if (!(std::abs(phi) <= bp.phi_p_eps + 1e-15))
    throw std::invalid_argument("prop_p4_gap: requires |phi| <= phi_{p_eps}");
  for (Eigen::Index i = 0; i < sp.size(); ++i)
    for (Eigen::Index j = 0; j < sp.size(); ++j)
      if (std::abs(sp.nu[i] * T(i, j) - sp.nu[j] * std::conj(T(j, i))) > 1e-10)
        throw std::invalid_argument("prop_p4_gap: T is not nu-self-adjoint");
  if (op_norm(sp, T, 1.0).value > 1.0 + 1e-12 ||
      op_norm(sp, T, kInfExponent).value > 1.0 + 1e-12)
    throw std::invalid_argument("prop_p4_gap: T is not an L^1/L^inf contraction");

  Vec rf = f - T * f;
  Vec rg = g - T * g;
  Complex ephi(std::cos(phi), std::sin(phi));
  double rhs = 0.0;
  Complex lhs_pair = 0.0;
  for (Eigen::Index i = 0; i < sp.size(); ++i) {
    auto [dz, de] = grad_Q(bp, {f[i], g[i]});
    rhs += 2.0 * (ephi * dz * rf[i] + std::conj(ephi) * de * rg[i]).real() * sp.nu[i];
    lhs_pair += rf[i] * std::conj(g[i]) * sp.nu[i];
  }
  return rhs - 2.0 * bp.delta * std::cos(phi) * std::abs(lhs_pair);
}

/// Slack 120 (p*-1) ||M||_inf ||f||_p - ||Mtilde(A) f||_p for a bounded M;
/// expects f in the range of A.
inline double laplace_transform_bound_check(const Generator& gen,
                                            const std::function<Complex(double)>& M,
                                            double p, const Vec& f,
                                            LaplaceOptions opt = {}) {
  double m_inf = 0.0;
  for (int i = 0; i < 240; ++i) {
    double t = 1e-6 * std::pow(1e12, i / 239.0);
    m_inf = std::max(m_inf, std::abs(M(t)));
  }
  for (double b : opt.breakpoints)
    if (b > 0.0) m_inf = std::max({m_inf, std::abs(M(b * 0.999)), std::abs(M(b * 1.001))});

  MultiplierSpec mt = laplace_type_multiplier(M, std::move(opt));
  Vec out = gen.apply_multiplier(mt, f);
  double p_star = std::max(p, p / (p - 1.0));
  return 120.0 * (p_star - 1.0) * m_inf * lp_norm(gen.space(), f, p) -
         lp_norm(gen.space(), out, p);
}

}  // namespace scs
