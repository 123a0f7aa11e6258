#include <doctest.h>

#include <random>

#include "scs/flow.hpp"

using namespace scs;

namespace {

Vec random_cvec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v;
}

Generator random_graph(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RVec nu(n);
  for (int i = 0; i < n; ++i) nu[i] = 0.2 + unif(rng);
  RMat c = RMat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) c(i, i + 1) = c(i + 1, i) = 0.1 + unif(rng);
  return Generator::graph_laplacian(c, nu);
}

bool near_upsilon0(const BellmanParams& bp, const FlowSetup& s, double t) {
  Vec F = s.gen.evolve(s.z_plus(t), s.f);
  Vec G = s.gen.evolve(std::conj(s.z_plus(t)), s.g);
  for (Eigen::Index i = 0; i < s.gen.size(); ++i)
    if (region::in_upsilon0(bp, {F[i], G[i]}, 1e-5)) return true;
  return false;
}

}  // namespace

TEST_CASE("flow setup validation and endpoint values") {
  Generator gen = Generator::two_point();
  BellmanParams bp = make_params(4.0, 0.25);
  Vec f(2), g(2);
  f << Complex(0.7, 0.2), Complex(-0.4, 1.1);
  g << Complex(0.3, -0.9), Complex(1.2, 0.5);

  CHECK_THROWS(FlowSetup(gen, bp, bp.phi_p_eps + 0.05, f, g));
  CHECK_THROWS(FlowSetup(gen, bp, 0.0, Vec::Zero(3), g));

  FlowSetup s(gen, bp, 0.3, f, g);
  CHECK_THROWS(flow_E(s, -0.1));
  CHECK_THROWS(flow_E_derivative(s, 0.0));

  // E(0) is the plain Bellman average, dominated by (1+delta)(||f||_p^p + ||g||_q^q)
  double e0 = 0.0;
  for (int i = 0; i < 2; ++i)
    e0 += eval_Q(bp, {f[i], g[i]}) * gen.space().nu[i];
  CHECK(flow_E(s, 0.0) == doctest::Approx(e0).epsilon(1e-13));
  double cap = (1.0 + bp.delta) *
               (std::pow(lp_norm(gen.space(), f, bp.p), bp.p) +
                std::pow(lp_norm(gen.space(), g, bp.q), bp.q));
  CHECK(flow_E(s, 0.0) <= cap * (1.0 + 1e-12));

  // zero data
  FlowSetup sz(gen, bp, 0.3, Vec::Zero(2), Vec::Zero(2));
  CHECK(flow_E(sz, 1.0) == 0.0);
  CHECK(flow_E_derivative(sz, 1.0) == 0.0);

  // t -> infinity limit: the averaged value of Q at the projections
  double t_inf = 80.0 / (gen.spectral_gap() * std::cos(s.phi));
  Vec pf = gen.projection_P0(f), pg = gen.projection_P0(g);
  double e_inf = 0.0;
  for (int i = 0; i < 2; ++i)
    e_inf += eval_Q(bp, {pf[i], pg[i]}) * gen.space().nu[i];
  CHECK(flow_E(s, t_inf) == doctest::Approx(e_inf).epsilon(1e-9));
}

TEST_CASE("flow derivative matches finite differences and is nonpositive") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    Generator gen = (trial % 2 == 0) ? Generator::two_point()
                                     : random_graph(rng, 3 + trial % 4);
    double p = (trial % 3 == 0) ? 2.5 : (trial % 3 == 1 ? 4.0 : 8.0);
    BellmanParams bp = make_params(p, 0.2);
    Vec f = random_cvec(rng, static_cast<int>(gen.size()));
    Vec g = random_cvec(rng, static_cast<int>(gen.size()));
    for (double frac : {0.0, 0.6, -0.6}) {
      FlowSetup s(gen, bp, frac * bp.phi_p_eps, f, g);
      for (double t : {0.05, 0.3, 1.0, 3.0}) {
        double d = flow_E_derivative(s, t);
        CHECK(d <= 1e-10 * (1.0 + std::abs(flow_E(s, t))));
        if (near_upsilon0(bp, s, t) || std::abs(d) < 1e-6) continue;
        double h = 1e-5 * std::max(t, 0.1);
        if (near_upsilon0(bp, s, t - h) || near_upsilon0(bp, s, t + h)) continue;
        double fd = (flow_E(s, t + h) - flow_E(s, t - h)) / (2.0 * h);
        CHECK(std::abs(fd - d) <= 1e-6 * std::abs(d) + 1e-10);
      }
    }
  }
}

TEST_CASE("quantitative monotonicity gap is nonnegative") {
  std::mt19937_64 rng(12);
  Generator tp = Generator::two_point();
  BellmanParams bp = make_params(4.0, 0.25);
  for (int trial = 0; trial < 40; ++trial) {
    Vec f = random_cvec(rng, 2), g = random_cvec(rng, 2);
    for (double frac : {0.0, 1.0, -1.0}) {
      FlowSetup s(tp, bp, frac * bp.phi_p_eps, f, g);
      for (double t : {0.02, 0.1, 0.5, 2.0})
        CHECK(monotonicity_gap(s, t) >= -1e-10 * (1.0 + std::abs(flow_E(s, t))));
    }
  }

  Generator eh = Generator::ehrenfest(6);
  for (double p : {2.5, 4.0, 8.0})
    for (double eps : {0.1, 0.3}) {
      BellmanParams b = make_params(p, eps);
      for (int trial = 0; trial < 6; ++trial) {
        Vec f = random_cvec(rng, 7), g = random_cvec(rng, 7);
        for (double frac : {0.0, 1.0, -1.0}) {
          FlowSetup s(eh, b, frac * b.phi_p_eps, f, g);
          for (double t : {0.05, 0.2, 1.0, 4.0})
            CHECK(monotonicity_gap(s, t) >= -1e-9 * (1.0 + std::abs(flow_E(s, t))));
        }
      }
    }
}

TEST_CASE("bilinear integral: closed form, robustness, embedding bound") {
  std::mt19937_64 rng(13);
  Generator tp = Generator::two_point();
  BellmanParams bp = make_params(4.0, 0.25);

  for (int trial = 0; trial < 30; ++trial) {
    Vec f = random_cvec(rng, 2), g = random_cvec(rng, 2);
    for (double frac : {0.0, 0.5, -1.0}) {
      FlowSetup s(tp, bp, frac * bp.phi_p_eps, f, g);
      BilinearResult res = bilinear_integral(s);
      CHECK(res.tail_ok);
      Vec df = f - tp.projection_P0(f), dg = g - tp.projection_P0(g);
      double closed = std::abs(pairing(tp.space(), tp.apply(df), dg)) /
                      (4.0 * std::cos(s.phi));
      CHECK(std::abs(res.value - closed) <= 1e-8 * (1.0 + closed));

      ContourQuadrature fine;
      fine.tol = 0.5e-10;
      double refined = bilinear_integral(s, fine).value;
      CHECK(std::abs(refined - res.value) <= 1e-6 * (1.0 + res.value));
    }
  }

  FlowSetup sz(tp, bp, 0.2, random_cvec(rng, 2), Vec::Zero(2));
  CHECK(bilinear_integral(sz).value == 0.0);

  // embedding bound on random chains
  for (int trial = 0; trial < 10; ++trial) {
    Generator gen = random_graph(rng, 3 + trial % 6);
    int n = static_cast<int>(gen.size());
    for (double p : {2.5, 8.0})
      for (double eps : {0.1, 0.4}) {
        BellmanParams b = make_params(p, eps);
        Vec f = random_cvec(rng, n), g = random_cvec(rng, n);
        FlowSetup s(gen, b, 0.8 * b.phi_p_eps, f, g);
        double bound = 30.0 * (p - 1.0) / (eps * std::cos(s.phi)) *
                       lp_norm(gen.space(), f, b.p) * lp_norm(gen.space(), g, b.q);
        CHECK(bilinear_integral(s).value <= bound * (1.0 + 1e-12));
      }
  }
}

TEST_CASE("single-step increment inequality") {
  std::mt19937_64 rng(14);
  Generator tp = Generator::two_point();
  BellmanParams bp = make_params(4.0, 0.25);

  Vec f = random_cvec(rng, 2), g = random_cvec(rng, 2);
  Mat I = Mat::Identity(2, 2);
  CHECK(prop_p4_gap(tp.space(), I, bp, 0.3, f, g) == doctest::Approx(0.0));
  CHECK_THROWS(prop_p4_gap(tp.space(), Mat(1.5 * I), bp, 0.3, f, g));
  Mat skew = I;
  skew(0, 1) = 0.2;
  CHECK_THROWS(prop_p4_gap(tp.space(), skew, bp, 0.3, f, g));
  CHECK_THROWS(prop_p4_gap(tp.space(), I, bp, bp.phi_p_eps + 0.1, f, g));

  for (int trial = 0; trial < 60; ++trial) {
    Vec u = random_cvec(rng, 2), v = random_cvec(rng, 2);
    double t = std::pow(10.0, -2.0 + 4.0 * (trial % 10) / 9.0);
    Mat T = tp.evolve_matrix(Complex(t, 0.0));
    for (double frac : {0.0, 0.9, -0.9}) {
      double gap = prop_p4_gap(tp.space(), T, bp, frac * bp.phi_p_eps, u, v);
      CHECK(gap >= -1e-10 * (1.0 + std::abs(gap)));
    }
  }

  for (int trial = 0; trial < 15; ++trial) {
    Generator gen = random_graph(rng, 3 + trial % 7);
    int n = static_cast<int>(gen.size());
    BellmanParams b = make_params(2.5 + trial, 0.15);
    Vec u = random_cvec(rng, n), v = random_cvec(rng, n);
    Mat T = gen.evolve_matrix(Complex(0.4, 0.0));
    double gap = prop_p4_gap(gen.space(), T, b, 0.7 * b.phi_p_eps, u, v);
    CHECK(gap >= -1e-9 * (1.0 + std::abs(gap)));
  }
}

TEST_CASE("laplace-transform multiplier bound") {
  std::mt19937_64 rng(15);
  Generator eh = Generator::ehrenfest(6);
  Vec f = eh.apply(random_cvec(rng, 7));

  CHECK(laplace_transform_bound_check(eh, [](double) { return Complex(0.0); }, 3.0,
                                      f) == doctest::Approx(0.0));

  for (double p : {1.2, 3.0, 10.0}) {
    double p_star = std::max(p, p / (p - 1.0));
    double slack =
        laplace_transform_bound_check(eh, [](double) { return Complex(1.0); }, p, f);
    double expect = (120.0 * (p_star - 1.0) - 1.0) * lp_norm(eh.space(), f, p);
    CHECK(slack == doctest::Approx(expect).epsilon(1e-8));

    double s2 = laplace_transform_bound_check(
        eh, [](double t) { return Complex(std::exp(-t), 0.3 * (t < 1.0)); }, p, f,
        LaplaceOptions{0.0, {1.0}});
    CHECK(s2 >= 0.0);
  }
}

TEST_CASE("subordination identity along tilted rays") {
  std::mt19937_64 rng(16);
  Generator gen = random_graph(rng, 5);
  Vec f = random_cvec(rng, 5), g = random_cvec(rng, 5);
  f -= gen.projection_P0(f);

  auto M_complex = [](Complex z) { return std::exp(-z); };
  MultiplierSpec mt =
      laplace_type_multiplier([&](double t) { return M_complex(Complex(t, 0.0)); });
  Complex lhs = pairing(gen.space(), gen.apply_multiplier(mt, f), g);

  const RVec& lam = gen.eigenvalues();
  Vec fc = gen.analyze(f), gc = gen.analyze(g);
  for (double theta : {0.0, 0.3, -0.3}) {
    Complex eth(std::cos(theta), std::sin(theta));
    auto integrand = [&](double r) {
      Complex z = r * eth;
      Complex acc = 0.0;
      for (Eigen::Index k = 0; k < gen.size(); ++k)
        if (lam[k] > Generator::kZeroEigTol)
          acc += lam[k] * fc[k] * std::conj(gc[k]) * std::exp(-2.0 * lam[k] * z);
      return 2.0 * eth * acc * M_complex(2.0 * z);
    };
    double r_max = 60.0 / (2.0 * std::cos(theta) * gen.spectral_gap());
    Complex rhs = detail::composite_gl(integrand, 0.0, 5.0, 0.1) +
                  detail::composite_gl(integrand, 5.0, r_max, 1.0);
    CHECK(std::abs(lhs - rhs) <= 1e-6 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("scaling reduction of the embedding constant") {
  // min over lambda of (lambda^p X + lambda^{-q} Y) equals q (p-1)^{1/p} a b
  // when X = a^p, Y = b^q and q is the conjugate exponent
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  for (double p : {2.5, 4.0, 8.0, 20.0}) {
    double q = p / (p - 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      double a = unif(rng), b = unif(rng);
      double X = std::pow(a, p), Y = std::pow(b, q);
      double lam_star = std::pow(q * Y / (p * X), 1.0 / (p + q));
      double closed = q * std::pow(p - 1.0, 1.0 / p) * a * b;
      double at_star = std::pow(lam_star, p) * X + std::pow(lam_star, -q) * Y;
      CHECK(at_star == doctest::Approx(closed).epsilon(1e-12));
      for (double shift : {0.9, 1.1}) {
        double l = lam_star * shift;
        CHECK(std::pow(l, p) * X + std::pow(l, -q) * Y >= at_star * (1.0 - 1e-12));
      }
    }
  }
}
