#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "scs/weighted_space.hpp"

namespace scs {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;

/// Exponent bundle (p, epsilon) with all derived quantities.
struct BellmanParams {
  double p;
  double epsilon;
  double q;           // conjugate exponent p/(p-1)
  double delta;       // 2 q (q-1) epsilon / 85
  double p_eps;       // (p - 2 eps) / (1 - eps)
  double q_eps;       // conjugate of p_eps
  double phi_p;       // arccos|1 - 2/p|
  double phi_star_p;  // arcsin|1 - 2/p|
  double phi_p_eps;   // arccos|1 - 2/p_eps|
};

inline double sector_angle(double r) { return std::acos(std::abs(1.0 - 2.0 / r)); }
inline double sector_angle_star(double r) { return std::asin(std::abs(1.0 - 2.0 / r)); }

inline BellmanParams make_params(double p, double epsilon) {
  if (!(p > 2.0)) throw std::invalid_argument("make_params: requires p > 2");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("make_params: requires epsilon in (0, 1/2)");
  BellmanParams bp;
  bp.p = p;
  bp.epsilon = epsilon;
  bp.q = p / (p - 1.0);
  bp.delta = 2.0 * bp.q * (bp.q - 1.0) * epsilon / 85.0;
  bp.p_eps = (p - 2.0 * epsilon) / (1.0 - epsilon);
  bp.q_eps = bp.p_eps / (bp.p_eps - 1.0);
  bp.phi_p = sector_angle(p);
  bp.phi_star_p = sector_angle_star(p);
  bp.phi_p_eps = sector_angle(bp.p_eps);
  return bp;
}

/// Argument of the Bellman function, zeta and eta as points of R^2 ~ C.
struct StatePair {
  Complex zeta;
  Complex eta;

  Vec4 as_vec4() const {
    return Vec4(zeta.real(), zeta.imag(), eta.real(), eta.imag());
  }
  static StatePair from_vec4(const Vec4& v) {
    return {Complex(v[0], v[1]), Complex(v[2], v[3])};
  }
};

namespace region {

// Region split: good |zeta|^p > |eta|^q > 0, bad |zeta|^p < |eta|^q,
// and the non-C^2 set where eta = 0 or |zeta|^p = |eta|^q.
inline bool in_upsilon0(const BellmanParams& bp, const StatePair& xi, double tol = 0.0) {
  double az = std::pow(std::abs(xi.zeta), bp.p);
  double ae = std::pow(std::abs(xi.eta), bp.q);
  if (std::abs(xi.eta) <= tol) return true;
  return std::abs(az - ae) <= tol * (az + ae);
}

inline bool in_good(const BellmanParams& bp, const StatePair& xi) {
  double az = std::pow(std::abs(xi.zeta), bp.p);
  double ae = std::pow(std::abs(xi.eta), bp.q);
  return az > ae && ae > 0.0;
}

inline bool in_bad(const BellmanParams& bp, const StatePair& xi) {
  return std::pow(std::abs(xi.zeta), bp.p) < std::pow(std::abs(xi.eta), bp.q);
}

}  // namespace region

// Hessian-based operations are refused this close to the non-C^2 set.
constexpr double kUpsilonTol = 1e-9;

inline double eval_Q(const BellmanParams& bp, const StatePair& xi) {
  const double az = std::abs(xi.zeta), ae = std::abs(xi.eta);
  const double zp = std::pow(az, bp.p), eq = std::pow(ae, bp.q);
  double base = zp + eq;
  double extra;
  if (zp <= eq)
    extra = az * az * std::pow(ae, 2.0 - bp.q);
  else
    extra = (2.0 / bp.p) * zp + (2.0 / bp.q - 1.0) * eq;
  return base + bp.delta * extra;
}

/// Wirtinger derivatives (d_zeta Q, d_eta Q) with d_zeta = (d_1 - i d_2)/2.
/// Q is C^1 everywhere; on the branch interface both formulas agree.
inline std::pair<Complex, Complex> grad_Q(const BellmanParams& bp, const StatePair& xi) {
  const double az = std::abs(xi.zeta), ae = std::abs(xi.eta);
  const double zp = std::pow(az, bp.p), eq = std::pow(ae, bp.q);
  const Complex zbar = std::conj(xi.zeta), ebar = std::conj(xi.eta);

  auto rpow = [](double a, double e) { return a == 0.0 ? 0.0 : std::pow(a, e); };

  Complex dz = 0.5 * bp.p * rpow(az, bp.p - 2.0) * zbar;
  Complex de = 0.5 * bp.q * rpow(ae, bp.q - 2.0) * ebar;
  if (zp <= eq && ae > 0.0) {
    dz += bp.delta * rpow(ae, 2.0 - bp.q) * zbar;
    de += bp.delta * 0.5 * (2.0 - bp.q) * az * az * rpow(ae, -bp.q) * ebar;
  } else {
    dz += bp.delta * rpow(az, bp.p - 2.0) * zbar;
    de += bp.delta * (1.0 - 0.5 * bp.q) * rpow(ae, bp.q - 2.0) * ebar;
  }
  return {dz, de};
}

namespace detail {

// Hessian of |v|^r on R^2: r|v|^{r-2} I + r(r-2)|v|^{r-4} v v^T.
inline Mat2 power_hessian(const Vec2& v, double r) {
  double a = v.norm();
  if (a == 0.0) return Mat2::Zero();
  return r * std::pow(a, r - 2.0) * Mat2::Identity() +
         r * (r - 2.0) * std::pow(a, r - 4.0) * (v * v.transpose());
}

}  // namespace detail

/// Full 4x4 Hessian in coordinates (zeta1, zeta2, eta1, eta2).
/// Only defined off the non-C^2 set; rejects points within tolerance of it.
inline Mat4 hessian_Q(const BellmanParams& bp, const StatePair& xi,
                      double tol = kUpsilonTol) {
  if (region::in_upsilon0(bp, xi, tol))
    throw std::domain_error("hessian_Q: point too close to the non-C^2 set");

  const Vec2 z(xi.zeta.real(), xi.zeta.imag());
  const Vec2 e(xi.eta.real(), xi.eta.imag());
  const double az = z.norm(), ae = e.norm();
  const double zp = std::pow(az, bp.p), eq = std::pow(ae, bp.q);

  Mat4 H = Mat4::Zero();
  H.topLeftCorner<2, 2>() = detail::power_hessian(z, bp.p);
  H.bottomRightCorner<2, 2>() = detail::power_hessian(e, bp.q);

  if (zp < eq) {
    // delta |zeta|^2 |eta|^{2-q}
    const double c = 2.0 - bp.q;
    Mat2 zz = 2.0 * std::pow(ae, c) * Mat2::Identity();
    Mat2 ze = 2.0 * c * std::pow(ae, -bp.q) * (z * e.transpose());
    Mat2 ee = az * az *
              (c * std::pow(ae, -bp.q) * Mat2::Identity() -
               c * bp.q * std::pow(ae, -bp.q - 2.0) * (e * e.transpose()));
    H.topLeftCorner<2, 2>() += bp.delta * zz;
    H.topRightCorner<2, 2>() += bp.delta * ze;
    H.bottomLeftCorner<2, 2>() += bp.delta * ze.transpose();
    H.bottomRightCorner<2, 2>() += bp.delta * ee;
  } else {
    H.topLeftCorner<2, 2>() += bp.delta * (2.0 / bp.p) * detail::power_hessian(z, bp.p);
    H.bottomRightCorner<2, 2>() +=
        bp.delta * (2.0 / bp.q - 1.0) * detail::power_hessian(e, bp.q);
  }
  return H;
}

inline Mat2 rotation2(double phi) {
  Mat2 O;
  O << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return O;
}

/// Block rotation diag(O_phi, O_{-phi}).
inline Mat4 rotation4(double phi) {
  Mat4 U = Mat4::Zero();
  U.topLeftCorner<2, 2>() = rotation2(phi);
  U.bottomRightCorner<2, 2>() = rotation2(-phi);
  return U;
}

/// Reflection K(alpha) = [[cos a, sin a], [sin a, -cos a]]; K(a)^2 = I.
inline Mat2 kappa(double alpha) {
  Mat2 K;
  K << std::cos(alpha), std::sin(alpha), std::sin(alpha), -std::cos(alpha);
  return K;
}

/// D_{r,phi}(v) = (r/2)(I + (1-2/r)/cos(phi) K(2 theta - phi)), theta = polar angle of v.
/// tr = r and det = (r/2)^2 (1 - (cos phi_r / cos phi)^2).
inline Mat2 bakry_D(double r, double phi, const Vec2& v) {
  // r in (0,1) is admitted as well: the combination identities use D_{2-q,phi}.
  if (!(r > 0.0)) throw std::invalid_argument("bakry_D: requires r > 0");
  if (!(std::abs(phi) < M_PI / 2)) throw std::invalid_argument("bakry_D: |phi| < pi/2");
  if (v.norm() == 0.0) throw std::invalid_argument("bakry_D: polar angle of 0 undefined");
  double theta = std::atan2(v[1], v[0]);
  return 0.5 * r *
         (Mat2::Identity() + (1.0 - 2.0 / r) / std::cos(phi) * kappa(2.0 * theta - phi));
}

// 2x2 blocks of the Hessian and of its rotated companion, in the
// arrangement used by the region-by-region estimates.
struct HessianBlocks {
  Mat2 H1, H2, H3;  // H = [[H1, H2], [H2^T, H3]]
  Mat2 I1, I2, I3;  // companion blocks entering via tan(phi)
};

inline HessianBlocks hessian_blocks(const BellmanParams& bp, const StatePair& xi,
                                    double tol = kUpsilonTol) {
  const Mat4 H = hessian_Q(bp, xi, tol);
  HessianBlocks b;
  b.H1 = H.topLeftCorner<2, 2>();
  b.H2 = H.topRightCorner<2, 2>();
  b.H3 = H.bottomRightCorner<2, 2>();

  auto skew_pair = [](const Mat2& M) {
    Mat2 out;
    out << M(0, 1), 0.5 * (M(1, 1) - M(0, 0)), 0.5 * (M(1, 1) - M(0, 0)), -M(0, 1);
    return out;
  };
  b.I1 = skew_pair(b.H1);
  b.I3 = skew_pair(b.H3);
  // cross block: mixed second partials d2/(dzeta_i deta_j)
  b.I2 << 0.5 * (H(1, 2) - H(0, 3)), 0.5 * (H(0, 2) + H(1, 3)),
      -0.5 * (H(0, 2) + H(1, 3)), 0.5 * (H(1, 2) - H(0, 3));
  return b;
}

/// <H(Q)(xi) w, U_phi w>, which equals the symmetrized rotated-Hessian form.
inline double r_phi_form(const BellmanParams& bp, double phi, const StatePair& xi,
                         const Vec4& omega, double tol = kUpsilonTol) {
  if (!(std::abs(phi) < M_PI / 2)) throw std::invalid_argument("r_phi_form: |phi| < pi/2");
  Mat4 H = hessian_Q(bp, xi, tol);
  return (rotation4(phi) * omega).dot(H * omega);
}

/// r_phi_form minus the claimed lower bound 2 delta cos(phi) |w1| |w2|.
inline double convexity_gap(const BellmanParams& bp, double phi, const StatePair& xi,
                            const Vec4& omega, double tol = kUpsilonTol) {
  double w1 = omega.head<2>().norm(), w2 = omega.tail<2>().norm();
  return r_phi_form(bp, phi, xi, omega, tol) -
         2.0 * bp.delta * std::cos(phi) * w1 * w2;
}

namespace detail {

inline double directional_F(const BellmanParams& bp, double phi, Complex alpha,
                            Complex beta, const StatePair& xi) {
  auto [dz, de] = grad_Q(bp, xi);
  Complex ephi(std::cos(phi), std::sin(phi));
  return 2.0 * (ephi * alpha * dz + std::conj(ephi) * beta * de).real();
}

}  // namespace detail

/// Increment F(alpha+zeta, beta+eta) - F(zeta, eta) - 2 delta cos(phi) |alpha||beta|,
/// where F is the phi-rotated directional derivative of Q along (alpha, beta).
inline double f_increment(const BellmanParams& bp, double phi, Complex alpha,
                          Complex beta, Complex zeta, Complex eta) {
  double shifted = detail::directional_F(bp, phi, alpha, beta, {alpha + zeta, beta + eta});
  double base = detail::directional_F(bp, phi, alpha, beta, {zeta, eta});
  return shifted - base -
         2.0 * bp.delta * std::cos(phi) * std::abs(alpha) * std::abs(beta);
}

/// 2 sqrt(2/D - 4) - 16; equals 2 at D = 2/85.
inline double delta_calibration_check(double D) {
  if (!(D > 0.0 && D < 0.5))
    throw std::invalid_argument("delta_calibration_check: requires D in (0, 1/2)");
  return 2.0 * std::sqrt(2.0 / D - 4.0) - 16.0;
}

}  // namespace scs
