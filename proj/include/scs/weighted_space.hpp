#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace scs {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

/// Finite measure space: n points with strictly positive weights nu_i.
struct WeightedSpace {
  RVec nu;

  explicit WeightedSpace(RVec weights) : nu(std::move(weights)) {
    if (nu.size() == 0) throw std::invalid_argument("WeightedSpace: empty");
    for (Eigen::Index i = 0; i < nu.size(); ++i)
      if (!(nu[i] > 0.0))
        throw std::invalid_argument("WeightedSpace: weights must be positive");
  }

  Eigen::Index size() const { return nu.size(); }
  double total_mass() const { return nu.sum(); }
};

/// <f,g> = sum_i f_i conj(g_i) nu_i.
inline Complex pairing(const WeightedSpace& sp, const Vec& f, const Vec& g) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < sp.size(); ++i) acc += f[i] * std::conj(g[i]) * sp.nu[i];
  return acc;
}

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// (sum_i |f_i|^p nu_i)^{1/p}; max_i |f_i| for p = infinity.
inline double lp_norm(const WeightedSpace& sp, const Vec& f, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < sp.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sp.size(); ++i)
    acc += std::pow(std::abs(f[i]), p) * sp.nu[i];
  return std::pow(acc, 1.0 / p);
}

inline double lp_norm(const WeightedSpace& sp, const RVec& f, double p) {
  return lp_norm(sp, Vec(f.cast<Complex>()), p);
}

/// Adjoint with respect to the nu-weighted pairing: B' = D^{-1} B^H D.
inline Mat nu_adjoint(const WeightedSpace& sp, const Mat& B) {
  Mat out = B.adjoint();
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) *= sp.nu[j] / sp.nu[i];
  return out;
}

}  // namespace scs
