#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "scs/weighted_space.hpp"

namespace scs {

enum class NormMethod { Exact, PowerIteration, GridOracle };

struct NormRequest {
  NormMethod method = NormMethod::PowerIteration;
  int multistarts = 32;
  int max_iter = 500;
  double tol = 1e-8;
  std::uint64_t seed = 12345;
};

struct NormResult {
  double value = 0.0;
  Vec witness;       // ||B w||_p / ||w||_p == value up to tol
  bool converged = true;
};

namespace detail {

// Pointwise duality map J_r(v)_i = |v_i|^{r-1} sgn(v_i).
inline Vec duality_map(const Vec& v, double r) {
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    out[i] = (a == 0.0) ? Complex(0.0) : std::pow(a, r - 1.0) * (v[i] / a);
  }
  return out;
}

inline double rayleigh(const WeightedSpace& sp, const Mat& B, const Vec& x, double p) {
  double nx = lp_norm(sp, x, p);
  if (nx == 0.0) return 0.0;
  return lp_norm(sp, Vec(B * x), p) / nx;
}

// Nonlinear power iteration (Boyd). Monotone lower bounds; returns the best iterate.
inline NormResult power_iteration(const WeightedSpace& sp, const Mat& B, double p,
                                  const NormRequest& req) {
  const double q = p / (p - 1.0);
  const Mat Bt = nu_adjoint(sp, B);
  std::mt19937_64 rng(req.seed);
  std::normal_distribution<double> gauss;

  // Seeds: the l2 singular vector plus random real and complex starts.
  std::vector<Vec> starts;
  {
    RMat sq = sp.nu.cwiseSqrt().asDiagonal();
    RMat isq = sp.nu.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Mat> svd(sq.cast<Complex>() * B * isq.cast<Complex>(),
                              Eigen::ComputeThinV);
    starts.push_back(isq.cast<Complex>() * svd.matrixV().col(0));
  }
  for (int k = 1; k < req.multistarts; ++k) {
    Vec x(B.cols());
    bool complex_start = (k % 2 == 0);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = Complex(gauss(rng), complex_start ? gauss(rng) : 0.0);
    starts.push_back(std::move(x));
  }

  NormResult best;
  best.converged = false;
  for (auto& x0 : starts) {
    Vec x = x0;
    double nx = lp_norm(sp, x, p);
    if (nx == 0.0) continue;
    x /= nx;
    double prev = rayleigh(sp, B, x, p);
    bool conv = false;
    for (int it = 0; it < req.max_iter; ++it) {
      Vec y = B * x;
      if (lp_norm(sp, y, p) == 0.0) break;
      Vec z = Bt * duality_map(y, p);
      Vec xn = duality_map(z, q);
      double nn = lp_norm(sp, xn, p);
      if (nn == 0.0) break;
      x = xn / nn;
      double cur = rayleigh(sp, B, x, p);
      if (std::abs(cur - prev) <= req.tol * std::max(1.0, std::abs(cur))) {
        prev = cur;
        conv = true;
        break;
      }
      prev = cur;
    }
    if (prev > best.value) {
      best.value = prev;
      best.witness = x;
      best.converged = conv;
    }
  }
  return best;
}

// Dense search over the real unit sphere (spherical coordinates), with zooming.
// Only for n <= 4; brute-force reference for the power iteration.
inline NormResult grid_oracle(const WeightedSpace& sp, const Mat& B, double p) {
  const int n = static_cast<int>(B.cols());
  if (n > 4) throw std::invalid_argument("grid_oracle: n must be <= 4");
  const int na = n - 1;  // number of angles

  auto direction = [&](const std::vector<double>& th) {
    RVec d(n);
    double s = 1.0;
    for (int i = 0; i < na; ++i) {
      d[i] = s * std::cos(th[i]);
      s *= std::sin(th[i]);
    }
    d[n - 1] = s;
    return d;
  };
  auto value = [&](const std::vector<double>& th) {
    Vec d = direction(th).cast<Complex>();
    double nd = lp_norm(sp, d, p);
    return nd == 0.0 ? 0.0 : lp_norm(sp, Vec(B * d), p) / nd;
  };

  auto sweep = [&](const std::vector<double>& center, double half, int steps,
                   auto&& visit) {
    std::vector<int> idx(na, 0);
    std::vector<double> th(na);
    bool done = false;
    while (!done) {
      for (int i = 0; i < na; ++i)
        th[i] = center[i] - half + (2.0 * half) * idx[i] / (steps - 1);
      visit(value(th), th);
      int i = 0;
      while (i < na && ++idx[i] == steps) idx[i++] = 0;
      done = (i == na);
    }
  };

  // Coarse pass over the full sphere; keep several candidates since adjacent
  // local maxima can score within grid resolution of each other, then zoom
  // into each one independently.
  const int coarse = (na <= 2) ? 90 : 40;
  std::vector<std::pair<double, std::vector<double>>> pool;
  sweep(std::vector<double>(na, 0.0), M_PI, coarse,
        [&](double v, const std::vector<double>& th) { pool.push_back({v, th}); });
  std::partial_sort(pool.begin(), pool.begin() + std::min<std::size_t>(8, pool.size()),
                    pool.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  pool.resize(std::min<std::size_t>(8, pool.size()));

  double best = 0.0;
  std::vector<double> best_th(na, 0.0);
  for (auto& [v0, th0] : pool) {
    std::vector<double> center = th0, local_th = th0;
    double local = v0;
    double half = 2.0 * M_PI / coarse;
    for (int round = 0; round < 28; ++round) {
      sweep(center, half, 17, [&](double v, const std::vector<double>& th) {
        if (v > local) {
          local = v;
          local_th = th;
        }
      });
      center = local_th;
      half *= 0.5;
    }
    // Cyclic golden-section ascent: nested grids stall in curved valleys
    // (e.g. near the poles of the parametrization), 1-D line maxima do not.
    auto line_max = [&](std::vector<double>& th, int i) {
      const double gr = 0.61803398874989485;
      double a = th[i] - 0.15, b = th[i] + 0.15;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      th[i] = x1;
      double f1 = value(th);
      th[i] = x2;
      double f2 = value(th);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          th[i] = x2;
          f2 = value(th);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          th[i] = x1;
          f1 = value(th);
        }
      }
      th[i] = 0.5 * (a + b);
      return value(th);
    };
    for (int sweep_it = 0; sweep_it < 60; ++sweep_it) {
      double prev = local;
      for (int i = 0; i < na; ++i) local = std::max(local, line_max(local_th, i));
      if (local - prev <= 1e-14 * std::max(1.0, local)) break;
    }
    if (local > best) {
      best = local;
      best_th = local_th;
    }
  }
  NormResult res;
  res.value = best;
  res.witness = direction(best_th).cast<Complex>();
  res.witness /= lp_norm(sp, res.witness, p);
  return res;
}

}  // namespace detail

/// Operator norm on L^p(nu). Exact closed forms for p in {1, 2, inf};
/// otherwise a lower-bound estimator per the requested method.
inline NormResult op_norm(const WeightedSpace& sp, const Mat& B, double p,
                          const NormRequest& req = {}) {
  if (p < 1.0) throw std::invalid_argument("op_norm: p must be >= 1");
  const Eigen::Index n = B.cols();

  if (p == 1.0) {
    NormResult res;
    Eigen::Index jbest = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double col = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) col += sp.nu[i] * std::abs(B(i, j));
      col /= sp.nu[j];
      if (col > res.value) {
        res.value = col;
        jbest = j;
      }
    }
    res.witness = Vec::Zero(n);
    res.witness[jbest] = 1.0;
    return res;
  }
  if (std::isinf(p)) {
    NormResult res;
    Eigen::Index ibest = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = B.row(i).cwiseAbs().sum();
      if (row > res.value) {
        res.value = row;
        ibest = i;
      }
    }
    res.witness = Vec(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex b = B(ibest, j);
      res.witness[j] = (b == Complex(0.0)) ? Complex(1.0) : std::conj(b) / std::abs(b);
    }
    return res;
  }
  if (p == 2.0) {
    RMat sq = sp.nu.cwiseSqrt().asDiagonal();
    RMat isq = sp.nu.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Mat> svd(sq.cast<Complex>() * B * isq.cast<Complex>(),
                              Eigen::ComputeThinV);
    NormResult res;
    res.value = svd.singularValues()[0];
    res.witness = isq.cast<Complex>() * svd.matrixV().col(0);
    return res;
  }

  switch (req.method) {
    case NormMethod::GridOracle:
      return detail::grid_oracle(sp, B, p);
    case NormMethod::Exact:
      throw std::invalid_argument("op_norm: exact method only for p in {1,2,inf}");
    default:
      return detail::power_iteration(sp, B, p, req);
  }
}

}  // namespace scs
