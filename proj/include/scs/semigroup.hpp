#pragma once

#include <functional>
#include <nlohmann/json.hpp>

#include "scs/opnorms.hpp"
#include "scs/weighted_space.hpp"

namespace scs {

/// A spectral function: values on the positive axis (or a sector) plus a
/// separate value at zero.
struct MultiplierSpec {
  std::function<Complex(Complex)> spectral_fn;
  Complex value_at_zero = 0.0;

  Complex operator()(Complex lambda) const { return spectral_fn(lambda); }
  Complex at(double lambda, double zero_tol = 1e-12) const {
    return lambda <= zero_tol ? value_at_zero : spectral_fn(Complex(lambda, 0.0));
  }
};

/// nu-self-adjoint positive semidefinite matrix with cached eigendecomposition;
/// realizes a symmetric contraction semigroup at finite scale.
class Generator {
 public:
  // Validated construction from an arbitrary matrix. Checks nu-self-adjointness,
  // nonnegative spectrum and a sampled L^1/L^inf contraction certificate.
  Generator(WeightedSpace space, RMat A) : space_(std::move(space)), A_(std::move(A)) {
    const Eigen::Index n = space_.size();
    if (A_.rows() != n || A_.cols() != n)
      throw std::invalid_argument("Generator: matrix/space size mismatch");

    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(space_.nu[i] * A_(i, j) - space_.nu[j] * A_(j, i)) >
            1e-10 * (1.0 + A_.cwiseAbs().maxCoeff()))
          throw std::invalid_argument("Generator: not nu-self-adjoint");

    // Conjugate by diag(sqrt(nu)) and use a symmetric solver.
    RVec sq = space_.nu.cwiseSqrt();
    RMat S = sq.asDiagonal() * A_ * sq.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es(S);
    eigenvalues_ = es.eigenvalues();
    eigvecs_ = sq.cwiseInverse().asDiagonal() * es.eigenvectors();

    if (eigenvalues_.minCoeff() < -1e-10 * std::max(1.0, eigenvalues_.maxCoeff()))
      throw std::invalid_argument("Generator: spectrum not nonnegative");
    for (Eigen::Index k = 0; k < n; ++k)
      if (eigenvalues_[k] < 0.0) eigenvalues_[k] = 0.0;

    check_contraction_certificate();
  }

  /// Heat generator on the two-point space {a, b} with weights (1/2, 1/2).
  static Generator two_point() {
    RMat G(2, 2);
    G << 1.0, -1.0, -1.0, 1.0;
    return Generator(WeightedSpace(RVec::Constant(2, 0.5)), G);
  }

  /// (Af)_i = sum_j c_ij (f_i - f_j) / nu_i with symmetric conductances.
  static Generator graph_laplacian(const RMat& conductance, const RVec& nu) {
    const Eigen::Index n = nu.size();
    if (conductance.rows() != n || conductance.cols() != n)
      throw std::invalid_argument("graph_laplacian: size mismatch");
    if (!conductance.isApprox(conductance.transpose(), 1e-12))
      throw std::invalid_argument("graph_laplacian: conductances must be symmetric");
    if (conductance.minCoeff() < 0.0)
      throw std::invalid_argument("graph_laplacian: conductances must be nonnegative");
    RMat A = RMat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        A(i, i) += conductance(i, j) / nu[i];
        A(i, j) -= conductance(i, j) / nu[i];
      }
    return Generator(WeightedSpace(nu), A);
  }

  /// Birth-death chain on {0..n} with binomial(n, 1/2) stationary weights;
  /// eigenvalues are exactly {2k/n : k = 0..n}.
  static Generator ehrenfest(int n) {
    if (n < 1) throw std::invalid_argument("ehrenfest: n >= 1");
    RVec nu(n + 1);
    double binom = 1.0;
    for (int i = 0; i <= n; ++i) {
      nu[i] = binom / std::pow(2.0, n);
      binom = binom * (n - i) / (i + 1.0);
    }
    RMat A = RMat::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
      A(i, i) = 1.0;
      if (i < n) A(i, i + 1) = -(n - i) / double(n);
      if (i > 0) A(i, i - 1) = -i / double(n);
    }
    return Generator(WeightedSpace(nu), A);
  }

  const WeightedSpace& space() const { return space_; }
  const RMat& matrix() const { return A_; }
  const RVec& eigenvalues() const { return eigenvalues_; }
  const RMat& eigenvectors() const { return eigvecs_; }
  Eigen::Index size() const { return space_.size(); }

  double spectral_gap() const {
    double gap = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
      if (eigenvalues_[k] > kZeroEigTol && (gap == 0.0 || eigenvalues_[k] < gap))
        gap = eigenvalues_[k];
    return gap;
  }

  /// Coefficients <f, e_k>_nu in the nu-orthonormal eigenbasis.
  Vec analyze(const Vec& f) const {
    Vec c(size());
    for (Eigen::Index k = 0; k < size(); ++k) {
      Complex acc = 0.0;
      for (Eigen::Index i = 0; i < size(); ++i)
        acc += f[i] * eigvecs_(i, k) * space_.nu[i];
      c[k] = acc;
    }
    return c;
  }

  Vec synthesize(const Vec& c) const { return eigvecs_.cast<Complex>() * c; }

  /// exp(-zA) f for Re z >= 0.
  Vec evolve(Complex z, const Vec& f) const {
    if (z.real() < 0.0) throw std::invalid_argument("evolve: requires Re z >= 0");
    Vec c = analyze(f);
    for (Eigen::Index k = 0; k < size(); ++k) c[k] *= std::exp(-z * eigenvalues_[k]);
    return synthesize(c);
  }

  Vec apply(const Vec& f) const { return A_.cast<Complex>() * f; }

  /// Spectral projection onto the null space.
  Vec projection_P0(const Vec& f) const {
    Vec c = analyze(f);
    for (Eigen::Index k = 0; k < size(); ++k)
      if (eigenvalues_[k] > kZeroEigTol) c[k] = 0.0;
    return synthesize(c);
  }

  Vec apply_multiplier(const MultiplierSpec& m, const Vec& f) const {
    Vec c = analyze(f);
    for (Eigen::Index k = 0; k < size(); ++k) c[k] *= m.at(eigenvalues_[k], kZeroEigTol);
    return synthesize(c);
  }

  /// lambda^{is} on the positive spectrum, 0 on the null space.
  Vec imaginary_power(double s, const Vec& f) const {
    return apply_multiplier(imaginary_power_spec(s), f);
  }

  static MultiplierSpec imaginary_power_spec(double s) {
    return {[s](Complex lambda) { return std::pow(lambda, Complex(0.0, s)); }, 0.0};
  }

  /// Dense matrix of f -> m(A) f.
  Mat multiplier_matrix(const MultiplierSpec& m) const {
    Mat M(size(), size());
    for (Eigen::Index j = 0; j < size(); ++j) {
      Vec e = Vec::Zero(size());
      e[j] = 1.0;
      M.col(j) = apply_multiplier(m, e);
    }
    return M;
  }

  Mat evolve_matrix(Complex z) const {
    return multiplier_matrix(
        {[z](Complex lambda) { return std::exp(-z * lambda); }, std::exp(-z * 0.0)});
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["weights"] = std::vector<double>(space_.nu.data(), space_.nu.data() + size());
    auto& rows = j["matrix"];
    for (Eigen::Index i = 0; i < size(); ++i)
      rows.push_back(std::vector<double>(A_.row(i).begin(), A_.row(i).end()));
    return j;
  }

  static Generator from_json(const nlohmann::json& j) {
    auto w = j.at("weights").get<std::vector<double>>();
    RVec nu = Eigen::Map<const RVec>(w.data(), static_cast<Eigen::Index>(w.size()));
    RMat A(nu.size(), nu.size());
    const auto& rows = j.at("matrix");
    for (Eigen::Index i = 0; i < nu.size(); ++i) {
      auto r = rows.at(i).get<std::vector<double>>();
      A.row(i) = Eigen::Map<const RVec>(r.data(), nu.size());
    }
    return Generator(WeightedSpace(std::move(nu)), std::move(A));
  }

  static constexpr double kZeroEigTol = 1e-9;

 private:
  void check_contraction_certificate() const {
    for (double t : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
      Mat T = evolve_matrix(t);
      if (op_norm(space_, T, 1.0).value > 1.0 + 1e-12 ||
          op_norm(space_, T, kInfExponent).value > 1.0 + 1e-12)
        throw std::invalid_argument("Generator: semigroup is not an L^1/L^inf contraction");
    }
  }

  WeightedSpace space_;
  RMat A_;
  RVec eigenvalues_;
  RMat eigvecs_;  // columns nu-orthonormal
};

/// Operator whose nu-kernel is the entrywise absolute value of T's kernel.
/// Since the kernel is K_ij = T_ij / nu_j, this is just the entrywise |T_ij|.
inline Mat linear_modulus(const Mat& T) { return T.cwiseAbs().cast<Complex>(); }

}  // namespace scs
