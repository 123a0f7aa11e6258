#pragma once

#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "scs/flow.hpp"
#include "scs/sampling.hpp"

namespace scs {

/// Flat key=value configuration with CLI overrides layered on top.
/// `phi` entries are fractions of phi_{p_eps} so the sector endpoints can be
/// hit exactly for every (p, epsilon) cell.
struct ExperimentConfig {
  std::vector<double> p_grid{2.5, 4.0, 8.0, 20.0};
  std::vector<double> eps_grid{0.05, 0.25, 0.45};
  std::vector<double> phi_fracs{0.0, 0.5, -0.5, 1.0, -1.0};
  long samples = 0;  // 0 = per-subcommand default
  std::uint64_t seed = 1;
  int n_max = 12;
  std::string out_dir = "out";
  std::string manifest;  // multiplier manifest (hormander subcommand)

  long eff_samples(long fallback) const { return samples > 0 ? samples : fallback; }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list");
  return out;
}

}  // namespace detail

inline void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                              const std::string& value) {
  if (key == "p") cfg.p_grid = detail::parse_list(value);
  else if (key == "epsilon") cfg.eps_grid = detail::parse_list(value);
  else if (key == "phi") cfg.phi_fracs = detail::parse_list(value);
  else if (key == "samples") cfg.samples = std::stol(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "n_max") cfg.n_max = std::stoi(value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "manifest") cfg.manifest = value;
  else throw std::invalid_argument("unknown config key: " + key);
}

inline ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      auto e = s.find_last_not_of(" \t\r");
      s.erase(e == std::string::npos ? 0 : e + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    apply_config_line(cfg, key, value);
  }
  return cfg;
}

struct Row {
  double p = 0.0, epsilon = 0.0, phi = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  std::string quantity;
  double observed = 0.0, bound = 0.0, slack = 0.0;
  bool pass = true;
};

struct Report {
  std::vector<Row> rows;
  // rows with the multiplier-table schema (name,J,phi,hormander_norm,
  // reconstruction_error,C1); pass flags tracked separately.
  std::vector<std::string> table_lines;
  std::vector<bool> table_pass;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    for (bool b : table_pass)
      if (!b) return false;
    return true;
  }
};

namespace detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline Row make_row(double p, double eps, double phi, int n, std::uint64_t seed,
                    std::string quantity, double observed, double bound, double slack,
                    double tol) {
  Row r;
  r.p = p;
  r.epsilon = eps;
  r.phi = phi;
  r.n = n;
  r.seed = seed;
  r.quantity = std::move(quantity);
  r.observed = observed;
  r.bound = bound;
  r.slack = slack;
  r.pass = slack >= -tol;
  return r;
}

// Ordered fork/join over independent cells; results concatenated in cell order
// so reports are byte-identical regardless of scheduling.
inline std::vector<Row> run_cells(
    const std::vector<std::function<std::vector<Row>()>>& cells) {
  const std::size_t width =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::vector<Row> out;
  for (std::size_t base = 0; base < cells.size(); base += width) {
    std::vector<std::future<std::vector<Row>>> futs;
    for (std::size_t i = base; i < std::min(base + width, cells.size()); ++i)
      futs.push_back(std::async(std::launch::async, cells[i]));
    for (auto& fu : futs) {
      auto rows = fu.get();
      out.insert(out.end(), rows.begin(), rows.end());
    }
  }
  return out;
}

inline Vec random_cvec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v;
}

// Random connected weighted graph generator; a path backbone keeps the
// spectral gap bounded away from zero.
inline Generator random_generator(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RVec nu(n);
  for (int i = 0; i < n; ++i) nu[i] = 0.2 + 0.8 * unif(rng);
  RMat c = RMat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) c(i, i + 1) = c(i + 1, i) = 0.1 + 0.9 * unif(rng);
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j)
      if (unif(rng) < 0.3) c(i, j) = c(j, i) = unif(rng);
  return Generator::graph_laplacian(c, nu);
}

// ---- verify-convexity -------------------------------------------------------

inline std::vector<Row> convexity_cell(double p, double eps, double frac, long samples,
                                       std::uint64_t seed) {
  BellmanParams bp = make_params(p, eps);
  double phi = frac * bp.phi_p_eps;
  std::mt19937_64 rng(seed);

  double min_all = std::numeric_limits<double>::infinity();
  double min_good = min_all, min_bad = min_all;
  for (long i = 0; i < samples; ++i) {
    StatePair xi = sample_xi(rng, bp, static_cast<XiStratum>(i % kXiStrata));
    Vec4 w = sample_omega(rng);
    double g;
    try {
      g = convexity_gap(bp, phi, xi, w);
    } catch (const std::domain_error&) {
      continue;
    }
    min_all = std::min(min_all, g);
    if (region::in_good(bp, xi)) min_good = std::min(min_good, g);
    if (region::in_bad(bp, xi)) min_bad = std::min(min_bad, g);
  }

  double min_inc = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;
  for (long i = 0; i < std::max<long>(1, samples / 10); ++i) {
    auto rc = [&]() {
      double r = std::pow(10.0, -3.0 + 6.0 * unif(rng));
      double t = 2.0 * M_PI * unif(rng);
      return r * Complex(std::cos(t), std::sin(t));
    };
    min_inc = std::min(min_inc, f_increment(bp, phi, rc(), rc(), rc(), rc()));
  }

  std::vector<Row> rows;
  auto add = [&](const char* q, double v) {
    if (std::isfinite(v))
      rows.push_back(make_row(p, eps, phi, 0, seed, q, v, 0.0, v, 1e-10));
  };
  add("convexity_gap_min", min_all);
  add("convexity_gap_good_min", min_good);
  add("convexity_gap_bad_min", min_bad);
  add("f_increment_min", min_inc);
  return rows;
}

inline Report run_convexity(const ExperimentConfig& cfg) {
  long samples = cfg.eff_samples(20000);
  std::vector<std::function<std::vector<Row>()>> cells;
  std::size_t idx = 0;
  for (double p : cfg.p_grid)
    for (double eps : cfg.eps_grid)
      for (double frac : cfg.phi_fracs) {
        std::uint64_t seed = mix_seed(cfg.seed, idx++);
        cells.push_back([=] { return convexity_cell(p, eps, frac, samples, seed); });
      }
  Report rep;
  rep.rows = run_cells(cells);
  return rep;
}

// ---- bakry ------------------------------------------------------------------

inline double bakry_det_formula(double r, double phi) {
  double c = std::cos(sector_angle(r)) / std::cos(phi);
  return 0.25 * r * r * (1.0 - c * c);
}

inline Report run_bakry(const ExperimentConfig& cfg) {
  Report rep;
  std::mt19937_64 rng(mix_seed(cfg.seed, 7001));
  std::normal_distribution<double> gauss;
  for (double r : {1.1, 1.5, 2.0, 3.0, 10.0}) {
    double phi_r = sector_angle(r);
    Vec2 v(gauss(rng), gauss(rng));
    if (v.norm() < 1e-6) v = Vec2(1.0, 0.0);

    // At r = 2 the boundary angle is the sector edge pi/2 itself, so the
    // matrix is evaluated through the closed-form determinant only and the
    // outside-the-sector check is vacuous.
    double det;
    if (r == 2.0) det = bakry_det_formula(r, phi_r);
    else det = bakry_D(r, phi_r, v).determinant();
    rep.rows.push_back(make_row(r, 0.0, phi_r, 0, cfg.seed, "bakry_det_boundary",
                                std::abs(det), 1e-12, 1e-12 - std::abs(det), 0.0));

    double inside = bakry_D(r, phi_r - 0.01, v).eigenvalues().real().minCoeff();
    rep.rows.push_back(make_row(r, 0.0, phi_r - 0.01, 0, cfg.seed,
                                "bakry_min_eig_inside", inside, 0.0, inside, 1e-12));

    if (r != 2.0) {
      double outside = bakry_D(r, phi_r + 0.01, v).eigenvalues().real().minCoeff();
      rep.rows.push_back(make_row(r, 0.0, phi_r + 0.01, 0, cfg.seed,
                                  "bakry_min_eig_outside", outside, 0.0, -outside,
                                  0.0));
    }
  }
  return rep;
}

// ---- bilinear ---------------------------------------------------------------

inline std::vector<Row> bilinear_cell(double p, double eps, double frac, long samples,
                                      int n_max, std::uint64_t seed) {
  BellmanParams bp = make_params(p, eps);
  double phi = frac * bp.phi_p_eps;
  double bound_const = 30.0 * (p - 1.0) / (eps * std::cos(phi));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nsize(2, std::min(12, n_max));

  double max_ratio = 0.0, max_tail = 0.0;
  int worst_n = 0;
  for (long k = 0; k < samples; ++k) {
    Generator gen = random_generator(rng, nsize(rng));
    Vec f = random_cvec(rng, gen.size());
    Vec g = random_cvec(rng, gen.size());
    FlowSetup setup(gen, bp, phi, f, g);
    BilinearResult res = bilinear_integral(setup);
    double bound = bound_const * lp_norm(gen.space(), f, bp.p) *
                   lp_norm(gen.space(), g, bp.q);
    double ratio = res.value / bound;
    if (ratio > max_ratio) {
      max_ratio = ratio;
      worst_n = static_cast<int>(gen.size());
    }
    max_tail = std::max(max_tail, res.tail_bound);
  }

  // two-point closed form: a single positive eigenvalue 2 makes the integral
  // |2 fhat_1 conj(ghat_1)| / (4 cos phi) exactly.
  Generator tp = Generator::two_point();
  Vec f = random_cvec(rng, 2), g = random_cvec(rng, 2);
  FlowSetup setup(tp, bp, phi, f, g);
  double quad = bilinear_integral(setup).value;
  Vec fc = tp.analyze(f), gc = tp.analyze(g);
  double closed = std::abs(2.0 * fc[1] * std::conj(gc[1])) / (4.0 * std::cos(phi));
  double qerr = std::abs(quad - closed) / std::max(1e-300, closed);

  std::vector<Row> rows;
  rows.push_back(make_row(p, eps, phi, worst_n, seed, "bilinear_ratio_max", max_ratio,
                          1.0, 1.0 - max_ratio, 0.0));
  rows.push_back(make_row(p, eps, phi, worst_n, seed, "bilinear_tail_bound_max",
                          max_tail, 1e-10, 1e-10 - max_tail, 1e-17));
  rows.push_back(make_row(p, eps, phi, 2, seed, "bilinear_twopoint_quad_err", qerr,
                          1e-8, 1e-8 - qerr, 0.0));
  return rows;
}

inline Report run_bilinear(const ExperimentConfig& cfg) {
  long samples = cfg.eff_samples(200);
  std::vector<std::function<std::vector<Row>()>> cells;
  std::size_t idx = 0;
  for (double p : cfg.p_grid)
    for (double eps : cfg.eps_grid)
      for (double frac : cfg.phi_fracs) {
        std::uint64_t seed = mix_seed(cfg.seed, 10000 + idx++);
        cells.push_back(
            [=, n_max = cfg.n_max] { return bilinear_cell(p, eps, frac, samples, n_max, seed); });
      }
  Report rep;
  rep.rows = run_cells(cells);
  return rep;
}

// ---- monotonicity -----------------------------------------------------------

inline std::vector<Row> monotonicity_cell(double p, double eps, double frac,
                                          long pairs, std::uint64_t seed) {
  BellmanParams bp = make_params(p, eps);
  double phi = frac * bp.phi_p_eps;
  std::mt19937_64 rng(seed);

  std::vector<Generator> gens;
  gens.push_back(Generator::two_point());
  std::uniform_int_distribution<int> nsize(3, 6);
  gens.push_back(random_generator(rng, nsize(rng)));

  double min_gap = std::numeric_limits<double>::infinity();
  double max_fd_err = 0.0;
  for (const Generator& gen : gens) {
    double gap = gen.spectral_gap();
    for (long k = 0; k < pairs; ++k) {
      Vec f = random_cvec(rng, gen.size());
      Vec g = random_cvec(rng, gen.size());
      f /= lp_norm(gen.space(), f, bp.p);
      g /= lp_norm(gen.space(), g, bp.q);
      FlowSetup setup(gen, bp, phi, f, g);
      for (int j = 0; j < 12; ++j) {
        double t = std::pow(10.0, -3.0 + 4.0 * j / 11.0) / gap;
        min_gap = std::min(min_gap, monotonicity_gap(setup, t));

        if (k >= 5) continue;  // finite-difference audit on a few pairs only
        double h = 1e-5 * std::max(t, 0.1);
        bool crossing = false;
        for (double tt : {t - h, t, t + h}) {
          Vec F = gen.evolve(setup.z_plus(tt), f);
          Vec G = gen.evolve(std::conj(setup.z_plus(tt)), g);
          for (Eigen::Index i = 0; i < gen.size(); ++i)
            if (region::in_upsilon0(bp, {F[i], G[i]}, 1e-6)) crossing = true;
        }
        if (crossing) continue;
        double d = flow_E_derivative(setup, t);
        if (std::abs(d) < 1e-3) continue;  // FD loses all digits near stationary t
        double fd = (flow_E(setup, t + h) - flow_E(setup, t - h)) / (2.0 * h);
        max_fd_err = std::max(max_fd_err, std::abs(d - fd) / std::abs(d));
      }
    }
  }

  std::vector<Row> rows;
  rows.push_back(make_row(p, eps, phi, 0, seed, "monotonicity_gap_min", min_gap, 0.0,
                          min_gap, 1e-9));
  rows.push_back(make_row(p, eps, phi, 0, seed, "flow_deriv_fd_relerr_max", max_fd_err,
                          1e-6, 1e-6 - max_fd_err, 0.0));
  return rows;
}

inline Report run_monotonicity(const ExperimentConfig& cfg) {
  long pairs = cfg.eff_samples(60);
  std::vector<std::function<std::vector<Row>()>> cells;
  std::size_t idx = 0;
  for (double p : cfg.p_grid)
    for (double eps : cfg.eps_grid)
      for (double frac : cfg.phi_fracs) {
        std::uint64_t seed = mix_seed(cfg.seed, 20000 + idx++);
        cells.push_back([=] { return monotonicity_cell(p, eps, frac, pairs, seed); });
      }
  Report rep;
  rep.rows = run_cells(cells);
  return rep;
}

// ---- prop-p4 ----------------------------------------------------------------

inline std::vector<Row> prop_p4_cell(double p, double eps, double frac, long pairs,
                                     std::uint64_t seed) {
  BellmanParams bp = make_params(p, eps);
  double phi = frac * bp.phi_p_eps;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nsize(2, 10);
  Generator gen = random_generator(rng, nsize(rng));

  double min_gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 7; ++j) {
    double t = std::pow(10.0, -2.0 + 4.0 * j / 6.0);
    Mat T = gen.evolve_matrix(t);
    for (long k = 0; k < pairs; ++k) {
      Vec f = random_cvec(rng, gen.size());
      Vec g = random_cvec(rng, gen.size());
      f /= lp_norm(gen.space(), f, bp.p);
      g /= lp_norm(gen.space(), g, bp.q);
      min_gap = std::min(min_gap, prop_p4_gap(gen.space(), T, bp, phi, f, g));
    }
  }
  return {make_row(p, eps, phi, static_cast<int>(gen.size()), seed, "prop_p4_gap_min",
                   min_gap, 0.0, min_gap, 1e-9)};
}

inline Report run_prop_p4(const ExperimentConfig& cfg) {
  long pairs = cfg.eff_samples(150);
  std::vector<std::function<std::vector<Row>()>> cells;
  std::size_t idx = 0;
  for (double p : cfg.p_grid)
    for (double eps : cfg.eps_grid)
      for (double frac : cfg.phi_fracs) {
        std::uint64_t seed = mix_seed(cfg.seed, 30000 + idx++);
        cells.push_back([=] { return prop_p4_cell(p, eps, frac, pairs, seed); });
      }
  Report rep;
  rep.rows = run_cells(cells);
  return rep;
}

// ---- laplace-type -----------------------------------------------------------

struct PiecewiseM {
  std::vector<double> edges;   // ascending, >0
  std::vector<Complex> vals;   // vals[j] on [edges[j], edges[j+1]), 0 outside
  double sup = 0.0;

  Complex operator()(double t) const {
    for (std::size_t j = 0; j + 1 < edges.size(); ++j)
      if (t >= edges[j] && t < edges[j + 1]) return vals[j];
    return 0.0;
  }
};

inline PiecewiseM random_piecewise(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> npieces(1, 5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PiecewiseM m;
  int k = npieces(rng);
  for (int j = 0; j <= k; ++j)
    m.edges.push_back(std::pow(10.0, -2.0 + 4.0 * unif(rng)));
  std::sort(m.edges.begin(), m.edges.end());
  for (int j = 0; j < k; ++j) {
    double a = 2.0 * M_PI * unif(rng);
    double r = unif(rng);
    m.vals.push_back(r * Complex(std::cos(a), std::sin(a)));
    m.sup = std::max(m.sup, r);
  }
  return m;
}

inline std::vector<Row> laplace_cell(double p, long trials, int n_max,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nsize(2, std::min(8, n_max));
  double p_star = std::max(p, p / (p - 1.0));

  double min_margin = std::numeric_limits<double>::infinity();
  int worst_n = 0;
  for (long k = 0; k < trials; ++k) {
    Generator gen = random_generator(rng, nsize(rng));
    PiecewiseM m = random_piecewise(rng);
    if (m.sup == 0.0) continue;
    Vec f = gen.apply(random_cvec(rng, gen.size()));  // range of A
    double nf = lp_norm(gen.space(), f, p);
    if (nf == 0.0) continue;
    f /= nf;
    LaplaceOptions opt;
    opt.breakpoints = m.edges;
    double slack = laplace_transform_bound_check(
        gen, [m](double t) { return m(t); }, p, f, opt);
    double margin = slack / (120.0 * (p_star - 1.0) * m.sup);
    if (margin < min_margin) {
      min_margin = margin;
      worst_n = static_cast<int>(gen.size());
    }
  }
  return {make_row(p, 0.0, 0.0, worst_n, seed, "laplace_bound_margin_min", min_margin,
                   0.0, min_margin, 0.0)};
}

inline Report run_laplace(const ExperimentConfig& cfg) {
  long trials = cfg.eff_samples(25);
  std::vector<std::function<std::vector<Row>()>> cells;
  std::size_t idx = 0;
  for (double p : {1.2, 2.0, 3.0, 10.0}) {
    std::uint64_t seed = mix_seed(cfg.seed, 40000 + idx++);
    cells.push_back(
        [=, n_max = cfg.n_max] { return laplace_cell(p, trials, n_max, seed); });
  }
  Report rep;
  rep.rows = run_cells(cells);
  return rep;
}

// ---- imaginary-powers -------------------------------------------------------

inline std::vector<Row> imaginary_cell(int n, double p, std::uint64_t seed) {
  Generator gen = Generator::ehrenfest(n);
  const Eigen::Index sz = gen.size();
  Mat proj(sz, sz);
  for (Eigen::Index j = 0; j < sz; ++j) {
    Vec e = Vec::Zero(sz);
    e[j] = 1.0;
    proj.col(j) = e - gen.projection_P0(e);
  }
  double phi_star = sector_angle_star(p);

  auto restricted_norm = [&](double s, double pp) {
    Mat B(sz, sz);
    for (Eigen::Index j = 0; j < sz; ++j)
      B.col(j) = gen.imaginary_power(s, Vec(proj.col(j)));
    NormRequest req;
    req.multistarts = 8;
    req.max_iter = 200;
    req.seed = seed;
    return op_norm(gen.space(), B, pp, req).value;
  };

  auto shape = [&](double s) {
    return restricted_norm(s, p) / (std::sqrt(1.0 + std::abs(s)) *
                                    std::exp(phi_star * std::abs(s)));
  };

  double calib = std::max(shape(1.0), shape(-1.0));
  double max_ratio = 0.0, max_l2_dev = 0.0;
  for (int si = -20; si <= 20; ++si) {
    double s = si;
    max_ratio = std::max(max_ratio, shape(s) / calib);
    if (si != 0)
      max_l2_dev = std::max(max_l2_dev, std::abs(restricted_norm(s, 2.0) - 1.0));
  }

  std::vector<Row> rows;
  rows.push_back(make_row(p, 0.0, 0.0, n, seed, "imag_power_shape_ratio_max",
                          max_ratio, 10.0, 10.0 - max_ratio, 0.0));
  rows.push_back(make_row(p, 0.0, 0.0, n, seed, "imag_power_l2_dev_max", max_l2_dev,
                          1e-10, 1e-10 - max_l2_dev, 0.0));
  return rows;
}

inline Report run_imaginary(const ExperimentConfig& cfg) {
  std::vector<std::function<std::vector<Row>()>> cells;
  std::size_t idx = 0;
  for (int n : {4, 6, 8})
    for (double p : cfg.p_grid) {
      std::uint64_t seed = mix_seed(cfg.seed, 50000 + idx++);
      cells.push_back([=] { return imaginary_cell(n, p, seed); });
    }
  Report rep;
  rep.rows = run_cells(cells);
  return rep;
}

// ---- repr-formula -----------------------------------------------------------

inline std::vector<std::pair<std::string, MultiplierSpec>> repr_multipliers() {
  return {
      {"heat", {[](Complex l) { return std::exp(-l); }, 0.0}},
      {"resolvent", {[](Complex l) { return l / (1.0 + l); }, 0.0}},
      {"heat_osc", {[](Complex l) { return std::exp(-l) * std::sin(l); }, 0.0}},
  };
}

inline std::vector<Row> repr_cell(int which_gen, const std::string& mname,
                                  const MultiplierSpec& m, int n_max,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Generator gen = (which_gen == 0)   ? Generator::two_point()
                  : (which_gen == 1) ? Generator::ehrenfest(4)
                                     : random_generator(rng, std::min(8, n_max));
  Vec f = random_cvec(rng, gen.size());
  f -= gen.projection_P0(f);
  double nf = lp_norm(gen.space(), f, 2.0);
  f /= nf;

  Vec exact = gen.apply_multiplier(m, f);
  ReconstructResult rec = meda_reconstruct(gen, m, 0.5, 40.0, f);
  double err = lp_norm(gen.space(), Vec(rec.value - exact), 2.0) /
               std::max(1e-300, lp_norm(gen.space(), exact, 2.0));
  Row r = make_row(0.0, 0.0, 0.0, static_cast<int>(gen.size()), seed,
                   "repr_relerr_" + mname, err, 1e-5, 1e-5 - err, 0.0);
  if (!rec.tail_ok) r.pass = false;
  return {r};
}

inline Report run_repr(const ExperimentConfig& cfg) {
  std::vector<std::function<std::vector<Row>()>> cells;
  std::size_t idx = 0;
  for (int wg = 0; wg < 3; ++wg)
    for (const auto& [name, m] : repr_multipliers()) {
      std::uint64_t seed = mix_seed(cfg.seed, 60000 + idx++);
      cells.push_back([=, n_max = cfg.n_max, name = name, m = m] {
        return repr_cell(wg, name, m, n_max, seed);
      });
    }
  Report rep;
  rep.rows = run_cells(cells);
  return rep;
}

// ---- hormander --------------------------------------------------------------

inline MultiplierSpec multiplier_expression(const std::string& id) {
  if (id == "constant-one") return {[](Complex) { return Complex(1.0); }, 1.0};
  if (id == "heat") return {[](Complex l) { return std::exp(-l); }, 0.0};
  if (id == "resolvent") return {[](Complex l) { return l / (1.0 + l); }, 0.0};
  if (id == "heat-osc") return {[](Complex l) { return std::exp(-l) * std::sin(l); }, 0.0};
  if (id.rfind("imag-power-", 0) == 0) {
    double s = std::stod(id.substr(11));
    return {[s](Complex l) { return std::pow(l, Complex(0.0, s)); }, 0.0};
  }
  throw std::invalid_argument("unknown multiplier expression: " + id);
}

inline Report run_hormander(const ExperimentConfig& cfg) {
  nlohmann::json manifest;
  if (!cfg.manifest.empty()) {
    std::ifstream in(cfg.manifest);
    if (!in) throw std::invalid_argument("cannot open manifest: " + cfg.manifest);
    in >> manifest;
  } else {
    manifest = nlohmann::json::array(
        {{{"name", "heat"}, {"expression-id", "heat"}, {"J", 2.0}, {"phi", 0.3}},
         {{"name", "resolvent"},
          {"expression-id", "resolvent"},
          {"J", 2.0},
          {"phi", 0.3}},
         {{"name", "imag5"},
          {"expression-id", "imag-power-5"},
          {"J", 2.0},
          {"phi", 0.2}}});
  }

  Report rep;
  Generator gen = Generator::ehrenfest(4);
  std::size_t idx = 0;
  for (const auto& item : manifest) {
    std::string name = item.at("name").get<std::string>();
    std::string expr = item.at("expression-id").get<std::string>();
    double J = item.at("J").get<double>();
    double phi = item.at("phi").get<double>();
    MultiplierSpec m = multiplier_expression(expr);

    HormanderConfig hc;
    hc.J = J;
    HormanderResult hn = hormander_norm(m, phi, hc);

    std::mt19937_64 rng(mix_seed(cfg.seed, 70000 + idx++));
    Vec f = random_cvec(rng, gen.size());
    f -= gen.projection_P0(f);
    f /= lp_norm(gen.space(), f, 2.0);
    Vec exact = gen.apply_multiplier(m, f);
    ReconstructResult rec = meda_reconstruct(gen, m, 0.5, 40.0, f);
    double err = lp_norm(gen.space(), Vec(rec.value - exact), 2.0) /
                 std::max(1e-300, lp_norm(gen.space(), exact, 2.0));

    double c1 = meda_constant(gen, m, 4.0, J);

    rep.table_lines.push_back(name + "," + fmt(J) + "," + fmt(phi) + "," +
                              fmt(hn.value) + "," + fmt(err) + "," + fmt(c1));
    rep.table_pass.push_back(hn.converged && rec.tail_ok && err <= 1e-4);
  }
  return rep;
}

}  // namespace detail

inline const std::vector<std::string>& subcommand_list() {
  static const std::vector<std::string> names = {
      "verify-convexity", "bakry",            "bilinear",     "monotonicity",
      "prop-p4",          "laplace-type",     "imaginary-powers",
      "repr-formula",     "hormander"};
  return names;
}

inline Report run(const std::string& subcommand, const ExperimentConfig& cfg) {
  if (subcommand == "verify-convexity") return detail::run_convexity(cfg);
  if (subcommand == "bakry") return detail::run_bakry(cfg);
  if (subcommand == "bilinear") return detail::run_bilinear(cfg);
  if (subcommand == "monotonicity") return detail::run_monotonicity(cfg);
  if (subcommand == "prop-p4") return detail::run_prop_p4(cfg);
  if (subcommand == "laplace-type") return detail::run_laplace(cfg);
  if (subcommand == "imaginary-powers") return detail::run_imaginary(cfg);
  if (subcommand == "repr-formula") return detail::run_repr(cfg);
  if (subcommand == "hormander") return detail::run_hormander(cfg);
  throw std::invalid_argument("unknown subcommand: " + subcommand);
}

inline std::string report_csv(const Report& rep) {
  std::string out;
  if (!rep.table_lines.empty()) {
    out = "name,J,phi,hormander_norm,reconstruction_error,C1\n";
    for (const auto& l : rep.table_lines) out += l + "\n";
    return out;
  }
  out = "p,epsilon,phi,n,seed,quantity,observed,bound,slack,pass\n";
  for (const Row& r : rep.rows) {
    out += detail::fmt(r.p) + "," + detail::fmt(r.epsilon) + "," + detail::fmt(r.phi) +
           "," + std::to_string(r.n) + "," + std::to_string(r.seed) + "," +
           r.quantity + "," + detail::fmt(r.observed) + "," + detail::fmt(r.bound) +
           "," + detail::fmt(r.slack) + "," + (r.pass ? "1" : "0") + "\n";
  }
  return out;
}

inline nlohmann::json report_summary(const std::string& subcommand, const Report& rep) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["pass"] = rep.all_pass();
  if (!rep.table_lines.empty()) {
    j["rows"] = rep.table_lines.size();
    std::size_t fails = 0;
    for (bool b : rep.table_pass)
      if (!b) ++fails;
    j["failures"] = fails;
    return j;
  }
  j["rows"] = rep.rows.size();
  std::size_t fails = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const Row& r : rep.rows) {
    if (!r.pass) ++fails;
    min_slack = std::min(min_slack, r.slack);
  }
  j["failures"] = fails;
  if (std::isfinite(min_slack)) j["min_slack"] = min_slack;
  return j;
}

}  // namespace scs
