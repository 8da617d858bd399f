#include "tleak/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "tleak/errors.hpp"

namespace tleak {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr double kMinOverlap = 0.5;
constexpr double kMaxExcludedFraction = 0.2;
constexpr std::size_t kMinHalfLzSamples = 20;
constexpr std::size_t kMinLengths = 5;

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
};

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw FitFailure("all abscissae coincide");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    f.ss_res += r * r;
    f.ss_tot += (y[i] - my) * (y[i] - my);
  }
  return f;
}

double r_squared(double ss_res, double ss_tot) { return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0; }

// Residuals of the rescaled half-LZ model: p = (K1, m1, K2, m2, phi) with
// y/y_ref = K1 x^m1 + K2 x^m2 cos(phi / x), x = v / v_ref, phi = omega / v_ref.
struct HalfLzFunctor : Eigen::DenseFunctor<double> {
  std::vector<double> x;
  std::vector<double> y;

  HalfLzFunctor(std::vector<double> xs, std::vector<double> ys)
      : Eigen::DenseFunctor<double>(5, static_cast<int>(xs.size())), x(std::move(xs)), y(std::move(ys)) {}

  int operator()(const InputType& p, ValueType& f) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      f[i] = p[0] * std::pow(x[i], p[1]) + p[2] * std::pow(x[i], p[3]) * std::cos(p[4] / x[i]) - y[i];
    }
    return 0;
  }

  int df(const InputType& p, JacobianType& j) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lx = std::log(x[i]);
      const double a = std::pow(x[i], p[1]);
      const double b = std::pow(x[i], p[3]);
      const double c = std::cos(p[4] / x[i]);
      const double s = std::sin(p[4] / x[i]);
      j(i, 0) = a;
      j(i, 1) = p[0] * a * lx;
      j(i, 2) = b * c;
      j(i, 3) = p[2] * b * c * lx;
      j(i, 4) = -p[2] * b * s / x[i];
    }
    return 0;
  }
};

}  // namespace

double FitResult::at(const std::string& name) const {
  auto it = parameters.find(name);
  if (it == parameters.end()) throw InvalidParameter("fit has no parameter '" + name + "'");
  return it->second;
}

double sudden_even_prediction(int n_sites, double mu_fin, double hopping) {
  if (n_sites < 2) throw InvalidParameter("n_sites must be >= 2");
  if (hopping == 0.0) throw InvalidParameter("hopping must be nonzero");
  return (n_sites - 2) * mu_fin * mu_fin / (32.0 * hopping * hopping);
}

double sudden_even_integral(int n_sites, double mu_in, double mu_fin, double hopping, double pairing) {
  if (n_sites < 2) throw InvalidParameter("n_sites must be >= 2");
  if (!is_topological(mu_in, hopping, pairing)) throw InvalidParameter("mu_in is not topological");
  const double dmu = mu_fin - mu_in;
  auto beta_sq = [&](double k) {
    const double e = bulk_energy(k, mu_in, hopping, pairing);
    const double beta = -2.0 * pairing * std::sin(k) * dmu / (2.0 * e * e);
    return beta * beta;
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      beta_sq, -std::numbers::pi, std::numbers::pi, 15, kQuadTol, &error);
  if (!(error <= kQuadTol) || !std::isfinite(integral)) {
    throw Error("Brillouin-zone quadrature did not converge (error estimate " + std::to_string(error) + ")");
  }
  return (n_sites - 2) / (2.0 * std::numbers::pi) * integral;
}

std::array<double, 4> mzm_overlaps(const ModeBasis& basis_in, const ModeBasis& basis_fin) {
  const auto gi = basis_in.mzm_vectors();
  const auto gf = basis_fin.mzm_vectors();
  std::array<double, 4> alpha{};
  for (int l = 0; l < 4; ++l) {
    // Overlaps of two tau_x kappa-invariant vectors are real.
    alpha[l] = gi[l].dot(gf[l]).real();
    if (std::abs(alpha[l]) < kMinOverlap) {
      throw DegenerateSubspace("MZM pairing is ambiguous: |alpha_" + std::to_string(l + 1) + "| = " +
                               std::to_string(std::abs(alpha[l])));
    }
  }
  return alpha;
}

double sudden_odd_prediction(const ModeBasis& basis_in, const ModeBasis& basis_fin) {
  ModeBasis fin = basis_fin;
  align_mzm_signs(fin, basis_in);
  const auto alpha = mzm_overlaps(basis_in, fin);
  return 0.5 * (1.0 - alpha[0] * alpha[1] * alpha[2] * alpha[3]);
}

SuddenPrediction sudden_prediction(const ModeBasis& basis_in, const ModeBasis& basis_fin, double hopping) {
  ModeBasis fin = basis_fin;
  align_mzm_signs(fin, basis_in);
  SuddenPrediction p;
  p.overlaps = mzm_overlaps(basis_in, fin);
  p.l_odd_tilde = 0.5 * (1.0 - p.overlaps[0] * p.overlaps[1] * p.overlaps[2] * p.overlaps[3]);
  p.l_even_tilde = sudden_even_prediction(basis_in.n_sites, basis_fin.mu - basis_in.mu, hopping);
  return p;
}

double near_adiabatic_even_envelope(int n_sites, double v) { return n_sites * v * v / 8.0; }

double dynamic_phase_frequency(double mu_fin, double gap) { return gap * mu_fin; }

double dynamic_phase_frequency_midramp(double mu_fin, double hopping) {
  return dynamic_phase_frequency(mu_fin, band_gap(0.5 * mu_fin, hopping));
}

FitResult fit_half_lz(const std::vector<std::pair<double, double>>& samples, const HalfLzOptions& options) {
  if (samples.size() < kMinHalfLzSamples) throw FitFailure("half-LZ fit needs at least 20 samples");
  std::vector<double> v, l;
  for (const auto& [vi, li] : samples) {
    if (!(vi > 0.0) || !std::isfinite(li)) throw FitFailure("half-LZ samples need v > 0 and finite L");
    v.push_back(vi);
    l.push_back(li);
  }
  const auto [vmin_it, vmax_it] = std::minmax_element(v.begin(), v.end());
  const double vmin = *vmin_it;
  const double vmax = *vmax_it;
  const std::size_t n = v.size();

  // Stage 1: omega grid, linear least squares for k1, k2 at m1 = m2 = 2.
  double best_omega = 0.0, best_k1 = 0.0, best_k2 = 0.0;
  double best_res = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(n));
  const int grid = static_cast<int>(std::floor(options.omega_max / options.omega_step + 0.5));
  for (int g = 1; g <= grid; ++g) {
    const double omega = g * options.omega_step;
    for (std::size_t i = 0; i < n; ++i) {
      a(i, 0) = v[i] * v[i];
      a(i, 1) = v[i] * v[i] * std::cos(omega / v[i]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 2) continue;
    const Eigen::Vector2d k = qr.solve(b);
    const double res = (a * k - b).squaredNorm();
    if (res < best_res) {
      best_res = res;
      best_omega = omega;
      best_k1 = k[0];
      best_k2 = k[1];
    }
  }
  if (!std::isfinite(best_res)) throw FitFailure("half-LZ grid search found no admissible frequency");

  // The window must hold at least one period in 1/v, sampled above the Nyquist rate.
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = 1.0 / v[i];
  std::sort(u.begin(), u.end());
  double max_gap = 0.0;
  for (std::size_t i = 1; i < n; ++i) max_gap = std::max(max_gap, u[i] - u[i - 1]);
  if (best_omega * (u.back() - u.front()) < 2.0 * std::numbers::pi || best_omega * max_gap >= std::numbers::pi) {
    throw FitFailure("degenerate window: oscillation period is not resolved");
  }

  // Stage 2: Levenberg-Marquardt in rescaled variables.
  const double v_ref = std::sqrt(vmin * vmax);
  double y_ref = 0.0;
  for (double li : l) y_ref = std::max(y_ref, std::abs(li));
  if (y_ref == 0.0) throw FitFailure("half-LZ samples are identically zero");
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = v[i] / v_ref;
    ys[i] = l[i] / y_ref;
  }
  HalfLzFunctor functor(xs, ys);
  Eigen::LevenbergMarquardt<HalfLzFunctor> lm(functor);
  lm.setFtol(options.ftol);
  lm.setXtol(options.ftol);
  lm.setMaxfev(options.max_evaluations);
  Eigen::VectorXd p(5);
  p << best_k1 * v_ref * v_ref / y_ref, 2.0, best_k2 * v_ref * v_ref / y_ref, 2.0, best_omega / v_ref;
  const Eigen::LevenbergMarquardtSpace::Status status = lm.minimize(p);
  // Statuses 6-8 mean the tolerances cannot be met because the residual stopped changing.
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
      status == Eigen::LevenbergMarquardtSpace::UserAsked || !p.allFinite()) {
    throw FitFailure("half-LZ refinement did not converge (status " + std::to_string(static_cast<int>(status)) + ")");
  }

  FitResult fit;
  fit.family = "half_lz";
  fit.parameters["k1"] = p[0] * y_ref / std::pow(v_ref, p[1]);
  fit.parameters["m1"] = p[1];
  fit.parameters["k2"] = p[2] * y_ref / std::pow(v_ref, p[3]);
  fit.parameters["m2"] = p[3];
  fit.parameters["omega"] = p[4] * v_ref;
  // cos is even in omega; report the positive branch.
  if (fit.parameters["omega"] < 0.0) fit.parameters["omega"] = -fit.parameters["omega"];
  double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
  for (double li : l) mean += li;
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double model = fit.parameters["k1"] * std::pow(v[i], fit.parameters["m1"]) +
                         fit.parameters["k2"] * std::pow(v[i], fit.parameters["m2"]) *
                             std::cos(fit.parameters["omega"] / v[i]);
    ss_res += (model - l[i]) * (model - l[i]);
    ss_tot += (l[i] - mean) * (l[i] - mean);
  }
  fit.residual_norm = std::sqrt(ss_res);
  fit.r_squared = r_squared(ss_res, ss_tot);
  fit.domain_min = vmin;
  fit.domain_max = vmax;
  fit.points_used = n;
  return fit;
}

FitResult fit_power_approach(const std::vector<std::pair<double, double>>& samples, double l_inf) {
  if (samples.size() < 2) throw FitFailure("power-approach fit needs at least 2 samples");
  std::vector<double> x, y;
  double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
  for (const auto& [v, l] : samples) {
    if (!(v > 0.0)) throw FitFailure("power-approach samples need v > 0");
    const double diff = l_inf - l;
    if (!(diff > 0.0)) continue;
    x.push_back(std::log(v));
    y.push_back(std::log(diff));
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const std::size_t excluded = samples.size() - x.size();
  if (excluded > kMaxExcludedFraction * samples.size()) {
    throw FitFailure(std::to_string(excluded) + " of " + std::to_string(samples.size()) +
                     " samples lie on or above the asymptote");
  }
  if (x.size() < 2) throw FitFailure("power-approach fit needs at least 2 usable samples");
  const LinearFit f = ols(x, y);
  FitResult fit;
  fit.family = "power_approach";
  fit.parameters["slope"] = f.slope;
  fit.parameters["intercept"] = f.intercept;
  fit.parameters["k"] = std::exp(f.intercept);
  fit.parameters["l_inf"] = l_inf;
  fit.residual_norm = std::sqrt(f.ss_res);
  fit.r_squared = r_squared(f.ss_res, f.ss_tot);
  fit.domain_min = vmin;
  fit.domain_max = vmax;
  fit.points_used = x.size();
  return fit;
}

FitResult fit_linear_in_n(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < kMinLengths) throw FitFailure("linear fit in N needs at least 5 lengths");
  std::vector<double> x, y;
  for (const auto& [n, l] : samples) {
    x.push_back(n);
    y.push_back(l);
  }
  const LinearFit f = ols(x, y);
  FitResult fit;
  fit.family = "linear_in_n";
  fit.parameters["slope"] = f.slope;
  fit.parameters["intercept"] = f.intercept;
  fit.residual_norm = std::sqrt(f.ss_res);
  fit.r_squared = r_squared(f.ss_res, f.ss_tot);
  fit.domain_min = *std::min_element(x.begin(), x.end());
  fit.domain_max = *std::max_element(x.begin(), x.end());
  fit.points_used = x.size();
  return fit;
}

}  // namespace tleak
