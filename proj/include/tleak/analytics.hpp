#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tleak/model.hpp"

namespace tleak {

struct FitResult {
  std::string family;
  std::map<std::string, double> parameters;
  double residual_norm = 0.0;
  double r_squared = 0.0;
  double domain_min = 0.0;
  double domain_max = 0.0;
  std::size_t points_used = 0;

  double at(const std::string& name) const;
};

struct SuddenPrediction {
  double l_even_tilde = 0.0;
  double l_odd_tilde = 0.0;
  std::array<double, 4> overlaps{};  // alpha_l = <gamma_l(mu_in)|gamma_l(mu_fin)>
};

// (N - 2) mu_fin^2 / (32 w^2): the bulk-mode count times the Brillouin-zone average of
// |beta_k|^2 for a quench from mu = 0 at Delta = w. Equals (N - 2) mu_fin^2 / 8 at w = 1/2.
double sudden_even_prediction(int n_sites, double mu_fin, double hopping = 0.5);

// ((N - 2) / 2 pi) * integral over [-pi, pi] of |beta_k|^2 with
// beta_k = -2 Delta sin k (mu_fin - mu_in) / (2 E_bulk(k, mu_in)^2), adaptive Gauss-Kronrod.
double sudden_even_integral(int n_sites, double mu_in, double mu_fin, double hopping, double pairing);

// alpha_l for the four MZMs. Throws DegenerateSubspace if any |alpha_l| < 0.5.
std::array<double, 4> mzm_overlaps(const ModeBasis& basis_in, const ModeBasis& basis_fin);

// (1 - prod_l alpha_l) / 2
double sudden_odd_prediction(const ModeBasis& basis_in, const ModeBasis& basis_fin);

SuddenPrediction sudden_prediction(const ModeBasis& basis_in, const ModeBasis& basis_fin, double hopping = 0.5);

// N v^2 / 8
double near_adiabatic_even_envelope(int n_sites, double v);

// omega = gap * mu_fin, the coefficient of 1/v in the odd-sector oscillation. The even
// sector oscillates at twice this value.
double dynamic_phase_frequency(double mu_fin, double gap);
// Same with the gap taken at mid-ramp, |2w - mu_fin/2|.
double dynamic_phase_frequency_midramp(double mu_fin, double hopping);

struct HalfLzOptions {
  double omega_max = 0.2;
  double omega_step = 1e-4;
  double ftol = 1e-10;
  int max_evaluations = 4000;
};

// L = k1 v^m1 + k2 v^m2 cos(omega / v): grid search in omega with m1 = m2 = 2, then
// Levenberg-Marquardt on all five parameters.
FitResult fit_half_lz(const std::vector<std::pair<double, double>>& samples, const HalfLzOptions& options = {});

// log(l_inf - L) = log k + m log v over the samples with l_inf - L > 0.
FitResult fit_power_approach(const std::vector<std::pair<double, double>>& samples, double l_inf);

// Ordinary least squares L = slope N + intercept.
FitResult fit_linear_in_n(const std::vector<std::pair<double, double>>& samples);

}  // namespace tleak
