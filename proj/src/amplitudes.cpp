#include "roentgen/amplitudes.hpp"

#include "roentgen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace roentgen {

double detuning(double x, double delta, double epsilon) {
  return 1.0 - x * (1.0 - delta) - epsilon * x * x;
}

namespace {

double lorentz_denominator(double x, double delta, const DimensionlessParams &params) {
  const double d = detuning(x, delta, params.epsilon);
  const double denom = d * d + 0.25 * params.gamma_tilde * params.gamma_tilde;
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "on-resonance singularity: gamma_tilde = 0 and D = 0 at x = " << x;
    throw ConfigError(msg.str());
  }
  return denom;
}

void require_frequency(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw ConfigError("dimensionless frequency x must be finite and >= 0");
}

} // namespace

SpectralKernel spectral_kernel(const CouplingModel &model, double x, const UnitVector3 &n,
                               const Vec3 &beta, const DimensionlessParams &params,
                               const UnitVector3 &e_d) {
  require_frequency(x);
  const double sum = polarization_sum(model, beta, x, n, e_d, params.epsilon);
  return {x * sum / lorentz_denominator(x, n.dot(beta), params), model};
}

SpectralKernel spectral_kernel(const CouplingModel &model, double x,
                               const PolarizationBasis &basis, const Vec3 &beta,
                               const DimensionlessParams &params, const UnitVector3 &e_d) {
  require_frequency(x);
  const double sum = polarization_sum_basis(model, beta, x, basis, e_d, params.epsilon);
  return {x * sum / lorentz_denominator(x, basis.n.dot(beta), params), model};
}

double perpendicular_closed_form(double x, double delta, const DimensionlessParams &params) {
  require_frequency(x);
  const double num = 1.0 - delta - params.epsilon * x;
  return x * num * num / lorentz_denominator(x, delta, params);
}

double transient_factor(double x, double delta, const DimensionlessParams &params,
                        double tau) {
  if (std::isinf(tau))
    return 1.0;
  const std::complex<double> z(0.5 * params.gamma_tilde, detuning(x, delta, params.epsilon));
  return std::norm(1.0 - std::exp(-z * tau));
}

double transient_kernel(const CouplingModel &model, double x, const UnitVector3 &n,
                        const Vec3 &beta, const DimensionlessParams &params,
                        const UnitVector3 &e_d, double tau) {
  return spectral_kernel(model, x, n, beta, params, e_d).value *
         transient_factor(x, n.dot(beta), params, tau);
}

//==============================================================================

void DiscreteModeSystem::validate() const {
  const std::size_t n = x.size();
  if (weight.size() != n || coupling.size() != n)
    throw ConfigError("discrete mode system: x, weight and coupling must have equal length");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(x[j]) || !std::isfinite(coupling[j]))
      throw ConfigError("discrete mode system: non-finite mode frequency or coupling");
    if (!(weight[j] > 0.0))
      throw ConfigError("discrete mode system: weights must be positive");
    if (j > 0 && !(x[j] > x[j - 1]))
      throw ConfigError("discrete mode system: mode grid must be strictly increasing");
  }
  if (!(time_step > 0.0) || !(duration > 0.0))
    throw ConfigError("discrete mode system: time_step and duration must be positive");
  if (record_every == 0)
    throw ConfigError("discrete mode system: record_every must be >= 1");
}

double DiscreteModeSystem::effective_coupling(std::size_t j) const {
  return coupling[j] * std::sqrt(weight[j]);
}

double DiscreteModeSystem::golden_rule_rate() const {
  if (x.empty())
    return 0.0;
  double g = 0.0;
  if (atom_frequency <= x.front()) {
    g = coupling.front();
  } else if (atom_frequency >= x.back()) {
    g = coupling.back();
  } else {
    const auto it = std::upper_bound(x.begin(), x.end(), atom_frequency);
    const std::size_t hi = static_cast<std::size_t>(it - x.begin());
    const std::size_t lo = hi - 1;
    const double t = (atom_frequency - x[lo]) / (x[hi] - x[lo]);
    g = (1.0 - t) * coupling[lo] + t * coupling[hi];
  }
  return 2.0 * std::numbers::pi * g * g;
}

std::vector<double> EvolutionResult::final_mode_populations() const {
  std::vector<double> out(final_mode_amplitudes.size());
  std::transform(final_mode_amplitudes.begin(), final_mode_amplitudes.end(), out.begin(),
                 [](std::complex<double> b) { return std::norm(b); });
  return out;
}

namespace {

using cplx = std::complex<double>;

// y = (a, b_0 ... b_{n-1}); writes dy/dtau into out.
void mode_derivative(const std::vector<double> &c, const std::vector<double> &omega,
                     const std::vector<cplx> &y, std::vector<cplx> &out) {
  const std::size_t n = c.size();
  cplx acc = 0.0;
  const cplx a = y[0];
  for (std::size_t j = 0; j < n; ++j) {
    const cplx b = y[j + 1];
    acc += c[j] * b;
    out[j + 1] = cplx(omega[j] * b.imag(), -omega[j] * b.real()) + c[j] * a;
  }
  out[0] = -acc;
}

double state_norm(const std::vector<cplx> &y) {
  double s = 0.0;
  for (const cplx &v : y)
    s += std::norm(v);
  return s;
}

} // namespace

EvolutionResult discrete_mode_evolution(const DiscreteModeSystem &sys) {
  sys.validate();
  const std::size_t n = sys.x.size();
  std::vector<double> c(n), omega(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = sys.effective_coupling(j);
    omega[j] = sys.x[j] - sys.atom_frequency;
  }

  const auto steps = static_cast<std::size_t>(std::ceil(sys.duration / sys.time_step - 1e-9));
  const double h = sys.duration / static_cast<double>(steps);

  std::vector<cplx> y(n + 1, 0.0), k1(n + 1), k2(n + 1), k3(n + 1), k4(n + 1), tmp(n + 1);
  y[0] = 1.0;

  EvolutionResult result;
  auto record = [&](double t) {
    result.times.push_back(t);
    result.atom_population.push_back(std::norm(y[0]));
    if (sys.record_modes) {
      std::vector<double> pops(n);
      for (std::size_t j = 0; j < n; ++j)
        pops[j] = std::norm(y[j + 1]);
      result.mode_populations.push_back(std::move(pops));
    }
  };
  record(0.0);

  for (std::size_t step = 1; step <= steps; ++step) {
    mode_derivative(c, omega, y, k1);
    for (std::size_t i = 0; i <= n; ++i)
      tmp[i] = y[i] + 0.5 * h * k1[i];
    mode_derivative(c, omega, tmp, k2);
    for (std::size_t i = 0; i <= n; ++i)
      tmp[i] = y[i] + 0.5 * h * k2[i];
    mode_derivative(c, omega, tmp, k3);
    for (std::size_t i = 0; i <= n; ++i)
      tmp[i] = y[i] + h * k3[i];
    mode_derivative(c, omega, tmp, k4);
    for (std::size_t i = 0; i <= n; ++i)
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double drift = std::abs(state_norm(y) - 1.0);
    result.max_norm_drift = std::max(result.max_norm_drift, drift);
    if (!std::isfinite(drift))
      throw NumericalError("discrete mode evolution produced non-finite amplitudes");
    if (step % sys.record_every == 0 || step == steps)
      record(static_cast<double>(step) * h);
  }

  result.final_atom_amplitude = y[0];
  result.final_mode_amplitudes.assign(y.begin() + 1, y.end());
  if (result.max_norm_drift > kNormDriftLimit) {
    result.flagged = true;
    std::ostringstream msg;
    msg << "norm drift " << result.max_norm_drift << " exceeds " << kNormDriftLimit
        << "; reduce time_step";
    result.message = msg.str();
  }
  return result;
}

DiscreteModeSystem flat_band_system(std::size_t modes, double gamma_tilde, double half_width,
                                    double duration, double time_step, double atom_frequency) {
  if (modes < 2)
    throw ConfigError("flat band needs at least two modes");
  if (!(gamma_tilde > 0.0) || !(half_width > 0.0))
    throw ConfigError("flat band: gamma_tilde and half_width must be positive");
  DiscreteModeSystem sys;
  const double spacing = 2.0 * half_width / static_cast<double>(modes);
  const double g = std::sqrt(gamma_tilde / (2.0 * std::numbers::pi));
  sys.x.resize(modes);
  sys.weight.assign(modes, spacing);
  sys.coupling.assign(modes, g);
  for (std::size_t j = 0; j < modes; ++j)
    sys.x[j] = atom_frequency - half_width + (static_cast<double>(j) + 0.5) * spacing;
  sys.atom_frequency = atom_frequency;
  sys.duration = duration;
  sys.time_step = time_step;
  return sys;
}

std::vector<double> pole_mode_populations(const DiscreteModeSystem &sys, double gamma,
                                          double tau) {
  const std::size_t n = sys.x.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = sys.effective_coupling(j);
    const double d = sys.x[j] - sys.atom_frequency;
    double numerator = 1.0;
    if (!std::isinf(tau))
      numerator = std::norm(std::exp(-0.5 * gamma * tau) - std::exp(cplx(0.0, -d * tau)));
    out[j] = c * c * numerator / (d * d + 0.25 * gamma * gamma);
  }
  return out;
}

double fit_decay_rate(const std::vector<double> &times, const std::vector<double> &population,
                      double lo, double hi) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size() && i < population.size(); ++i) {
    const double p = population[i];
    if (p < lo || p > hi)
      continue;
    const double t = times[i];
    const double ly = std::log(p);
    st += t;
    sy += ly;
    stt += t * t;
    sty += t * ly;
    ++count;
  }
  if (count < 3)
    throw NumericalError("decay-rate fit: fewer than three samples in the fit window");
  const double m = static_cast<double>(count);
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  return -slope;
}

OracleComparison compare_with_pole_approximation(const DiscreteModeSystem &sys,
                                                 const EvolutionResult &result) {
  OracleComparison out;
  out.golden_rule_rate = sys.golden_rule_rate();
  out.fitted_rate = fit_decay_rate(result.times, result.atom_population);
  out.rate_relative_error =
      std::abs(out.fitted_rate - out.golden_rule_rate) / out.golden_rule_rate;

  const std::vector<double> ode = result.final_mode_populations();
  const std::vector<double> pole = pole_mode_populations(sys, out.golden_rule_rate);
  double diff = 0.0, ref = 0.0;
  for (std::size_t j = 0; j < ode.size(); ++j) {
    diff += (ode[j] - pole[j]) * (ode[j] - pole[j]);
    ref += pole[j] * pole[j];
  }
  out.distribution_l2_relative = std::sqrt(diff / ref);
  out.max_norm_drift = result.max_norm_drift;
  out.flagged = result.flagged;
  return out;
}

} // namespace roentgen
