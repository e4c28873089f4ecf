#include "roentgen/quadrature.hpp"

#include "roentgen/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>

namespace roentgen {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208748929049, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes kXgk[1], kXgk[3], ... kXgk[9].
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEpsilon = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

double checked_eval(const ScalarFunction &f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "integrand is not finite at x = " << x;
    throw NumericalError(msg.str());
  }
  return v;
}

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

struct WorseFirst {
  bool operator()(const Panel &lhs, const Panel &rhs) const {
    if (lhs.error != rhs.error)
      return lhs.error < rhs.error;
    return lhs.a > rhs.a;
  }
};

Panel make_panel(const ScalarFunction &f, double a, double b) {
  const QuadratureResult r = gauss_kronrod_21(f, a, b);
  return {a, b, r.value, r.error_estimate};
}

std::vector<double> seeded_breakpoints(double a, double b, const std::vector<Feature> &features) {
  std::vector<double> pts{a, b};
  for (const Feature &feat : features) {
    if (!std::isfinite(feat.location))
      continue;
    const double w = std::abs(feat.width);
    pts.push_back(feat.location);
    if (w > 0.0)
      for (double k : {1.0, 10.0, 100.0}) {
        pts.push_back(feat.location - k * w);
        pts.push_back(feat.location + k * w);
      }
  }
  std::vector<double> inside;
  for (double p : pts)
    if (p >= a && p <= b)
      inside.push_back(p);
  std::sort(inside.begin(), inside.end());
  inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
  return inside;
}

} // namespace

QuadratureResult gauss_kronrod_21(const ScalarFunction &f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked_eval(f, center);
  double kronrod = kWgk[10] * fc;
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> f1{}, f2{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked_eval(f, center - dx);
    f2[j] = checked_eval(f, center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kWgk[j] * pair;
    abs_sum += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1)
      gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j)
    asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double scale = std::abs(half);
  const double result = kronrod * half;
  const double resabs = abs_sum * scale;
  const double resasc = asc * scale;
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > kTiny / (50.0 * kEpsilon))
    err = std::max(50.0 * kEpsilon * resabs, err);

  QuadratureResult out;
  out.value = result;
  out.error_estimate = err;
  out.evaluations = 21;
  out.panels = 1;
  out.converged = true;
  return out;
}

QuadratureResult integrate_adaptive(const ScalarFunction &f, double a, double b,
                                    const QuadratureOptions &options) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw ConfigError("integrate_adaptive requires finite a < b");

  std::priority_queue<Panel, std::vector<Panel>, WorseFirst> open;
  std::vector<Panel> frozen; // too narrow to bisect further
  std::size_t evaluations = 0;
  double total_value = 0.0;
  double total_error = 0.0;

  const std::vector<double> breaks = seeded_breakpoints(a, b, options.features);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel p = make_panel(f, breaks[i], breaks[i + 1]);
    evaluations += 21;
    total_value += p.value;
    total_error += p.error;
    open.push(p);
  }

  auto target = [&](double value) {
    return std::max(options.abs_tol, options.rel_tol * std::abs(value));
  };

  std::size_t panel_count = open.size();
  bool converged = total_error <= target(total_value);
  while (!converged && panel_count < options.max_panels && !open.empty()) {
    const Panel worst = open.top();
    open.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 4.0 * kEpsilon * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    const Panel left = make_panel(f, worst.a, mid);
    const Panel right = make_panel(f, mid, worst.b);
    evaluations += 42;
    ++panel_count;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
    converged = total_error <= target(total_value);
  }

  // Re-sum in a fixed (positional) order so the result does not carry the
  // rounding history of the running totals.
  std::vector<Panel> all = std::move(frozen);
  while (!open.empty()) {
    all.push_back(open.top());
    open.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel &l, const Panel &r) { return l.a < r.a; });
  QuadratureResult out;
  for (const Panel &p : all) {
    out.value += p.value;
    out.error_estimate += p.error;
  }
  out.evaluations = evaluations;
  out.panels = all.size();
  out.converged = out.error_estimate <= target(out.value);
  return out;
}

QuadratureResult integrate_adaptive(const ScalarFunction &f, double a, double b, double tol) {
  QuadratureOptions options;
  options.abs_tol = tol;
  options.rel_tol = tol;
  return integrate_adaptive(f, a, b, options);
}

//==============================================================================

std::vector<double> geometric_lambdas(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw ConfigError("geometric_lambdas requires 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = lo * std::exp(ratio * static_cast<double>(k));
  out.front() = lo;
  out.back() = hi;
  return out;
}

CutoffScan cutoff_scan(const ScalarFunction &f, double lower, const std::vector<double> &lambdas,
                       const QuadratureOptions &options) {
  if (lambdas.empty())
    throw ConfigError("cutoff_scan needs at least one cutoff");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double prev = k == 0 ? lower : lambdas[k - 1];
    if (!(lambdas[k] > prev))
      throw ConfigError("cutoff_scan cutoffs must be strictly increasing and above the lower limit");
  }

  CutoffScan scan;
  scan.lower = lower;
  double cumulative = 0.0;
  double error = 0.0;
  double left = lower;
  for (double lambda : lambdas) {
    QuadratureOptions panel = options;
    panel.features.clear();
    for (const Feature &feat : options.features)
      if (feat.location + 100.0 * std::abs(feat.width) >= left &&
          feat.location - 100.0 * std::abs(feat.width) <= lambda)
        panel.features.push_back(feat);
    const QuadratureResult r = integrate_adaptive(f, left, lambda, panel);
    cumulative += r.value;
    error += r.error_estimate;
    scan.evaluations += r.evaluations;
    scan.converged = scan.converged && r.converged;
    scan.points.push_back({lambda, cumulative, error});
    left = lambda;
  }
  return scan;
}

//==============================================================================

std::string to_string(TailKind kind) {
  switch (kind) {
  case TailKind::convergent:
    return "convergent";
  case TailKind::logarithmic:
    return "logarithmic";
  case TailKind::power:
    return "power";
  case TailKind::ambiguous:
    return "ambiguous";
  }
  return "ambiguous";
}

std::string TailClassification::label() const {
  if (kind != TailKind::power)
    return to_string(kind);
  char buf[64];
  std::snprintf(buf, sizeof buf, "power(%.2f)", exponent);
  return buf;
}

namespace {

struct LinearFit {
  Eigen::VectorXd coef;
  double rms = 0.0;
  double r_squared = 0.0;
};

LinearFit least_squares(const Eigen::MatrixXd &design, const Eigen::VectorXd &y) {
  LinearFit fit;
  fit.coef = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - design * fit.coef;
  fit.rms = std::sqrt(resid.squaredNorm() / static_cast<double>(y.size()));
  const double mean = y.mean();
  const double total = (y.array() - mean).square().sum();
  fit.r_squared = total > 0.0 ? 1.0 - resid.squaredNorm() / total : 1.0;
  return fit;
}

} // namespace

TailClassification classify_tail(const CutoffScan &scan, const TailOptions &options) {
  TailClassification out;

  std::vector<ScanPoint> window;
  for (const ScanPoint &p : scan.points)
    if (p.lambda >= options.asymptotic_start * (1.0 - 1e-12))
      window.push_back(p);
  out.points_used = window.size();
  if (window.size() < std::max<std::size_t>(options.min_points, 3)) {
    out.reason = "fewer than " + std::to_string(std::max<std::size_t>(options.min_points, 3)) +
                 " scan points in the asymptotic window";
    return out;
  }

  const double ratio = window[1].lambda / window[0].lambda;
  for (std::size_t k = 1; k < window.size(); ++k) {
    const double r = window[k].lambda / window[k - 1].lambda;
    if (std::abs(r / ratio - 1.0) > 1e-6)
      throw ConfigError("classify_tail requires geometrically spaced cutoffs");
  }
  const double log_ratio = std::log(ratio);

  const std::size_t m = window.size() - 1;
  std::vector<double> inc(m);
  std::vector<bool> negligible(m);
  for (std::size_t k = 0; k < m; ++k) {
    inc[k] = window[k + 1].cumulative - window[k].cumulative;
    const double floor = std::max(window[k + 1].error + window[k].error,
                                  1e-14 * std::abs(window[k + 1].cumulative));
    negligible[k] = inc[k] <= floor;
  }
  const double last_total = std::abs(window.back().cumulative);

  // Cauchy test on the final increments.
  if (negligible[m - 1] && negligible[m - 2]) {
    out.kind = TailKind::convergent;
    out.tail_estimate = 0.0;
    out.reason = "final increments below the quadrature noise floor";
    return out;
  }
  for (std::size_t k = 0; k < m; ++k)
    if (negligible[k] || inc[k] <= 0.0) {
      out.reason = "non-positive increment inside the window";
      return out;
    }

  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  const bool corrected = options.subleading_correction && m >= 4;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(m), corrected ? 3 : 2);
  for (std::size_t k = 0; k < m; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    y(i) = std::log(inc[k]);
    design(i, 0) = 1.0;
    design(i, 1) = std::log(window[k].lambda);
    if (corrected)
      design(i, 2) = 1.0 / window[k].lambda;
  }
  const LinearFit fit = least_squares(design, y);
  out.exponent = fit.coef(1);
  out.correction = corrected ? fit.coef(2) : 0.0;
  out.fit_residual = fit.rms;

  Eigen::VectorXd cum(static_cast<Eigen::Index>(window.size()));
  Eigen::MatrixXd lin(static_cast<Eigen::Index>(window.size()), 2);
  for (std::size_t k = 0; k < window.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    cum(i) = window[k].cumulative;
    lin(i, 0) = 1.0;
    lin(i, 1) = std::log(window[k].lambda);
  }
  out.log_r_squared = least_squares(lin, cum).r_squared;

  // Geometric extrapolation of the remaining sum from the last two increments.
  const double q = inc[m - 1] / inc[m - 2];
  const bool shrinking = q < 1.0;
  if (shrinking)
    out.tail_estimate = inc[m - 1] * q / (1.0 - q);

  if (fit.rms > options.power_residual_max) {
    if (shrinking && out.tail_estimate <= options.convergence_rtol * last_total) {
      out.kind = TailKind::convergent;
      out.reason = "increments shrink faster than any fitted power; remainder negligible";
    } else {
      out.reason = "no growth law fits the increments within the residual threshold";
    }
    return out;
  }

  if (out.exponent > options.flat_exponent) {
    out.kind = TailKind::power;
    out.reason = "power-law increments";
  } else if (out.exponent >= -options.flat_exponent) {
    if (out.log_r_squared >= options.log_r2_min) {
      out.kind = TailKind::logarithmic;
      out.reason = "constant increments per logarithmic step";
    } else {
      out.reason = "flat increments but cumulative not linear in ln(Lambda)";
    }
  } else {
    // Increments decay as Lambda^p with p < 0: geometric in k.
    const double rp = std::exp(out.exponent * log_ratio);
    out.tail_estimate = inc[m - 1] * rp / (1.0 - rp);
    out.kind = TailKind::convergent;
    out.reason = "power-law decaying increments (summable)";
  }
  return out;
}

} // namespace roentgen
