#include "spinbath/engine.hpp"

#include <cmath>
#include <limits>

namespace spinbath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline Complex cis(double x) { return {std::cos(x), std::sin(x)}; }

// 2 Re(z e^{-i theta})
inline double two_re_rotated(Complex z, double cos_t, double sin_t) {
  return 2.0 * (z.real() * cos_t + z.imag() * sin_t);
}

void check_blocks(const SpinBathConfig& config, const ObservableSpec& obs,
                  const char* who) {
  if (obs.particle_blocks.size() != config.size())
    throw std::invalid_argument(std::string(who) +
                                ": observable block count does not match particle count");
}

inline double gamma0_factor(double t, const BathParticle& p, const HermitianBlock2& e) {
  const Complex z = std::conj(p.alpha) * p.beta * e.od;
  const double gt = p.g * t;
  return std::norm(p.alpha) * e.uu + std::norm(p.beta) * e.dd +
         two_re_rotated(z, std::cos(gt), std::sin(gt));
}

inline Complex gamma1_factor(double t, const BathParticle& p, const HermitianBlock2& e) {
  const Complex z = std::conj(p.alpha) * p.beta * e.od;
  const double gt = p.g * t;
  return std::norm(p.alpha) * e.uu * cis(gt) + std::norm(p.beta) * e.dd * cis(-gt) +
         2.0 * z.real();
}

double gamma0_real(double t, const SpinBathConfig& config, const ObservableSpec& obs) {
  double prod = 1.0;
  for (std::size_t i = 0; i < config.size(); ++i)
    prod *= gamma0_factor(t, config.particles[i], obs.particle_blocks[i]);
  return prod;
}

}  // namespace

Complex gamma0(double t, const SpinBathConfig& config, const ObservableSpec& obs) {
  check_blocks(config, obs, "gamma0");
  return {gamma0_real(t, config, obs), 0.0};
}

Complex gamma1(double t, const SpinBathConfig& config, const ObservableSpec& obs) {
  check_blocks(config, obs, "gamma1");
  Complex prod{1.0, 0.0};
  for (std::size_t i = 0; i < config.size(); ++i)
    prod *= gamma1_factor(t, config.particles[i], obs.particle_blocks[i]);
  return prod;
}

double expectation(double t, const SpinBathConfig& config, const ObservableSpec& obs) {
  check_blocks(config, obs, "expectation");
  const double diag = std::norm(config.a) * obs.system.uu * gamma0_real(t, config, obs) +
                      std::norm(config.b) * obs.system.dd * gamma0_real(-t, config, obs);
  const Complex cross = config.a * std::conj(config.b) * obs.system.od *
                        gamma1(t, config, obs);
  return diag + 2.0 * cross.real();
}

Complex r1_factor(double t, const BathParticle& p) {
  const double d = std::norm(p.alpha) - std::norm(p.beta);
  const double gt = p.g * t;
  return {std::cos(gt), d * std::sin(gt)};
}

Complex r1(double t, const SpinBathConfig& config) {
  Complex prod{1.0, 0.0};
  for (const BathParticle& p : config.particles) prod *= r1_factor(t, p);
  return prod;
}

double r1_modsq(double t, const SpinBathConfig& config) {
  double prod = 1.0;
  for (const BathParticle& p : config.particles) {
    const double a2 = std::norm(p.alpha);
    const double b2 = std::norm(p.beta);
    prod *= a2 * a2 + b2 * b2 + 2.0 * a2 * b2 * std::cos(2.0 * p.g * t);
  }
  return prod;
}

EnvelopeBounds envelope(const SpinBathConfig& config) {
  EnvelopeBounds bounds;
  bounds.per_factor_max.assign(config.size(), 1.0);
  bounds.per_factor_min.reserve(config.size());
  bounds.product_min = 1.0;
  bounds.product_max = 1.0;
  for (const BathParticle& p : config.particles) {
    const double d = 2.0 * std::norm(p.alpha) - 1.0;
    bounds.per_factor_min.push_back(d * d);
    bounds.product_min *= d * d;
  }
  return bounds;
}

double r2(double t, const BathParticle& particle, const HermitianBlock2& block) {
  return (particle.alpha * std::conj(particle.beta) * block.od * cis(particle.g * t))
      .real();
}

double case2_expectation(double t, const SpinBathConfig& config,
                         const std::vector<HermitianBlock2>& blocks) {
  if (blocks.empty() || blocks.size() > config.size())
    throw std::invalid_argument("case2_expectation: need 1 <= p <= particle count");
  double prod = 1.0;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    prod *= gamma0_factor(t, config.particles[i], blocks[i]);
  return prod;
}

double r3(double t, const SpinBathConfig& config, std::size_t p) {
  if (p == 0 || p > config.size())
    throw std::invalid_argument("r3: need 1 <= p <= particle count");
  const HermitianBlock2 sx = spin_x_block();
  double prod = 1.0;
  for (std::size_t i = 0; i < p; ++i) prod *= gamma0_factor(t, config.particles[i], sx);
  return prod;
}

// ---------------------------------------------------------------------------
// Underflow-safe products
// ---------------------------------------------------------------------------

namespace {
// Flush bounds on |block|^2: magnitudes stay within [1e-50, 1e50], far from
// both ends of the double range even after one more O(1) factor.
constexpr double kFlushLoNorm = 1e-100;
constexpr double kFlushHiNorm = 1e100;
}  // namespace

Complex LogProduct::value() const {
  const double mag = std::exp(log_magnitude);
  return {mag * std::cos(phase), mag * std::sin(phase)};
}

void LogProductAccumulator::flush() {
  flushed_.log_magnitude += std::log(std::abs(block_));
  flushed_.phase += std::arg(block_);
  block_ = {1.0, 0.0};
}

void LogProductAccumulator::push(Complex factor) {
  if (zero_) return;
  if (factor.real() == 0.0 && factor.imag() == 0.0) {
    zero_ = true;
    return;
  }
  const double fn = std::norm(factor);
  if (fn < kFlushLoNorm || fn > kFlushHiNorm) flush();
  block_ *= factor;
  const double bn = std::norm(block_);
  if (bn < kFlushLoNorm || bn > kFlushHiNorm) flush();
}

LogProduct LogProductAccumulator::result() const {
  if (zero_) return {-kInf, 0.0};
  LogProduct r = flushed_;
  r.log_magnitude += std::log(std::abs(block_));
  r.phase += std::arg(block_);
  return r;
}

LogProduct stable_product_accumulate(std::span<const Complex> factors) {
  LogProductAccumulator acc;
  for (const Complex& f : factors) acc.push(f);
  return acc.result();
}

LogProduct r1_log(double t, const SpinBathConfig& config) {
  LogProductAccumulator acc;
  for (const BathParticle& p : config.particles) acc.push(r1_factor(t, p));
  return acc.result();
}

namespace {

// Grid points between exact re-synchronizations of the rotation recurrence.
constexpr std::size_t kResyncInterval = 256;

LogSeries r1_log_series_recurrence(const SpinBathConfig& config,
                                   const std::vector<double>& times) {
  const std::size_t m = times.size();
  std::vector<double> log_mag(m, 0.0);
  std::vector<double> phase(m, 0.0);
  std::vector<Complex> block(m, Complex{1.0, 0.0});
  const double dt = m > 1 ? times[1] - times[0] : 0.0;

  for (const BathParticle& p : config.particles) {
    const double d = std::norm(p.alpha) - std::norm(p.beta);
    const Complex step = cis(p.g * dt);
    Complex rot{1.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      if (j % kResyncInterval == 0)
        rot = cis(p.g * times[j]);
      else
        rot *= step;
      const Complex f{rot.real(), d * rot.imag()};
      Complex& b = block[j];
      b *= f;
      const double bn = std::norm(b);
      if (bn < kFlushLoNorm || bn > kFlushHiNorm) {
        log_mag[j] += std::log(std::abs(b));
        phase[j] += std::arg(b);
        b = {1.0, 0.0};
      }
    }
  }

  LogSeries series;
  series.times = times;
  series.label = "r1_log";
  series.values.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    series.values[j].log_magnitude = log_mag[j] + std::log(std::abs(block[j]));
    series.values[j].phase = phase[j] + std::arg(block[j]);
  }
  return series;
}

}  // namespace

LogSeries r1_log_series(const SpinBathConfig& config, const TimeGrid& grid) {
  const std::vector<double> times = grid_times(grid);
  if (config.size() > kNaiveProductMaxParticles)
    return r1_log_series_recurrence(config, times);
  LogSeries series;
  series.times = times;
  series.label = "r1_log";
  series.values.reserve(times.size());
  for (double t : times) series.values.push_back(r1_log(t, config));
  return series;
}

// ---------------------------------------------------------------------------
// Series evaluation
// ---------------------------------------------------------------------------

namespace {

template <typename F>
DecoherenceSeries pointwise(const TimeGrid& grid, std::string label, F&& value_at) {
  DecoherenceSeries series;
  series.times = grid_times(grid);
  series.label = std::move(label);
  series.values.reserve(series.times.size());
  for (double t : series.times) series.values.push_back(value_at(t));
  return series;
}

}  // namespace

DecoherenceSeries series_gamma0(const SpinBathConfig& config, const ObservableSpec& obs,
                                const TimeGrid& grid) {
  check_blocks(config, obs, "series_gamma0");
  return pointwise(grid, "gamma0", [&](double t) { return gamma0(t, config, obs); });
}

DecoherenceSeries series_gamma1(const SpinBathConfig& config, const ObservableSpec& obs,
                                const TimeGrid& grid) {
  check_blocks(config, obs, "series_gamma1");
  return pointwise(grid, "gamma1", [&](double t) { return gamma1(t, config, obs); });
}

DecoherenceSeries series_expectation(const SpinBathConfig& config,
                                     const ObservableSpec& obs, const TimeGrid& grid) {
  check_blocks(config, obs, "series_expectation");
  return pointwise(grid, "expectation",
                   [&](double t) { return Complex{expectation(t, config, obs), 0.0}; });
}

DecoherenceSeries series_r1(const SpinBathConfig& config, const TimeGrid& grid) {
  if (config.size() > kNaiveProductMaxParticles) {
    const LogSeries logs = r1_log_series(config, grid);
    DecoherenceSeries series;
    series.times = logs.times;
    series.label = "r1";
    series.values.reserve(logs.values.size());
    for (const LogProduct& v : logs.values) series.values.push_back(v.value());
    return series;
  }
  return pointwise(grid, "r1", [&](double t) { return r1(t, config); });
}

DecoherenceSeries series_r1_modsq(const SpinBathConfig& config, const TimeGrid& grid) {
  return pointwise(grid, "r1_modsq",
                   [&](double t) { return Complex{r1_modsq(t, config), 0.0}; });
}

DecoherenceSeries series_r2(const BathParticle& particle, const HermitianBlock2& block,
                            const TimeGrid& grid) {
  return pointwise(grid, "r2",
                   [&](double t) { return Complex{r2(t, particle, block), 0.0}; });
}

DecoherenceSeries series_case2(const SpinBathConfig& config,
                               const std::vector<HermitianBlock2>& blocks,
                               const TimeGrid& grid) {
  if (blocks.empty() || blocks.size() > config.size())
    throw std::invalid_argument("series_case2: need 1 <= p <= particle count");
  return pointwise(grid, "case2", [&](double t) {
    return Complex{case2_expectation(t, config, blocks), 0.0};
  });
}

DecoherenceSeries series_r3(const SpinBathConfig& config, std::size_t p,
                            const TimeGrid& grid) {
  if (p == 0 || p > config.size())
    throw std::invalid_argument("series_r3: need 1 <= p <= particle count");
  return pointwise(grid, "r3", [&](double t) { return Complex{r3(t, config, p), 0.0}; });
}

DecoherenceSeries abs_series(const DecoherenceSeries& series) {
  DecoherenceSeries out;
  out.times = series.times;
  out.label = "abs_" + series.label;
  out.values.reserve(series.values.size());
  for (const Complex& v : series.values) out.values.push_back({std::abs(v), 0.0});
  return out;
}

}  // namespace spinbath
