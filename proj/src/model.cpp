#include "spinbath/model.hpp"

#include <cmath>
#include <sstream>

namespace spinbath {

std::array<Complex, 4> system_block_matrix(const HermitianBlock2& b) {
  // od is the down-up (lower-left) entry for the system role.
  return {Complex{b.uu, 0.0}, std::conj(b.od), b.od, Complex{b.dd, 0.0}};
}

std::array<Complex, 4> particle_block_matrix(const HermitianBlock2& b) {
  // od is the up-down (upper-right) entry for the particle role.
  return {Complex{b.uu, 0.0}, b.od, std::conj(b.od), Complex{b.dd, 0.0}};
}

std::vector<double> grid_times(const TimeGrid& grid) {
  if (grid.steps == 0) throw std::invalid_argument("time grid: steps must be >= 1");
  if (!(grid.t_start <= grid.t_end))
    throw std::invalid_argument("time grid: t_start must be <= t_end");
  if (grid.steps == 1) return {grid.t_start};
  if (grid.t_start == grid.t_end)
    throw std::invalid_argument("time grid: multiple steps need t_start < t_end");
  std::vector<double> times(grid.steps);
  const double dt = (grid.t_end - grid.t_start) / static_cast<double>(grid.steps - 1);
  for (std::size_t i = 0; i < grid.steps; ++i)
    times[i] = grid.t_start + static_cast<double>(i) * dt;
  times.back() = grid.t_end;
  return times;
}

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_norm(std::vector<Violation>& out, long particle, Complex x, Complex y,
                const char* what) {
  const double norm = std::norm(x) + std::norm(y);
  const double residual = std::abs(norm - 1.0);
  if (residual > kNormTolerance) {
    std::ostringstream msg;
    msg << what << " not normalized: |norm - 1| = " << residual;
    out.push_back({particle, residual, msg.str()});
  }
}

}  // namespace

ValidationReport validate_config(const SpinBathConfig& config) {
  ValidationReport report;
  if (!finite(config.a) || !finite(config.b))
    report.violations.push_back({-1, 0.0, "system amplitudes must be finite"});
  else
    check_norm(report.violations, -1, config.a, config.b, "system amplitudes");
  if (config.particles.empty())
    report.violations.push_back({-1, 0.0, "at least one bath particle required"});
  for (std::size_t i = 0; i < config.particles.size(); ++i) {
    const BathParticle& p = config.particles[i];
    const long index = static_cast<long>(i);
    if (!finite(p.alpha) || !finite(p.beta) || !std::isfinite(p.g)) {
      std::ostringstream msg;
      msg << "particle " << i << ": coefficients must be finite";
      report.violations.push_back({index, 0.0, msg.str()});
      continue;
    }
    std::ostringstream what;
    what << "particle " << i << " amplitudes";
    check_norm(report.violations, index, p.alpha, p.beta, what.str().c_str());
  }
  return report;
}

ObservableSpec observable_case1(const HermitianBlock2& system, std::size_t n) {
  if (n == 0) throw std::invalid_argument("observable_case1: n must be >= 1");
  ObservableSpec obs;
  obs.system = system;
  obs.particle_blocks.assign(n, identity_block());
  return obs;
}

ObservableSpec observable_case2(const std::vector<HermitianBlock2>& observed,
                                std::size_t n) {
  if (observed.empty())
    throw std::invalid_argument("observable_case2: need at least one observed block");
  if (observed.size() > n)
    throw std::invalid_argument("observable_case2: p exceeds particle count");
  ObservableSpec obs;
  obs.system = identity_block();
  obs.particle_blocks = observed;
  obs.particle_blocks.resize(n, identity_block());
  return obs;
}

}  // namespace spinbath
