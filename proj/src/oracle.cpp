#include "spinbath/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spinbath::oracle {

namespace {

inline Complex cis(double x) { return {std::cos(x), std::sin(x)}; }

void require_cap(std::size_t n, const char* who) {
  if (n > kMaxBathParticles) {
    std::ostringstream msg;
    msg << who << ": bath size " << n << " exceeds the oracle cap of "
        << kMaxBathParticles << " particles";
    throw ResourceLimitError(msg.str());
  }
  if (n == 0) throw std::invalid_argument(std::string(who) + ": need at least one particle");
}

// Expands `amps` by one two-level factor (up amplitude `up`, down `dn`),
// appending the new factor as the least significant bit.
void expand_factor(std::vector<Complex>& amps, Complex up, Complex dn) {
  std::vector<Complex> next(amps.size() * 2);
  for (std::size_t k = 0; k < amps.size(); ++k) {
    next[2 * k] = amps[k] * up;
    next[2 * k + 1] = amps[k] * dn;
  }
  amps = std::move(next);
}

// Energy of a product basis state: E = -(1/2) sigma_s * sum_i g_i sigma_i.
double basis_energy(std::size_t idx, const SpinBathConfig& config) {
  const std::size_t n = config.size();
  const double sys = ((idx >> n) & 1u) == 0 ? 1.0 : -1.0;
  double bath = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double si = ((idx >> (n - 1 - i)) & 1u) == 0 ? 1.0 : -1.0;
    bath += config.particles[i].g * si;
  }
  return -0.5 * sys * bath;
}

std::vector<Complex> kron_with_block(const std::vector<Complex>& mat, std::size_t dim,
                                     const std::array<Complex, 4>& block) {
  std::vector<Complex> out(4 * dim * dim);
  const std::size_t out_dim = 2 * dim;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const Complex v = mat[r * dim + c];
      for (std::size_t br = 0; br < 2; ++br)
        for (std::size_t bc = 0; bc < 2; ++bc)
          out[(2 * r + br) * out_dim + (2 * c + bc)] = v * block[br * 2 + bc];
    }
  return out;
}

// Applies a 2x2 matrix to the state at one bit position.
void apply_single_site(std::vector<Complex>& amps, const std::array<Complex, 4>& m,
                       std::size_t bit) {
  const std::size_t mask = std::size_t{1} << bit;
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    if (idx & mask) continue;
    const Complex a0 = amps[idx];
    const Complex a1 = amps[idx | mask];
    amps[idx] = m[0] * a0 + m[1] * a1;
    amps[idx | mask] = m[2] * a0 + m[3] * a1;
  }
}

}  // namespace

DenseObservable::DenseObservable(const ObservableSpec& obs) {
  require_cap(obs.particle_blocks.size(), "build_observable");
  system_ = system_block_matrix(obs.system);
  particles_.reserve(obs.particle_blocks.size());
  for (const HermitianBlock2& b : obs.particle_blocks)
    particles_.push_back(particle_block_matrix(b));
  if (particles_.size() <= kDenseMatrixMaxParticles) {
    dense_.assign(system_.begin(), system_.end());
    std::size_t d = 2;
    for (const auto& block : particles_) {
      dense_ = kron_with_block(dense_, d, block);
      d *= 2;
    }
  }
}

Complex DenseObservable::entry(std::size_t row, std::size_t col) const {
  const std::size_t n = particles_.size();
  Complex v = system_[((row >> n) & 1u) * 2 + ((col >> n) & 1u)];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = n - 1 - i;
    v *= particles_[i][((row >> bit) & 1u) * 2 + ((col >> bit) & 1u)];
  }
  return v;
}

std::vector<Complex> DenseObservable::apply(const std::vector<Complex>& amplitudes) const {
  if (amplitudes.size() != dim())
    throw std::invalid_argument("DenseObservable::apply: dimension mismatch");
  if (!dense_.empty()) {
    const std::size_t d = dim();
    std::vector<Complex> out(d);
    for (std::size_t r = 0; r < d; ++r) {
      Complex acc{0.0, 0.0};
      const Complex* row = dense_.data() + r * d;
      for (std::size_t c = 0; c < d; ++c) acc += row[c] * amplitudes[c];
      out[r] = acc;
    }
    return out;
  }
  // Factor-wise action of the same operator, for states too large to hold a
  // dense matrix.
  std::vector<Complex> out = amplitudes;
  const std::size_t n = particles_.size();
  apply_single_site(out, system_, n);
  for (std::size_t i = 0; i < n; ++i) apply_single_site(out, particles_[i], n - 1 - i);
  return out;
}

DenseState build_initial_state(const SpinBathConfig& config) {
  require_cap(config.size(), "build_initial_state");
  std::vector<Complex> amps{config.a, config.b};
  for (const BathParticle& p : config.particles) expand_factor(amps, p.alpha, p.beta);
  return {config.size(), std::move(amps)};
}

DenseState evolve(const DenseState& state, const SpinBathConfig& config, double t) {
  if (state.n_particles != config.size() ||
      state.dim() != (std::size_t{1} << (config.size() + 1)))
    throw std::invalid_argument("evolve: state dimension does not match config");
  DenseState out = state;
  for (std::size_t idx = 0; idx < out.amplitudes.size(); ++idx)
    out.amplitudes[idx] *= cis(-basis_energy(idx, config) * t);
  return out;
}

DenseState evolve_factored(const SpinBathConfig& config, double t) {
  require_cap(config.size(), "evolve_factored");
  std::vector<Complex> up{Complex{1.0, 0.0}};
  std::vector<Complex> dn{Complex{1.0, 0.0}};
  for (const BathParticle& p : config.particles) {
    const Complex rot = cis(p.g * t / 2.0);
    expand_factor(up, p.alpha * rot, p.beta * std::conj(rot));
    expand_factor(dn, p.alpha * std::conj(rot), p.beta * rot);
  }
  const std::size_t half = up.size();
  std::vector<Complex> amps(2 * half);
  for (std::size_t k = 0; k < half; ++k) {
    amps[k] = config.a * up[k];
    amps[half + k] = config.b * dn[k];
  }
  return {config.size(), std::move(amps)};
}

DenseObservable build_observable(const ObservableSpec& obs) { return DenseObservable(obs); }

double expectation_value(const DenseObservable& op, const DenseState& state) {
  const std::vector<Complex> image = op.apply(state.amplitudes);
  Complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < image.size(); ++k)
    acc += std::conj(state.amplitudes[k]) * image[k];
  if (!(std::abs(acc.imag()) < 1e-10)) {
    std::ostringstream msg;
    msg << "oracle expectation: imaginary residual " << acc.imag()
        << " exceeds 1e-10 (non-Hermitian input?)";
    throw std::runtime_error(msg.str());
  }
  return acc.real();
}

double oracle_expectation(const SpinBathConfig& config, const ObservableSpec& obs,
                          double t) {
  if (obs.particle_blocks.size() != config.size())
    throw std::invalid_argument(
        "oracle_expectation: observable block count does not match particle count");
  const DenseState psi = evolve(build_initial_state(config), config, t);
  const DenseObservable op = build_observable(obs);
  return expectation_value(op, psi);
}

double state_norm(const DenseState& state) {
  double acc = 0.0;
  for (const Complex& a : state.amplitudes) acc += std::norm(a);
  return std::sqrt(acc);
}

double max_amplitude_deviation(const DenseState& a, const DenseState& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("max_amplitude_deviation: dimension mismatch");
  std::size_t ref = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double mag = std::abs(a.amplitudes[k]) + std::abs(b.amplitudes[k]);
    if (mag > best) {
      best = mag;
      ref = k;
    }
  }
  Complex phase{1.0, 0.0};
  const Complex align = b.amplitudes[ref] * std::conj(a.amplitudes[ref]);
  if (std::abs(align) > 0.0) phase = align / std::abs(align);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k)
    worst = std::max(worst, std::abs(a.amplitudes[k] * phase - b.amplitudes[k]));
  return worst;
}

}  // namespace spinbath::oracle
