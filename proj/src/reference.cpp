#include "scalesep/reference.hpp"

#include <cmath>
#include <sstream>

#include "scalesep/transforms.hpp"

namespace scalesep {

// ---- PropagationConfig ---------------------------------------------------------

void PropagationConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw InvalidInput("t_final must be positive");
  if (dt > t_final * (1.0 + 1e-12)) throw InvalidInput("dt must not exceed t_final");
  if (sample_every < 1) throw InvalidInput("sample_every must be at least 1");
  const double ratio = t_final / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "t_final (" << t_final << ") is not an integer multiple of dt (" << dt << ")";
    throw InvalidInput(os.str());
  }
}

std::size_t PropagationConfig::steps() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

bool PropagationConfig::is_sample(std::size_t step) const {
  return step % sample_every == 0 || step == steps();
}

std::vector<std::size_t> PropagationConfig::sample_steps() const {
  std::vector<std::size_t> out;
  const std::size_t n = steps();
  for (std::size_t s = 0; s <= n; ++s) {
    if (is_sample(s)) out.push_back(s);
  }
  return out;
}

// ---- SplitStep1D -----------------------------------------------------------------

SplitStep1D::SplitStep1D(const Grid1D& grid, double kinetic, double hbar, double dt)
    : fft_(&cached_fft(grid.size())), dt_(dt), hbar_(hbar), kinetic_phase_(grid.size()) {
  if (!(hbar > 0.0)) throw InvalidInput("SplitStep1D: hbar must be positive");
  const auto k = grid.frequencies();
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    kinetic_phase_[j] = std::polar(inv_n, -dt * 0.5 * kinetic * k[j] * k[j] / hbar);
  }
}

void SplitStep1D::half_kick(std::span<cplx> f, std::span<const double> v) const {
  if (v.size() != f.size()) throw InvalidInput("SplitStep1D: potential size mismatch");
  const double c = -0.5 * dt_ / hbar_;
  for (std::size_t j = 0; j < f.size(); ++j) f[j] *= std::polar(1.0, c * v[j]);
}

void SplitStep1D::kinetic(std::span<cplx> f) const {
  fft_->forward(f);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] *= kinetic_phase_[j];
  fft_->backward(f);
}

void SplitStep1D::step(std::span<cplx> f, std::span<const double> v_first,
                       std::span<const double> v_second) const {
  if (f.size() != kinetic_phase_.size()) throw InvalidInput("SplitStep1D: grid size mismatch");
  half_kick(f, v_first);
  kinetic(f);
  half_kick(f, v_second);
}

double energy_1d(const WaveFunction1D& f, double kinetic, std::span<const double> v) {
  if (v.size() != f.size()) throw InvalidInput("energy_1d: potential size mismatch");
  std::vector<cplx> hat(f.values().begin(), f.values().end());
  cached_fft(f.size()).forward(hat);
  const auto k = f.grid().frequencies();
  double kin = 0.0, pot = 0.0, mass = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    kin += 0.5 * kinetic * k[j] * k[j] * std::norm(hat[j]);
    const double d = std::norm(f[j]);
    pot += v[j] * d;
    mass += d;
  }
  if (!(mass > 0.0)) throw InvalidInput("energy_1d: zero-norm state");
  // Parseval: sum |hat|^2 = n sum |f|^2.
  return (kin / static_cast<double>(f.size()) + pot) / mass;
}

// ---- ReferencePropagator ---------------------------------------------------------

namespace {

std::vector<double> sample_total_potential(const ModelSpec& spec, const Grid1D& gx,
                                           const Grid1D& gy) {
  const std::size_t nx = gx.size(), ny = gy.size();
  const auto v1 = spec.v1.sample(gx);
  const auto v2 = spec.v2.sample(gy);
  std::vector<double> v(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      v[i * ny + j] = v1[i] + v2[j] + spec.coupling(gx.point(i), gy.point(j));
    }
  }
  return v;
}

std::vector<double> kinetic_symbol(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy) {
  const std::size_t nx = gx.size(), ny = gy.size();
  const auto kx = gx.frequencies();
  const auto ky = gy.frequencies();
  const double cx = 0.5 * spec.kinetic_x();
  const double cy = 0.5 * spec.kinetic_y();
  std::vector<double> t(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) t[i * ny + j] = cx * kx[i] * kx[i] + cy * ky[j] * ky[j];
  }
  return t;
}

}  // namespace

ReferencePropagator::ReferencePropagator(const ModelSpec& spec, const Grid1D& gx,
                                         const Grid1D& gy, double dt, Exec exec)
    : fft_(&cached_fft2d(gx.size(), gy.size())), gx_(gx), gy_(gy), dt_(dt), exec_(exec) {
  spec.validate();
  if (!(dt > 0.0)) throw InvalidInput("ReferencePropagator: dt must be positive");
  const double h = spec.epsilon;
  const auto v = sample_total_potential(spec, gx, gy);
  const auto t = kinetic_symbol(spec, gx, gy);
  const double inv_n = 1.0 / static_cast<double>(v.size());
  half_potential_.resize(v.size());
  kinetic_phase_.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) throw InvalidInput("potential is not finite on the grid");
    half_potential_[k] = std::polar(1.0, -0.5 * dt * v[k] / h);
    kinetic_phase_[k] = std::polar(inv_n, -dt * t[k] / h);
  }
}

void ReferencePropagator::step(WaveFunction2D& psi) const {
  if (!(psi.gridx() == gx_) || !(psi.gridy() == gy_)) {
    throw InvalidInput("ReferencePropagator: state grid does not match the propagator");
  }
  auto data = psi.values();
  kernels::multiply(data, half_potential_, exec_);
  fft_->forward(data, exec_);
  kernels::multiply(data, kinetic_phase_, exec_);
  fft_->backward(data, exec_);
  kernels::multiply(data, half_potential_, exec_);
}

double energy(const ModelSpec& spec, const WaveFunction2D& psi, Exec exec) {
  const auto& gx = psi.gridx();
  const auto& gy = psi.gridy();
  const std::size_t ny = gy.size();
  std::vector<cplx> hat(psi.values().begin(), psi.values().end());
  cached_fft2d(gx.size(), ny).forward(hat, exec);
  const auto t = kinetic_symbol(spec, gx, gy);
  const auto v = sample_total_potential(spec, gx, gy);
  const double kin = kernels::weighted_density_sum(hat, t, ny, exec);
  const double pot = kernels::weighted_density_sum(psi.values(), v, ny, exec);
  const double mass = kernels::squared_norm(psi.values(), ny, exec);
  if (!(mass > 0.0)) throw InvalidInput("energy: zero-norm state");
  return (kin / static_cast<double>(hat.size()) + pot) / mass;
}

// ---- driver ------------------------------------------------------------------------

std::string boundary_warning(const WaveFunction2D& psi, const std::string& what) {
  const double m = boundary_mass(psi);
  if (m <= kBoundaryMassLimit) return {};
  std::ostringstream os;
  os << what << ": boundary mass " << m << " exceeds " << kBoundaryMassLimit
     << "; enlarge the box";
  return os.str();
}

std::string boundary_warning(const WaveFunction1D& f, const std::string& what) {
  const double m = boundary_mass(f);
  if (m <= kBoundaryMassLimit) return {};
  std::ostringstream os;
  os << what << ": boundary mass " << m << " exceeds " << kBoundaryMassLimit
     << "; enlarge the box";
  return os.str();
}

Trajectory2D propagate_reference(const ModelSpec& spec, const WaveFunction2D& psi0,
                                 const PropagationConfig& cfg, const ReferenceObserver& observer,
                                 bool store_states) {
  cfg.validate();
  const ReferencePropagator prop(spec, psi0.gridx(), psi0.gridy(), cfg.dt, cfg.exec);
  Trajectory2D traj;
  if (auto w = boundary_warning(psi0, "initial state"); !w.empty()) traj.warnings.push_back(w);

  WaveFunction2D psi = psi0;
  const double norm0 = l2_norm(psi0);
  std::size_t sample = 0;
  auto record = [&](std::size_t step) {
    const double t = static_cast<double>(step) * cfg.dt;
    const double n = l2_norm(psi);
    if (!std::isfinite(n) || std::abs(n - norm0) > kNormDriftAbort * std::max(norm0, 1.0)) {
      std::ostringstream os;
      os << "reference propagation unstable at t = " << t << ": norm " << n << " (initial "
         << norm0 << ")";
      throw NumericalAbort(os.str());
    }
    traj.times.push_back(t);
    traj.norms.push_back(n);
    traj.energies.push_back(energy(spec, psi, cfg.exec));
    if (store_states) traj.states.push_back(psi);
    if (observer) observer(sample, t, psi);
    ++sample;
  };

  record(0);
  const std::size_t n = cfg.steps();
  for (std::size_t s = 1; s <= n; ++s) {
    prop.step(psi);
    if (cfg.is_sample(s)) record(s);
  }
  if (auto w = boundary_warning(psi, "final state"); !w.empty()) traj.warnings.push_back(w);
  return traj;
}

}  // namespace scalesep
