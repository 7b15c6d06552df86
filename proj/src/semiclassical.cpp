#include "scalesep/semiclassical.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace scalesep {

const char* to_string(Variant v) { return v == Variant::taylor ? "taylor" : "averaged"; }

Grid1D default_z_grid() { return Grid1D(-12.0, 12.0, 256); }

WavePacketState initial_wavepacket(const ModelSpec& spec, const WavePacketInit& init,
                                   const Grid1D& gx, const Grid1D& gz) {
  spec.validate();
  if (!(spec.epsilon < 1.0)) throw InvalidInput("wave-packet initial data require epsilon < 1");
  const auto amp = init.amplitude ? init.amplitude : std::function<cplx(double)>(standard_gaussian);
  WaveFunction1D u2 = WaveFunction1D::sample(gz, amp);
  const double n = l2_norm(u2);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("wave-packet amplitude has zero norm");
  u2 *= 1.0 / n;
  return WavePacketState{init.q0, init.p0, 0.0, std::move(u2),
                         initial_x_factor(spec, init.center_x, init.q0, gx), 0.0, spec.epsilon};
}

namespace {

std::vector<double> density(const WaveFunction1D& u) {
  std::vector<double> rho(u.size());
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    rho[k] = std::norm(u[k]);
    total += rho[k];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalAbort("wave-packet amplitude has zero or non-finite norm");
  }
  for (double& r : rho) r /= total;
  return rho;
}

}  // namespace

BathAverages bath_forces(const ModelSpec& spec, double q, const WaveFunction1D& u2,
                         Variant variant) {
  const Potential1D& v2 = spec.v2;
  if (variant == Variant::taylor) return {v2(q), v2.gradient(q), v2.curvature(q)};
  const double s = std::sqrt(spec.epsilon);
  const double h = s * u2.grid().spacing();
  const auto rho = density(u2);
  BathAverages a;
  for (std::size_t k = 0; k < u2.size(); ++k) {
    if (rho[k] == 0.0) continue;
    const double y = q + s * u2.grid().point(k);
    a.v += rho[k] * v2(y);
    a.grad += rho[k] * v2.gradient(y, h);
    a.hess += rho[k] * v2.curvature(y, h);
  }
  return a;
}

ClassicalPoint step_trajectory(const ModelSpec& spec, const ClassicalPoint& s,
                               const WaveFunction1D& u2, double dt, Variant variant) {
  const BathAverages a = bath_forces(spec, s.q, u2, variant);
  const double ph = s.p - 0.5 * dt * a.grad;
  ClassicalPoint out;
  out.q = s.q + dt * ph;
  const BathAverages b = bath_forces(spec, out.q, u2, variant);
  out.S = s.S + dt * (0.5 * ph * ph - 0.5 * (a.v + b.v));
  out.p = ph - 0.5 * dt * b.grad;
  return out;
}

std::vector<double> effective_x_potential(const ModelSpec& spec, double q,
                                          const WaveFunction1D& u2, const Grid1D& gx,
                                          Variant variant) {
  std::vector<double> v = spec.v1.sample(gx);
  const CouplingSpec& w = spec.coupling;
  if (w.is_zero()) return v;
  if (variant == Variant::taylor) {
    for (std::size_t i = 0; i < gx.size(); ++i) v[i] += w(gx.point(i), q);
    return v;
  }
  const double s = std::sqrt(spec.epsilon);
  const auto rho = density(u2);
  if (w.factors()) {
    const auto& [w1, w2] = *w.factors();
    double m2 = 0.0;
    for (std::size_t k = 0; k < u2.size(); ++k) m2 += rho[k] * w2(q + s * u2.grid().point(k));
    for (std::size_t i = 0; i < gx.size(); ++i) v[i] += w1(gx.point(i)) * m2;
    return v;
  }
  for (std::size_t i = 0; i < gx.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < u2.size(); ++k) {
      if (rho[k] != 0.0) acc += rho[k] * w(gx.point(i), q + s * u2.grid().point(k));
    }
    v[i] += acc;
  }
  return v;
}

namespace {

std::vector<double> quadratic(const Grid1D& gz, double k) {
  std::vector<double> v(gz.size());
  for (std::size_t j = 0; j < gz.size(); ++j) v[j] = 0.5 * k * gz.point(j) * gz.point(j);
  return v;
}

// Holds the split-step operators of one propagation.
class Stepper {
 public:
  Stepper(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gz, double dt)
      : spec_(spec), gx_(gx), gz_(gz), dt_(dt),
        u2_(gz, 1.0, 1.0, dt),
        psi1_(gx, spec.kinetic_x(), spec.epsilon, dt) {}

  void step(WavePacketState& s, Variant variant) const {
    const ClassicalPoint c0{s.q, s.p, s.S};
    const BathAverages a = bath_forces(spec_, s.q, s.u2, variant);
    const auto vx0 = effective_x_potential(spec_, s.q, s.u2, gx_, variant);
    if (variant == Variant::taylor) {
      const ClassicalPoint c1 = step_trajectory(spec_, c0, s.u2, dt_, variant);
      const double k1 = spec_.v2.curvature(c1.q);
      u2_.step(s.u2.values(), quadratic(gz_, a.hess), quadratic(gz_, k1));
      s.q = c1.q;
      s.p = c1.p;
      s.S = c1.S;
    } else {
      const double ph = s.p - 0.5 * dt_ * a.grad;
      const double q1 = s.q + dt_ * ph;
      WaveFunction1D pred = s.u2;
      const double k_guess = bath_forces(spec_, q1, s.u2, variant).hess;
      u2_.step(pred.values(), quadratic(gz_, a.hess), quadratic(gz_, k_guess));
      const double k1 = bath_forces(spec_, q1, pred, variant).hess;
      u2_.step(s.u2.values(), quadratic(gz_, a.hess), quadratic(gz_, k1));
      const BathAverages b = bath_forces(spec_, q1, s.u2, variant);
      s.S += dt_ * (0.5 * ph * ph - 0.5 * (a.v + b.v));
      s.p = ph - 0.5 * dt_ * b.grad;
      s.q = q1;
    }
    const auto vx1 = effective_x_potential(spec_, s.q, s.u2, gx_, variant);
    psi1_.step(s.psi1.values(), vx0, vx1);
    s.t += dt_;
  }

 private:
  const ModelSpec& spec_;
  Grid1D gx_, gz_;
  double dt_;
  SplitStep1D u2_;
  SplitStep1D psi1_;
};

void check_norm(const WaveFunction1D& f, double n0, double t, const char* which) {
  const double n = l2_norm(f);
  if (!std::isfinite(n) || std::abs(n - n0) > kNormDriftAbort * std::max(n0, 1.0)) {
    std::ostringstream os;
    os << which << " unstable at t = " << t << ": norm " << n << " (initial " << n0 << ")";
    throw NumericalAbort(os.str());
  }
}

}  // namespace

void step_u2(WaveFunction1D& u2, double dt, double k_first, double k_second) {
  const SplitStep1D s(u2.grid(), 1.0, 1.0, dt);
  s.step(u2.values(), quadratic(u2.grid(), k_first), quadratic(u2.grid(), k_second));
}

void step_wavepacket(const ModelSpec& spec, WavePacketState& state, double dt, Variant variant) {
  Stepper(spec, state.psi1.grid(), state.u2.grid(), dt).step(state, variant);
}

std::vector<WavePacketState> propagate_semiclassical(const ModelSpec& spec,
                                                     const WavePacketState& init,
                                                     const PropagationConfig& cfg,
                                                     Variant variant) {
  spec.validate();
  cfg.validate();
  if (!(spec.epsilon < 1.0)) throw InvalidInput("semiclassical propagation requires epsilon < 1");
  if (std::abs(init.epsilon - spec.epsilon) > 1e-15) {
    throw InvalidInput("wave-packet state epsilon differs from the model epsilon");
  }
  const Stepper stepper(spec, init.psi1.grid(), init.u2.grid(), cfg.dt);
  const double nu0 = l2_norm(init.u2), np0 = l2_norm(init.psi1);
  WavePacketState s = init;
  std::vector<WavePacketState> out;
  out.push_back(s);
  const std::size_t n = cfg.steps();
  for (std::size_t k = 1; k <= n; ++k) {
    stepper.step(s, variant);
    s.t = init.t + static_cast<double>(k) * cfg.dt;
    if (cfg.is_sample(k)) {
      check_norm(s.u2, nu0, s.t, "u2 amplitude");
      check_norm(s.psi1, np0, s.t, "psi1 factor");
      if (!std::isfinite(s.q) || !std::isfinite(s.p) || !std::isfinite(s.S)) {
        throw NumericalAbort("classical trajectory left the finite range");
      }
      out.push_back(s);
    }
  }
  return out;
}

std::vector<WaveFunction1D> propagate_u2(const WaveFunction1D& u0,
                                         const std::function<double(double)>& curvature,
                                         const PropagationConfig& cfg) {
  cfg.validate();
  const SplitStep1D s(u0.grid(), 1.0, 1.0, cfg.dt);
  const double n0 = l2_norm(u0);
  WaveFunction1D u = u0;
  std::vector<WaveFunction1D> out{u};
  const std::size_t n = cfg.steps();
  for (std::size_t k = 1; k <= n; ++k) {
    const double t0 = static_cast<double>(k - 1) * cfg.dt;
    const double t1 = static_cast<double>(k) * cfg.dt;
    s.step(u.values(), quadratic(u.grid(), curvature(t0)), quadratic(u.grid(), curvature(t1)));
    if (cfg.is_sample(k)) {
      check_norm(u, n0, t1, "u2 amplitude");
      out.push_back(u);
    }
  }
  return out;
}

WaveFunction2D assemble_semiclassical(const WavePacketState& state, const Grid1D& gy, Exec exec) {
  const double eps = state.epsilon;
  if (state.p != 0.0) {
    const double wavelength = 2.0 * std::numbers::pi * eps / std::abs(state.p);
    if (gy.spacing() > wavelength / 8.0) {
      std::ostringstream os;
      os << "y-grid spacing " << gy.spacing() << " does not resolve the wavelength " << wavelength
         << " with 8 points";
      throw InvalidInput(os.str());
    }
  }
  const double s = std::sqrt(eps);
  std::vector<double> z(gy.size());
  for (std::size_t j = 0; j < gy.size(); ++j) z[j] = (gy.point(j) - state.q) / s;
  const auto u = interpolate(state.u2, z);
  const double pref = std::pow(eps, -0.25);
  WaveFunction1D fy(gy);
  for (std::size_t j = 0; j < gy.size(); ++j) {
    const double phase = (state.p * (gy.point(j) - state.q) + state.S) / eps;
    fy[j] = pref * u[j] * std::polar(1.0, phase);
  }
  WaveFunction2D out(state.psi1.grid(), gy);
  kernels::outer(out.values(), state.psi1.values(), fy.values(), 1.0, exec);
  return out;
}

}  // namespace scalesep
