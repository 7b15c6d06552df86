#include "scalesep/factorized.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace scalesep {

WaveFunction2D assemble(const ProductState& state, PhaseSign sign, Exec exec) {
  WaveFunction2D out(state.phix.grid(), state.phiy.grid());
  const cplx factor = std::polar(1.0, static_cast<double>(static_cast<int>(sign)) * state.phase);
  kernels::outer(out.values(), state.phix.values(), state.phiy.values(), factor, exec);
  return out;
}

Collocation pick_collocation(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy) {
  Collocation best;
  double best_v = std::numeric_limits<double>::infinity();
  double best_r = std::numeric_limits<double>::infinity();
  for (double x : gx.points()) {
    for (double y : gy.points()) {
      const double v = std::abs(spec.coupling.grad_xy(x, y));
      const double r = x * x + y * y;
      const double tol = 1e-12 * std::max(best_v, 1e-300);
      if (v < best_v - tol || (std::abs(v - best_v) <= tol && r < best_r)) {
        best = {x, y};
        best_v = v;
        best_r = r;
      }
    }
  }
  return best;
}

namespace {

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

void check_factor_norm(const WaveFunction1D& f, double norm0, double t, const char* which) {
  const double n = l2_norm(f);
  if (!std::isfinite(n) || std::abs(n - norm0) > kNormDriftAbort * std::max(norm0, 1.0)) {
    std::ostringstream os;
    os << which << " factor unstable at t = " << t << ": norm " << n << " (initial " << norm0
       << ")";
    throw NumericalAbort(os.str());
  }
}

std::vector<double> normalized_density(const WaveFunction1D& f) {
  std::vector<double> rho(f.size());
  double total = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    rho[k] = std::norm(f[k]);
    total += rho[k];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalAbort("partial averages: zero-norm or non-finite state");
  }
  for (double& r : rho) r /= total;
  return rho;
}

}  // namespace

std::vector<ProductState> propagate_bruteforce(const ModelSpec& spec, const WaveFunction1D& phix0,
                                               const WaveFunction1D& phiy0,
                                               const PropagationConfig& cfg,
                                               Collocation collocation) {
  spec.validate();
  cfg.validate();
  const Grid1D& gx = phix0.grid();
  const Grid1D& gy = phiy0.grid();
  const double h = spec.epsilon;
  std::vector<double> vx = spec.v1.sample(gx);
  std::vector<double> vy = spec.v2.sample(gy);
  for (std::size_t i = 0; i < gx.size(); ++i) vx[i] += spec.coupling(gx.point(i), collocation.y0);
  for (std::size_t j = 0; j < gy.size(); ++j) vy[j] += spec.coupling(collocation.x0, gy.point(j));
  const double w0 = spec.coupling(collocation.x0, collocation.y0);

  const SplitStep1D sx(gx, spec.kinetic_x(), h, cfg.dt);
  const SplitStep1D sy(gy, spec.kinetic_y(), h, cfg.dt);
  const double nx0 = l2_norm(phix0), ny0 = l2_norm(phiy0);

  ProductState s{phix0, phiy0, 0.0, 0.0};
  std::vector<ProductState> out;
  out.push_back(s);
  const std::size_t n = cfg.steps();
  for (std::size_t k = 1; k <= n; ++k) {
    sx.step(s.phix.values(), vx);
    sy.step(s.phiy.values(), vy);
    s.t = static_cast<double>(k) * cfg.dt;
    s.phase = s.t * w0 / h;
    if (cfg.is_sample(k)) {
      check_factor_norm(s.phix, nx0, s.t, "brute-force x");
      check_factor_norm(s.phiy, ny0, s.t, "brute-force y");
      out.push_back(s);
    }
  }
  return out;
}

// ---- averages --------------------------------------------------------------------

AverageEvaluator::AverageEvaluator(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy,
                                   bool allow_fast_path)
    : nx_(gx.size()), ny_(gy.size()) {
  const CouplingSpec& w = spec.coupling;
  if (w.is_zero()) {
    separated_ = true;
    w1_.assign(nx_, 0.0);
    w2_.assign(ny_, 0.0);
    return;
  }
  if (allow_fast_path && w.factors()) {
    separated_ = true;
    w1_ = w.factors()->first.sample(gx);
    w2_ = w.factors()->second.sample(gy);
    return;
  }
  table_.resize(nx_ * ny_);
  for (std::size_t i = 0; i < nx_; ++i) {
    for (std::size_t j = 0; j < ny_; ++j) table_[i * ny_ + j] = w(gx.point(i), gy.point(j));
  }
}

PartialAverages AverageEvaluator::operator()(const WaveFunction1D& phix,
                                             const WaveFunction1D& phiy) const {
  if (phix.size() != nx_ || phiy.size() != ny_) {
    throw InvalidInput("partial averages: grid size mismatch");
  }
  const auto rx = normalized_density(phix);
  const auto ry = normalized_density(phiy);
  PartialAverages a;
  a.over_y.assign(nx_, 0.0);
  a.over_x.assign(ny_, 0.0);
  if (separated_) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < nx_; ++i) m1 += rx[i] * w1_[i];
    for (std::size_t j = 0; j < ny_; ++j) m2 += ry[j] * w2_[j];
    for (std::size_t i = 0; i < nx_; ++i) a.over_y[i] = w1_[i] * m2;
    for (std::size_t j = 0; j < ny_; ++j) a.over_x[j] = m1 * w2_[j];
    a.full = m1 * m2;
  } else {
    for (std::size_t i = 0; i < nx_; ++i) {
      const double* row = table_.data() + i * ny_;
      double s = 0.0;
      for (std::size_t j = 0; j < ny_; ++j) {
        s += row[j] * ry[j];
        a.over_x[j] += rx[i] * row[j];
      }
      a.over_y[i] = s;
    }
    for (std::size_t i = 0; i < nx_; ++i) a.full += rx[i] * a.over_y[i];
  }
  if (!std::isfinite(a.full)) throw NumericalAbort("partial averages are not finite");
  return a;
}

PartialAverages partial_averages(const ModelSpec& spec, const WaveFunction1D& phix,
                                 const WaveFunction1D& phiy, bool allow_fast_path) {
  return AverageEvaluator(spec, phix.grid(), phiy.grid(), allow_fast_path)(phix, phiy);
}

// ---- mean field ----------------------------------------------------------------

std::vector<ProductState> propagate_meanfield(const ModelSpec& spec, const WaveFunction1D& phix0,
                                              const WaveFunction1D& phiy0,
                                              const PropagationConfig& cfg) {
  spec.validate();
  cfg.validate();
  const Grid1D& gx = phix0.grid();
  const Grid1D& gy = phiy0.grid();
  const double h = spec.epsilon;
  const auto v1 = spec.v1.sample(gx);
  const auto v2 = spec.v2.sample(gy);
  const AverageEvaluator averages(spec, gx, gy);
  const SplitStep1D full_x(gx, spec.kinetic_x(), h, cfg.dt);
  const SplitStep1D full_y(gy, spec.kinetic_y(), h, cfg.dt);
  const SplitStep1D half_x(gx, spec.kinetic_x(), h, 0.5 * cfg.dt);
  const SplitStep1D half_y(gy, spec.kinetic_y(), h, 0.5 * cfg.dt);
  const double nx0 = l2_norm(phix0), ny0 = l2_norm(phiy0);

  ProductState s{phix0, phiy0, 0.0, 0.0};
  std::vector<ProductState> out;
  out.push_back(s);
  PartialAverages now = averages(s.phix, s.phiy);
  const std::size_t n = cfg.steps();
  for (std::size_t k = 1; k <= n; ++k) {
    WaveFunction1D px = s.phix;
    WaveFunction1D py = s.phiy;
    half_x.step(px.values(), add(v1, now.over_y));
    half_y.step(py.values(), add(v2, now.over_x));
    const PartialAverages mid = averages(px, py);

    full_x.step(s.phix.values(), add(v1, mid.over_y));
    full_y.step(s.phiy.values(), add(v2, mid.over_x));
    PartialAverages next = averages(s.phix, s.phiy);
    s.phase += 0.5 * cfg.dt * (now.full + next.full) / h;
    s.t = static_cast<double>(k) * cfg.dt;
    now = std::move(next);
    if (cfg.is_sample(k)) {
      check_factor_norm(s.phix, nx0, s.t, "mean-field x");
      check_factor_norm(s.phiy, ny0, s.t, "mean-field y");
      out.push_back(s);
    }
  }
  return out;
}

double meanfield_energy(const ModelSpec& spec, const ProductState& state) {
  const auto v1 = spec.v1.sample(state.phix.grid());
  const auto v2 = spec.v2.sample(state.phiy.grid());
  const PartialAverages a = partial_averages(spec, state.phix, state.phiy);
  return energy_1d(state.phix, spec.kinetic_x(), v1) + energy_1d(state.phiy, spec.kinetic_y(), v2) +
         a.full;
}

double bruteforce_energy(const ModelSpec& spec, const ProductState& state,
                         Collocation collocation) {
  const Grid1D& gx = state.phix.grid();
  const Grid1D& gy = state.phiy.grid();
  std::vector<double> vx = spec.v1.sample(gx);
  std::vector<double> vy = spec.v2.sample(gy);
  for (std::size_t i = 0; i < gx.size(); ++i) vx[i] += spec.coupling(gx.point(i), collocation.y0);
  for (std::size_t j = 0; j < gy.size(); ++j) vy[j] += spec.coupling(collocation.x0, gy.point(j));
  return energy_1d(state.phix, spec.kinetic_x(), vx) + energy_1d(state.phiy, spec.kinetic_y(), vy) -
         spec.coupling(collocation.x0, collocation.y0);
}

}  // namespace scalesep
