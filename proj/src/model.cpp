#include "scalesep/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace scalesep {

// ---- Potential1D -------------------------------------------------------------

Potential1D::Potential1D(Fn value, Fn d1, Fn d2, std::string label)
    : value_(std::move(value)), d1_(std::move(d1)), d2_(std::move(d2)), label_(std::move(label)) {
  if (!value_) throw InvalidInput("Potential1D: empty value function");
}

Potential1D Potential1D::polynomial(std::vector<double> coeffs, std::string label) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw InvalidInput("Potential1D: non-finite polynomial coefficient");
  }
  auto horner = [](const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  std::vector<double> d1c, d2c;
  for (std::size_t k = 1; k < coeffs.size(); ++k) d1c.push_back(static_cast<double>(k) * coeffs[k]);
  for (std::size_t k = 1; k < d1c.size(); ++k) d2c.push_back(static_cast<double>(k) * d1c[k]);
  if (label.empty()) {
    std::ostringstream os;
    os << "poly(";
    for (std::size_t k = 0; k < coeffs.size(); ++k) os << (k ? "," : "") << coeffs[k];
    os << ")";
    label = os.str();
  }
  Potential1D p([=](double x) { return horner(coeffs, x); },
                [=](double x) { return horner(d1c, x); },
                [=](double x) { return horner(d2c, x); }, std::move(label));
  p.coeffs_ = std::move(coeffs);
  return p;
}

Potential1D Potential1D::harmonic(double k, double center) {
  std::ostringstream os;
  os << "harmonic(k=" << k << ",c=" << center << ")";
  return polynomial({0.5 * k * center * center, -k * center, 0.5 * k}, os.str());
}

Potential1D Potential1D::from_function(Fn value, std::string label) {
  return Potential1D(std::move(value), Fn{}, Fn{}, std::move(label));
}

double Potential1D::gradient(double x, double h) const {
  if (d1_) return d1_(x);
  return (value_(x + h) - value_(x - h)) / (2.0 * h);
}

double Potential1D::curvature(double x, double h) const {
  if (d2_) return d2_(x);
  return (value_(x + h) - 2.0 * value_(x) + value_(x - h)) / (h * h);
}

std::vector<double> Potential1D::sample(const Grid1D& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = value_(grid.point(k));
  return v;
}

Potential1D Potential1D::plus(const Potential1D& other) const {
  if (coeffs_ && other.coeffs_) {
    std::vector<double> c(std::max(coeffs_->size(), other.coeffs_->size()), 0.0);
    for (std::size_t k = 0; k < coeffs_->size(); ++k) c[k] += (*coeffs_)[k];
    for (std::size_t k = 0; k < other.coeffs_->size(); ++k) c[k] += (*other.coeffs_)[k];
    return polynomial(std::move(c), label_ + "+" + other.label_);
  }
  const Potential1D a = *this;
  const Potential1D b = other;
  Fn d1, d2;
  if (has_analytic_derivatives() && other.has_analytic_derivatives()) {
    d1 = [a, b](double x) { return a.gradient(x) + b.gradient(x); };
    d2 = [a, b](double x) { return a.curvature(x) + b.curvature(x); };
  }
  return Potential1D([a, b](double x) { return a(x) + b(x); }, std::move(d1), std::move(d2),
                     label_ + "+" + other.label_);
}

// ---- CouplingSpec ------------------------------------------------------------

const char* to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::none: return "none";
    case CouplingKind::cubic: return "cubic";
    case CouplingKind::product: return "product";
    case CouplingKind::slowly_varying: return "slowly_varying";
    case CouplingKind::custom: return "custom";
  }
  return "?";
}

CouplingSpec::CouplingSpec()
    : value_([](double, double) { return 0.0; }),
      dy_([](double, double) { return 0.0; }),
      dxy_([](double, double) { return 0.0; }),
      label_("0") {}

CouplingSpec CouplingSpec::cubic(double eta) {
  if (!std::isfinite(eta)) throw InvalidInput("cubic coupling: eta must be finite");
  CouplingSpec w;
  if (eta == 0.0) return w;
  w.kind_ = CouplingKind::cubic;
  w.eta_ = eta;
  w.value_ = [eta](double x, double y) { return 0.5 * eta * x * y * y; };
  w.dy_ = [eta](double x, double y) { return eta * x * y; };
  w.dxy_ = [eta](double, double y) { return eta * y; };
  w.factors_ = std::make_pair(Potential1D::polynomial({0.0, 0.5}, "x/2"),
                              Potential1D::polynomial({0.0, 0.0, eta}, "eta*y^2"));
  std::ostringstream os;
  os << "cubic(eta=" << eta << ")";
  w.label_ = os.str();
  return w;
}

CouplingSpec CouplingSpec::product(Potential1D w1, Potential1D w2) {
  CouplingSpec w;
  w.kind_ = CouplingKind::product;
  w.value_ = [w1, w2](double x, double y) { return w1(x) * w2(y); };
  w.dy_ = [w1, w2](double x, double y) { return w1(x) * w2.gradient(y); };
  w.dxy_ = [w1, w2](double x, double y) { return w1.gradient(x) * w2.gradient(y); };
  w.label_ = "(" + w1.label() + ")*(" + w2.label() + ")";
  w.factors_ = std::make_pair(std::move(w1), std::move(w2));
  return w;
}

CouplingSpec CouplingSpec::slowly_varying(Fn2 fn, double eta, Fn2 w_y, Fn2 w_xy) {
  if (!fn) throw InvalidInput("slowly varying coupling: empty function");
  CouplingSpec w;
  w.kind_ = CouplingKind::slowly_varying;
  w.eta_ = eta;
  w.value_ = [fn, eta](double x, double y) { return fn(x, eta * y); };
  if (w_y) w.dy_ = [w_y, eta](double x, double y) { return eta * w_y(x, eta * y); };
  if (w_xy) w.dxy_ = [w_xy, eta](double x, double y) { return eta * w_xy(x, eta * y); };
  std::ostringstream os;
  os << "w(x,eta*y),eta=" << eta;
  w.label_ = os.str();
  return w;
}

CouplingSpec CouplingSpec::custom(Fn2 fn, std::string label) {
  if (!fn) throw InvalidInput("custom coupling: empty function");
  CouplingSpec w;
  w.kind_ = CouplingKind::custom;
  w.value_ = std::move(fn);
  w.dy_ = {};
  w.dxy_ = {};
  w.label_ = std::move(label);
  return w;
}

double CouplingSpec::grad_y(double x, double y) const {
  if (dy_) return dy_(x, y);
  const double h = 1e-5 * std::max(1.0, std::abs(y));
  return (value_(x, y + h) - value_(x, y - h)) / (2.0 * h);
}

double CouplingSpec::grad_xy(double x, double y) const {
  if (dxy_) return dxy_(x, y);
  const double h = 1e-4 * std::max(1.0, std::abs(x));
  return (grad_y(x + h, y) - grad_y(x - h, y)) / (2.0 * h);
}

CouplingSpec CouplingSpec::scaled(double factor) const {
  CouplingSpec out;
  switch (kind_) {
    case CouplingKind::none:
      out = *this;
      break;
    case CouplingKind::cubic:
      out = cubic(eta_ * factor);
      break;
    case CouplingKind::product: {
      const auto& [w1, w2] = *factors_;
      Potential1D w2s = w2;
      if (w2.coefficients()) {
        auto c = *w2.coefficients();
        for (double& v : c) v *= factor;
        w2s = Potential1D::polynomial(std::move(c));
      } else {
        const Potential1D base = w2;
        w2s = Potential1D(
            [base, factor](double y) { return factor * base(y); },
            [base, factor](double y) { return factor * base.gradient(y); },
            [base, factor](double y) { return factor * base.curvature(y); }, base.label());
      }
      out = product(w1, std::move(w2s));
      break;
    }
    case CouplingKind::slowly_varying:
    case CouplingKind::custom: {
      out = *this;
      const Fn2 v = value_, dy = dy_, dxy = dxy_;
      out.value_ = [v, factor](double x, double y) { return factor * v(x, y); };
      if (dy) out.dy_ = [dy, factor](double x, double y) { return factor * dy(x, y); };
      if (dxy) out.dxy_ = [dxy, factor](double x, double y) { return factor * dxy(x, y); };
      break;
    }
  }
  if (grad_y_sup) out.grad_y_sup = *grad_y_sup * std::abs(factor);
  if (grad_xy_sup) out.grad_xy_sup = *grad_xy_sup * std::abs(factor);
  return out;
}

CouplingSupNorms sample_coupling_derivatives(const CouplingSpec& w, const Grid1D& gx,
                                             const Grid1D& gy) {
  CouplingSupNorms s;
  if (w.is_zero()) return s;
  // The grid is periodic on [min, max); include the right end point too.
  auto pts = [](const Grid1D& g) {
    std::vector<double> p(g.points().begin(), g.points().end());
    p.push_back(g.max());
    return p;
  };
  const auto xs = pts(gx);
  const auto ys = pts(gy);
  for (double x : xs) {
    for (double y : ys) {
      s.grad_y = std::max(s.grad_y, std::abs(w.grad_y(x, y)));
      s.grad_xy = std::max(s.grad_xy, std::abs(w.grad_xy(x, y)));
    }
  }
  return s;
}

CouplingSupNorms coupling_sup_norms(const CouplingSpec& w, const Grid1D& gx, const Grid1D& gy,
                                    double safety) {
  const CouplingSupNorms sampled = sample_coupling_derivatives(w, gx, gy);
  CouplingSupNorms out{safety * sampled.grad_y, safety * sampled.grad_xy};
  if (w.grad_y_sup) {
    if (*w.grad_y_sup < sampled.grad_y) {
      throw InvalidInput("grad_y_sup is below the sampled maximum of |d_y W| on the grid");
    }
    out.grad_y = *w.grad_y_sup;
  }
  if (w.grad_xy_sup) {
    if (*w.grad_xy_sup < sampled.grad_xy) {
      throw InvalidInput("grad_xy_sup is below the sampled maximum of |d_x d_y W| on the grid");
    }
    out.grad_xy = *w.grad_xy_sup;
  }
  return out;
}

// ---- ModelSpec ---------------------------------------------------------------

void ModelSpec::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in (0, 1]");
  if (!(k4 >= 0.0)) throw InvalidInput("k4 must be non-negative");
  if (!(mass_x > 0.0) || !(mass_y > 0.0)) throw InvalidInput("masses must be positive");
}

ModelSpec make_model(Potential1D v1, Potential1D v2, CouplingSpec coupling, double epsilon,
                     double k4, double mass_x, double mass_y, std::string name) {
  ModelSpec m;
  m.v1 = std::move(v1);
  m.v2 = k4 > 0.0 ? v2.plus(Potential1D::polynomial({0, 0, 0, 0, 0.25 * k4}, "k4/4*y^4"))
                  : std::move(v2);
  m.coupling = std::move(coupling);
  m.epsilon = epsilon;
  m.k4 = k4;
  m.mass_x = mass_x;
  m.mass_y = mass_y;
  m.name = std::move(name);
  m.validate();
  return m;
}

// ---- rescaling -----------------------------------------------------------------

void PhysicalParams::validate() const {
  if (!(mu1 > 0.0 && mu2 > 0.0)) throw InvalidInput("masses must be strictly positive");
  if (!(omega1 > 0.0 && omega2 > 0.0)) throw InvalidInput("frequencies must be strictly positive");
  if (!(ell > 0.0)) throw InvalidInput("double-well width ell must be positive");
  if (!std::isfinite(eta_vec)) throw InvalidInput("eta must be finite");
}

Potential1D double_well(double c2, double ell) {
  if (!(ell > 0.0)) throw InvalidInput("double-well width must be positive");
  const double c = 0.5 * c2;
  std::ostringstream os;
  os << "double_well(k=" << c2 << ",L=" << ell << ")";
  return Potential1D::polynomial({0.0, 0.0, c, -c / ell, c / (4.0 * ell * ell)}, os.str());
}

Rescaled rescale(const PhysicalParams& p) {
  p.validate();
  Rescaled r;
  r.epsilon = std::sqrt(p.mu1 / p.mu2);
  r.varpi = p.omega2 / p.omega1;
  r.a1 = std::sqrt(1.0 / (p.mu1 * p.omega1));
  r.t1 = 1.0 / p.omega1;
  r.eta_prime = r.a1 * p.eta_vec / (p.mu1 * p.omega1 * p.omega1);
  const double bath = (r.varpi / r.epsilon) * (r.varpi / r.epsilon);
  // Time in the rescaled model is t = epsilon * tau / t1.
  r.model = make_model(double_well(1.0, p.ell), Potential1D::harmonic(bath),
                       CouplingSpec::cubic(r.eta_prime), std::min(r.epsilon, 1.0), 0.0, 1.0, 1.0,
                       "rescaled");
  return r;
}

PhysicalParams unrescale(double epsilon, double varpi, double eta_prime, double ell, double mu1,
                         double omega1) {
  if (!(epsilon > 0.0 && varpi > 0.0)) throw InvalidInput("epsilon and varpi must be positive");
  PhysicalParams p;
  p.mu1 = mu1;
  p.omega1 = omega1;
  p.mu2 = mu1 / (epsilon * epsilon);
  p.omega2 = varpi * omega1;
  const double a1 = std::sqrt(1.0 / (mu1 * omega1));
  p.eta_vec = eta_prime * mu1 * omega1 * omega1 / a1;
  p.ell = ell;
  p.validate();
  return p;
}

// ---- presets ---------------------------------------------------------------------

const char* to_string(Preset p) {
  switch (p) {
    case Preset::blue: return "blue";
    case Preset::red: return "red";
    case Preset::grey: return "grey";
    case Preset::yellow: return "yellow";
  }
  return "?";
}

Preset parse_preset(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "blue") return Preset::blue;
  if (s == "red") return Preset::red;
  if (s == "grey" || s == "gray") return Preset::grey;
  if (s == "yellow") return Preset::yellow;
  throw InvalidInput("unknown preset '" + name + "' (expected blue, red, grey or yellow)");
}

std::vector<Preset> all_presets() { return {Preset::blue, Preset::red, Preset::grey, Preset::yellow}; }

PresetParameters preset_parameters(Preset p) {
  switch (p) {
    case Preset::blue: return {p, 1.0 / 100.0, 0.000091127, -0.000082261, 0.43373};
    case Preset::red: return {p, 1.0 / 400.0, 0.000022782, -0.0000051413, 0.86747};
    case Preset::grey: return {p, 1.0 / 100.0, 0.000091127, -0.000092543, 0.43373};
    case Preset::yellow: return {p, 1.0 / 100.0, 0.000091127, -0.000030848, 0.43373};
  }
  throw InvalidInput("unknown preset");
}

PhysicalParams PresetParameters::physical() const {
  PhysicalParams ph;
  ph.mu1 = preset_constants::mu1;
  ph.mu2 = preset_constants::mu2;
  ph.omega1 = preset_constants::omega1;
  ph.omega2 = omega2;
  ph.eta_vec = eta;
  ph.ell = preset_constants::ell;
  return ph;
}

PresetSetup preset(Preset p) {
  namespace pc = preset_constants;
  const PresetParameters par = preset_parameters(p);
  const double k1 = pc::mu1 * pc::omega1 * pc::omega1;
  const double k2 = pc::mu2 * par.omega2 * par.omega2;
  ModelSpec m = make_model(double_well(k1, pc::double_well_width), Potential1D::harmonic(k2),
                           CouplingSpec::cubic(par.eta), 1.0, 0.0, pc::mu1, pc::mu2, to_string(p));
  // The red bath packet is twice as wide; its box is widened accordingly.
  const GridSpec gy = p == Preset::red ? GridSpec{-12.0, 12.0, 1024} : GridSpec{-8.0, 8.0, 1024};
  return PresetSetup{par, std::move(m), GridSpec{-3.0, 5.0, 128}, gy, pc::t1 / 200.0,
                     10.0 * pc::t1, 20, pc::t1};
}

// ---- initial data ----------------------------------------------------------------

cplx standard_gaussian(double z) {
  return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * z * z);
}

WaveFunction1D harmonic_ground_state(const Potential1D& v, double kinetic, double center,
                                     const Grid1D& grid) {
  const double k = v.curvature(center);
  if (!(k > 0.0)) {
    std::ostringstream os;
    os << "non-positive local curvature " << k << " at center " << center;
    throw InvalidInput(os.str());
  }
  if (!(kinetic > 0.0)) throw InvalidInput("kinetic coefficient must be positive");
  // Ground state of -kinetic/2 d^2 + k/2 s^2 is exp(-alpha s^2 / 2), alpha = sqrt(k/kinetic).
  const double alpha = std::sqrt(k / kinetic);
  auto f = WaveFunction1D::sample(
      grid, [&](double s) { return cplx(std::exp(-0.5 * alpha * (s - center) * (s - center))); });
  const double n = l2_norm(f);
  if (!(n > 0.0)) throw InvalidInput("ground state is not resolved on the grid");
  f *= 1.0 / n;
  return f;
}

namespace {

// Curvature of V1 + W(., y0) at x0 with the analytic V1 part kept exact.
double local_curvature_x(const ModelSpec& spec, double x0, double y0) {
  const double h = 1e-4 * std::max(1.0, std::abs(x0));
  const double w = spec.coupling.is_zero()
                       ? 0.0
                       : (spec.coupling(x0 + h, y0) - 2.0 * spec.coupling(x0, y0) +
                          spec.coupling(x0 - h, y0)) /
                             (h * h);
  return spec.v1.curvature(x0) + w;
}

double local_curvature_y(const ModelSpec& spec, double x0, double y0) {
  const double h = 1e-4 * std::max(1.0, std::abs(y0));
  const double w = spec.coupling.is_zero()
                       ? 0.0
                       : (spec.coupling(x0, y0 + h) - 2.0 * spec.coupling(x0, y0) +
                          spec.coupling(x0, y0 - h)) /
                             (h * h);
  return spec.v2.curvature(y0) + w;
}

WaveFunction1D ground_with_curvature(double k, double kinetic, double center, const Grid1D& g) {
  return harmonic_ground_state(Potential1D::harmonic(k, center), kinetic, center, g);
}

}  // namespace

WaveFunction1D initial_x_factor(const ModelSpec& spec, double center_x, double y0,
                                const Grid1D& gx) {
  return ground_with_curvature(local_curvature_x(spec, center_x, y0), spec.kinetic_x(), center_x,
                               gx);
}

std::pair<WaveFunction1D, WaveFunction1D> initial_product(const ModelSpec& spec,
                                                          const HarmonicGround& kind,
                                                          const Grid1D& gx, const Grid1D& gy) {
  spec.validate();
  const double kx = local_curvature_x(spec, kind.center_x, kind.center_y);
  const double ky = local_curvature_y(spec, kind.center_x, kind.center_y);
  return {ground_with_curvature(kx, spec.kinetic_x(), kind.center_x, gx),
          ground_with_curvature(ky, spec.kinetic_y(), kind.center_y, gy)};
}

std::pair<WaveFunction1D, WaveFunction1D> initial_product(const ModelSpec& spec,
                                                          const WavePacketInit& kind,
                                                          const Grid1D& gx, const Grid1D& gy) {
  spec.validate();
  if (!(spec.epsilon < 1.0)) throw InvalidInput("wave-packet initial data require epsilon < 1");
  const double eps = spec.epsilon;
  WaveFunction1D phix = initial_x_factor(spec, kind.center_x, kind.q0, gx);
  const auto amp = kind.amplitude ? kind.amplitude : std::function<cplx(double)>(standard_gaussian);
  const double s = std::sqrt(eps);
  auto phiy = WaveFunction1D::sample(gy, [&](double y) {
    const double z = (y - kind.q0) / s;
    return std::pow(eps, -0.25) * amp(z) * std::exp(cplx(0.0, kind.p0 * (y - kind.q0) / eps));
  });
  const double n = l2_norm(phiy);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("wave-packet amplitude has zero norm");
  phiy *= 1.0 / n;
  return {std::move(phix), std::move(phiy)};
}

}  // namespace scalesep
