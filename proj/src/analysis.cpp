#include "scalesep/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace scalesep {

// ---- time series helpers -----------------------------------------------------

std::vector<double> cumulative_trapezoid(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw InvalidInput("cumulative_trapezoid: length mismatch");
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  }
  return out;
}

double initial_slope(std::span<const double> t, std::span<const double> f) {
  if (t.size() < 2 || f.size() < 2) throw InvalidInput("initial_slope: need two samples");
  return (f[1] - f[0]) / (t[1] - t[0]);
}

// ---- errors ------------------------------------------------------------------

std::vector<double> l2_error_series(std::span<const WaveFunction2D> ref,
                                    std::span<const WaveFunction2D> approx) {
  if (ref.size() != approx.size()) throw InvalidInput("l2_error_series: misaligned series");
  std::vector<double> out(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) out[k] = l2_distance(ref[k], approx[k]);
  return out;
}

std::vector<double> l2_error_series(std::span<const double> t_ref,
                                    std::span<const WaveFunction2D> ref,
                                    std::span<const double> t_approx,
                                    std::span<const WaveFunction2D> approx) {
  if (t_ref.size() != t_approx.size() || t_ref.size() != ref.size()) {
    throw InvalidInput("l2_error_series: misaligned series");
  }
  for (std::size_t k = 0; k < t_ref.size(); ++k) {
    if (std::abs(t_ref[k] - t_approx[k]) > 1e-9 * std::max(1.0, std::abs(t_ref[k]))) {
      throw InvalidInput("l2_error_series: sample times differ");
    }
  }
  return l2_error_series(ref, approx);
}

namespace {

WaveFunction2D difference(const WaveFunction2D& a, const WaveFunction2D& b) {
  WaveFunction2D d = a;
  auto v = d.values();
  const auto w = b.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= w[k];
  return d;
}

WaveFunction2D multiply_coordinate(const WaveFunction2D& f, Axis axis) {
  WaveFunction2D out = f;
  const std::size_t ny = f.ny();
  for (std::size_t i = 0; i < f.nx(); ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      out(i, j) *= axis == Axis::x ? f.gridx().point(i) : f.gridy().point(j);
    }
  }
  return out;
}

}  // namespace

double h1_error(const WaveFunction2D& psi, const WaveFunction2D& app, Axis axis) {
  const WaveFunction2D d = difference(psi, app);
  return l2_norm(spectral_gradient(d, axis)) + l2_norm(multiply_coordinate(d, axis));
}

// ---- bounds --------------------------------------------------------------------

const char* to_string(BoundKind k) { return k == BoundKind::bruteforce ? "bruteforce" : "meanfield"; }

const char* to_string(BoundPath p) {
  switch (p) {
    case BoundPath::grad_y: return "grad_y";
    case BoundPath::grad_x_grad_y: return "grad_x_grad_y";
    case BoundPath::weighted: return "weighted";
    case BoundPath::product_quadratic: return "product_quadratic";
  }
  return "?";
}

BoundKind parse_bound_kind(const std::string& s) {
  if (s == "bruteforce") return BoundKind::bruteforce;
  if (s == "meanfield") return BoundKind::meanfield;
  throw InvalidInput("unknown bound kind '" + s + "'");
}

BoundPath parse_bound_path(const std::string& s) {
  if (s == "grad_y") return BoundPath::grad_y;
  if (s == "grad_x_grad_y") return BoundPath::grad_x_grad_y;
  if (s == "weighted") return BoundPath::weighted;
  if (s == "product_quadratic") return BoundPath::product_quadratic;
  throw InvalidInput("unknown bound path '" + s + "'");
}

namespace {

double bracket(double s) { return std::sqrt(1.0 + s * s); }

std::vector<double> times_of(std::span<const ProductState> states) {
  std::vector<double> t(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) t[k] = states[k].t;
  return t;
}

std::vector<double> sample_weight(const Grid1D& g, const std::function<double(double)>& w) {
  std::vector<double> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = w(g.point(k));
  return out;
}

// ||w_x phix|| ||w_y phiy|| per state.
std::vector<double> product_integrand(std::span<const ProductState> states,
                                      const std::vector<double>& wx,
                                      const std::vector<double>& wy) {
  std::vector<double> out(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double a = wx.empty() ? l2_norm(states[k].phix) : weighted_norm(states[k].phix, wx);
    const double b = wy.empty() ? l2_norm(states[k].phiy) : weighted_norm(states[k].phiy, wy);
    out[k] = a * b;
  }
  return out;
}

std::vector<double> scaled_integral(std::span<const double> t, std::span<const double> f,
                                    double factor) {
  auto out = cumulative_trapezoid(t, f);
  for (double& v : out) v *= factor;
  return out;
}

// Box sup of |f| including the right end point of the periodic grid.
double box_sup(const Grid1D& g, const std::function<double(double)>& f) {
  double m = std::abs(f(g.max()));
  for (double s : g.points()) m = std::max(m, std::abs(f(s)));
  return m;
}

// eta when W2 = eta y^2 exactly, otherwise nullopt.
std::optional<double> pure_quadratic_strength(const Potential1D& w2) {
  const auto& c = w2.coefficients();
  if (!c || c->size() != 3 || (*c)[0] != 0.0 || (*c)[1] != 0.0) return std::nullopt;
  return (*c)[2];
}

}  // namespace

double weighted_coupling_constant(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy,
                                  double sigma_x, double sigma_y, double safety) {
  const CouplingSpec& w = spec.coupling;
  if (w.is_zero()) return 0.0;
  if (w.kind() == CouplingKind::cubic && sigma_x >= 1.0 && sigma_y >= 1.0) {
    // |eta x y| <= |eta| <x> <y> <= |eta| <x>^sx <y>^sy on all of R^2.
    return std::abs(w.eta());
  }
  double m = 0.0;
  std::vector<double> xs(gx.points().begin(), gx.points().end());
  std::vector<double> ys(gy.points().begin(), gy.points().end());
  xs.push_back(gx.max());
  ys.push_back(gy.max());
  for (double x : xs) {
    for (double y : ys) {
      m = std::max(m, std::abs(w.grad_y(x, y)) /
                          (std::pow(bracket(x), sigma_x) * std::pow(bracket(y), sigma_y)));
    }
  }
  return safety * m;
}

FlatBound bound_flat_l2(BoundKind kind, std::span<const BoundPathSpec> paths,
                        std::span<const ProductState> states, const ModelSpec& spec,
                        const BoundOptions& options) {
  if (states.empty()) throw InvalidInput("bound_flat_l2: empty trajectory");
  if (paths.empty()) throw InvalidInput("bound_flat_l2: no bound path requested");
  const CouplingSpec& w = spec.coupling;
  if (w.unbounded_gradient() &&
      std::none_of(paths.begin(), paths.end(),
                   [](const BoundPathSpec& p) { return p.path == BoundPath::weighted; })) {
    throw InvalidInput(
        "cubic coupling has no finite sup-norm of d_y W; request the weighted bound path");
  }
  const bool bf = kind == BoundKind::bruteforce;
  const Collocation c = bf ? options.collocation : Collocation{};
  const Grid1D& gx = states.front().phix.grid();
  const Grid1D& gy = states.front().phiy.grid();
  const auto t = times_of(states);
  const double inv_eps = 1.0 / spec.epsilon;
  const double phi0x = l2_norm(states.front().phix);
  const CouplingSupNorms sup = coupling_sup_norms(w, gx, gy, options.sup_safety);

  FlatBound out;
  for (const BoundPathSpec& p : paths) {
    std::vector<double> series;
    std::string name = std::string(to_string(kind)) + "_" + to_string(p.path);
    switch (p.path) {
      case BoundPath::grad_y: {
        const auto wy = sample_weight(gy, [&](double y) { return y - c.y0; });
        const auto f = product_integrand(states, {}, wy);
        std::vector<double> g(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) g[k] = f[k] / l2_norm(states[k].phix);
        series = scaled_integral(t, g, (bf ? 2.0 : 4.0) * sup.grad_y * phi0x * inv_eps);
        break;
      }
      case BoundPath::grad_x_grad_y: {
        const auto wx = sample_weight(gx, [&](double x) { return x - c.x0; });
        const auto wy = sample_weight(gy, [&](double y) { return y - c.y0; });
        series = scaled_integral(t, product_integrand(states, wx, wy),
                                 (bf ? 1.0 : 4.0) * sup.grad_xy * inv_eps);
        break;
      }
      case BoundPath::weighted: {
        std::ostringstream os;
        os << name << "_sx" << p.sigma_x << "_sy" << p.sigma_y;
        name = os.str();
        const double eta_w =
            weighted_coupling_constant(spec, gx, gy, p.sigma_x, p.sigma_y, options.sup_safety);
        std::vector<double> wx, wy;
        if (bf) {
          const double bx0 = std::pow(bracket(c.x0), p.sigma_x);
          wx = sample_weight(gx, [&](double x) { return std::pow(bracket(x), p.sigma_x) + bx0; });
          wy = sample_weight(gy, [&](double y) {
            return std::pow(std::max(bracket(y), bracket(c.y0)), p.sigma_y) * std::abs(y - c.y0);
          });
        } else {
          wx = sample_weight(gx, [&](double x) { return std::pow(bracket(x), p.sigma_x); });
          wy = sample_weight(gy,
                             [&](double y) { return std::pow(bracket(y), p.sigma_y) * std::abs(y); });
        }
        series = scaled_integral(t, product_integrand(states, wx, wy),
                                 (bf ? 1.0 : 8.0) * eta_w * inv_eps);
        break;
      }
      case BoundPath::product_quadratic: {
        if (!w.factors()) throw InvalidInput("product_quadratic bound needs W = W1(x) W2(y)");
        const auto& [w1, w2] = *w.factors();
        if (bf) {
          const double w1x0 = w1(c.x0);
          const double s1 =
              options.sup_safety * box_sup(gx, [&](double x) { return w1(x) - w1x0; });
          const double w2y0 = w2(c.y0);
          const auto wy = sample_weight(gy, [&](double y) { return w2(y) - w2y0; });
          std::vector<double> f(states.size());
          for (std::size_t k = 0; k < states.size(); ++k) f[k] = weighted_norm(states[k].phiy, wy);
          series = scaled_integral(t, f, s1 * phi0x * inv_eps);
        } else {
          const auto eta = pure_quadratic_strength(w2);
          if (!eta) throw InvalidInput("product_quadratic mean-field bound needs W2 = eta y^2");
          const double s1 = options.sup_safety * box_sup(gx, [&](double x) { return w1(x); });
          const auto wy = sample_weight(gy, [](double y) { return y * y; });
          std::vector<double> f(states.size());
          for (std::size_t k = 0; k < states.size(); ++k) f[k] = weighted_norm(states[k].phiy, wy);
          series = scaled_integral(t, f, 16.0 * std::abs(*eta) * s1 * phi0x * inv_eps);
        }
        break;
      }
    }
    out.paths.push_back({std::move(name), std::move(series)});
  }
  out.reported = out.paths.front().values;
  for (const auto& s : out.paths) {
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      out.reported[k] = std::min(out.reported[k], s.values[k]);
    }
  }
  return out;
}

double gradient_free_integrand(const ProductState& state, const ModelSpec& spec) {
  const auto& f = spec.coupling.factors();
  if (!f) throw InvalidInput("gradient-free bound needs a separable coupling W1(x) W2(y)");
  const auto w1 = f->first.sample(state.phix.grid());
  const auto w2 = f->second.sample(state.phiy.grid());
  auto variance = [](const WaveFunction1D& phi, const std::vector<double>& w) {
    std::vector<double> w_sq(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) w_sq[k] = w[k] * w[k];
    const double m = expectation(phi, w);
    return std::max(0.0, expectation(phi, w_sq) - m * m);
  };
  return std::sqrt(variance(state.phix, w1) * variance(state.phiy, w2));
}

std::vector<double> bound_gradient_free(std::span<const ProductState> states,
                                        const ModelSpec& spec, BoundKind kind,
                                        Collocation collocation) {
  if (states.empty()) throw InvalidInput("bound_gradient_free: empty trajectory");
  const auto& f = spec.coupling.factors();
  if (!f) throw InvalidInput("gradient-free bound needs a separable coupling W1(x) W2(y)");
  const auto t = times_of(states);
  const double inv_eps = 1.0 / spec.epsilon;
  std::vector<double> g(states.size());
  if (kind == BoundKind::meanfield) {
    const double n0 = l2_norm(states.front().phix) * l2_norm(states.front().phiy);
    for (std::size_t k = 0; k < states.size(); ++k) g[k] = gradient_free_integrand(states[k], spec);
    return scaled_integral(t, g, n0 * inv_eps);
  }
  const Potential1D& w1 = f->first;
  const Potential1D& w2 = f->second;
  const double a = w1(collocation.x0), b = w2(collocation.y0);
  const auto wx = sample_weight(states.front().phix.grid(), [&](double x) { return w1(x) - a; });
  const auto wy = sample_weight(states.front().phiy.grid(), [&](double y) { return w2(y) - b; });
  return scaled_integral(t, product_integrand(states, wx, wy), inv_eps);
}

std::vector<double> bound_h1(std::span<const ProductState> states, const ModelSpec& spec,
                             Axis axis, H1Constants constants, double sup_safety) {
  if (states.empty()) throw InvalidInput("bound_h1: empty trajectory");
  const Grid1D& gx = states.front().phix.grid();
  const Grid1D& gy = states.front().phiy.grid();
  const double sup = coupling_sup_norms(spec.coupling, gx, gy, sup_safety).grad_xy;
  const auto t = times_of(states);
  std::vector<double> g(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const WaveFunction1D& a = axis == Axis::x ? states[k].phix : states[k].phiy;  // differentiated
    const WaveFunction1D& b = axis == Axis::x ? states[k].phiy : states[k].phix;  // moment only
    const auto s_a = a.grid().points();
    const auto s_b = b.grid().points();
    const std::vector<double> ya(s_a.begin(), s_a.end());
    const std::vector<double> yb(s_b.begin(), s_b.end());
    std::vector<double> abs_a(ya.size());
    for (std::size_t j = 0; j < ya.size(); ++j) abs_a[j] = std::abs(ya[j]);
    const WaveFunction1D da = spectral_gradient(a);
    const double sum = weighted_norm(a, ya) + l2_norm(da) + weighted_norm(da, abs_a);
    g[k] = std::exp(constants.rate * t[k]) * weighted_norm(b, yb) * sum;
  }
  return scaled_integral(t, g, constants.prefactor * sup / spec.epsilon);
}

double calibrate_prefactor(std::span<const double> unit_bound, std::span<const double> measured) {
  if (unit_bound.size() != measured.size()) throw InvalidInput("calibrate_prefactor: length mismatch");
  for (std::size_t k = 1; k < unit_bound.size(); ++k) {
    if (unit_bound[k] > 0.0) return measured[k] / unit_bound[k];
  }
  return 1.0;
}

std::vector<double> moment_functional(std::span<const ProductState> states) {
  if (states.empty()) return {};
  const auto t = times_of(states);
  const double nx0 = l2_norm(states.front().phix);
  const double ny0 = l2_norm(states.front().phiy);
  const auto px = states.front().phix.grid().points();
  const auto py = states.front().phiy.grid().points();
  const std::vector<double> xs(px.begin(), px.end()), ys(py.begin(), py.end());
  std::vector<double> g(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& fx = states[k].phix;
    const auto& fy = states[k].phiy;
    WaveFunction1D xfx = fx, yfy = fy;
    for (std::size_t i = 0; i < xs.size(); ++i) xfx[i] *= xs[i];
    for (std::size_t j = 0; j < ys.size(); ++j) yfy[j] *= ys[j];
    const double nxf = l2_norm(xfx), nyf = l2_norm(yfy);
    const double dfx = l2_norm(spectral_gradient(fx)), dfy = l2_norm(spectral_gradient(fy));
    g[k] = nx0 * nyf + ny0 * nxf + nx0 * l2_norm(spectral_gradient(yfy)) +
           ny0 * l2_norm(spectral_gradient(xfx)) + nxf * dfy + dfx * nyf;
  }
  return cumulative_trapezoid(t, g);
}

std::vector<NamedSeries> product_moment_integrals(std::span<const ProductState> states) {
  if (states.empty()) return {};
  const auto t = times_of(states);
  const Grid1D& gx = states.front().phix.grid();
  const Grid1D& gy = states.front().phiy.grid();
  const auto wx = sample_weight(gx, [](double x) { return x; });
  const auto wy = sample_weight(gy, [](double y) { return y; });
  const auto wy2 = sample_weight(gy, [](double y) { return y * y; });
  std::vector<double> a(states.size()), b(states.size()), c(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double ny = weighted_norm(states[k].phiy, wy);
    a[k] = ny;
    b[k] = weighted_norm(states[k].phix, wx) * ny;
    c[k] = weighted_norm(states[k].phiy, wy2);
  }
  return {{"int_y_phiy", cumulative_trapezoid(t, a)},
          {"int_x_phix_y_phiy", cumulative_trapezoid(t, b)},
          {"int_y2_phiy", cumulative_trapezoid(t, c)}};
}

// ---- observables -------------------------------------------------------------------

void QuadraticObservable::add_term(Exponents e, double coefficient) {
  for (int v : e) {
    if (v < 0) throw InvalidInput("observable: negative exponent");
  }
  if (e[0] + e[1] + e[2] + e[3] > 2) throw InvalidInput("observable: degree > 2 is not supported");
  if (!std::isfinite(coefficient)) throw InvalidInput("observable: non-finite coefficient");
  terms_[e] += coefficient;
}

int QuadraticObservable::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    if (c != 0.0) d = std::max(d, e[0] + e[1] + e[2] + e[3]);
  }
  return d;
}

std::string QuadraticObservable::describe() const {
  static const char* names[] = {"x", "xi_x", "y", "xi_y"};
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (c == 0.0) continue;
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int v = 0; v < 4; ++v) {
      if (e[v] == 1) os << "*" << names[v];
      if (e[v] == 2) os << "*" << names[v] << "^2";
    }
  }
  if (first) os << "0";
  return os.str();
}

namespace {

// Elementary operators: 0 x, 1 xi_x, 2 y, 3 xi_y.
WaveFunction2D apply_elementary(const WaveFunction2D& f, int var, double eps_y) {
  switch (var) {
    case 0: return multiply_coordinate(f, Axis::x);
    case 2: return multiply_coordinate(f, Axis::y);
    case 1:
    case 3: {
      WaveFunction2D d = spectral_gradient(f, var == 1 ? Axis::x : Axis::y,
                                           var == 1 ? 1.0 : eps_y);
      for (cplx& z : d.values()) z *= cplx(0.0, -1.0);
      return d;
    }
    default: throw InvalidInput("observable: bad variable index");
  }
}

// The (at most two) elementary factors of a monomial.
std::vector<int> factors_of(const QuadraticObservable::Exponents& e) {
  std::vector<int> f;
  for (int v = 0; v < 4; ++v) {
    for (int k = 0; k < e[v]; ++k) f.push_back(v);
  }
  return f;
}

bool conjugate_pair(int a, int b) { return (a == 0 && b == 1) || (a == 2 && b == 3); }

}  // namespace

double QuadraticObservable::expectation(const WaveFunction2D& psi) const {
  const double eps_y = scaling == ObservableScaling::semiclassical ? epsilon : 1.0;
  std::array<std::optional<WaveFunction2D>, 4> cache;
  auto op = [&](int v) -> const WaveFunction2D& {
    if (!cache[v]) cache[v] = apply_elementary(psi, v, eps_y);
    return *cache[v];
  };
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    if (c == 0.0) continue;
    const auto f = factors_of(e);
    double value = 0.0;
    if (f.empty()) {
      value = inner_product(psi, psi).real();
    } else if (f.size() == 1) {
      value = inner_product(psi, op(f[0])).real();
    } else {
      // Symmetric ordering: <psi, (AB + BA)/2 psi> = Re <A psi, B psi> for self-adjoint A, B.
      value = inner_product(op(f[0]), op(f[1])).real();
    }
    total += c * value;
  }
  return total;
}

WaveFunction2D QuadraticObservable::apply(const WaveFunction2D& psi) const {
  const double eps_y = scaling == ObservableScaling::semiclassical ? epsilon : 1.0;
  WaveFunction2D out(psi.gridx(), psi.gridy());
  auto accumulate = [&](const WaveFunction2D& g, double c) {
    auto o = out.values();
    const auto v = g.values();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] += c * v[k];
  };
  for (const auto& [e, c] : terms_) {
    if (c == 0.0) continue;
    const auto f = factors_of(e);
    if (f.empty()) {
      accumulate(psi, c);
    } else if (f.size() == 1) {
      accumulate(apply_elementary(psi, f[0], eps_y), c);
    } else if (conjugate_pair(f[0], f[1])) {
      accumulate(apply_elementary(apply_elementary(psi, f[1], eps_y), f[0], eps_y), 0.5 * c);
      accumulate(apply_elementary(apply_elementary(psi, f[0], eps_y), f[1], eps_y), 0.5 * c);
    } else {
      accumulate(apply_elementary(apply_elementary(psi, f[1], eps_y), f[0], eps_y), c);
    }
  }
  return out;
}

QuadraticObservable parse_observable(const std::string& text) {
  QuadraticObservable b;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& why) -> void {
    std::ostringstream os;
    os << "observable '" << text << "': " << why << " at position " << pos;
    throw InvalidInput(os.str());
  };
  auto variable = [&](const std::string& name) -> int {
    if (name == "x") return 0;
    if (name == "xi_x" || name == "px" || name == "p_x") return 1;
    if (name == "y") return 2;
    if (name == "xi_y" || name == "py" || name == "p_y" || name == "xi") return 3;
    return -1;
  };
  skip();
  if (pos == text.size()) fail("empty expression");
  bool any = false;
  while (true) {
    skip();
    if (pos >= text.size()) break;
    double sign = 1.0;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1.0 : 1.0;
      ++pos;
    } else if (any) {
      fail("expected '+' or '-'");
    }
    double coef = sign;
    QuadraticObservable::Exponents e{0, 0, 0, 0};
    bool need_factor = true;
    while (need_factor) {
      skip();
      if (pos >= text.size()) fail("unexpected end");
      const char ch = text[pos];
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        std::size_t used = 0;
        try {
          coef *= std::stod(text.substr(pos), &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        pos += used;
      } else if (std::isalpha(static_cast<unsigned char>(ch))) {
        std::size_t end = pos;
        while (end < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_')) {
          ++end;
        }
        const std::string name = text.substr(pos, end - pos);
        const int v = variable(name);
        if (v < 0) fail("unknown symbol '" + name + "'");
        pos = end;
        int power = 1;
        skip();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip();
          if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
            fail("expected an integer exponent");
          }
          power = text[pos] - '0';
          ++pos;
        }
        e[v] += power;
      } else {
        fail(std::string("unexpected character '") + ch + "'");
      }
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
      } else {
        need_factor = false;
      }
    }
    b.add_term(e, coef);
    any = true;
  }
  return b;
}

std::vector<double> observable_error(std::span<const WaveFunction2D> ref,
                                     std::span<const WaveFunction2D> approx,
                                     const QuadraticObservable& b) {
  if (ref.size() != approx.size()) throw InvalidInput("observable_error: misaligned series");
  std::vector<double> out(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    out[k] = b.expectation(ref[k]) - b.expectation(approx[k]);
  }
  return out;
}

// ---- rates ------------------------------------------------------------------------------

RateFit semiclassical_rate_fit(const std::map<double, double>& errors_by_epsilon, RateMode mode) {
  if (errors_by_epsilon.size() < 3) throw InvalidInput("rate fit needs at least three epsilons");
  std::vector<double> lx, ly;
  for (const auto& [eps, err] : errors_by_epsilon) {
    const double e = mode == RateMode::observable ? std::abs(err) : err;
    if (!(eps > 0.0) || !(e > 0.0)) throw InvalidInput("rate fit needs positive eps and errors");
    lx.push_back(std::log(eps));
    ly.push_back(std::log(e));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("rate fit needs distinct epsilons");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

// ---- report -----------------------------------------------------------------------------

namespace {

template <class Fn>
void for_each_group(const ErrorReport& r, Fn&& fn) {
  fn("bound:", r.bounds);
  fn("norm:", r.norms);
  fn("energy:", r.energies);
  fn("moment:", r.moment_integrals);
  fn("observable:", r.observable_errors);
  fn("", r.extra);
}

std::string energy_unit(const ErrorReport& r) {
  return r.time_unit == "a.u." ? "hartree" : "1";
}

}  // namespace

void ErrorReport::validate() const {
  const std::size_t n = times.size();
  if (!err_l2.empty() && err_l2.size() != n) throw InvalidInput("report: err_l2 length mismatch");
  for_each_group(*this, [&](const char* prefix, const std::vector<NamedSeries>& g) {
    for (const auto& s : g) {
      if (s.values.size() != n) {
        throw InvalidInput(std::string("report: series '") + prefix + s.name + "' length mismatch");
      }
    }
  });
  for (const auto& s : bounds) {
    for (double v : s.values) {
      if (!(v >= 0.0)) throw InvalidInput("report: bound '" + s.name + "' is negative or NaN");
    }
  }
}

std::vector<std::string> ErrorReport::column_names() const {
  std::vector<std::string> names;
  names.push_back("t [" + time_unit + "]");
  if (t1) names.push_back("t/t1 [1]");
  if (!err_l2.empty()) names.push_back("err_l2 [1]");
  const std::string eu = energy_unit(*this);
  for_each_group(*this, [&](const char* prefix, const std::vector<NamedSeries>& g) {
    const std::string p = prefix;
    const std::string unit = p == "energy:" ? eu : "1";
    for (const auto& s : g) names.push_back(p + s.name + " [" + unit + "]");
  });
  return names;
}

void ErrorReport::write_csv(std::ostream& os) const {
  validate();
  const auto names = column_names();
  for (std::size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << names[k];
  os << "\n";
  char buf[64];
  auto put = [&](double v, bool first) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) os << ',';
    os << buf;
  };
  for (std::size_t r = 0; r < times.size(); ++r) {
    put(times[r], true);
    if (t1) put(times[r] / *t1, false);
    if (!err_l2.empty()) put(err_l2[r], false);
    for_each_group(*this, [&](const char*, const std::vector<NamedSeries>& g) {
      for (const auto& s : g) put(s.values[r], false);
    });
    os << "\n";
  }
}

}  // namespace scalesep
