#include "scalesep/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace scalesep {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanHandle {
  fftw_plan plan = nullptr;
  PlanHandle() = default;
  explicit PlanHandle(fftw_plan p) : plan(p) {
    if (!plan) throw std::runtime_error("FFTW failed to create a plan");
  }
  PlanHandle(const PlanHandle&) = delete;
  PlanHandle& operator=(const PlanHandle&) = delete;
  PlanHandle(PlanHandle&& o) noexcept : plan(o.plan) { o.plan = nullptr; }
  PlanHandle& operator=(PlanHandle&& o) noexcept {
    std::swap(plan, o.plan);
    return *this;
  }
  ~PlanHandle() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// FFTW_ESTIMATE keeps plans deterministic from run to run.
constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

PlanHandle plan_many(int n, int howmany, int stride, int dist, int sign) {
  std::vector<cplx> scratch(static_cast<std::size_t>(n - 1) * stride +
                            static_cast<std::size_t>(howmany - 1) * dist + 1);
  std::lock_guard lock(planner_mutex());
  return PlanHandle(fftw_plan_many_dft(1, &n, howmany, as_fftw(scratch.data()), nullptr, stride,
                                       dist, as_fftw(scratch.data()), nullptr, stride, dist, sign,
                                       kPlanFlags));
}

std::size_t column_block(std::size_t ny) { return std::min<std::size_t>(16, ny); }

}  // namespace

Exec parse_exec(const char* name) {
  if (std::strcmp(name, "serial") == 0) return Exec::serial;
  if (std::strcmp(name, "parallel") == 0) return Exec::parallel;
  throw std::invalid_argument(std::string("unknown execution mode '") + name + "'");
}

const char* to_string(Exec exec) { return exec == Exec::serial ? "serial" : "parallel"; }

// ---- Fft1D -------------------------------------------------------------------

struct Fft1D::Plans {
  PlanHandle fwd;
  PlanHandle bwd;
};

Fft1D::Fft1D(std::size_t n) : n_(n) {
  auto p = std::make_shared<Plans>();
  p->fwd = plan_many(static_cast<int>(n), 1, 1, static_cast<int>(n), FFTW_FORWARD);
  p->bwd = plan_many(static_cast<int>(n), 1, 1, static_cast<int>(n), FFTW_BACKWARD);
  plans_ = std::move(p);
}

void Fft1D::forward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->fwd.plan, as_fftw(data.data()), as_fftw(data.data()));
}

void Fft1D::backward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->bwd.plan, as_fftw(data.data()), as_fftw(data.data()));
}

// ---- Fft2D -------------------------------------------------------------------

struct Fft2D::Plans {
  PlanHandle full_fwd, full_bwd;  // serial path
  PlanHandle row_fwd, row_bwd;    // one row of length ny
  PlanHandle col_fwd, col_bwd;    // a block of adjacent columns of length nx
};

Fft2D::Fft2D(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
  auto p = std::make_shared<Plans>();
  {
    std::vector<cplx> scratch(nx * ny);
    std::lock_guard lock(planner_mutex());
    p->full_fwd = PlanHandle(fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny),
                                              as_fftw(scratch.data()), as_fftw(scratch.data()),
                                              FFTW_FORWARD, kPlanFlags));
    p->full_bwd = PlanHandle(fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny),
                                              as_fftw(scratch.data()), as_fftw(scratch.data()),
                                              FFTW_BACKWARD, kPlanFlags));
  }
  const int nyi = static_cast<int>(ny);
  p->row_fwd = plan_many(nyi, 1, 1, nyi, FFTW_FORWARD);
  p->row_bwd = plan_many(nyi, 1, 1, nyi, FFTW_BACKWARD);
  const int block = static_cast<int>(column_block(ny));
  p->col_fwd = plan_many(static_cast<int>(nx), block, nyi, 1, FFTW_FORWARD);
  p->col_bwd = plan_many(static_cast<int>(nx), block, nyi, 1, FFTW_BACKWARD);
  plans_ = std::move(p);
}

void Fft2D::forward(std::span<cplx> data, Exec exec) const { run(data, exec, true); }
void Fft2D::backward(std::span<cplx> data, Exec exec) const { run(data, exec, false); }

void Fft2D::run(std::span<cplx> data, Exec exec, bool forward) const {
  if (data.size() != nx_ * ny_) throw std::invalid_argument("Fft2D: buffer size mismatch");
  cplx* base = data.data();
  if (exec == Exec::serial) {
    fftw_execute_dft(forward ? plans_->full_fwd.plan : plans_->full_bwd.plan, as_fftw(base),
                     as_fftw(base));
    return;
  }
  const fftw_plan row = forward ? plans_->row_fwd.plan : plans_->row_bwd.plan;
  const fftw_plan col = forward ? plans_->col_fwd.plan : plans_->col_bwd.plan;
  const auto nx = static_cast<std::ptrdiff_t>(nx_);
  const auto ny = static_cast<std::ptrdiff_t>(ny_);
  const auto block = static_cast<std::ptrdiff_t>(column_block(ny_));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nx; ++i) {
    fftw_execute_dft(row, as_fftw(base + i * ny), as_fftw(base + i * ny));
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < ny; j += block) {
    fftw_execute_dft(col, as_fftw(base + j), as_fftw(base + j));
  }
}

// ---- kernels -------------------------------------------------------------------

namespace kernels {

namespace {

template <class RowFn>
double row_reduce(std::size_t total, std::size_t row, Exec exec, RowFn&& fn) {
  if (row == 0 || total % row != 0) throw std::invalid_argument("row length must divide size");
  const std::size_t rows = total / row;
  if (exec == Exec::serial) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += fn(r * row, (r + 1) * row);
    return acc;
  }
  std::vector<double> partial(rows);
  const auto nrows = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < nrows; ++r) {
    partial[r] = fn(static_cast<std::size_t>(r) * row, static_cast<std::size_t>(r + 1) * row);
  }
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc;
}

}  // namespace

void multiply(std::span<cplx> data, std::span<const cplx> factors, Exec exec) {
  if (data.size() != factors.size()) throw std::invalid_argument("multiply: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t k = 0; k < n; ++k) data[k] *= factors[k];
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) data[k] *= factors[k];
}

void scale(std::span<cplx> data, double factor, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t k = 0; k < n; ++k) data[k] *= factor;
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) data[k] *= factor;
}

void outer(std::span<cplx> out, std::span<const cplx> fx, std::span<const cplx> fy, cplx factor,
           Exec exec) {
  const std::size_t ny = fy.size();
  if (out.size() != fx.size() * ny) throw std::invalid_argument("outer: size mismatch");
  const auto nx = static_cast<std::ptrdiff_t>(fx.size());
  auto fill_row = [&](std::ptrdiff_t i) {
    const cplx a = factor * fx[i];
    cplx* row = out.data() + i * static_cast<std::ptrdiff_t>(ny);
    for (std::size_t j = 0; j < ny; ++j) row[j] = a * fy[j];
  };
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) fill_row(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nx; ++i) fill_row(i);
}

double squared_norm(std::span<const cplx> a, std::size_t row, Exec exec) {
  return row_reduce(a.size(), row, exec, [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t k = b; k < e; ++k) s += std::norm(a[k]);
    return s;
  });
}

double squared_distance(std::span<const cplx> a, std::span<const cplx> b, std::size_t row,
                        Exec exec) {
  if (a.size() != b.size()) throw std::invalid_argument("squared_distance: size mismatch");
  return row_reduce(a.size(), row, exec, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += std::norm(a[k] - b[k]);
    return s;
  });
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b, std::size_t row, Exec exec) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  const double re = row_reduce(a.size(), row, exec, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += (std::conj(a[k]) * b[k]).real();
    return s;
  });
  const double im = row_reduce(a.size(), row, exec, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += (std::conj(a[k]) * b[k]).imag();
    return s;
  });
  return {re, im};
}

double weighted_density_sum(std::span<const cplx> a, std::span<const double> w, std::size_t row,
                            Exec exec) {
  if (a.size() != w.size()) throw std::invalid_argument("weighted_density_sum: size mismatch");
  return row_reduce(a.size(), row, exec, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += w[k] * std::norm(a[k]);
    return s;
  });
}

}  // namespace kernels
}  // namespace scalesep
