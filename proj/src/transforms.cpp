#include "scalesep/transforms.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace scalesep {

namespace {
std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

const Fft1D& cached_fft(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<Fft1D>> cache;
  std::lock_guard lock(cache_mutex());
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft1D>(n);
  return *slot;
}

const Fft2D& cached_fft2d(std::size_t nx, std::size_t ny) {
  static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<Fft2D>> cache;
  std::lock_guard lock(cache_mutex());
  auto& slot = cache[{nx, ny}];
  if (!slot) slot = std::make_unique<Fft2D>(nx, ny);
  return *slot;
}

}  // namespace scalesep
