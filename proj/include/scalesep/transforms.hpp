#pragma once

#include <cstddef>

#include "scalesep/kernels.hpp"

namespace scalesep {

/// Process-wide plan cache; returned references stay valid for the program
/// lifetime and are safe to execute from several threads.
const Fft1D& cached_fft(std::size_t n);
const Fft2D& cached_fft2d(std::size_t nx, std::size_t ny);

}  // namespace scalesep
