#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "heisflow/common.hpp"

// Thin wrapper over FFTW. Transforms are unnormalized:
// forward uses e^{-2 pi i jk/n}, backward e^{+2 pi i jk/n}.
namespace heisflow::fft {

void forward(std::span<const cplx> in, std::span<cplx> out);
void backward(std::span<const cplx> in, std::span<cplx> out);

// `howmany` contiguous rows of length n, transformed in place.
void forward_rows(std::span<cplx> data, std::size_t n, std::size_t howmany);
void backward_rows(std::span<cplx> data, std::size_t n, std::size_t howmany);

// Smallest n' >= n of the form 2^a 3^b 5^c.
std::size_t good_size(std::size_t n);

// Full linear convolution, length a.size() + b.size() - 1.
std::vector<cplx> convolve(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace heisflow::fft
