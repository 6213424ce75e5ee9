#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace asian {

/// Coefficient j is the mass of bucket j.
using MassPolynomial = std::vector<double>;

struct ConvolutionOptions {
  /// Below this input length the direct product is used.
  std::size_t naive_crossover = 64;
};

/// Product of two polynomials, length a.size() + b.size() - 1. Uses an FFT
/// of the next power-of-two size, or the direct product when an input is
/// short or sparse. When both inputs are non-negative, round-off negatives
/// in the FFT output are clamped to zero.
MassPolynomial convolve(std::span<const double> a, std::span<const double> b,
                        const ConvolutionOptions& options = {});

/// Reference O(|a| |b|) product.
MassPolynomial convolve_naive(std::span<const double> a, std::span<const double> b);

/// Product of all inputs by balanced pairwise rounds; an odd polynomial out
/// is carried to the next round unpaired.
MassPolynomial product_tree(std::vector<MassPolynomial> polys, const ConvolutionOptions& options = {});

/// Forward then inverse real FFT at size next_pow2(x.size()); exposes the
/// transform's round-trip error.
std::vector<double> fft_round_trip(std::span<const double> x);

std::size_t next_pow2(std::size_t n) noexcept;

}  // namespace asian
