#include "asian/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "asian/error.hpp"

namespace asian {
namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

/// FFTW planning is not thread-safe; executing a finished plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [size, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.inverse);
    }
  }

  PlanPair get(std::size_t size) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(size);
    if (it != plans_.end()) return it->second;
    RealBuffer real(fftw_alloc_real(size));
    ComplexBuffer spectrum(fftw_alloc_complex(size / 2 + 1));
    const int n = static_cast<int>(size);
    PlanPair plans;
    plans.forward = fftw_plan_dft_r2c_1d(n, real.get(), spectrum.get(), FFTW_ESTIMATE);
    plans.inverse = fftw_plan_dft_c2r_1d(n, spectrum.get(), real.get(), FFTW_ESTIMATE);
    if (plans.forward == nullptr || plans.inverse == nullptr) {
      fail(ErrorCode::InvariantViolation, "FFTW failed to create a plan");
    }
    plans_.emplace(size, plans);
    return plans;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

bool non_negative(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; });
}

std::size_t count_nonzero(std::span<const double> x) {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }));
}

/// Direct product skipping zero coefficients of `sparse`.
MassPolynomial convolve_direct(std::span<const double> sparse, std::span<const double> dense) {
  MassPolynomial out(sparse.size() + dense.size() - 1, 0.0);
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    const double ai = sparse[i];
    if (ai == 0.0) continue;
    double* dst = out.data() + i;
    for (std::size_t j = 0; j < dense.size(); ++j) dst[j] += ai * dense[j];
  }
  return out;
}

MassPolynomial convolve_fft(std::span<const double> a, std::span<const double> b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t size = next_pow2(out_len);
  const std::size_t bins = size / 2 + 1;
  const PlanPair plans = plan_cache().get(size);

  RealBuffer real(fftw_alloc_real(size));
  ComplexBuffer fa(fftw_alloc_complex(bins));
  ComplexBuffer fb(fftw_alloc_complex(bins));

  std::fill_n(real.get(), size, 0.0);
  std::copy(a.begin(), a.end(), real.get());
  fftw_execute_dft_r2c(plans.forward, real.get(), fa.get());
  std::fill_n(real.get(), size, 0.0);
  std::copy(b.begin(), b.end(), real.get());
  fftw_execute_dft_r2c(plans.forward, real.get(), fb.get());

  for (std::size_t i = 0; i < bins; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute_dft_c2r(plans.inverse, fa.get(), real.get());

  const double scale = 1.0 / static_cast<double>(size);
  MassPolynomial out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = real[i] * scale;
  return out;
}

void clamp_round_off(MassPolynomial& out, std::span<const double> a, std::span<const double> b) {
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (double v : a) sum_a += v;
  for (double v : b) sum_b += v;
  const double tolerance = 1e-9 * std::max(1.0, sum_a * sum_b);
  for (double& c : out) {
    if (c < 0.0) {
      if (c < -tolerance) {
        fail(ErrorCode::InvariantViolation, "FFT round-off produced a large negative mass");
      }
      c = 0.0;
    }
  }
}

}  // namespace

std::size_t next_pow2(std::size_t n) noexcept { return n <= 1 ? 1 : std::bit_ceil(n); }

MassPolynomial convolve_naive(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::InvalidArgument, "polynomials must be non-empty");
  MassPolynomial out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

MassPolynomial convolve(std::span<const double> a, std::span<const double> b,
                        const ConvolutionOptions& options) {
  require(!a.empty() && !b.empty(), ErrorCode::InvalidArgument, "polynomials must be non-empty");
  if (std::min(a.size(), b.size()) <= options.naive_crossover) {
    return a.size() <= b.size() ? convolve_direct(a, b) : convolve_direct(b, a);
  }
  // A sparse factor (e.g. the one or two live buckets of a shallow subtree
  // leaf) is cheaper to apply directly than to transform.
  const std::size_t nnz_a = count_nonzero(a);
  const std::size_t nnz_b = count_nonzero(b);
  const double size = static_cast<double>(next_pow2(a.size() + b.size() - 1));
  const double fft_cost = 6.0 * size * std::log2(size);
  const double direct_a = static_cast<double>(nnz_a) * static_cast<double>(b.size());
  const double direct_b = static_cast<double>(nnz_b) * static_cast<double>(a.size());
  if (std::min(direct_a, direct_b) <= fft_cost) {
    return direct_a <= direct_b ? convolve_direct(a, b) : convolve_direct(b, a);
  }
  MassPolynomial out = convolve_fft(a, b);
  if (non_negative(a) && non_negative(b)) clamp_round_off(out, a, b);
  return out;
}

MassPolynomial product_tree(std::vector<MassPolynomial> polys, const ConvolutionOptions& options) {
  require(!polys.empty(), ErrorCode::InvalidArgument, "product of zero polynomials");
  while (polys.size() > 1) {
    std::vector<MassPolynomial> next;
    next.reserve((polys.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < polys.size(); i += 2) {
      next.push_back(convolve(polys[i], polys[i + 1], options));
    }
    if (polys.size() % 2 == 1) next.push_back(std::move(polys.back()));
    polys = std::move(next);
  }
  return std::move(polys.front());
}

std::vector<double> fft_round_trip(std::span<const double> x) {
  require(!x.empty(), ErrorCode::InvalidArgument, "empty input");
  const std::size_t size = next_pow2(x.size());
  const PlanPair plans = plan_cache().get(size);
  RealBuffer real(fftw_alloc_real(size));
  ComplexBuffer spectrum(fftw_alloc_complex(size / 2 + 1));
  std::fill_n(real.get(), size, 0.0);
  std::copy(x.begin(), x.end(), real.get());
  fftw_execute_dft_r2c(plans.forward, real.get(), spectrum.get());
  fftw_execute_dft_c2r(plans.inverse, spectrum.get(), real.get());
  std::vector<double> out(x.size());
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = real[i] * scale;
  return out;
}

}  // namespace asian
