// Copyright 2026 The pai Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pai/grid_density.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace pai {
namespace {

double GaussianCdf(double x, double mean, double sigma) {
  return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

// FFTW plan creation/destruction is not thread-safe; executions on distinct
// plans are.
std::mutex& FftwMutex() {
  static std::mutex m;
  return m;
}

size_t NextPow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Linear convolution of `signal` with a centered kernel (odd length
// 2*half+1), returning a vector of the signal's length. Mass falling outside
// the window is reported through *spilled.
class KernelConvolver {
 public:
  KernelConvolver(std::span<const double> kernel, size_t signal_len)
      : half_((kernel.size() - 1) / 2),
        signal_len_(signal_len),
        fft_len_(NextPow2(signal_len + kernel.size())) {
    std::lock_guard<std::mutex> lock(FftwMutex());
    in_ = fftw_alloc_complex(fft_len_);
    out_ = fftw_alloc_complex(fft_len_);
    kernel_fft_ = fftw_alloc_complex(fft_len_);
    forward_ = fftw_plan_dft_1d(static_cast<int>(fft_len_), in_, out_, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(static_cast<int>(fft_len_), in_, out_, FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
    // Kernel FFT once; the kernel is reused across steps.
    for (size_t i = 0; i < fft_len_; ++i) in_[i][0] = in_[i][1] = 0.0;
    for (size_t i = 0; i < kernel.size(); ++i) in_[i][0] = kernel[i];
    fftw_execute(forward_);
    std::copy_n(&out_[0][0], 2 * fft_len_, &kernel_fft_[0][0]);
  }

  ~KernelConvolver() {
    std::lock_guard<std::mutex> lock(FftwMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(in_);
    fftw_free(out_);
    fftw_free(kernel_fft_);
  }

  KernelConvolver(const KernelConvolver&) = delete;
  KernelConvolver& operator=(const KernelConvolver&) = delete;

  std::vector<double> Convolve(std::span<const double> signal, double* spilled) {
    for (size_t i = 0; i < fft_len_; ++i) in_[i][0] = in_[i][1] = 0.0;
    for (size_t i = 0; i < signal.size(); ++i) in_[i][0] = signal[i];
    fftw_execute(forward_);
    for (size_t i = 0; i < fft_len_; ++i) {
      const double re = out_[i][0] * kernel_fft_[i][0] - out_[i][1] * kernel_fft_[i][1];
      const double im = out_[i][0] * kernel_fft_[i][1] + out_[i][1] * kernel_fft_[i][0];
      in_[i][0] = re;
      in_[i][1] = im;
    }
    fftw_execute(backward_);
    // Full linear convolution occupies [0, signal_len + 2*half); the result
    // window aligned with the input grid is [half, half + signal_len).
    std::vector<double> result(signal_len_);
    const double scale = 1.0 / static_cast<double>(fft_len_);
    double kept = 0.0;
    for (size_t i = 0; i < signal_len_; ++i) {
      const double v = out_[half_ + i][0] * scale;
      result[i] = std::max(v, 0.0);  // flush FFT round-off negatives
      kept += result[i];
    }
    double total = 0.0;
    for (double v : signal) total += v;
    if (spilled != nullptr) *spilled = std::max(total - kept, 0.0);
    return result;
  }

 private:
  size_t half_;
  size_t signal_len_;
  size_t fft_len_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_complex* kernel_fft_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace

int GridDensity::CellOf(double x) const {
  const int i = static_cast<int>(std::floor((x - lo) / Delta()));
  return std::clamp(i, 0, cells - 1);
}

double GridDensity::Mean() const {
  double m = 0.0;
  for (int i = 0; i < cells; ++i) m += mass[i] * CellCenter(i);
  return m;
}

double GridDensity::Variance() const {
  const double m = Mean();
  double v = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double d = CellCenter(i) - m;
    v += mass[i] * d * d;
  }
  return v;
}

void GridDensity::Validate() const {
  if (cells < 64) throw std::invalid_argument("GridDensity: need at least 64 cells");
  if (!(hi > lo)) throw std::invalid_argument("GridDensity: need hi > lo");
  if (static_cast<int>(mass.size()) != cells) {
    throw std::invalid_argument("GridDensity: mass length mismatch");
  }
  double total = 0.0;
  for (double v : mass) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("GridDensity: masses must be finite and >= 0");
    }
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("GridDensity: mass must sum to 1 within 1e-9");
  }
}

GridDensity GridDensity::PointMass(double x, double lo, double hi, int cells) {
  GridDensity g{lo, hi, cells, std::vector<double>(cells, 0.0)};
  if (x < lo || x > hi) throw std::invalid_argument("PointMass: x outside the grid");
  g.mass[g.CellOf(x)] = 1.0;
  g.Validate();
  return g;
}

GridDensity GridDensity::Gaussian(double mean, double sigma, double lo, double hi, int cells) {
  if (!(sigma > 0.0)) throw std::invalid_argument("GridDensity::Gaussian: sigma must be > 0");
  GridDensity g{lo, hi, cells, std::vector<double>(cells, 0.0)};
  const double delta = g.Delta();
  double total = 0.0;
  double upper = GaussianCdf(lo, mean, sigma);
  for (int i = 0; i < cells; ++i) {
    const double next = GaussianCdf(lo + (i + 1) * delta, mean, sigma);
    g.mass[i] = std::max(next - upper, 0.0);
    total += g.mass[i];
    upper = next;
  }
  if (total <= 0.0) throw std::invalid_argument("GridDensity::Gaussian: no mass on grid");
  for (double& v : g.mass) v /= total;
  g.Validate();
  return g;
}

Contraction1D Contraction1D::Identity() { return Contraction1D(Kind::kIdentity); }

Contraction1D Contraction1D::Clamp(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("Contraction1D::Clamp: need lo <= hi");
  Contraction1D map(Kind::kClamp);
  map.clamp_lo_ = lo;
  map.clamp_hi_ = hi;
  return map;
}

Contraction1D Contraction1D::Scale(double c) {
  if (std::fabs(c) > 1.0) {
    throw std::invalid_argument("Contraction1D::Scale: |c| must be <= 1");
  }
  Contraction1D map(Kind::kScale);
  map.scale_ = c;
  return map;
}

Contraction1D Contraction1D::GradStep(double eta, std::function<double(double)> fprime) {
  if (!(eta >= 0.0)) throw std::invalid_argument("Contraction1D::GradStep: eta must be >= 0");
  if (!fprime) throw std::invalid_argument("Contraction1D::GradStep: fprime required");
  Contraction1D map(Kind::kGradStep);
  map.eta_ = eta;
  map.fprime_ = std::move(fprime);
  return map;
}

double Contraction1D::Apply(double x) const {
  switch (kind_) {
    case Kind::kIdentity:
      return x;
    case Kind::kClamp:
      return std::clamp(x, clamp_lo_, clamp_hi_);
    case Kind::kScale:
      return scale_ * x;
    case Kind::kGradStep:
      return x - eta_ * fprime_(x);
  }
  throw std::logic_error("Contraction1D::Apply: unknown kind");
}

void Contraction1D::VerifyLipschitzOnGrid(const GridDensity& grid) const {
  constexpr double kTol = 1e-9;
  double prev_x = grid.CellCenter(0);
  double prev_y = Apply(prev_x);
  for (int i = 1; i < grid.cells; ++i) {
    const double x = grid.CellCenter(i);
    const double y = Apply(x);
    if (std::fabs(y - prev_y) > (x - prev_x) * (1.0 + kTol)) {
      throw std::invalid_argument("Contraction1D: map exceeds slope 1 on the grid");
    }
    prev_x = x;
    prev_y = y;
  }
}

GridDensity Pushforward(const GridDensity& density, const Contraction1D& map) {
  density.Validate();
  GridDensity out{density.lo, density.hi, density.cells,
                  std::vector<double>(density.cells, 0.0), density.reliable_floor};
  for (int i = 0; i < density.cells; ++i) {
    if (density.mass[i] == 0.0) continue;
    out.mass[out.CellOf(map.Apply(density.CellCenter(i)))] += density.mass[i];
  }
  return out;
}

PropagateResult Propagate(const GridDensity& initial, std::span<const Contraction1D> maps,
                          double sigma, const PropagateOptions& options) {
  initial.Validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("Propagate: sigma must be > 0");
  if (maps.empty()) throw std::invalid_argument("Propagate: need at least one map");

  const double delta = initial.Delta();
  // The kernel extends until its cell masses underflow (37 sigma), so chains
  // started far apart keep their true overlap instead of losing it to
  // truncation.
  const int half = std::max(1, static_cast<int>(std::ceil(37.0 * sigma / delta)));
  std::vector<double> kernel(2 * half + 1);
  double kernel_total = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double mass = GaussianCdf((k + 0.5) * delta, 0.0, sigma) -
                        GaussianCdf((k - 0.5) * delta, 0.0, sigma);
    kernel[k + half] = mass;
    kernel_total += mass;
  }
  for (double& v : kernel) v /= kernel_total;

  KernelConvolver convolver(kernel, initial.mass.size());
  PropagateResult result{initial, 0.0};
  for (const Contraction1D& map : maps) {
    map.VerifyLipschitzOnGrid(result.density);
    GridDensity pushed = Pushforward(result.density, map);
    double spilled = 0.0;
    pushed.mass = convolver.Convolve(pushed.mass, &spilled);
    if (spilled > options.truncation_budget_per_step) {
      throw std::domain_error(
          "Propagate: truncation budget exceeded; widen the grid support");
    }
    result.total_truncation += spilled;
    double total = 0.0;
    for (double v : pushed.mass) total += v;
    for (double& v : pushed.mass) v /= total;
    result.density = std::move(pushed);
  }
  double peak = 0.0;
  for (double v : result.density.mass) peak = std::max(peak, v);
  result.density.reliable_floor = 1e-9 * peak;
  result.density.Validate();
  return result;
}

double RenyiOnGrid(const GridDensity& p, const GridDensity& q, RenyiOrder order) {
  if (p.cells != q.cells || p.lo != q.lo || p.hi != q.hi) {
    throw std::invalid_argument("RenyiOnGrid: densities must share a grid");
  }
  const double alpha = order.alpha;
  // Mass of p sitting on exact zeros of q beyond this means p's support
  // escapes q's: divergence is +inf.
  constexpr double kEscapeTol = 1e-9;
  double escaped = 0.0;
  // sum_i (p_i/q_i)^alpha q_i in log space: terms alpha*ln p - (alpha-1)*ln q.
  // Cells below either density's reliability floor are excluded; dropping
  // nonnegative terms can only lower the quadrature.
  double max_exponent = -std::numeric_limits<double>::infinity();
  std::vector<double> exponents;
  exponents.reserve(p.cells);
  for (int i = 0; i < p.cells; ++i) {
    const double pi = p.mass[i];
    const double qi = q.mass[i];
    if (pi <= p.reliable_floor || pi == 0.0) continue;  // 0/0 = 0 convention
    if (qi <= q.reliable_floor || qi == 0.0) {
      // For an exact density a zero cell really is outside the support; for
      // a propagated one it is merely untrusted (round-off may have been
      // clamped), so it is excluded without a verdict.
      if (q.reliable_floor == 0.0) escaped += pi;
      continue;
    }
    const double e = alpha * std::log(pi) - (alpha - 1.0) * std::log(qi);
    exponents.push_back(e);
    max_exponent = std::max(max_exponent, e);
  }
  if (escaped > kEscapeTol) return std::numeric_limits<double>::infinity();
  if (exponents.empty()) throw std::invalid_argument("RenyiOnGrid: p has no usable mass");
  double sum = 0.0;
  for (double e : exponents) sum += std::exp(e - max_exponent);
  const double log_integral = max_exponent + std::log(sum);
  return std::max(0.0, log_integral / (alpha - 1.0));
}

}  // namespace pai
