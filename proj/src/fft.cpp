#include "ddff/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <tuple>

namespace ddff {
namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread-safe; execution with new-array execute is. Plans are cached per thread.
fftw_plan plan_for(int rows, int cols, int sign) {
  thread_local std::map<std::tuple<int, int, int>, PlanHandle> cache;
  auto key = std::make_tuple(rows, cols, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second.get();
  ComplexPlane scratch_in(rows, cols), scratch_out(rows, cols);
  fftw_plan p = fftw_plan_dft_2d(rows, cols, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                 reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, PlanHandle(p));
  return p;
}

ComplexPlane transform(const ComplexPlane& in, int sign) {
  ComplexPlane src = in;
  ComplexPlane dst(in.rows(), in.cols());
  fftw_execute_dft(plan_for(static_cast<int>(in.rows()), static_cast<int>(in.cols()), sign),
                   reinterpret_cast<fftw_complex*>(src.data()), reinterpret_cast<fftw_complex*>(dst.data()));
  return dst;
}

}  // namespace

ComplexPlane fft2(const ComplexPlane& image) { return transform(image, FFTW_FORWARD); }

ComplexPlane fft2(const Plane<double>& image) { return transform(image.cast<std::complex<double>>(), FFTW_FORWARD); }

ComplexPlane ifft2(const ComplexPlane& spectrum) {
  ComplexPlane out = transform(spectrum, FFTW_BACKWARD);
  out /= static_cast<double>(spectrum.size());
  return out;
}

Eigen::ArrayXd fft_frequencies(Eigen::Index n) {
  Eigen::ArrayXd f(n);
  for (Eigen::Index k = 0; k < n; ++k) f(k) = static_cast<double>(k <= (n - 1) / 2 ? k : k - n) / static_cast<double>(n);
  return f;
}

}  // namespace ddff
