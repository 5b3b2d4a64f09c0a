#include "core/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace becmirror {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void fft_2d(std::complex<double>* data, int rows, int cols, int sign) {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(rows, cols, p, p,
                            sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

namespace {

void fft_many(std::complex<double>* data, int n, int howmany, int stride,
              int dist, int sign) {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft(1, &n, howmany, p, nullptr, stride, dist, p,
                              nullptr, stride, dist,
                              sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                              FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void fft_rows(std::complex<double>* data, int rows, int cols, int sign) {
  fft_many(data, cols, rows, 1, cols, sign);
}

void fft_cols(std::complex<double>* data, int rows, int cols, int sign) {
  fft_many(data, rows, cols, cols, 1, sign);
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace becmirror
