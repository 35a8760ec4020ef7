// Micro-benchmark comparing the serial reference kernels against the
// OpenMP variants, plus an end-to-end LSTM forward timing. The two paths
// must agree bitwise; this tool reports the speed side of that bargain.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cssrs/graph.hpp"
#include "cssrs/kernels.hpp"
#include "cssrs/rng.hpp"
#include "cssrs/tensor.hpp"

using cssrs::Rng;
using cssrs::nn::Tensor;
namespace kernels = cssrs::nn::kernels;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

template <typename Fn>
double time_loop(int reps, const Fn& fn) {
  fn();  // warm up
  const double t0 = now_ms();
  for (int r = 0; r < reps; ++r) fn();
  return (now_ms() - t0) / reps;
}

void bench_matvec(int m, int n, int reps, Rng& rng) {
  Tensor w = random_tensor({m, n}, rng);
  Tensor x = random_tensor({n}, rng);
  Tensor y = Tensor::zeros({m});
  const double serial = time_loop(reps, [&] {
    kernels::serial::matvec(y.data.data(), w.data.data(), x.data.data(), m, n);
  });
  const double parallel = time_loop(reps, [&] {
    kernels::matvec(y.data.data(), w.data.data(), x.data.data(), m, n);
  });
  std::printf("matvec %5dx%-5d   serial %8.3f ms   omp %8.3f ms   speedup %.2fx\n", m, n, serial,
              parallel, serial / parallel);
}

void bench_conv(int T, int c, int K, int w, int reps, Rng& rng) {
  Tensor input = random_tensor({T, c}, rng);
  Tensor filters = random_tensor({K, w * c}, rng);
  Tensor bias = random_tensor({K}, rng);
  Tensor out = Tensor::zeros({K});
  std::vector<int> argmax(K);
  std::vector<double> preact(K);
  const int windows = T - w + 1;
  const double serial = time_loop(reps, [&] {
    kernels::serial::conv1d_relu_max(input.data.data(), T, c, filters.data.data(), K, w,
                                     bias.data.data(), windows, out.data.data(), argmax.data(),
                                     preact.data());
  });
  const double parallel = time_loop(reps, [&] {
    kernels::conv1d_relu_max(input.data.data(), T, c, filters.data.data(), K, w,
                             bias.data.data(), windows, out.data.data(), argmax.data(),
                             preact.data());
  });
  std::printf("conv1d T=%-5d c=%-3d K=%-3d w=%d   serial %8.3f ms   omp %8.3f ms   speedup %.2fx\n",
              T, c, K, w, serial, parallel, serial / parallel);
}

void bench_lstm(int T, int d, int h, int reps, Rng& rng) {
  Tensor inputs = random_tensor({T, d}, rng);
  Tensor wx = random_tensor({4 * h, d}, rng);
  Tensor wh = random_tensor({4 * h, h}, rng);
  Tensor b = random_tensor({4 * h}, rng);
  const double ms = time_loop(reps, [&] { cssrs::nn::lstm_forward(inputs, wx, wh, b); });
  std::printf("lstm  T=%-5d d=%-3d h=%-3d          forward %8.3f ms\n", T, d, h, ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled in this build\n");
#endif
  Rng rng(20240601);
  bench_matvec(256, 256, 200, rng);
  bench_matvec(1024, 512, 50, rng);
  bench_conv(512, 50, 100, 5, 50, rng);
  bench_conv(4096, 50, 100, 5, 10, rng);
  bench_lstm(128, 50, 64, 20, rng);
  bench_lstm(256, 50, 64, 10, rng);
  return 0;
}
