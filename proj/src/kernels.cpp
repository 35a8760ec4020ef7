#include "cssrs/kernels.hpp"

#include <limits>

namespace cssrs::nn::kernels {

namespace serial {

void matvec(double* y, const double* w, const double* x, int m, int n) {
  for (int i = 0; i < m; ++i) {
    const double* row = w + static_cast<std::size_t>(i) * n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_t_acc(double* dx, const double* w, const double* dy, int m, int n) {
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += w[static_cast<std::size_t>(i) * n + j] * dy[i];
    dx[j] += acc;
  }
}

void outer_acc(double* dw, const double* dy, const double* x, int m, int n) {
  for (int i = 0; i < m; ++i) {
    double* row = dw + static_cast<std::size_t>(i) * n;
    const double g = dy[i];
    for (int j = 0; j < n; ++j) row[j] += g * x[j];
  }
}

void conv1d_relu_max(const double* input, int T, int c, const double* filters, int K, int w,
                     const double* bias, int n_windows, double* out, int* argmax,
                     double* preact) {
  (void)T;
  const int taps = w * c;
  for (int k = 0; k < K; ++k) {
    const double* f = filters + static_cast<std::size_t>(k) * taps;
    double best = -std::numeric_limits<double>::infinity();
    int best_t = 0;
    for (int t = 0; t < n_windows; ++t) {
      const double* window = input + static_cast<std::size_t>(t) * c;
      double acc = bias[k];
      for (int j = 0; j < taps; ++j) acc += f[j] * window[j];
      if (acc > best) {
        best = acc;
        best_t = t;
      }
    }
    preact[k] = best;
    argmax[k] = best_t;
    out[k] = best > 0.0 ? best : 0.0;
  }
}

}  // namespace serial

void matvec(double* y, const double* w, const double* x, int m, int n) {
#pragma omp parallel for schedule(static) if (static_cast<long>(m) * n > 16384)
  for (int i = 0; i < m; ++i) {
    const double* row = w + static_cast<std::size_t>(i) * n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_t_acc(double* dx, const double* w, const double* dy, int m, int n) {
#pragma omp parallel for schedule(static) if (static_cast<long>(m) * n > 16384)
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += w[static_cast<std::size_t>(i) * n + j] * dy[i];
    dx[j] += acc;
  }
}

void outer_acc(double* dw, const double* dy, const double* x, int m, int n) {
#pragma omp parallel for schedule(static) if (static_cast<long>(m) * n > 16384)
  for (int i = 0; i < m; ++i) {
    double* row = dw + static_cast<std::size_t>(i) * n;
    const double g = dy[i];
    for (int j = 0; j < n; ++j) row[j] += g * x[j];
  }
}

void conv1d_relu_max(const double* input, int T, int c, const double* filters, int K, int w,
                     const double* bias, int n_windows, double* out, int* argmax,
                     double* preact) {
  (void)T;
  const int taps = w * c;
#pragma omp parallel for schedule(static) if (static_cast<long>(K) * n_windows * taps > 16384)
  for (int k = 0; k < K; ++k) {
    const double* f = filters + static_cast<std::size_t>(k) * taps;
    double best = -std::numeric_limits<double>::infinity();
    int best_t = 0;
    for (int t = 0; t < n_windows; ++t) {
      const double* window = input + static_cast<std::size_t>(t) * c;
      double acc = bias[k];
      for (int j = 0; j < taps; ++j) acc += f[j] * window[j];
      if (acc > best) {
        best = acc;
        best_t = t;
      }
    }
    preact[k] = best;
    argmax[k] = best_t;
    out[k] = best > 0.0 ? best : 0.0;
  }
}

void conv1d_relu_max_backward(const double* input, int T, int c, const double* filters, int K,
                              int w, const double* dout, const int* argmax,
                              const double* preact, double* dinput, double* dfilters,
                              double* dbias) {
  (void)T;
  const int taps = w * c;
  for (int k = 0; k < K; ++k) {
    if (dout[k] == 0.0 || preact[k] <= 0.0) continue;
    const double g = dout[k];
    const int t = argmax[k];
    const double* window = input + static_cast<std::size_t>(t) * c;
    const double* f = filters + static_cast<std::size_t>(k) * taps;
    double* df = dfilters + static_cast<std::size_t>(k) * taps;
    double* dwin = dinput + static_cast<std::size_t>(t) * c;
    for (int j = 0; j < taps; ++j) {
      df[j] += g * window[j];
      dwin[j] += g * f[j];
    }
    dbias[k] += g;
  }
}

}  // namespace cssrs::nn::kernels
