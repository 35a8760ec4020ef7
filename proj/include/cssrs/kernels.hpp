#pragma once

#include <cstddef>

namespace cssrs::nn::kernels {

// Dense kernels shared by the forward/backward passes. The OpenMP variants
// parallelize only over independent output elements, with a fixed serial
// reduction order per element, so their results are bitwise identical to the
// serial reference in kernels::serial (asserted by tests, timed by
// tools/bench).

// y[m] = W[m x n] * x
void matvec(double* y, const double* w, const double* x, int m, int n);

// dx[n] += W[m x n]^T * dy
void matvec_t_acc(double* dx, const double* w, const double* dy, int m, int n);

// dW[m x n] += dy[m] (outer) x[n]
void outer_acc(double* dw, const double* dy, const double* x, int m, int n);

// Valid 1-D convolution over time with ReLU and max-over-time pooling.
// input is T x c row-major, filters are K rows of (w*c) taps, windows
// range over t in [0, n_windows). Records the winning window and the
// pre-activation per filter for the backward pass.
void conv1d_relu_max(const double* input, int T, int c, const double* filters, int K, int w,
                     const double* bias, int n_windows, double* out, int* argmax,
                     double* preact);

// Backward of conv1d_relu_max; serial by contract (scatters into dinput).
void conv1d_relu_max_backward(const double* input, int T, int c, const double* filters, int K,
                              int w, const double* dout, const int* argmax,
                              const double* preact, double* dinput, double* dfilters,
                              double* dbias);

namespace serial {
void matvec(double* y, const double* w, const double* x, int m, int n);
void matvec_t_acc(double* dx, const double* w, const double* dy, int m, int n);
void outer_acc(double* dw, const double* dy, const double* x, int m, int n);
void conv1d_relu_max(const double* input, int T, int c, const double* filters, int K, int w,
                     const double* bias, int n_windows, double* out, int* argmax,
                     double* preact);
}  // namespace serial

}  // namespace cssrs::nn::kernels
