#include "cssrs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cssrs/error.hpp"
#include "cssrs/kernels.hpp"

namespace cssrs::nn {

namespace {

constexpr double kProbFloor = 1e-12;

struct LstmCache {
  int T = 0, d = 0, h = 0;
  Tensor gates;   // T x 4h, packed [i f g o], post-activation
  Tensor cells;   // T x h
  Tensor tanh_c;  // T x h
  Tensor hidden;  // T x h
};

// Shared recurrence; cache optional (inference paths skip it).
Tensor lstm_run(const Tensor& inputs, const Tensor& wx, const Tensor& wh, const Tensor& b,
                LstmCache* cache) {
  const int T = inputs.rows();
  const int d = inputs.cols();
  if (wx.shape.size() != 2 || wh.shape.size() != 2 || b.shape.size() != 1)
    throw internal_error("lstm: parameter tensors must be wx[4h x d], wh[4h x h], b[4h]");
  const int four_h = wx.rows();
  if (four_h % 4 != 0) throw internal_error("lstm: first parameter dim must be 4*h");
  const int h = four_h / 4;
  if (wx.cols() != d || wh.rows() != four_h || wh.cols() != h || b.rows() != four_h)
    throw internal_error("lstm: parameter shape mismatch for d=" + std::to_string(d) +
                         " h=" + std::to_string(h));
  if (T < 1) throw internal_error("lstm: empty input sequence");

  if (cache) {
    cache->T = T;
    cache->d = d;
    cache->h = h;
    cache->gates = Tensor::zeros({T, four_h});
    cache->cells = Tensor::zeros({T, h});
    cache->tanh_c = Tensor::zeros({T, h});
    cache->hidden = Tensor::zeros({T, h});
  }

  std::vector<double> a(static_cast<std::size_t>(four_h));
  std::vector<double> ah(static_cast<std::size_t>(four_h));
  std::vector<double> h_prev(static_cast<std::size_t>(h), 0.0);
  std::vector<double> c_prev(static_cast<std::size_t>(h), 0.0);
  std::vector<double> c_cur(static_cast<std::size_t>(h));
  std::vector<double> h_cur(static_cast<std::size_t>(h));

  for (int t = 0; t < T; ++t) {
    kernels::matvec(a.data(), wx.data.data(), inputs.row(t), four_h, d);
    kernels::matvec(ah.data(), wh.data.data(), h_prev.data(), four_h, h);
    for (int j = 0; j < four_h; ++j) a[j] += ah[j] + b[j];
    for (int j = 0; j < h; ++j) {
      const double i_g = 1.0 / (1.0 + std::exp(-a[j]));
      const double f_g = 1.0 / (1.0 + std::exp(-a[h + j]));
      const double g_g = std::tanh(a[2 * h + j]);
      const double o_g = 1.0 / (1.0 + std::exp(-a[3 * h + j]));
      const double c = f_g * c_prev[j] + i_g * g_g;
      const double tc = std::tanh(c);
      c_cur[j] = c;
      h_cur[j] = o_g * tc;
      if (cache) {
        cache->gates(t, j) = i_g;
        cache->gates(t, h + j) = f_g;
        cache->gates(t, 2 * h + j) = g_g;
        cache->gates(t, 3 * h + j) = o_g;
        cache->cells(t, j) = c;
        cache->tanh_c(t, j) = tc;
        cache->hidden(t, j) = h_cur[j];
      }
    }
    std::swap(h_prev, h_cur);
    std::swap(c_prev, c_cur);
  }
  return Tensor::from({h}, std::vector<double>(h_prev.begin(), h_prev.end()));
}

int conv_windows(int T, int width, int valid_rows) {
  if (T < width)
    throw internal_error("conv1d: sequence length " + std::to_string(T) +
                         " shorter than filter width " + std::to_string(width));
  if (valid_rows < 1) throw internal_error("conv1d: need at least one valid row");
  return std::min(T - width + 1, valid_rows);
}

}  // namespace

int Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size() - 1);
}

Tensor& Graph::grad_buf(int id) {
  Node& n = nodes_[id];
  if (!n.grad_alloc) {
    n.grad = Tensor::zeros(val(id).shape);
    n.grad_alloc = true;
  }
  return n.grad;
}

const Tensor& Graph::value(int id) const { return val(id); }

bool Graph::has_grad(int id) const { return nodes_[id].grad_alloc; }

const Tensor& Graph::grad(int id) const {
  if (!nodes_[id].grad_alloc) throw internal_error("graph: gradient not computed for node");
  return nodes_[id].grad;
}

int Graph::leaf(const Tensor* value) {
  Node n;
  n.external = value;
  n.needs_grad = true;
  return push(std::move(n));
}

int Graph::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  n.needs_grad = false;
  return push(std::move(n));
}

int Graph::embed(const Tensor* table, std::vector<int> ids) {
  const int V = table->rows();
  const int d = table->cols();
  if (ids.empty()) throw internal_error("embed: empty id sequence");
  for (int id : ids) {
    if (id < 0 || id >= V)
      throw internal_error("embed: token id " + std::to_string(id) + " out of range [0," +
                           std::to_string(V) + ")");
  }
  Tensor out = Tensor::zeros({static_cast<int>(ids.size()), d});
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const double* src = table->row(ids[t]);
    std::copy(src, src + d, out.row(static_cast<int>(t)));
  }
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;  // the gather grad is the harvest source
  int id = push(std::move(n));
  embed_records_.push_back({id, table, std::move(ids)});
  return id;
}

int Graph::lstm(int inputs, int wx, int wh, int b) {
  auto cache = std::make_shared<LstmCache>();
  Tensor out = lstm_run(val(inputs), val(wx), val(wh), val(b), cache.get());
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;
  int id = push(std::move(n));
  nodes_[id].back = [id, inputs, wx, wh, b, cache](Graph& g) {
    const LstmCache& cc = *cache;
    const int T = cc.T, d = cc.d, h = cc.h;
    const int four_h = 4 * h;
    const Tensor& in_v = g.val(inputs);
    const Tensor& wx_v = g.val(wx);
    const Tensor& wh_v = g.val(wh);
    Tensor& d_in = g.grad_buf(inputs);
    Tensor& d_wx = g.grad_buf(wx);
    Tensor& d_wh = g.grad_buf(wh);
    Tensor& d_b = g.grad_buf(b);
    const Tensor& dh_out = g.grad(id);

    std::vector<double> dh(dh_out.data.begin(), dh_out.data.end());
    std::vector<double> dc(static_cast<std::size_t>(h), 0.0);
    std::vector<double> da(static_cast<std::size_t>(four_h));
    std::vector<double> dh_next(static_cast<std::size_t>(h));
    for (int t = T - 1; t >= 0; --t) {
      for (int j = 0; j < h; ++j) {
        const double i_g = cc.gates(t, j);
        const double f_g = cc.gates(t, h + j);
        const double g_g = cc.gates(t, 2 * h + j);
        const double o_g = cc.gates(t, 3 * h + j);
        const double tc = cc.tanh_c(t, j);
        const double c_prev = t > 0 ? cc.cells(t - 1, j) : 0.0;
        const double dct = dc[j] + dh[j] * o_g * (1.0 - tc * tc);
        const double d_o = dh[j] * tc;
        const double d_i = dct * g_g;
        const double d_f = dct * c_prev;
        const double d_g = dct * i_g;
        da[j] = d_i * i_g * (1.0 - i_g);
        da[h + j] = d_f * f_g * (1.0 - f_g);
        da[2 * h + j] = d_g * (1.0 - g_g * g_g);
        da[3 * h + j] = d_o * o_g * (1.0 - o_g);
        dc[j] = dct * f_g;
      }
      const double* x_t = in_v.row(t);
      kernels::serial::outer_acc(d_wx.data.data(), da.data(), x_t, four_h, d);
      if (t > 0) {
        kernels::serial::outer_acc(d_wh.data.data(), da.data(), cc.hidden.row(t - 1), four_h, h);
      }
      for (int j = 0; j < four_h; ++j) d_b[j] += da[j];
      kernels::serial::matvec_t_acc(d_in.row(t), wx_v.data.data(), da.data(), four_h, d);
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      kernels::serial::matvec_t_acc(dh_next.data(), wh_v.data.data(), da.data(), four_h, h);
      dh = dh_next;
    }
  };
  return id;
}

int Graph::conv1d_relu_maxpool(int input, int filters, int bias, int width, int valid_rows) {
  const Tensor& in_v = val(input);
  const Tensor& f_v = val(filters);
  const Tensor& b_v = val(bias);
  const int T = in_v.rows();
  const int c = in_v.cols();
  const int K = f_v.rows();
  if (f_v.cols() != width * c)
    throw internal_error("conv1d: filter taps " + std::to_string(f_v.cols()) + " != width*c");
  if (b_v.rows() != K) throw internal_error("conv1d: bias size mismatch");
  const int n_windows = conv_windows(T, width, valid_rows);

  Tensor out = Tensor::zeros({K});
  auto argmax = std::make_shared<std::vector<int>>(K);
  auto preact = std::make_shared<std::vector<double>>(K);
  kernels::conv1d_relu_max(in_v.data.data(), T, c, f_v.data.data(), K, width, b_v.data.data(),
                           n_windows, out.data.data(), argmax->data(), preact->data());
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;
  int id = push(std::move(n));
  nodes_[id].back = [id, input, filters, bias, width, argmax, preact](Graph& g) {
    const Tensor& in_v = g.val(input);
    const Tensor& f_v = g.val(filters);
    const int K = f_v.rows();
    kernels::conv1d_relu_max_backward(in_v.data.data(), in_v.rows(), in_v.cols(),
                                      f_v.data.data(), K, width, g.grad(id).data.data(),
                                      argmax->data(), preact->data(),
                                      g.grad_buf(input).data.data(),
                                      g.grad_buf(filters).data.data(),
                                      g.grad_buf(bias).data.data());
  };
  return id;
}

int Graph::concat(const std::vector<int>& parts) {
  int total = 0;
  for (int p : parts) {
    if (val(p).shape.size() != 1) throw internal_error("concat: only 1-D nodes");
    total += val(p).rows();
  }
  Tensor out = Tensor::zeros({total});
  int offset = 0;
  for (int p : parts) {
    const Tensor& v = val(p);
    std::copy(v.data.begin(), v.data.end(), out.data.begin() + offset);
    offset += v.rows();
  }
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;
  int id = push(std::move(n));
  std::vector<int> parts_copy = parts;
  nodes_[id].back = [id, parts_copy](Graph& g) {
    const Tensor& dy = g.grad(id);
    int offset = 0;
    for (int p : parts_copy) {
      Tensor& dp = g.grad_buf(p);
      for (int j = 0; j < dp.rows(); ++j) dp[j] += dy[offset + j];
      offset += dp.rows();
    }
  };
  return id;
}

int Graph::affine(int x, int weights, int bias) {
  const Tensor& x_v = val(x);
  const Tensor& w_v = val(weights);
  const Tensor& b_v = val(bias);
  const int m = w_v.rows();
  const int nn = w_v.cols();
  if (x_v.rows() != nn || b_v.rows() != m) throw internal_error("affine: shape mismatch");
  Tensor out = Tensor::zeros({m});
  kernels::matvec(out.data.data(), w_v.data.data(), x_v.data.data(), m, nn);
  for (int i = 0; i < m; ++i) out[i] += b_v[i];
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;
  int id = push(std::move(n));
  nodes_[id].back = [id, x, weights, bias](Graph& g) {
    const Tensor& dy = g.grad(id);
    const Tensor& x_v = g.val(x);
    const Tensor& w_v = g.val(weights);
    const int m = w_v.rows();
    const int nn = w_v.cols();
    kernels::serial::outer_acc(g.grad_buf(weights).data.data(), dy.data.data(), x_v.data.data(),
                               m, nn);
    Tensor& db = g.grad_buf(bias);
    for (int i = 0; i < m; ++i) db[i] += dy[i];
    kernels::serial::matvec_t_acc(g.grad_buf(x).data.data(), w_v.data.data(), dy.data.data(), m,
                                  nn);
  };
  return id;
}

int Graph::softmax(int x) {
  Tensor out = softmax_stable(val(x));
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;
  int id = push(std::move(n));
  nodes_[id].back = [id, x](Graph& g) {
    const Tensor& p = g.val(id);
    const Tensor& dy = g.grad(id);
    Tensor& dx = g.grad_buf(x);
    double dot = 0.0;
    for (int j = 0; j < p.rows(); ++j) dot += dy[j] * p[j];
    for (int j = 0; j < p.rows(); ++j) dx[j] += p[j] * (dy[j] - dot);
  };
  return id;
}

int Graph::cross_entropy(int probs, int target, double weight) {
  const Tensor& p = val(probs);
  if (target < 0 || target >= p.rows()) throw internal_error("cross_entropy: target out of range");
  const double clamped = std::max(p[target], kProbFloor);
  Tensor out = Tensor::scalar(-weight * std::log(clamped));
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;
  int id = push(std::move(n));
  nodes_[id].back = [id, probs, target, weight](Graph& g) {
    const Tensor& p = g.val(probs);
    const double dl = g.grad(id)[0];
    if (p[target] >= kProbFloor) {
      g.grad_buf(probs)[target] += dl * (-weight / p[target]);
    }
  };
  return id;
}

int Graph::dropout(int x, double rate, Rng& rng) {
  const Tensor& x_v = val(x);
  if (rate <= 0.0) {
    // identity; still a node so the caller's wiring stays uniform
    Tensor out = x_v;
    Node n;
    n.owned = std::move(out);
    n.needs_grad = true;
    int id = push(std::move(n));
    nodes_[id].back = [id, x](Graph& g) {
      const Tensor& dy = g.grad(id);
      Tensor& dx = g.grad_buf(x);
      for (std::size_t j = 0; j < dy.data.size(); ++j) dx.data[j] += dy.data[j];
    };
    return id;
  }
  if (rate >= 1.0) throw internal_error("dropout: rate must be < 1");
  const double keep = 1.0 - rate;
  auto mask = std::make_shared<std::vector<double>>(x_v.data.size());
  Tensor out = x_v;
  for (std::size_t j = 0; j < out.data.size(); ++j) {
    const double m = rng.next_double() < keep ? 1.0 / keep : 0.0;
    (*mask)[j] = m;
    out.data[j] *= m;
  }
  Node n;
  n.owned = std::move(out);
  n.needs_grad = true;
  int id = push(std::move(n));
  nodes_[id].back = [id, x, mask](Graph& g) {
    const Tensor& dy = g.grad(id);
    Tensor& dx = g.grad_buf(x);
    for (std::size_t j = 0; j < dy.data.size(); ++j) dx.data[j] += dy.data[j] * (*mask)[j];
  };
  return id;
}

void Graph::backward(int loss) {
  if (nodes_.empty() || loss < 0 || loss >= static_cast<int>(nodes_.size()))
    throw internal_error("backward before forward: no recorded node for the loss");
  if (val(loss).numel() != 1) throw internal_error("backward: loss must be a scalar node");
  grad_buf(loss)[0] = 1.0;
  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.grad_alloc || !n.back) continue;
    n.back(*this);
  }
}

Tensor embed_sequence(std::span<const int> token_ids, const Tensor& embedding_matrix) {
  const int V = embedding_matrix.rows();
  const int d = embedding_matrix.cols();
  if (token_ids.empty()) throw internal_error("embed_sequence: empty id sequence");
  Tensor out = Tensor::zeros({static_cast<int>(token_ids.size()), d});
  for (std::size_t t = 0; t < token_ids.size(); ++t) {
    const int id = token_ids[t];
    if (id < 0 || id >= V)
      throw internal_error("embed_sequence: token id " + std::to_string(id) +
                           " out of range [0," + std::to_string(V) + ")");
    const double* src = embedding_matrix.row(id);
    std::copy(src, src + d, out.row(static_cast<int>(t)));
  }
  return out;
}

Tensor lstm_forward(const Tensor& inputs, const Tensor& wx, const Tensor& wh, const Tensor& b) {
  return lstm_run(inputs, wx, wh, b, nullptr);
}

Tensor conv1d_maxpool(const Tensor& inputs, const Tensor& filters, const Tensor& bias, int width,
                      int valid_rows) {
  const int T = inputs.rows();
  const int c = inputs.cols();
  const int K = filters.rows();
  if (filters.cols() != width * c) throw internal_error("conv1d_maxpool: filter taps != width*c");
  const int n_windows = conv_windows(T, width, valid_rows);
  Tensor out = Tensor::zeros({K});
  std::vector<int> argmax(K);
  std::vector<double> preact(K);
  kernels::conv1d_relu_max(inputs.data.data(), T, c, filters.data.data(), K, width,
                           bias.data.data(), n_windows, out.data.data(), argmax.data(),
                           preact.data());
  return out;
}

Tensor softmax_stable(const Tensor& logits) {
  Tensor out = Tensor::zeros(logits.shape);
  double mx = logits[0];
  for (double v : logits.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.data.size(); ++j) {
    out.data[j] = std::exp(logits.data[j] - mx);
    sum += out.data[j];
  }
  for (double& v : out.data) v /= sum;
  return out;
}

Tensor dense_softmax(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  const int m = weights.rows();
  const int n = weights.cols();
  if (x.rows() != n || bias.rows() != m) throw internal_error("dense_softmax: shape mismatch");
  Tensor logits = Tensor::zeros({m});
  kernels::matvec(logits.data.data(), weights.data.data(), x.data.data(), m, n);
  for (int i = 0; i < m; ++i) logits[i] += bias[i];
  return softmax_stable(logits);
}

double cross_entropy(const Tensor& pred, int target_class) {
  if (target_class < 0 || target_class >= pred.rows())
    throw internal_error("cross_entropy: target out of range");
  return -std::log(std::max(pred[target_class], kProbFloor));
}

}  // namespace cssrs::nn
