#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cssrs/rng.hpp"
#include "cssrs/tensor.hpp"

namespace cssrs::nn {

// Tape of tensor ops for one forward pass. Leaves point at externally owned
// tensors (parameters); everything else is owned by the graph. backward()
// walks the tape in reverse creation order, which is a valid topological
// order because an op only consumes earlier nodes.
//
// Embedding gathers do not touch the table's gradient directly: the per-row
// gradient lives in the gather node and is harvested by the trainer
// (embed_records), keeping per-sample graphs independent so batches can run
// in parallel with a deterministic, ordered reduction.
class Graph {
 public:
  int leaf(const Tensor* value);
  int constant(Tensor value);

  int embed(const Tensor* table, std::vector<int> ids);
  // inputs: T x d node. Gate packing order is rows [input; forget; cell
  // candidate; output] of wx (4h x d), wh (4h x h), b (4h). Returns the last
  // hidden state (h).
  int lstm(int inputs, int wx, int wh, int b);
  // input: T x c node, filters: K x (width*c), bias: K. Windows range over
  // [0, min(T-width+1, valid_rows)): windows made entirely of padding rows
  // are masked out of the pool.
  int conv1d_relu_maxpool(int input, int filters, int bias, int width, int valid_rows);
  int concat(const std::vector<int>& parts);
  int affine(int x, int weights, int bias);
  int softmax(int x);
  int cross_entropy(int probs, int target, double weight = 1.0);
  int dropout(int x, double rate, Rng& rng);

  const Tensor& value(int id) const;
  const Tensor& grad(int id) const;
  bool has_grad(int id) const;

  // Reverse-mode sweep from a scalar loss node. Throws if the node is not a
  // scalar or if no forward pass was recorded.
  void backward(int loss);

  struct EmbedRecord {
    int node = -1;
    const Tensor* table = nullptr;
    std::vector<int> ids;
  };
  const std::vector<EmbedRecord>& embed_records() const { return embed_records_; }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    Tensor grad;
    bool grad_alloc = false;
    bool needs_grad = false;
    std::function<void(Graph&)> back;
  };

  int push(Node node);
  Tensor& grad_buf(int id);
  const Tensor& val(int id) const { return nodes_[id].external ? *nodes_[id].external : nodes_[id].owned; }

  std::vector<Node> nodes_;
  std::vector<EmbedRecord> embed_records_;

  friend struct GraphOps;
};

// Standalone forward evaluators mirroring the graph ops; used directly for
// inference-only paths and as the public forward surface.
Tensor embed_sequence(std::span<const int> token_ids, const Tensor& embedding_matrix);
Tensor lstm_forward(const Tensor& inputs, const Tensor& wx, const Tensor& wh, const Tensor& b);
Tensor conv1d_maxpool(const Tensor& inputs, const Tensor& filters, const Tensor& bias, int width,
                      int valid_rows);
Tensor dense_softmax(const Tensor& x, const Tensor& weights, const Tensor& bias);
Tensor softmax_stable(const Tensor& logits);
double cross_entropy(const Tensor& pred, int target_class);

}  // namespace cssrs::nn
