#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "talkgen/common.hpp"

namespace talkgen::nn {

using Shape = std::vector<int64_t>;

inline int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s);

struct Node {
  Shape shape;
  std::vector<float> v;
  std::vector<float> g;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;
  int topo_mark = 0;

  int64_t numel() const { return static_cast<int64_t>(v.size()); }
  void ensure_grad() {
    if (g.size() != v.size()) g.assign(v.size(), 0.0f);
  }
};

// Value-semantic handle to a node in a dynamically built computation graph.
// Graphs are rebuilt per step; leaves (parameters) persist across steps.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape s, bool requires_grad = false);
  static Tensor full(Shape s, float value, bool requires_grad = false);
  static Tensor from_data(Shape s, std::vector<float> data, bool requires_grad = false);
  static Tensor scalar(float value);

  bool defined() const { return static_cast<bool>(n_); }
  const Shape& shape() const { return n_->shape; }
  int64_t numel() const { return n_->numel(); }
  int64_t dim(int i) const {
    const auto& s = n_->shape;
    return s[i < 0 ? s.size() + i : static_cast<size_t>(i)];
  }
  int ndim() const { return static_cast<int>(n_->shape.size()); }

  float* data() { return n_->v.data(); }
  const float* data() const { return n_->v.data(); }
  std::vector<float>& values() { return n_->v; }
  const std::vector<float>& values() const { return n_->v; }
  float item() const {
    TG_CHECK(numel() == 1, "item() on non-scalar tensor of shape ", shape_str(shape()));
    return n_->v[0];
  }

  bool requires_grad() const { return n_->requires_grad; }
  void set_requires_grad(bool rg) { n_->requires_grad = rg; }
  std::vector<float>& grad() {
    n_->ensure_grad();
    return n_->g;
  }
  void zero_grad() {
    if (!n_->g.empty()) std::fill(n_->g.begin(), n_->g.end(), 0.0f);
  }

  // New leaf with copied values, cut off from the graph.
  Tensor detach() const;

  // Reverse-mode sweep from this (scalar) tensor.
  void backward();

  std::shared_ptr<Node> node() const { return n_; }
  static Tensor wrap(std::shared_ptr<Node> n) {
    Tensor t;
    t.n_ = std::move(n);
    return t;
  }

 private:
  std::shared_ptr<Node> n_;
};

// Creates an op result node. `bwd` receives the result node with its grad
// populated and must accumulate into the parents' grads.
Tensor make_op(Shape out_shape, std::vector<Tensor> parents,
               std::function<void(Node&)> bwd);

}  // namespace talkgen::nn
