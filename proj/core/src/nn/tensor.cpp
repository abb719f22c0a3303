#include "talkgen/nn/tensor.hpp"

#include <algorithm>

namespace talkgen::nn {

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Tensor Tensor::zeros(Shape s, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->v.assign(static_cast<size_t>(shape_numel(s)), 0.0f);
  n->shape = std::move(s);
  n->requires_grad = requires_grad;
  return wrap(std::move(n));
}

Tensor Tensor::full(Shape s, float value, bool requires_grad) {
  Tensor t = zeros(std::move(s), requires_grad);
  std::fill(t.values().begin(), t.values().end(), value);
  return t;
}

Tensor Tensor::from_data(Shape s, std::vector<float> data, bool requires_grad) {
  TG_CHECK(static_cast<int64_t>(data.size()) == shape_numel(s),
           "from_data: ", data.size(), " values for shape ", shape_str(s));
  auto n = std::make_shared<Node>();
  n->shape = std::move(s);
  n->v = std::move(data);
  n->requires_grad = requires_grad;
  return wrap(std::move(n));
}

Tensor Tensor::scalar(float value) { return from_data({1}, {value}); }

Tensor Tensor::detach() const {
  auto n = std::make_shared<Node>();
  n->shape = n_->shape;
  n->v = n_->v;
  n->requires_grad = false;
  return wrap(std::move(n));
}

void Tensor::backward() {
  TG_CHECK(numel() == 1, "backward() must start from a scalar");
  // Iterative topological sort.
  std::vector<Node*> order;
  std::vector<Node*> stack{n_.get()};
  n_->topo_mark = 1;
  while (!stack.empty()) {
    Node* cur = stack.back();
    bool ready = true;
    for (auto& p : cur->parents) {
      if (p->requires_grad && p->topo_mark == 0) {
        p->topo_mark = 1;
        stack.push_back(p.get());
        ready = false;
      }
    }
    if (ready) {
      stack.pop_back();
      if (cur->topo_mark == 1) {
        cur->topo_mark = 2;
        order.push_back(cur);
      }
    }
  }
  n_->ensure_grad();
  n_->g[0] = 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    node->topo_mark = 0;
    if (node->backward_fn && node->requires_grad) {
      node->ensure_grad();
      node->backward_fn(*node);
    }
  }
}

Tensor make_op(Shape out_shape, std::vector<Tensor> parents,
               std::function<void(Node&)> bwd) {
  auto n = std::make_shared<Node>();
  n->v.assign(static_cast<size_t>(shape_numel(out_shape)), 0.0f);
  n->shape = std::move(out_shape);
  bool rg = false;
  for (const auto& p : parents) rg = rg || p.requires_grad();
  n->requires_grad = rg;
  if (rg) {
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backward_fn = std::move(bwd);
  }
  return Tensor::wrap(std::move(n));
}

}  // namespace talkgen::nn
