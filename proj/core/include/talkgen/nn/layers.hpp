#pragma once

#include <map>
#include <string>
#include <vector>

#include "talkgen/nn/ops.hpp"
#include "talkgen/nn/rng.hpp"

namespace talkgen::nn {

// Named parameter/buffer registry. Networks register their tensors here so
// the optimizer and the checkpoint container can reach every entry by name.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
    bool trainable = true;
  };

  Tensor param(const std::string& name, Shape shape,
               const std::vector<float>& data) {
    Tensor t = Tensor::from_data(std::move(shape), data, /*requires_grad=*/true);
    add_entry(name, t, true);
    return t;
  }

  Tensor zeros_param(const std::string& name, Shape shape) {
    Tensor t = Tensor::zeros(std::move(shape), true);
    add_entry(name, t, true);
    return t;
  }

  Tensor full_param(const std::string& name, Shape shape, float v) {
    Tensor t = Tensor::full(std::move(shape), v, true);
    add_entry(name, t, true);
    return t;
  }

  // Kaiming-style fan-in scaled normal init.
  Tensor he_param(const std::string& name, Shape shape, int64_t fan_in, Rng& rng,
                  double gain = 1.0) {
    std::vector<float> data(static_cast<size_t>(shape_numel(shape)));
    const double std = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : data) v = static_cast<float>(rng.normal(0.0, std));
    return param(name, std::move(shape), data);
  }

  Tensor buffer(const std::string& name, Shape shape, float fill = 0.0f) {
    Tensor t = Tensor::full(std::move(shape), fill, false);
    add_entry(name, t, false);
    return t;
  }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  Tensor* find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second].tensor;
  }

  std::vector<Tensor> trainable() const {
    std::vector<Tensor> out;
    for (const auto& e : entries_)
      if (e.trainable) out.push_back(e.tensor);
    return out;
  }

  int64_t parameter_count() const {
    int64_t n = 0;
    for (const auto& e : entries_)
      if (e.trainable) n += e.tensor.numel();
    return n;
  }

  void zero_grad() {
    for (auto& e : entries_)
      if (e.trainable) e.tensor.zero_grad();
  }

  // Marks everything non-trainable (frozen feature extractors).
  void freeze() {
    for (auto& e : entries_) {
      e.trainable = false;
      e.tensor.set_requires_grad(false);
    }
  }

 private:
  void add_entry(const std::string& name, Tensor t, bool trainable) {
    TG_CHECK(index_.find(name) == index_.end(), "duplicate parameter name ", name);
    index_[name] = entries_.size();
    entries_.push_back({name, std::move(t), trainable});
  }

  std::vector<Entry> entries_;
  std::map<std::string, size_t> index_;
};

// ---- layer building blocks ----

struct Conv2dLayer {
  Tensor w, b;
  int stride = 1, pad = 0;

  static Conv2dLayer make(ParamStore& ps, const std::string& name, int64_t in,
                          int64_t out, int64_t k, int stride, int pad, Rng& rng) {
    Conv2dLayer l;
    l.w = ps.he_param(name + ".w", {out, in, k, k}, in * k * k, rng);
    l.b = ps.zeros_param(name + ".b", {out});
    l.stride = stride;
    l.pad = pad;
    return l;
  }

  Tensor operator()(const Tensor& x) const { return conv2d(x, w, b, stride, pad); }
};

struct Conv1dLayer {
  Tensor w, b;
  int stride = 1, pad = 0;

  static Conv1dLayer make(ParamStore& ps, const std::string& name, int64_t in,
                          int64_t out, int64_t k, int stride, int pad, Rng& rng) {
    Conv1dLayer l;
    l.w = ps.he_param(name + ".w", {out, in, k}, in * k, rng);
    l.b = ps.zeros_param(name + ".b", {out});
    l.stride = stride;
    l.pad = pad;
    return l;
  }

  Tensor operator()(const Tensor& x) const { return conv1d(x, w, b, stride, pad); }
};

struct LinearLayer {
  Tensor w, b;

  static LinearLayer make(ParamStore& ps, const std::string& name, int64_t in,
                          int64_t out, Rng& rng) {
    LinearLayer l;
    l.w = ps.he_param(name + ".w", {out, in}, in, rng);
    l.b = ps.zeros_param(name + ".b", {out});
    return l;
  }

  Tensor operator()(const Tensor& x) const { return linear(x, w, b); }
};

struct BatchNorm2dLayer {
  Tensor gamma, beta, run_mean, run_var;

  static BatchNorm2dLayer make(ParamStore& ps, const std::string& name, int64_t c) {
    BatchNorm2dLayer l;
    l.gamma = ps.full_param(name + ".gamma", {c}, 1.0f);
    l.beta = ps.zeros_param(name + ".beta", {c});
    l.run_mean = ps.buffer(name + ".run_mean", {c}, 0.0f);
    l.run_var = ps.buffer(name + ".run_var", {c}, 1.0f);
    return l;
  }

  Tensor operator()(const Tensor& x, bool training) {
    return batch_norm2d(x, gamma, beta, run_mean, run_var, training);
  }
};

struct LayerNormLayer {
  Tensor gamma, beta;

  static LayerNormLayer make(ParamStore& ps, const std::string& name, int64_t d) {
    LayerNormLayer l;
    l.gamma = ps.full_param(name + ".gamma", {d}, 1.0f);
    l.beta = ps.zeros_param(name + ".beta", {d});
    return l;
  }

  Tensor operator()(const Tensor& x) const { return layer_norm(x, gamma, beta); }
};

}  // namespace talkgen::nn
