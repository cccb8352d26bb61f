#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "net/network.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

namespace exknet::net {

enum class SampleMode { Random, Greedy };

// Draws a code from softmax(logits) (Random) or takes the argmax with
// lowest-index tie-break (Greedy). Softmax is evaluated in double.
template <class S>
int sample_code(const Eigen::Ref<const Eigen::Matrix<S, Eigen::Dynamic, 1>>& logits,
                std::mt19937_64& rng, SampleMode mode) {
  const Eigen::Index n = logits.size();
  if (mode == SampleMode::Greedy) {
    int best = 0;
    S best_v = logits(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      if (logits(i) > best_v) {
        best_v = logits(i);
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  const double mx = static_cast<double>(logits.maxCoeff());
  double z = 0.0;
  std::vector<double> p(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = std::exp(static_cast<double>(logits(i)) - mx);
    z += p[i];
  }
  const double u = uniform01(rng) * z;
  double cum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cum += p[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);
}

// Incremental autoregressive evaluation: one GEMV sweep per sample, with a
// per-layer ring buffer holding the past `dilation` input activations.
// Cost per step is O(layers), independent of how much history was fed.
template <class S>
class Sampler {
 public:
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  explicit Sampler(const Parameters<S>& params) : params_(&params) {
    const NetConfig& c = params.config;
    c.validate();
    rings_.resize(c.total_layers());
    for (int l = 0; l < c.total_layers(); ++l) {
      rings_[l] = MatX<S>::Zero(c.residual_channels, c.dilation(l));
    }
    reset();
  }

  void reset() {
    for (auto& r : rings_) r.setZero();
    t_ = 0;
  }

  std::int64_t timestep() const { return t_; }

  // Logits for the next sample given the previous code (-1 at stream start)
  // and this step's condition column. Advances the internal clock.
  Vec step_logits(const Eigen::Ref<const Vec>& condition, int prev_code) {
    const NetConfig& c = params_->config;
    if (condition.size() != c.condition_dim) {
      throw_argument("Sampler: condition vector has wrong dimension");
    }
    if (prev_code < -1 || prev_code >= c.quantization_channels) {
      throw_argument("Sampler: previous code out of range");
    }

    Vec x = params_->embed_b.col(0);
    if (prev_code >= 0) x += params_->embed_w.col(prev_code);

    Vec skip_acc = Vec::Zero(c.skip_channels);
    Vec f(c.residual_channels), g(c.residual_channels), z(c.residual_channels);
    for (int l = 0; l < c.total_layers(); ++l) {
      const LayerParams<S>& lp = params_->layers[l];
      const Eigen::Index d = c.dilation(l);
      const Eigen::Index slot = static_cast<Eigen::Index>(t_ % d);
      // rings_[l].col(slot) still holds this layer's input from t - d
      // (zeros while t < d).
      f.noalias() = lp.wf_cur * x;
      f.noalias() += lp.wf_past * rings_[l].col(slot);
      f.noalias() += lp.vf * condition;
      f += lp.bf.col(0);
      g.noalias() = lp.wg_cur * x;
      g.noalias() += lp.wg_past * rings_[l].col(slot);
      g.noalias() += lp.vg * condition;
      g += lp.bg.col(0);

      z = f.array().tanh() * (S(1) / (S(1) + (-g.array()).exp()));

      skip_acc.noalias() += lp.skip_w * z;
      skip_acc += lp.skip_b.col(0);

      rings_[l].col(slot) = x;
      Vec x_next = lp.res_w * z;
      x_next += lp.res_b.col(0);
      x_next += x;
      x = std::move(x_next);
    }

    Vec a = skip_acc.cwiseMax(S(0));
    Vec h1 = params_->post1_w * a;
    h1 += params_->post1_b.col(0);
    Vec h = h1.cwiseMax(S(0));
    Vec logits = params_->post2_w * h;
    logits += params_->post2_b.col(0);

    ++t_;
    return logits;
  }

 private:
  const Parameters<S>* params_;
  std::vector<MatX<S>> rings_;
  std::int64_t t_ = 0;
};

}  // namespace exknet::net
