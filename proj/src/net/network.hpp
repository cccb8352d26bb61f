#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "net/config.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

namespace exknet::net {

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// One gated dilated-conv layer: filter and gate paths each combine the
// current sample, the sample `dilation` steps back, and a projected
// condition vector; the gated output feeds 1x1 residual and skip convs.
template <class S>
struct LayerParams {
  MatX<S> wf_cur, wf_past, vf, bf;
  MatX<S> wg_cur, wg_past, vg, bg;
  MatX<S> res_w, res_b;
  MatX<S> skip_w, skip_b;
};

template <class S>
struct TensorRef {
  std::string name;
  MatX<S>* tensor;
  bool is_bias;
};

template <class S>
struct Parameters {
  NetConfig config;
  MatX<S> embed_w, embed_b;  // one-hot code -> residual channels
  std::vector<LayerParams<S>> layers;
  MatX<S> post1_w, post1_b;  // skip channels -> 256
  MatX<S> post2_w, post2_b;  // 256 -> 256 logits

  // Every trainable tensor in the fixed serialization order.
  std::vector<TensorRef<S>> tensor_refs() {
    std::vector<TensorRef<S>> refs;
    refs.push_back({"embed_w", &embed_w, false});
    refs.push_back({"embed_b", &embed_b, true});
    for (std::size_t l = 0; l < layers.size(); ++l) {
      LayerParams<S>& lp = layers[l];
      const std::string prefix = "layer" + std::to_string(l) + ".";
      refs.push_back({prefix + "wf_cur", &lp.wf_cur, false});
      refs.push_back({prefix + "wf_past", &lp.wf_past, false});
      refs.push_back({prefix + "vf", &lp.vf, false});
      refs.push_back({prefix + "bf", &lp.bf, true});
      refs.push_back({prefix + "wg_cur", &lp.wg_cur, false});
      refs.push_back({prefix + "wg_past", &lp.wg_past, false});
      refs.push_back({prefix + "vg", &lp.vg, false});
      refs.push_back({prefix + "bg", &lp.bg, true});
      refs.push_back({prefix + "res_w", &lp.res_w, false});
      refs.push_back({prefix + "res_b", &lp.res_b, true});
      refs.push_back({prefix + "skip_w", &lp.skip_w, false});
      refs.push_back({prefix + "skip_b", &lp.skip_b, true});
    }
    refs.push_back({"post1_w", &post1_w, false});
    refs.push_back({"post1_b", &post1_b, true});
    refs.push_back({"post2_w", &post2_w, false});
    refs.push_back({"post2_b", &post2_b, true});
    return refs;
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (const auto& r : tensor_refs()) n += static_cast<std::size_t>(r.tensor->size());
    return n;
  }

  bool all_finite() {
    for (const auto& r : tensor_refs()) {
      if (!r.tensor->allFinite()) return false;
    }
    return true;
  }

  void set_zero() {
    for (auto& r : tensor_refs()) r.tensor->setZero();
  }
};

template <class S>
Parameters<S> zero_parameters(const NetConfig& c) {
  c.validate();
  const int R = c.residual_channels;
  const int K = c.skip_channels;
  const int Q = c.quantization_channels;
  const int D = c.condition_dim;

  Parameters<S> p;
  p.config = c;
  p.embed_w = MatX<S>::Zero(R, Q);
  p.embed_b = MatX<S>::Zero(R, 1);
  p.layers.resize(c.total_layers());
  for (auto& lp : p.layers) {
    lp.wf_cur = MatX<S>::Zero(R, R);
    lp.wf_past = MatX<S>::Zero(R, R);
    lp.vf = MatX<S>::Zero(R, D);
    lp.bf = MatX<S>::Zero(R, 1);
    lp.wg_cur = MatX<S>::Zero(R, R);
    lp.wg_past = MatX<S>::Zero(R, R);
    lp.vg = MatX<S>::Zero(R, D);
    lp.bg = MatX<S>::Zero(R, 1);
    lp.res_w = MatX<S>::Zero(R, R);
    lp.res_b = MatX<S>::Zero(R, 1);
    lp.skip_w = MatX<S>::Zero(K, R);
    lp.skip_b = MatX<S>::Zero(K, 1);
  }
  p.post1_w = MatX<S>::Zero(Q, K);
  p.post1_b = MatX<S>::Zero(Q, 1);
  p.post2_w = MatX<S>::Zero(Q, Q);
  p.post2_b = MatX<S>::Zero(Q, 1);
  return p;
}

// Weights uniform in +/- sqrt(6 / (fan_in + fan_out)), biases zero.
// fan_in/fan_out are the tensor's column/row counts. Element order is
// Eigen's column-major storage, so the draw sequence is reproducible.
template <class S>
Parameters<S> xavier_init(const NetConfig& c, std::uint64_t seed) {
  Parameters<S> p = zero_parameters<S>(c);
  std::mt19937_64 rng(seed);
  for (auto& r : p.tensor_refs()) {
    if (r.is_bias) continue;
    MatX<S>& m = *r.tensor;
    const double limit = std::sqrt(6.0 / (double(m.cols()) + double(m.rows())));
    S* data = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      data[i] = static_cast<S>(uniform(rng, -limit, limit));
    }
  }
  return p;
}

template <class To, class From>
Parameters<To> cast_parameters(Parameters<From>& src) {
  Parameters<To> dst = zero_parameters<To>(src.config);
  auto sr = src.tensor_refs();
  auto dr = dst.tensor_refs();
  for (std::size_t i = 0; i < sr.size(); ++i) {
    *dr[i].tensor = sr[i].tensor->template cast<To>();
  }
  return dst;
}

template <class S>
struct ForwardCache {
  std::vector<int> inputs;         // code index per step, -1 = all-zero one-hot
  std::vector<MatX<S>> layer_in;   // activations entering each layer (plus final output)
  std::vector<MatX<S>> tf, sg;     // tanh / sigmoid activations per layer
  MatX<S> skip_sum;                // pre-ReLU skip accumulation
  MatX<S> h1;                      // post-net hidden pre-ReLU
  MatX<S> logits;                  // 256 x T
};

// Teacher-forced pass over the whole window. `inputs[t]` is the code fed at
// step t (the previous sample's code; -1 at stream start) and
// `conditions.col(t)` the per-sample feature vector. Strictly causal in t.
template <class S>
void forward(const Parameters<S>& p, std::span<const int> inputs, const MatX<S>& conditions,
             ForwardCache<S>& cache) {
  const NetConfig& c = p.config;
  const Eigen::Index T = static_cast<Eigen::Index>(inputs.size());
  if (T == 0) throw_argument("forward: empty input");
  if (conditions.cols() != T || conditions.rows() != c.condition_dim) {
    throw_argument("forward: condition matrix must be condition_dim x T");
  }

  const int L = c.total_layers();
  cache.inputs.assign(inputs.begin(), inputs.end());
  cache.layer_in.resize(L + 1);
  cache.tf.resize(L);
  cache.sg.resize(L);

  MatX<S>& x0 = cache.layer_in[0];
  x0.resize(c.residual_channels, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const int code = inputs[t];
    if (code < -1 || code >= c.quantization_channels) throw_argument("forward: code out of range");
    if (code >= 0) {
      x0.col(t) = p.embed_w.col(code) + p.embed_b.col(0);
    } else {
      x0.col(t) = p.embed_b.col(0);
    }
  }

  MatX<S> f, g, z;
  for (int l = 0; l < L; ++l) {
    const LayerParams<S>& lp = p.layers[l];
    const MatX<S>& x = cache.layer_in[l];
    const Eigen::Index d = c.dilation(l);

    f.noalias() = lp.vf * conditions;
    f.colwise() += lp.bf.col(0);
    f.noalias() += lp.wf_cur * x;
    if (T > d) f.middleCols(d, T - d).noalias() += lp.wf_past * x.leftCols(T - d);

    g.noalias() = lp.vg * conditions;
    g.colwise() += lp.bg.col(0);
    g.noalias() += lp.wg_cur * x;
    if (T > d) g.middleCols(d, T - d).noalias() += lp.wg_past * x.leftCols(T - d);

    cache.tf[l] = f.array().tanh().matrix();
    cache.sg[l] = (S(1) / (S(1) + (-g.array()).exp())).matrix();
    z = cache.tf[l].cwiseProduct(cache.sg[l]);

    if (l == 0) {
      cache.skip_sum.noalias() = lp.skip_w * z;
      cache.skip_sum.colwise() += lp.skip_b.col(0);
    } else {
      cache.skip_sum.noalias() += lp.skip_w * z;
      cache.skip_sum.colwise() += lp.skip_b.col(0);
    }

    cache.layer_in[l + 1].noalias() = lp.res_w * z;
    cache.layer_in[l + 1].colwise() += lp.res_b.col(0);
    cache.layer_in[l + 1] += x;
  }

  MatX<S> a = cache.skip_sum.cwiseMax(S(0));
  cache.h1.noalias() = p.post1_w * a;
  cache.h1.colwise() += p.post1_b.col(0);
  MatX<S> h = cache.h1.cwiseMax(S(0));
  cache.logits.noalias() = p.post2_w * h;
  cache.logits.colwise() += p.post2_b.col(0);
}

// Kahan-compensated accumulator; keeps long NLL sums accurate to a few ulps
// independent of sequence length.
class CompensatedSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// Mean NLL in nats/sample over steps [loss_begin, T), log-sum-exp
// stabilized, accumulated in double regardless of S.
template <class S>
double nll_loss(const MatX<S>& logits, std::span<const std::uint8_t> targets,
                Eigen::Index loss_begin = 0) {
  const Eigen::Index T = logits.cols();
  if (static_cast<Eigen::Index>(targets.size()) != T) {
    throw_argument("nll_loss: target length must match logits");
  }
  if (loss_begin < 0 || loss_begin >= T) throw_argument("nll_loss: bad loss range");

  CompensatedSum total;
  for (Eigen::Index t = loss_begin; t < T; ++t) {
    const auto col = logits.col(t);
    const double mx = static_cast<double>(col.maxCoeff());
    double sum = 0.0;
    for (Eigen::Index q = 0; q < logits.rows(); ++q) {
      sum += std::exp(static_cast<double>(col(q)) - mx);
    }
    const double lse = mx + std::log(sum);
    total.add(lse - static_cast<double>(col(targets[t])));
  }
  return total.value() / static_cast<double>(T - loss_begin);
}

// Loss plus d(loss)/d(logits); gradient columns before loss_begin are zero.
template <class S>
double nll_loss_grad(const MatX<S>& logits, std::span<const std::uint8_t> targets,
                     Eigen::Index loss_begin, MatX<S>& dlogits) {
  const Eigen::Index T = logits.cols();
  if (static_cast<Eigen::Index>(targets.size()) != T) {
    throw_argument("nll_loss_grad: target length must match logits");
  }
  if (loss_begin < 0 || loss_begin >= T) throw_argument("nll_loss_grad: bad loss range");

  dlogits.setZero(logits.rows(), T);
  const double inv_count = 1.0 / static_cast<double>(T - loss_begin);
  CompensatedSum total;
  for (Eigen::Index t = loss_begin; t < T; ++t) {
    const auto col = logits.col(t);
    const double mx = static_cast<double>(col.maxCoeff());
    double sum = 0.0;
    for (Eigen::Index q = 0; q < logits.rows(); ++q) {
      sum += std::exp(static_cast<double>(col(q)) - mx);
    }
    const double lse = mx + std::log(sum);
    total.add(lse - static_cast<double>(col(targets[t])));
    for (Eigen::Index q = 0; q < logits.rows(); ++q) {
      const double soft = std::exp(static_cast<double>(col(q)) - lse);
      dlogits(q, t) = static_cast<S>(soft * inv_count);
    }
    dlogits(targets[t], t) -= static_cast<S>(inv_count);
  }
  return total.value() * inv_count;
}

// Exact gradients of the loss whose logits-gradient is `dlogits`, written
// into `grads` (accumulated; callers zero it first for a fresh gradient).
template <class S>
void backward(const Parameters<S>& p, const ForwardCache<S>& cache, const MatX<S>& conditions,
              const MatX<S>& dlogits, Parameters<S>& grads) {
  const NetConfig& c = p.config;
  const Eigen::Index T = cache.logits.cols();
  const int L = c.total_layers();

  MatX<S> h = cache.h1.cwiseMax(S(0));
  MatX<S> a = cache.skip_sum.cwiseMax(S(0));

  grads.post2_w.noalias() += dlogits * h.transpose();
  grads.post2_b.col(0) += dlogits.rowwise().sum();

  MatX<S> dh1 = (p.post2_w.transpose() * dlogits).cwiseProduct(
      (cache.h1.array() > S(0)).template cast<S>().matrix());
  grads.post1_w.noalias() += dh1 * a.transpose();
  grads.post1_b.col(0) += dh1.rowwise().sum();

  MatX<S> dskip = (p.post1_w.transpose() * dh1).cwiseProduct(
      (cache.skip_sum.array() > S(0)).template cast<S>().matrix());

  MatX<S> dx = MatX<S>::Zero(c.residual_channels, T);
  MatX<S> z, dz, df, dg, dx_next;
  for (int l = L - 1; l >= 0; --l) {
    const LayerParams<S>& lp = p.layers[l];
    LayerParams<S>& gl = grads.layers[l];
    const MatX<S>& x = cache.layer_in[l];
    const MatX<S>& tf = cache.tf[l];
    const MatX<S>& sg = cache.sg[l];
    const Eigen::Index d = c.dilation(l);

    z = tf.cwiseProduct(sg);

    gl.res_w.noalias() += dx * z.transpose();
    gl.res_b.col(0) += dx.rowwise().sum();
    gl.skip_w.noalias() += dskip * z.transpose();
    gl.skip_b.col(0) += dskip.rowwise().sum();

    dz.noalias() = lp.res_w.transpose() * dx;
    dz.noalias() += lp.skip_w.transpose() * dskip;

    df = dz.array() * sg.array() * (S(1) - tf.array().square());
    dg = dz.array() * tf.array() * sg.array() * (S(1) - sg.array());

    gl.wf_cur.noalias() += df * x.transpose();
    gl.wg_cur.noalias() += dg * x.transpose();
    if ((Eigen::Index)T > d) {
      gl.wf_past.noalias() += df.middleCols(d, T - d) * x.leftCols(T - d).transpose();
      gl.wg_past.noalias() += dg.middleCols(d, T - d) * x.leftCols(T - d).transpose();
    }
    gl.vf.noalias() += df * conditions.transpose();
    gl.vg.noalias() += dg * conditions.transpose();
    gl.bf.col(0) += df.rowwise().sum();
    gl.bg.col(0) += dg.rowwise().sum();

    dx_next = dx;  // residual passthrough
    dx_next.noalias() += lp.wf_cur.transpose() * df;
    dx_next.noalias() += lp.wg_cur.transpose() * dg;
    if ((Eigen::Index)T > d) {
      dx_next.leftCols(T - d).noalias() += lp.wf_past.transpose() * df.middleCols(d, T - d);
      dx_next.leftCols(T - d).noalias() += lp.wg_past.transpose() * dg.middleCols(d, T - d);
    }
    dx = std::move(dx_next);
  }

  grads.embed_b.col(0) += dx.rowwise().sum();
  for (Eigen::Index t = 0; t < T; ++t) {
    const int code = cache.inputs[t];
    if (code >= 0) grads.embed_w.col(code) += dx.col(t);
  }
}

// Bias-corrected Adam. Hyperparameters live in the state so a checkpoint
// fully describes the optimizer.
template <class S>
struct AdamState {
  std::int64_t step = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Parameters<S> m, v;
};

template <class S>
AdamState<S> make_adam_state(const NetConfig& c, double lr) {
  AdamState<S> st;
  st.lr = lr;
  st.m = zero_parameters<S>(c);
  st.v = zero_parameters<S>(c);
  return st;
}

template <class S>
void adam_step(Parameters<S>& params, Parameters<S>& grads, AdamState<S>& state) {
  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const S lr = static_cast<S>(state.lr);
  const S eps = static_cast<S>(state.eps);

  auto pr = params.tensor_refs();
  auto gr = grads.tensor_refs();
  auto mr = state.m.tensor_refs();
  auto vr = state.v.tensor_refs();
  for (std::size_t i = 0; i < pr.size(); ++i) {
    MatX<S>& w = *pr[i].tensor;
    const MatX<S>& g = *gr[i].tensor;
    MatX<S>& m = *mr[i].tensor;
    MatX<S>& v = *vr[i].tensor;
    m = (S(b1) * m.array() + S(1.0 - b1) * g.array()).matrix();
    v = (S(b2) * v.array() + S(1.0 - b2) * g.array().square()).matrix();
    w.array() -= lr * (m.array() / S(bc1)) / ((v.array() / S(bc2)).sqrt() + eps);
  }
}

}  // namespace exknet::net
