#include "cascade/lstm.hpp"

#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += W x for a row-major H x I matrix.
inline void matvec_add(const double* w, const double* x, double* y, int h, int i_dim) {
  for (int r = 0; r < h; ++r) {
    double acc = 0.0;
    const double* row = w + static_cast<std::size_t>(r) * i_dim;
    for (int c = 0; c < i_dim; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// y += W^T d, walking W row by row so access stays sequential.
inline void matvec_transpose_add(const double* w, const double* d, double* y, int h, int i_dim) {
  for (int r = 0; r < h; ++r) {
    const double* row = w + static_cast<std::size_t>(r) * i_dim;
    const double dr = d[r];
    for (int c = 0; c < i_dim; ++c) y[c] += row[c] * dr;
  }
}

// G += d x^T
inline void outer_add(double* g, const double* d, const double* x, int h, int i_dim) {
  for (int r = 0; r < h; ++r) {
    double* row = g + static_cast<std::size_t>(r) * i_dim;
    const double dr = d[r];
    for (int c = 0; c < i_dim; ++c) row[c] += dr * x[c];
  }
}

struct LayerView {
  const double* w[4];
  const double* u[4];
  const double* b[4];
  int input = 0;
  int hidden = 0;
};

LayerView layer_view(const double* base, int input, int hidden) {
  LayerView v;
  v.input = input;
  v.hidden = hidden;
  const std::size_t wsz = static_cast<std::size_t>(hidden) * input;
  const std::size_t usz = static_cast<std::size_t>(hidden) * hidden;
  for (int g = 0; g < 4; ++g) v.w[g] = base + g * wsz;
  for (int g = 0; g < 4; ++g) v.u[g] = base + 4 * wsz + g * usz;
  for (int g = 0; g < 4; ++g) v.b[g] = base + 4 * wsz + 4 * usz + static_cast<std::size_t>(g) * hidden;
  return v;
}

struct MutLayerView {
  double* w[4];
  double* u[4];
  double* b[4];
};

MutLayerView mut_layer_view(double* base, int input, int hidden) {
  MutLayerView v;
  const std::size_t wsz = static_cast<std::size_t>(hidden) * input;
  const std::size_t usz = static_cast<std::size_t>(hidden) * hidden;
  for (int g = 0; g < 4; ++g) v.w[g] = base + g * wsz;
  for (int g = 0; g < 4; ++g) v.u[g] = base + 4 * wsz + g * usz;
  for (int g = 0; g < 4; ++g) v.b[g] = base + 4 * wsz + 4 * usz + static_cast<std::size_t>(g) * hidden;
  return v;
}

void run_layer(const LayerView& layer, const double* input_rows, int steps, LayerCache& cache) {
  const int h = layer.hidden;
  const std::size_t hs = static_cast<std::size_t>(h);
  cache.gate_i.assign(steps * hs, 0.0);
  cache.gate_f.assign(steps * hs, 0.0);
  cache.gate_g.assign(steps * hs, 0.0);
  cache.gate_o.assign(steps * hs, 0.0);
  cache.cell.assign(steps * hs, 0.0);
  cache.tanh_cell.assign(steps * hs, 0.0);
  cache.hidden.assign(steps * hs, 0.0);

  std::vector<double> pre(4 * hs);
  std::vector<double> h_prev(hs, 0.0), c_prev(hs, 0.0);

  for (int t = 0; t < steps; ++t) {
    const double* x = input_rows + static_cast<std::size_t>(t) * layer.input;
    for (int g = 0; g < 4; ++g) {
      double* p = pre.data() + g * hs;
      for (int r = 0; r < h; ++r) p[r] = layer.b[g][r];
      matvec_add(layer.w[g], x, p, h, layer.input);
      matvec_add(layer.u[g], h_prev.data(), p, h, h);
    }
    double* gi = cache.gate_i.data() + t * hs;
    double* gf = cache.gate_f.data() + t * hs;
    double* gg = cache.gate_g.data() + t * hs;
    double* go = cache.gate_o.data() + t * hs;
    double* ct = cache.cell.data() + t * hs;
    double* tc = cache.tanh_cell.data() + t * hs;
    double* ht = cache.hidden.data() + t * hs;
    for (int r = 0; r < h; ++r) {
      gi[r] = sigmoid(pre[0 * hs + r]);
      gf[r] = sigmoid(pre[1 * hs + r]);
      gg[r] = std::tanh(pre[2 * hs + r]);
      go[r] = sigmoid(pre[3 * hs + r]);
      ct[r] = gf[r] * c_prev[r] + gi[r] * gg[r];
      tc[r] = std::tanh(ct[r]);
      ht[r] = go[r] * tc[r];
      h_prev[r] = ht[r];
      c_prev[r] = ct[r];
    }
  }
}

}  // namespace

std::size_t lstm_layer_param_count(int input_size, int hidden_size) {
  return 4 * (static_cast<std::size_t>(hidden_size) * input_size +
              static_cast<std::size_t>(hidden_size) * hidden_size +
              static_cast<std::size_t>(hidden_size));
}

std::size_t ModelParams::param_count() const {
  return lstm_layer_param_count(input_size, hidden1) +
         lstm_layer_param_count(hidden1, hidden2) + hidden2 + 1;
}

std::size_t ModelParams::layer_offset(int layer) const {
  return layer == 0 ? 0 : lstm_layer_param_count(input_size, hidden1);
}

std::size_t ModelParams::head_offset() const {
  return lstm_layer_param_count(input_size, hidden1) + lstm_layer_param_count(hidden1, hidden2);
}

ModelParams init_model(int input_size, int hidden1, int hidden2, Task task,
                       std::uint64_t seed) {
  ModelParams model;
  model.input_size = input_size;
  model.hidden1 = hidden1;
  model.hidden2 = hidden2;
  model.task = task;
  model.theta.assign(model.param_count(), 0.0);

  Rng rng(seed);
  auto fill_uniform = [&rng](double* p, std::size_t n, double bound) {
    for (std::size_t k = 0; k < n; ++k) p[k] = rng.uniform(-bound, bound);
  };

  struct LayerDims { int in, hid; };
  for (int layer = 0; layer < 2; ++layer) {
    const LayerDims d = layer == 0 ? LayerDims{input_size, hidden1}
                                   : LayerDims{hidden1, hidden2};
    MutLayerView v = mut_layer_view(model.theta.data() + model.layer_offset(layer), d.in, d.hid);
    const double wb = std::sqrt(6.0 / (d.in + d.hid));
    const double ub = std::sqrt(6.0 / (d.hid + d.hid));
    for (int g = 0; g < 4; ++g) fill_uniform(v.w[g], static_cast<std::size_t>(d.hid) * d.in, wb);
    for (int g = 0; g < 4; ++g) fill_uniform(v.u[g], static_cast<std::size_t>(d.hid) * d.hid, ub);
    for (int r = 0; r < d.hid; ++r) v.b[kForget][r] = 1.0;  // aids long-delay credit
  }
  double* head = model.theta.data() + model.head_offset();
  fill_uniform(head, hidden2, std::sqrt(6.0 / (hidden2 + 1)));
  head[hidden2] = 0.0;
  return model;
}

ForwardCache forward(const ModelParams& model, const double* rows, int n_rows, int n_cols) {
  if (n_cols != model.input_size) {
    throw Error(ErrorCode::ShapeMismatch,
                "brick has " + std::to_string(n_cols) + " columns, model expects " +
                    std::to_string(model.input_size));
  }
  ForwardCache cache;
  cache.steps = n_rows;
  const LayerView l1 = layer_view(model.theta.data() + model.layer_offset(0),
                                  model.input_size, model.hidden1);
  const LayerView l2 = layer_view(model.theta.data() + model.layer_offset(1),
                                  model.hidden1, model.hidden2);
  run_layer(l1, rows, n_rows, cache.l1);
  run_layer(l2, cache.l1.hidden.data(), n_rows, cache.l2);

  const double* head = model.theta.data() + model.head_offset();
  const double head_bias = head[model.hidden2];
  cache.logits.resize(n_rows);
  cache.probs.resize(n_rows);
  for (int t = 0; t < n_rows; ++t) {
    const double* h2 = cache.l2.hidden.data() + static_cast<std::size_t>(t) * model.hidden2;
    double z = head_bias;
    for (int r = 0; r < model.hidden2; ++r) z += head[r] * h2[r];
    cache.logits[t] = z;
    cache.probs[t] = sigmoid(z);
  }
  return cache;
}

ForwardCache forward(const ModelParams& model, const FeatureBrick& brick) {
  return forward(model, brick.rows.data(), brick.n_rows, brick.n_cols);
}

double bce_loss(const std::vector<double>& probs, const std::vector<int>& labels) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, "probs/labels length mismatch");
  }
  double total = 0.0;
  std::size_t present = 0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    if (labels[t] == kLabelAbsent) continue;
    double p = std::min(std::max(probs[t], kProbClamp), 1.0 - kProbClamp);
    total += labels[t] == 1 ? -std::log(p) : -std::log(1.0 - p);
    ++present;
  }
  if (present == 0) throw Error(ErrorCode::AllLabelsAbsent, "no labeled steps");
  return total / static_cast<double>(present);
}

namespace {

struct LayerBackwardState {
  std::vector<double> dh_next, dc_next;
  std::vector<double> d_pre[4];  // per-gate pre-activation gradients, one step
};

// One BPTT step for one layer. input_t/h_prev/c_prev are the forward-pass
// values feeding step t. Writes input gradients into dx (when not null) and
// parameter gradients into grads.
void layer_backward_step(const LayerView& layer, MutLayerView grads, const LayerCache& cache,
                         int t, const double* input_t, const double* h_prev,
                         const double* c_prev, const std::vector<double>& dh_in,
                         LayerBackwardState& st, double* dx) {
  const int h = layer.hidden;
  const std::size_t hs = static_cast<std::size_t>(h);
  const double* gi = cache.gate_i.data() + t * hs;
  const double* gf = cache.gate_f.data() + t * hs;
  const double* gg = cache.gate_g.data() + t * hs;
  const double* go = cache.gate_o.data() + t * hs;
  const double* tc = cache.tanh_cell.data() + t * hs;

  for (int g = 0; g < 4; ++g) st.d_pre[g].assign(hs, 0.0);
  std::vector<double> dc(hs, 0.0);
  for (int r = 0; r < h; ++r) {
    const double dh = dh_in[r];
    const double d_o = dh * tc[r];
    st.d_pre[kOutput][r] = d_o * go[r] * (1.0 - go[r]);
    dc[r] = dh * go[r] * (1.0 - tc[r] * tc[r]) + st.dc_next[r];
    st.d_pre[kInput][r] = dc[r] * gg[r] * gi[r] * (1.0 - gi[r]);
    st.d_pre[kCandidate][r] = dc[r] * gi[r] * (1.0 - gg[r] * gg[r]);
    st.d_pre[kForget][r] = dc[r] * c_prev[r] * gf[r] * (1.0 - gf[r]);
    st.dc_next[r] = dc[r] * gf[r];
  }

  std::fill(st.dh_next.begin(), st.dh_next.end(), 0.0);
  for (int g = 0; g < 4; ++g) {
    const double* d = st.d_pre[g].data();
    outer_add(grads.w[g], d, input_t, h, layer.input);
    outer_add(grads.u[g], d, h_prev, h, h);
    for (int r = 0; r < h; ++r) grads.b[g][r] += d[r];
    matvec_transpose_add(layer.u[g], d, st.dh_next.data(), h, h);
    if (dx != nullptr) matvec_transpose_add(layer.w[g], d, dx, h, layer.input);
  }
}

}  // namespace

std::vector<double> backward(const ModelParams& model, const ForwardCache& cache,
                             const double* rows, const std::vector<int>& labels,
                             int bptt_cap) {
  const int steps = cache.steps;
  if (static_cast<int>(labels.size()) != steps) {
    throw Error(ErrorCode::ShapeMismatch, "labels length != steps");
  }
  std::size_t present = 0;
  for (int lab : labels) present += lab != kLabelAbsent;
  if (present == 0) throw Error(ErrorCode::AllLabelsAbsent, "no labeled steps");

  std::vector<double> grad(model.param_count(), 0.0);
  const int h1 = model.hidden1, h2 = model.hidden2;
  const LayerView l1 = layer_view(model.theta.data() + model.layer_offset(0),
                                  model.input_size, h1);
  const LayerView l2 = layer_view(model.theta.data() + model.layer_offset(1), h1, h2);
  MutLayerView g1 = mut_layer_view(grad.data() + model.layer_offset(0), model.input_size, h1);
  MutLayerView g2 = mut_layer_view(grad.data() + model.layer_offset(1), h1, h2);
  const double* head = model.theta.data() + model.head_offset();
  double* ghead = grad.data() + model.head_offset();

  const std::vector<double> zeros1(h1, 0.0), zeros2(h2, 0.0);
  auto l1_h = [&](int t) {
    return t < 0 ? zeros1.data() : cache.l1.hidden.data() + static_cast<std::size_t>(t) * h1;
  };
  auto l1_c = [&](int t) {
    return t < 0 ? zeros1.data() : cache.l1.cell.data() + static_cast<std::size_t>(t) * h1;
  };
  auto l2_h = [&](int t) {
    return t < 0 ? zeros2.data() : cache.l2.hidden.data() + static_cast<std::size_t>(t) * h2;
  };
  auto l2_c = [&](int t) {
    return t < 0 ? zeros2.data() : cache.l2.cell.data() + static_cast<std::size_t>(t) * h2;
  };

  LayerBackwardState st1, st2;
  std::vector<double> dh1(h1), dh2(h2), dx2(h1);

  // Contiguous truncation windows; state carries forward between them but
  // gradients do not cross the boundary.
  const int cap = bptt_cap > 0 ? bptt_cap : steps;
  for (int win_start = ((steps - 1) / cap) * cap; win_start >= 0; win_start -= cap) {
    const int win_end = std::min(win_start + cap, steps);
    st1.dh_next.assign(h1, 0.0);
    st1.dc_next.assign(h1, 0.0);
    st2.dh_next.assign(h2, 0.0);
    st2.dc_next.assign(h2, 0.0);

    for (int t = win_end - 1; t >= win_start; --t) {
      double dlogit = 0.0;
      if (labels[t] != kLabelAbsent) {
        const double p = cache.probs[t];
        // The loss clamps probabilities; inside the clamp the BCE/sigmoid
        // gradient is p - y, outside it is exactly zero.
        if (p > kProbClamp && p < 1.0 - kProbClamp) {
          dlogit = (p - static_cast<double>(labels[t])) / static_cast<double>(present);
        }
      }
      const double* h2_t = l2_h(t);
      ghead[h2] += dlogit;
      for (int r = 0; r < h2; ++r) {
        ghead[r] += dlogit * h2_t[r];
        dh2[r] = dlogit * head[r] + st2.dh_next[r];
      }
      layer_backward_step(l2, g2, cache.l2, t, l1_h(t), l2_h(t - 1), l2_c(t - 1), dh2, st2,
                          dx2.data());

      for (int r = 0; r < h1; ++r) dh1[r] = dx2[r] + st1.dh_next[r];
      std::fill(dx2.begin(), dx2.end(), 0.0);
      const double* x1 = rows + static_cast<std::size_t>(t) * model.input_size;
      layer_backward_step(l1, g1, cache.l1, t, x1, l1_h(t - 1), l1_c(t - 1), dh1, st1,
                          nullptr);
    }
  }
  return grad;
}

Prediction predict(const ModelParams& model, const FeatureBrick& brick) {
  ForwardCache cache = forward(model, brick);
  Prediction pred;
  pred.probs = std::move(cache.probs);
  pred.labels.resize(pred.probs.size());
  for (std::size_t t = 0; t < pred.probs.size(); ++t) {
    pred.labels[t] = pred.probs[t] > 0.5 ? 1 : 0;
  }
  return pred;
}

void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& state) {
  if (theta.size() != grad.size() || theta.size() != state.m.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adam state/gradient shape");
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < theta.size(); ++k) {
    state.m[k] = c.beta1 * state.m[k] + (1.0 - c.beta1) * grad[k];
    state.v[k] = c.beta2 * state.v[k] + (1.0 - c.beta2) * grad[k] * grad[k];
    const double mhat = state.m[k] / bc1;
    const double vhat = state.v[k] / bc2;
    theta[k] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
  }
}

}  // namespace cascade
