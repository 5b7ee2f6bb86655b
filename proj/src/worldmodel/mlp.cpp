#include <algorithm>
#include <cmath>
#include <numeric>

#include "liftplan/kernels.hpp"
#include "liftplan/worldmodel.hpp"

namespace liftplan {

MlpModel::MlpModel(std::size_t state_dim, std::size_t action_dim,
                   std::vector<DenseMatrix> weights, std::vector<Vec> biases)
    : state_dim_(state_dim), action_dim_(action_dim),
      weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.empty() || weights_.size() != biases_.size())
    throw std::invalid_argument("MlpModel: weights/biases layer mismatch");
  std::size_t in = state_dim_ + action_dim_;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].cols != in || weights_[l].rows != biases_[l].size())
      throw std::invalid_argument("MlpModel: layer shape mismatch");
    in = weights_[l].rows;
  }
  if (in != state_dim_) throw std::invalid_argument("MlpModel: output dim must equal state dim");
}

MlpModel MlpModel::random(std::size_t state_dim, std::size_t action_dim,
                          const std::vector<std::size_t>& hidden, RngStream& rng) {
  std::vector<std::size_t> widths;
  widths.push_back(state_dim + action_dim);
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(state_dim);

  std::vector<DenseMatrix> w;
  std::vector<Vec> b;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseMatrix wm(widths[l + 1], widths[l]);
    const double s = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    for (double& e : wm.data) e = s * rng.next_gauss();
    w.push_back(std::move(wm));
    b.emplace_back(widths[l + 1], 0.0);
  }
  return MlpModel(state_dim, action_dim, std::move(w), std::move(b));
}

std::vector<std::size_t> MlpModel::layer_widths() const {
  std::vector<std::size_t> widths;
  widths.push_back(state_dim_ + action_dim_);
  for (const auto& w : weights_) widths.push_back(w.rows);
  return widths;
}

void MlpModel::forward_into(std::span<const double> s, std::span<const double> a,
                            std::span<double> out) const {
  Vec x(s.begin(), s.end());
  x.insert(x.end(), a.begin(), a.end());
  const std::size_t last = weights_.size() - 1;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vec y = matvec(weights_[l], x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += biases_[l][i];
    if (l != last)
      for (double& v : y) v = std::tanh(v);
    x = std::move(y);
  }
  std::copy(x.begin(), x.end(), out.begin());
}

void MlpModel::input_vjp(std::span<const double> s, std::span<const double> a,
                         std::span<const double> cot, Vec& din) const {
  // forward pass caching post-activation values per layer
  std::vector<Vec> acts;
  acts.reserve(weights_.size() + 1);
  Vec x(s.begin(), s.end());
  x.insert(x.end(), a.begin(), a.end());
  acts.push_back(x);
  const std::size_t last = weights_.size() - 1;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vec y = matvec(weights_[l], acts.back());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += biases_[l][i];
    if (l != last)
      for (double& v : y) v = std::tanh(v);
    acts.push_back(std::move(y));
  }

  Vec grad(cot.begin(), cot.end());
  for (std::size_t l = weights_.size(); l-- > 0;) {
    if (l != last) {
      const Vec& y = acts[l + 1];  // tanh output; d tanh = 1 - y^2
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= 1.0 - y[i] * y[i];
    }
    grad = matvec_t(weights_[l], grad);
  }
  din = std::move(grad);
}

void MlpModel::vjp_state_into(std::span<const double> s, std::span<const double> a,
                              std::span<const double> cot, std::span<double> out) const {
  Vec din;
  input_vjp(s, a, cot, din);
  std::copy(din.begin(), din.begin() + state_dim_, out.begin());
}

void MlpModel::vjp_action_into(std::span<const double> s, std::span<const double> a,
                               std::span<const double> cot, std::span<double> out) const {
  Vec din;
  input_vjp(s, a, cot, din);
  std::copy(din.begin() + state_dim_, din.end(), out.begin());
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    n += weights_[l].data.size() + biases_[l].size();
  return n;
}

Vec MlpModel::flatten_parameters() const {
  Vec flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.insert(flat.end(), weights_[l].data.begin(), weights_[l].data.end());
    flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
  }
  return flat;
}

void MlpModel::load_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("MlpModel: parameter count mismatch");
  std::size_t off = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    std::copy(flat.begin() + off, flat.begin() + off + weights_[l].data.size(),
              weights_[l].data.begin());
    off += weights_[l].data.size();
    std::copy(flat.begin() + off, flat.begin() + off + biases_[l].size(),
              biases_[l].begin());
    off += biases_[l].size();
  }
}

// ---------------------------------------------------------------------------
// training

namespace {

struct LayerCache {
  std::vector<Vec> acts;  // per layer, post-activation
};

// squared error of one sample plus gradient accumulation into gw/gb
double sample_grad(const MlpModel& m, const Transition& t,
                   std::vector<DenseMatrix>& gw, std::vector<Vec>& gb) {
  const auto& w = m.weights();
  const auto& b = m.biases();
  const std::size_t last = w.size() - 1;

  std::vector<Vec> acts;
  acts.reserve(w.size() + 1);
  Vec x(t.s.begin(), t.s.end());
  x.insert(x.end(), t.a.begin(), t.a.end());
  acts.push_back(std::move(x));
  for (std::size_t l = 0; l < w.size(); ++l) {
    Vec y = matvec(w[l], acts.back());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[l][i];
    if (l != last)
      for (double& v : y) v = std::tanh(v);
    acts.push_back(std::move(y));
  }

  Vec grad(acts.back().size());
  double err = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double r = acts.back()[i] - t.s_next[i];
    grad[i] = 2.0 * r;
    err += r * r;
  }

  for (std::size_t l = w.size(); l-- > 0;) {
    if (l != last) {
      const Vec& y = acts[l + 1];
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= 1.0 - y[i] * y[i];
    }
    // gw[l] += grad * acts[l]^T ; gb[l] += grad
    for (std::size_t i = 0; i < grad.size(); ++i) {
      kern::active().axpy(grad[i], acts[l].data(), gw[l].data.data() + i * gw[l].cols,
                          gw[l].cols);
      gb[l][i] += grad[i];
    }
    if (l > 0) grad = matvec_t(w[l], grad);
  }
  return err;
}

double dataset_mse(const MlpModel& m, std::span<const Transition> data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  Vec pred;
  for (const auto& t : data) {
    pred = m.forward(t.s, t.a);
    total += sumsq(sub(pred, t.s_next));
  }
  return total / (static_cast<double>(data.size()) * static_cast<double>(m.state_dim()));
}

}  // namespace

MlpModel train_mlp(const std::vector<Transition>& data, const MlpTrainConfig& cfg,
                   RngStream& rng) {
  if (data.empty()) throw std::invalid_argument("train_mlp: empty dataset");
  const std::size_t n = data.front().s.size();
  const std::size_t k = data.front().a.size();
  for (const auto& t : data)
    if (t.s.size() != n || t.a.size() != k || t.s_next.size() != n)
      throw std::invalid_argument("train_mlp: inconsistent sample dims");

  // deterministic shuffle, last 10% (at least one sample when N > 1) held out
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i-- > 1;) {
    const std::size_t j = rng.next_u64() % (i + 1);
    std::swap(order[i], order[j]);
  }
  std::size_t holdout = static_cast<std::size_t>(cfg.holdout_frac * static_cast<double>(data.size()));
  if (holdout == 0 && data.size() > 1) holdout = 1;
  std::vector<Transition> train, held;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < order.size() - holdout ? train : held).push_back(data[order[i]]);
  if (train.empty()) train = held;

  const std::uint64_t init_seed = rng.seed();
  MlpModel model = MlpModel::random(n, k, cfg.hidden, rng);

  // Adam state over flattened parameters
  Vec params = model.flatten_parameters();
  Vec m1(params.size(), 0.0), m2(params.size(), 0.0);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

  std::vector<DenseMatrix> gw;
  std::vector<Vec> gb;
  for (std::size_t l = 0; l < model.weights().size(); ++l) {
    gw.emplace_back(model.weights()[l].rows, model.weights()[l].cols);
    gb.emplace_back(model.biases()[l].size(), 0.0);
  }

  const double inv = 1.0 / (static_cast<double>(train.size()) * static_cast<double>(n));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& g : gw) std::fill(g.data.begin(), g.data.end(), 0.0);
    for (auto& g : gb) std::fill(g.begin(), g.end(), 0.0);
    for (const auto& t : train) sample_grad(model, t, gw, gb);

    // flatten gradient in the same order as flatten_parameters
    Vec grad;
    grad.reserve(params.size());
    for (std::size_t l = 0; l < gw.size(); ++l) {
      grad.insert(grad.end(), gw[l].data.begin(), gw[l].data.end());
      grad.insert(grad.end(), gb[l].begin(), gb[l].end());
    }
    for (double& g : grad) g *= inv;

    const double t1 = 1.0 - std::pow(b1, static_cast<double>(epoch + 1));
    const double t2 = 1.0 - std::pow(b2, static_cast<double>(epoch + 1));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m1[i] = b1 * m1[i] + (1.0 - b1) * grad[i];
      m2[i] = b2 * m2[i] + (1.0 - b2) * grad[i] * grad[i];
      params[i] -= cfg.lr * (m1[i] / t1) / (std::sqrt(m2[i] / t2) + eps);
    }
    model.load_parameters(params);
  }

  const double held_mse = dataset_mse(model, held.empty() ? train : held);
  model.training_loss = held_mse;
  model.training_seed = init_seed;
  if (held_mse > cfg.mse_threshold)
    throw TrainFailure("train_mlp: held-out MSE above threshold", held_mse);
  return model;
}

}  // namespace liftplan
