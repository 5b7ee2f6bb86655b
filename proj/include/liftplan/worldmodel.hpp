#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "liftplan/dense.hpp"
#include "liftplan/rng.hpp"

namespace liftplan {

// Differentiable one-step dynamics s' = F(s, a). Gradient access is split by
// input so stop-gradient objectives can skip the state side entirely.
// Immutable after construction; safe to share across threads.
class WorldModel {
 public:
  virtual ~WorldModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_dim() const = 0;

  virtual void forward_into(std::span<const double> s, std::span<const double> a,
                            std::span<double> out) const = 0;
  // out = (dF/ds)^T cot
  virtual void vjp_state_into(std::span<const double> s, std::span<const double> a,
                              std::span<const double> cot, std::span<double> out) const = 0;
  // out = (dF/da)^T cot
  virtual void vjp_action_into(std::span<const double> s, std::span<const double> a,
                               std::span<const double> cot, std::span<double> out) const = 0;

  // Checked convenience wrappers.
  Vec forward(std::span<const double> s, std::span<const double> a) const;
  Vec vjp_state(std::span<const double> s, std::span<const double> a,
                std::span<const double> cot) const;
  Vec vjp_action(std::span<const double> s, std::span<const double> a,
                 std::span<const double> cot) const;

 protected:
  void check_dims(std::span<const double> s, std::span<const double> a) const;
};

// s' = A s + B a + c
class LinearModel final : public WorldModel {
 public:
  LinearModel(DenseMatrix A, DenseMatrix B, Vec c = {});

  std::size_t state_dim() const override { return A_.rows; }
  std::size_t action_dim() const override { return B_.cols; }
  void forward_into(std::span<const double> s, std::span<const double> a,
                    std::span<double> out) const override;
  void vjp_state_into(std::span<const double> s, std::span<const double> a,
                      std::span<const double> cot, std::span<double> out) const override;
  void vjp_action_into(std::span<const double> s, std::span<const double> a,
                       std::span<const double> cot, std::span<double> out) const override;

  const DenseMatrix& A() const { return A_; }
  const DenseMatrix& B() const { return B_; }
  const Vec& offset() const { return c_; }

 private:
  DenseMatrix A_, B_;
  Vec c_;
};

struct WallSegment {
  double x1, y1, x2, y2;
  double thickness;
};

// Planar point world with smooth soft walls: s' = q - grad(Phi)(q) with
// q = s + step_scale * sat(a). Phi is a C2 hinge on squared distance to each
// segment, so forward stays differentiable while walls still resist motion
// and create the straight-through local minima that make planning hard.
// sat is a radial tanh with limit action_limit; action_limit <= 0 disables
// it, recovering forward(s, a) = s + step_scale * a away from walls.
class WallWorld final : public WorldModel {
 public:
  WallWorld(std::vector<WallSegment> walls, double stiffness, double step_scale,
            double action_limit = 0.0);

  std::size_t state_dim() const override { return 2; }
  std::size_t action_dim() const override { return 2; }
  void forward_into(std::span<const double> s, std::span<const double> a,
                    std::span<double> out) const override;
  void vjp_state_into(std::span<const double> s, std::span<const double> a,
                      std::span<const double> cot, std::span<double> out) const override;
  void vjp_action_into(std::span<const double> s, std::span<const double> a,
                       std::span<const double> cot, std::span<double> out) const override;

  const std::vector<WallSegment>& walls() const { return walls_; }
  double stiffness() const { return stiffness_; }
  double step_scale() const { return step_scale_; }
  double action_limit() const { return action_limit_; }

 private:
  // push = -grad(Phi); jac (optional) receives d push / d q.
  void push_at(const double q[2], double push[2], double jac[4]) const;
  // u = sat(a); jac (optional) receives the (symmetric) d sat / d a.
  void saturate(const double a[2], double u[2], double jac[4]) const;

  std::vector<WallSegment> walls_;
  double stiffness_;
  double step_scale_;
  double action_limit_;
};

// Fully-connected tanh network on the concatenated (s, a) input, linear head.
// Gradients are hand-written reverse accumulation per layer.
class MlpModel final : public WorldModel {
 public:
  MlpModel(std::size_t state_dim, std::size_t action_dim,
           std::vector<DenseMatrix> weights, std::vector<Vec> biases);

  static MlpModel random(std::size_t state_dim, std::size_t action_dim,
                         const std::vector<std::size_t>& hidden, RngStream& rng);

  std::size_t state_dim() const override { return state_dim_; }
  std::size_t action_dim() const override { return action_dim_; }
  void forward_into(std::span<const double> s, std::span<const double> a,
                    std::span<double> out) const override;
  void vjp_state_into(std::span<const double> s, std::span<const double> a,
                      std::span<const double> cot, std::span<double> out) const override;
  void vjp_action_into(std::span<const double> s, std::span<const double> a,
                       std::span<const double> cot, std::span<double> out) const override;

  const std::vector<DenseMatrix>& weights() const { return weights_; }
  const std::vector<Vec>& biases() const { return biases_; }
  std::vector<std::size_t> layer_widths() const;

  std::size_t parameter_count() const;
  Vec flatten_parameters() const;
  void load_parameters(std::span<const double> flat);

  double training_loss = 0.0;  // held-out MSE recorded by train_mlp
  std::uint64_t training_seed = 0;

 private:
  void input_vjp(std::span<const double> s, std::span<const double> a,
                 std::span<const double> cot, Vec& din) const;

  std::size_t state_dim_, action_dim_;
  std::vector<DenseMatrix> weights_;
  std::vector<Vec> biases_;
};

// states: s_0..s_T, actions: a_0..a_{T-1}
struct Trajectory {
  std::vector<Vec> states;
  std::vector<Vec> actions;
  std::size_t horizon() const { return actions.size(); }
};

Trajectory rollout(const WorldModel& m, std::span<const double> s0,
                   const std::vector<Vec>& actions);

// Elementwise-equal to forward on each pair regardless of worker count.
std::vector<Vec> batch_forward(const WorldModel& m,
                               const std::vector<std::pair<Vec, Vec>>& pairs,
                               int workers = 1);

struct Transition {
  Vec s, a, s_next;
};

struct MlpTrainConfig {
  std::vector<std::size_t> hidden;
  std::size_t epochs = 500;
  double lr = 1e-2;
  double holdout_frac = 0.1;
  double mse_threshold = 1e-3;
};

class TrainFailure : public std::runtime_error {
 public:
  TrainFailure(const std::string& what, double mse)
      : std::runtime_error(what), final_mse(mse) {}
  double final_mse;
};

// Full-batch Adam on mean squared one-step error; deterministic given rng.
// Throws TrainFailure (carrying the final held-out MSE) when the configured
// threshold is not met.
MlpModel train_mlp(const std::vector<Transition>& data, const MlpTrainConfig& cfg,
                   RngStream& rng);

}  // namespace liftplan
