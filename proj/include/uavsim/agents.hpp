#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "uavsim/actor_map.hpp"
#include "uavsim/env.hpp"
#include "uavsim/mlp.hpp"
#include "uavsim/policy.hpp"
#include "uavsim/replay.hpp"

namespace uavsim {

using ExperienceBatch = std::vector<const Experience*>;

// Shared machinery of the learning agents: reward accumulation between
// decision boundaries, the replay buffer and the end-of-episode training
// invocation (one critic step, then one actor step, on one sampled batch).
class LearningAgent : public Agent {
 public:
  LearningAgent(const Environment& env, int uav);

  bool learns() const override { return true; }
  void begin_episode(int episode, bool training) override;
  Action decide(const EnvState& view, Rng& rng) final;
  std::optional<Experience> observe(double reward, const EnvState& new_state) final;
  std::optional<Experience> end_episode(const EnvState& final_state) final;
  void train(double lr, Rng& rng) final;

  const ReplayBuffer& replay() const { return replay_; }
  ReplayBuffer& replay() { return replay_; }
  double epsilon() const { return epsilon_; }
  void set_epsilon(double e) { epsilon_ = e; }
  bool training() const { return training_; }
  int uav() const { return uav_; }
  const Environment& env() const { return *env_; }

  // Critic outputs are in units of this scale: the no-execution bound of the
  // total episode reward, N * N_c * (N_c + 1) * t_c / 2.
  double value_scale() const { return value_scale_; }

  virtual double train_critic(const ExperienceBatch& batch, double lr) = 0;
  virtual double train_actor(const ExperienceBatch& batch, double lr) = 0;

 protected:
  struct Choice {
    Action action;
    std::vector<double> action_features;
  };
  virtual Choice choose(const EnvState& view, const std::vector<double>& features, Rng& rng) = 0;

  // Column [state; one-hot(task)] of an actor/critic input matrix.
  void put_state_task(nn::Matrix& m, Eigen::Index col, const std::vector<double>& state, int task) const;

  const Environment* env_;
  int uav_;
  double value_scale_;
  double epsilon_;
  bool training_ = true;
  ReplayBuffer replay_;

 private:
  struct Pending {
    std::vector<double> state;
    Action action;
    std::vector<double> action_features;
    double reward = 0.0;
  };
  std::optional<Experience> finalize(const EnvState& state, bool terminal);

  std::optional<Pending> pending_;
  int last_cycle_ = 0;
};

// Compound-action actor-critic. The critic scores (state, task, location);
// the actor proposes a location for (state, task). Tasks are chosen by
// critic argmax over actor-proposed locations.
class Ca2cAgent : public LearningAgent {
 public:
  Ca2cAgent(const Environment& env, int uav, Rng& init_rng);

  AgentKind kind() const override { return AgentKind::kCa2c; }

  std::size_t critic_input_size() const;
  std::size_t actor_input_size() const;

  double train_critic(const ExperienceBatch& batch, double lr) override;
  double train_actor(const ExperienceBatch& batch, double lr) override;

  struct CriticEval {
    double loss = 0.0;
    std::vector<double> targets;
    nn::Gradients grads;
  };
  // Double-Q targets and loss gradient without updating anything.
  CriticEval critic_loss(const ExperienceBatch& batch) const;
  // Online-critic task choice for a next state (argmax over all tasks).
  int next_task(const std::vector<double>& next_state) const;

  struct ActorEval {
    double objective = 0.0;
    nn::Gradients grads;  // gradient of the objective (ascent direction)
  };
  ActorEval actor_objective(const ExperienceBatch& batch) const;

  // Q estimate (in reward units) and proposed location for one task.
  double q_value(const std::vector<double>& state, int task, const Vec3& location) const;
  Vec3 propose_location(const std::vector<double>& state, int task) const;

  nn::Mlp& critic() { return critic_; }
  nn::Mlp& actor() { return actor_; }
  nn::Mlp& critic_target() { return critic_target_; }
  nn::Mlp& actor_target() { return actor_target_; }
  const nn::Mlp& critic() const { return critic_; }
  const nn::Mlp& actor() const { return actor_; }
  const ActorOutputMap& output_map() const { return map_; }

  void save(std::ostream& out) const override;
  void load(std::istream& in);

 protected:
  Choice choose(const EnvState& view, const std::vector<double>& features, Rng& rng) override;

 private:
  void put_critic_column(nn::Matrix& m, Eigen::Index col, const std::vector<double>& state, int task,
                         const Vec3& location) const;

  ActorOutputMap map_;
  nn::Mlp critic_, actor_, critic_target_, actor_target_;
  nn::AdamState critic_opt_, actor_opt_;
};

// Critic-only baseline: one Q output per task, sensing directly above the
// target at the nominal altitude.
class DqnAgent : public LearningAgent {
 public:
  DqnAgent(const Environment& env, int uav, Rng& init_rng);

  AgentKind kind() const override { return AgentKind::kDqn; }

  double train_critic(const ExperienceBatch& batch, double lr) override;
  double train_actor(const ExperienceBatch&, double) override { return 0.0; }

  Vec3 location_for(int task) const;
  nn::Mlp& network() { return q_; }
  nn::Mlp& target_network() { return q_target_; }
  const nn::Mlp& network() const { return q_; }

  void save(std::ostream& out) const override;
  void load(std::istream& in);

 protected:
  Choice choose(const EnvState& view, const std::vector<double>& features, Rng& rng) override;

 private:
  nn::Mlp q_, q_target_;
  nn::AdamState opt_;
};

// Continuous-action baseline: the actor emits N task scores (softmax) and a
// raw location; the critic scores (state, [probabilities, location]).
class DdpgAgent : public LearningAgent {
 public:
  DdpgAgent(const Environment& env, int uav, Rng& init_rng);

  AgentKind kind() const override { return AgentKind::kDdpg; }

  double train_critic(const ExperienceBatch& batch, double lr) override;
  double train_actor(const ExperienceBatch& batch, double lr) override;

  struct ActorOutput {
    std::vector<double> probabilities;  // softmax over all N tasks
    Eigen::VectorXd raw_location;
  };
  ActorOutput act(const std::vector<double>& state) const;

  struct ActorEval {
    double objective = 0.0;
    nn::Gradients grads;
  };
  ActorEval actor_objective(const ExperienceBatch& batch) const;

  nn::Mlp& actor() { return actor_; }
  nn::Mlp& critic() { return critic_; }
  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& critic() const { return critic_; }

  void save(std::ostream& out) const override;
  void load(std::istream& in);

 protected:
  Choice choose(const EnvState& view, const std::vector<double>& features, Rng& rng) override;

 private:
  std::vector<double> action_vector(const std::vector<double>& probabilities, const Vec3& location) const;

  ActorOutputMap map_;
  nn::Mlp actor_, critic_, actor_target_, critic_target_;
  nn::AdamState actor_opt_, critic_opt_;
};

std::vector<int> hidden_dims(int input, int width, int output);

}  // namespace uavsim
