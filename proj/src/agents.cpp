#include "uavsim/agents.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace uavsim {

using nn::Matrix;

std::vector<int> hidden_dims(int input, int width, int output) { return {input, width, width, width, output}; }

namespace {

Eigen::Index first_argmax(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

void check_batch(const ExperienceBatch& batch) {
  if (batch.empty()) throw std::invalid_argument("training batch is empty");
}

nn::Gradients negated(nn::Gradients g) {
  for (auto& l : g.layers) {
    l.weight = -l.weight;
    l.bias = -l.bias;
  }
  return g;
}

void write_header(std::ostream& out, const char* kind, const Environment& env) {
  out << "agent " << kind << ' ' << env.num_uavs() << ' ' << env.num_tasks() << '\n';
}

void read_header(std::istream& in, const char* kind, const Environment& env) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: missing agent line");
  std::istringstream s(line);
  std::string tag, k;
  int m = 0, n = 0;
  s >> tag >> k >> m >> n;
  if (tag != "agent" || k != kind || m != env.num_uavs() || n != env.num_tasks())
    throw std::runtime_error("checkpoint: agent line mismatch: " + line);
}

void load_into(nn::Mlp& net, std::istream& in) {
  nn::Mlp loaded = nn::read_checkpoint(in, net.output_activation());
  if (!loaded.same_shape(net)) throw std::runtime_error("checkpoint: network shape mismatch");
  net.mutable_layers() = loaded.layers();
}

}  // namespace

// ---------------------------------------------------------------- LearningAgent

LearningAgent::LearningAgent(const Environment& env, int uav)
    : env_(&env),
      uav_(uav),
      value_scale_(static_cast<double>(env.num_tasks()) * env.config().episode_cycles *
                   (env.config().episode_cycles + 1.0) * env.config().cycle_duration_s / 2.0),
      epsilon_(env.config().exploration),
      replay_(static_cast<std::size_t>(env.config().replay_capacity)) {}

void LearningAgent::begin_episode(int /*episode*/, bool training) {
  training_ = training;
  pending_.reset();
  last_cycle_ = 0;
}

Action LearningAgent::decide(const EnvState& view, Rng& rng) {
  std::vector<double> features = env_->encode_state(view, uav_);
  Choice c = choose(view, features, rng);
  if (training_) pending_ = Pending{std::move(features), c.action, std::move(c.action_features), 0.0};
  return c.action;
}

std::optional<Experience> LearningAgent::observe(double reward, const EnvState& new_state) {
  if (new_state.cycle <= last_cycle_) throw std::logic_error("observe called out of order");
  last_cycle_ = new_state.cycle;
  if (!pending_) return std::nullopt;
  pending_->reward += reward;
  if (new_state.cycle > env_->config().episode_cycles) return std::nullopt;
  if (env_->cycle_type(new_state, uav_) != CycleType::kDecision) return std::nullopt;
  return finalize(new_state, false);
}

std::optional<Experience> LearningAgent::end_episode(const EnvState& final_state) {
  if (!pending_) return std::nullopt;
  return finalize(final_state, true);
}

std::optional<Experience> LearningAgent::finalize(const EnvState& state, bool terminal) {
  Experience e;
  e.state = std::move(pending_->state);
  e.action = pending_->action;
  e.action_features = std::move(pending_->action_features);
  e.next_state = env_->encode_state(state, uav_);
  e.reward = pending_->reward;
  e.terminal = terminal;
  pending_.reset();
  replay_.push(e);
  return e;
}

void LearningAgent::train(double lr, Rng& rng) {
  if (replay_.empty()) return;
  for (int k = 0; k < env_->config().train_steps_per_episode; ++k) {
    const ExperienceBatch batch = replay_.sample(static_cast<std::size_t>(env_->config().batch_size), rng);
    train_critic(batch, lr);
    train_actor(batch, lr);
  }
}

void LearningAgent::put_state_task(Matrix& m, Eigen::Index col, const std::vector<double>& state, int task) const {
  const auto s = static_cast<Eigen::Index>(state.size());
  m.col(col).setZero();
  m.col(col).head(s) = Eigen::Map<const Eigen::VectorXd>(state.data(), s);
  m(s + task, col) = 1.0;
}

// ---------------------------------------------------------------- CA2C

Ca2cAgent::Ca2cAgent(const Environment& env, int uav, Rng& init_rng) : LearningAgent(env, uav), map_(env) {
  const int width = env.config().hidden_width;
  critic_ = nn::Mlp::init(hidden_dims(static_cast<int>(critic_input_size()), width, 1), init_rng);
  actor_ = nn::Mlp::init(hidden_dims(static_cast<int>(actor_input_size()), width, map_.raw_size()), init_rng);
  critic_target_ = critic_;
  actor_target_ = actor_;
  critic_opt_ = nn::AdamState::for_net(critic_);
  actor_opt_ = nn::AdamState::for_net(actor_);
}

std::size_t Ca2cAgent::critic_input_size() const {
  return env_->state_size() + env_->num_tasks() + map_.feature_size();
}

std::size_t Ca2cAgent::actor_input_size() const { return env_->state_size() + env_->num_tasks(); }

void Ca2cAgent::put_critic_column(Matrix& m, Eigen::Index col, const std::vector<double>& state, int task,
                                  const Vec3& location) const {
  put_state_task(m, col, state, task);
  m.col(col).tail(map_.feature_size()) = map_.features(location);
}

Vec3 Ca2cAgent::propose_location(const std::vector<double>& state, int task) const {
  Matrix in(actor_input_size(), 1);
  put_state_task(in, 0, state, task);
  const Matrix raw = nn::forward(actor_, in);
  return map_.location(raw.col(0), task);
}

double Ca2cAgent::q_value(const std::vector<double>& state, int task, const Vec3& location) const {
  Matrix in(critic_input_size(), 1);
  put_critic_column(in, 0, state, task, location);
  return value_scale_ * nn::forward(critic_, in)(0, 0);
}

LearningAgent::Choice Ca2cAgent::choose(const EnvState& view, const std::vector<double>& features, Rng& rng) {
  const ActionSet set = env_->available_actions(view, uav_);
  const double eps = training_ ? epsilon_ : 0.0;
  if (uniform01(rng) < eps) {
    const int j = set.tasks[uniform_index(rng, set.tasks.size())];
    return {Action{j, propose_location(features, j)}, {}};
  }
  const auto k = static_cast<Eigen::Index>(set.tasks.size());
  Matrix ain(actor_input_size(), k);
  for (Eigen::Index c = 0; c < k; ++c) put_state_task(ain, c, features, set.tasks[c]);
  const Matrix raw = nn::forward(actor_, ain);
  Matrix cin(critic_input_size(), k);
  std::vector<Vec3> locs(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    locs[c] = map_.location(raw.col(c), set.tasks[c]);
    put_critic_column(cin, c, features, set.tasks[c], locs[c]);
  }
  const Eigen::Index best = first_argmax(nn::forward(critic_, cin).row(0));
  return {Action{set.tasks[best], locs[best]}, {}};
}

int Ca2cAgent::next_task(const std::vector<double>& next_state) const {
  const int n = env_->num_tasks();
  Matrix ain(actor_input_size(), n);
  for (int j = 0; j < n; ++j) put_state_task(ain, j, next_state, j);
  const Matrix raw = nn::forward(actor_, ain);
  Matrix cin(critic_input_size(), n);
  for (int j = 0; j < n; ++j) put_critic_column(cin, j, next_state, j, map_.location(raw.col(j), j));
  return static_cast<int>(first_argmax(nn::forward(critic_, cin).row(0)));
}

Ca2cAgent::CriticEval Ca2cAgent::critic_loss(const ExperienceBatch& batch) const {
  check_batch(batch);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const int n = env_->num_tasks();
  CriticEval out;
  out.targets.resize(batch.size());

  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.targets[i] = batch[i]->reward;
    if (!batch[i]->terminal) live.push_back(i);
  }
  if (!live.empty()) {
    const auto k = static_cast<Eigen::Index>(live.size());
    // Next task from the online networks.
    Matrix ain(actor_input_size(), k * n);
    for (Eigen::Index r = 0; r < k; ++r)
      for (int j = 0; j < n; ++j) put_state_task(ain, r * n + j, batch[live[r]]->next_state, j);
    const Matrix raw = nn::forward(actor_, ain);
    Matrix cin(critic_input_size(), k * n);
    for (Eigen::Index r = 0; r < k; ++r)
      for (int j = 0; j < n; ++j)
        put_critic_column(cin, r * n + j, batch[live[r]]->next_state, j, map_.location(raw.col(r * n + j), j));
    const Matrix q = nn::forward(critic_, cin);

    // Its value from the target networks.
    std::vector<int> next(k);
    Matrix tin(actor_input_size(), k);
    for (Eigen::Index r = 0; r < k; ++r) {
      next[r] = static_cast<int>(first_argmax(q.row(0).segment(r * n, n)));
      put_state_task(tin, r, batch[live[r]]->next_state, next[r]);
    }
    const Matrix traw = nn::forward(actor_target_, tin);
    Matrix tcin(critic_input_size(), k);
    for (Eigen::Index r = 0; r < k; ++r)
      put_critic_column(tcin, r, batch[live[r]]->next_state, next[r], map_.location(traw.col(r), next[r]));
    const Matrix tq = nn::forward(critic_target_, tcin);
    for (Eigen::Index r = 0; r < k; ++r) out.targets[live[r]] += value_scale_ * tq(0, r);
  }

  Matrix cin(critic_input_size(), b);
  for (Eigen::Index i = 0; i < b; ++i)
    put_critic_column(cin, i, batch[i]->state, batch[i]->action.task, batch[i]->action.location);
  nn::ForwardCache cache;
  const Matrix q = nn::forward(critic_, cin, &cache);
  Matrix grad(1, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double diff = value_scale_ * q(0, i) - out.targets[i];
    out.loss += diff * diff;
    grad(0, i) = 2.0 * diff * value_scale_ / static_cast<double>(b);
  }
  out.loss /= static_cast<double>(b);
  out.grads = nn::backward(critic_, cache, grad).params;
  return out;
}

double Ca2cAgent::train_critic(const ExperienceBatch& batch, double lr) {
  CriticEval e = critic_loss(batch);
  nn::adam_step(critic_, critic_opt_, e.grads, lr);
  nn::soft_update(critic_target_, critic_, env_->config().soft_update);
  return e.loss;
}

Ca2cAgent::ActorEval Ca2cAgent::actor_objective(const ExperienceBatch& batch) const {
  check_batch(batch);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const int l = map_.feature_size();
  Matrix ain(actor_input_size(), b);
  for (Eigen::Index i = 0; i < b; ++i) put_state_task(ain, i, batch[i]->state, batch[i]->action.task);
  nn::ForwardCache acache;
  const Matrix raw = nn::forward(actor_, ain, &acache);
  Matrix cin(critic_input_size(), b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const int t = batch[i]->action.task;
    put_critic_column(cin, i, batch[i]->state, t, map_.location(raw.col(i), t));
  }
  nn::ForwardCache ccache;
  const Matrix q = nn::forward(critic_, cin, &ccache);

  ActorEval out;
  out.objective = value_scale_ * q.mean();
  const Matrix gq = Matrix::Constant(1, b, value_scale_ / static_cast<double>(b));
  const Matrix dq = nn::backward(critic_, ccache, gq, false).input_grad;
  Matrix du(map_.raw_size(), b);
  for (Eigen::Index i = 0; i < b; ++i)
    du.col(i) = map_.jacobian(raw.col(i), batch[i]->action.task).transpose() * dq.col(i).tail(l);
  out.grads = nn::backward(actor_, acache, du).params;
  return out;
}

double Ca2cAgent::train_actor(const ExperienceBatch& batch, double lr) {
  ActorEval e = actor_objective(batch);
  nn::adam_step(actor_, actor_opt_, negated(std::move(e.grads)), lr);
  nn::soft_update(actor_target_, actor_, env_->config().soft_update);
  return e.objective;
}

void Ca2cAgent::save(std::ostream& out) const {
  write_header(out, "ca2c", *env_);
  for (const nn::Mlp* net : {&critic_, &actor_, &critic_target_, &actor_target_}) nn::write_checkpoint(out, *net);
}

void Ca2cAgent::load(std::istream& in) {
  read_header(in, "ca2c", *env_);
  for (nn::Mlp* net : {&critic_, &actor_, &critic_target_, &actor_target_}) load_into(*net, in);
}

// ---------------------------------------------------------------- DQN

DqnAgent::DqnAgent(const Environment& env, int uav, Rng& init_rng) : LearningAgent(env, uav) {
  q_ = nn::Mlp::init(hidden_dims(static_cast<int>(env.state_size()), env.config().hidden_width, env.num_tasks()),
                     init_rng);
  q_target_ = q_;
  opt_ = nn::AdamState::for_net(q_);
}

Vec3 DqnAgent::location_for(int task) const {
  const Vec3& t = env_->target(task);
  return Vec3{t.x, t.y, env_->config().uav_altitude};
}

LearningAgent::Choice DqnAgent::choose(const EnvState& view, const std::vector<double>& features, Rng& rng) {
  const ActionSet set = env_->available_actions(view, uav_);
  const double eps = training_ ? epsilon_ : 0.0;
  if (uniform01(rng) < eps) {
    const int j = set.tasks[uniform_index(rng, set.tasks.size())];
    return {Action{j, location_for(j)}, {}};
  }
  const nn::Vector q =
      nn::forward(q_, nn::Vector(Eigen::Map<const Eigen::VectorXd>(features.data(), features.size())));
  int best = set.tasks.front();
  for (int j : set.tasks)
    if (q(j) > q(best)) best = j;
  return {Action{best, location_for(best)}, {}};
}

double DqnAgent::train_critic(const ExperienceBatch& batch, double lr) {
  check_batch(batch);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const auto s = static_cast<Eigen::Index>(env_->state_size());
  Matrix next(s, b), cur(s, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    next.col(i) = Eigen::Map<const Eigen::VectorXd>(batch[i]->next_state.data(), s);
    cur.col(i) = Eigen::Map<const Eigen::VectorXd>(batch[i]->state.data(), s);
  }
  const Matrix qn = nn::forward(q_, next);
  const Matrix qt = nn::forward(q_target_, next);
  nn::ForwardCache cache;
  const Matrix q = nn::forward(q_, cur, &cache);
  Matrix grad = Matrix::Zero(q.rows(), b);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    double target = batch[i]->reward;
    if (!batch[i]->terminal) target += value_scale_ * qt(first_argmax(qn.col(i).transpose()), i);
    const int a = batch[i]->action.task;
    const double diff = value_scale_ * q(a, i) - target;
    loss += diff * diff;
    grad(a, i) = 2.0 * diff * value_scale_ / static_cast<double>(b);
  }
  nn::adam_step(q_, opt_, nn::backward(q_, cache, grad).params, lr);
  nn::soft_update(q_target_, q_, env_->config().soft_update);
  return loss / static_cast<double>(b);
}

void DqnAgent::save(std::ostream& out) const {
  write_header(out, "dqn", *env_);
  nn::write_checkpoint(out, q_);
  nn::write_checkpoint(out, q_target_);
}

void DqnAgent::load(std::istream& in) {
  read_header(in, "dqn", *env_);
  load_into(q_, in);
  load_into(q_target_, in);
}

// ---------------------------------------------------------------- DDPG

DdpgAgent::DdpgAgent(const Environment& env, int uav, Rng& init_rng) : LearningAgent(env, uav), map_(env) {
  const int width = env.config().hidden_width;
  const int s = static_cast<int>(env.state_size());
  const int n = env.num_tasks();
  actor_ = nn::Mlp::init(hidden_dims(s, width, n + map_.raw_size()), init_rng);
  critic_ = nn::Mlp::init(hidden_dims(s + n + map_.feature_size(), width, 1), init_rng);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = nn::AdamState::for_net(actor_);
  critic_opt_ = nn::AdamState::for_net(critic_);
}

namespace {

// Softmax of each column's first n rows.
Matrix softmax_head(const Matrix& out, int n) {
  Matrix p = out.topRows(n);
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    p.col(c).array() -= p.col(c).maxCoeff();
    p.col(c) = p.col(c).array().exp().matrix();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

}  // namespace

DdpgAgent::ActorOutput DdpgAgent::act(const std::vector<double>& state) const {
  const int n = env_->num_tasks();
  Matrix in = Eigen::Map<const Eigen::VectorXd>(state.data(), static_cast<Eigen::Index>(state.size()));
  const Matrix out = nn::forward(actor_, in);
  const Matrix p = softmax_head(out, n);
  ActorOutput a;
  a.probabilities.assign(p.data(), p.data() + n);
  a.raw_location = out.col(0).tail(map_.raw_size());
  return a;
}

std::vector<double> DdpgAgent::action_vector(const std::vector<double>& probabilities, const Vec3& location) const {
  std::vector<double> v = probabilities;
  const Eigen::VectorXd f = map_.features(location);
  v.insert(v.end(), f.data(), f.data() + f.size());
  return v;
}

LearningAgent::Choice DdpgAgent::choose(const EnvState& view, const std::vector<double>& features, Rng& rng) {
  const ActionSet set = env_->available_actions(view, uav_);
  const ActorOutput a = act(features);
  int task = set.tasks.front();
  if (training_) {
    double total = 0.0;
    for (int j : set.tasks) total += a.probabilities[j];
    double u = uniform01(rng) * total;
    task = set.tasks.back();
    for (int j : set.tasks) {
      if (u < a.probabilities[j]) {
        task = j;
        break;
      }
      u -= a.probabilities[j];
    }
  } else {
    for (int j : set.tasks)
      if (a.probabilities[j] > a.probabilities[task]) task = j;
  }
  const Vec3 loc = map_.location(a.raw_location, task);
  return {Action{task, loc}, action_vector(a.probabilities, loc)};
}

double DdpgAgent::train_critic(const ExperienceBatch& batch, double lr) {
  check_batch(batch);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const auto s = static_cast<Eigen::Index>(env_->state_size());
  const int n = env_->num_tasks();
  const int l = map_.feature_size();
  Matrix next(s, b);
  for (Eigen::Index i = 0; i < b; ++i) next.col(i) = Eigen::Map<const Eigen::VectorXd>(batch[i]->next_state.data(), s);
  const Matrix tout = nn::forward(actor_target_, next);
  const Matrix tp = softmax_head(tout, n);
  Matrix tcin(s + n + l, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const int j = static_cast<int>(first_argmax(tp.col(i).transpose()));
    tcin.col(i).head(s) = next.col(i);
    tcin.col(i).segment(s, n) = tp.col(i);
    tcin.col(i).tail(l) = map_.features(map_.location(tout.col(i).tail(map_.raw_size()), j));
  }
  const Matrix tq = nn::forward(critic_target_, tcin);

  Matrix cin(s + n + l, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    cin.col(i).head(s) = Eigen::Map<const Eigen::VectorXd>(batch[i]->state.data(), s);
    cin.col(i).tail(n + l) = Eigen::Map<const Eigen::VectorXd>(batch[i]->action_features.data(), n + l);
  }
  nn::ForwardCache cache;
  const Matrix q = nn::forward(critic_, cin, &cache);
  Matrix grad(1, b);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const double target = batch[i]->reward + (batch[i]->terminal ? 0.0 : value_scale_ * tq(0, i));
    const double diff = value_scale_ * q(0, i) - target;
    loss += diff * diff;
    grad(0, i) = 2.0 * diff * value_scale_ / static_cast<double>(b);
  }
  nn::adam_step(critic_, critic_opt_, nn::backward(critic_, cache, grad).params, lr);
  nn::soft_update(critic_target_, critic_, env_->config().soft_update);
  return loss / static_cast<double>(b);
}

DdpgAgent::ActorEval DdpgAgent::actor_objective(const ExperienceBatch& batch) const {
  check_batch(batch);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const auto s = static_cast<Eigen::Index>(env_->state_size());
  const int n = env_->num_tasks();
  const int l = map_.feature_size();
  const int lr = map_.raw_size();
  Matrix in(s, b);
  for (Eigen::Index i = 0; i < b; ++i) in.col(i) = Eigen::Map<const Eigen::VectorXd>(batch[i]->state.data(), s);
  nn::ForwardCache acache;
  const Matrix out = nn::forward(actor_, in, &acache);
  const Matrix p = softmax_head(out, n);
  std::vector<int> task(b);
  Matrix cin(s + n + l, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    task[i] = static_cast<int>(first_argmax(p.col(i).transpose()));
    cin.col(i).head(s) = in.col(i);
    cin.col(i).segment(s, n) = p.col(i);
    cin.col(i).tail(l) = map_.features(map_.location(out.col(i).tail(lr), task[i]));
  }
  nn::ForwardCache ccache;
  const Matrix q = nn::forward(critic_, cin, &ccache);
  ActorEval e;
  e.objective = value_scale_ * q.mean();
  const Matrix gq = Matrix::Constant(1, b, value_scale_ / static_cast<double>(b));
  const Matrix dq = nn::backward(critic_, ccache, gq, false).input_grad;
  Matrix dout(n + lr, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Eigen::VectorXd g = dq.col(i).segment(s, n);
    const Eigen::VectorXd pi = p.col(i);
    dout.col(i).head(n) = (pi.array() * (g.array() - pi.dot(g))).matrix();
    dout.col(i).tail(lr) = map_.jacobian(out.col(i).tail(lr), task[i]).transpose() * dq.col(i).tail(l);
  }
  e.grads = nn::backward(actor_, acache, dout).params;
  return e;
}

double DdpgAgent::train_actor(const ExperienceBatch& batch, double lr) {
  ActorEval e = actor_objective(batch);
  nn::adam_step(actor_, actor_opt_, negated(std::move(e.grads)), lr);
  nn::soft_update(actor_target_, actor_, env_->config().soft_update);
  return e.objective;
}

void DdpgAgent::save(std::ostream& out) const {
  write_header(out, "ddpg", *env_);
  for (const nn::Mlp* net : {&actor_, &critic_, &actor_target_, &critic_target_}) nn::write_checkpoint(out, *net);
}

void DdpgAgent::load(std::istream& in) {
  read_header(in, "ddpg", *env_);
  for (nn::Mlp* net : {&actor_, &critic_, &actor_target_, &critic_target_}) load_into(*net, in);
}

}  // namespace uavsim
