#include "uavsim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uavsim {

Action greedy_policy(const Environment& env, const EnvState& state, int uav) {
  const ActionSet set = env.available_actions(state, uav);
  if (set.singleton) return set.commitment;
  int best = set.tasks.front();
  for (int j : set.tasks)
    if (state.aoi_cycles[j] > state.aoi_cycles[best]) best = j;

  const double h = env.config().uav_altitude;
  const double r_s = env.sensing_radius(h);
  const Vec3& t = env.target(best);
  const Vec3& p = state.uavs[uav].position;
  const double rho = horizontal_distance(p, t);
  if (rho <= r_s) return Action{best, Vec3{p.x, p.y, h}};
  const double s = r_s / rho;
  return Action{best, Vec3{t.x + (p.x - t.x) * s, t.y + (p.y - t.y) * s, h}};
}

Action GreedyAgent::decide(const EnvState& view, Rng&) { return greedy_policy(*env_, view, uav_); }

Action RandomAgent::decide(const EnvState& view, Rng& rng) {
  const ActionSet set = env_->available_actions(view, uav_);
  if (set.singleton) return set.commitment;
  const int j = set.tasks[uniform_index(rng, set.tasks.size())];
  const double h = env_->config().uav_altitude;
  const double r = env_->sensing_radius(h) * std::sqrt(uniform01(rng));
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  const Vec3& t = env_->target(j);
  return Action{j, Vec3{t.x + r * std::cos(theta), t.y + r * std::sin(theta), h}};
}

double tour_length(const std::vector<int>& order, const std::vector<Vec3>& points) {
  double len = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k)
    len += distance(points[order[k]], points[order[(k + 1) % order.size()]]);
  return len;
}

TourOrder held_karp_order(const std::vector<Vec3>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 2 || n > 20) throw std::invalid_argument("held_karp_order: need 2 <= N <= 20 points");
  const int m = n - 1;  // nodes 1..n-1 in the mask
  const std::size_t full = (std::size_t{1} << m) - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((full + 1) * m, inf);
  std::vector<int> parent((full + 1) * m, -1);
  auto at = [m](std::size_t mask, int j) { return mask * m + j; };

  for (int j = 0; j < m; ++j) cost[at(std::size_t{1} << j, j)] = distance(points[0], points[j + 1]);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      const double c = cost[at(mask, j)];
      if (c == inf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask >> k & 1) continue;
        const std::size_t nm = mask | (std::size_t{1} << k);
        const double nc = c + distance(points[j + 1], points[k + 1]);
        if (nc < cost[at(nm, k)]) {
          cost[at(nm, k)] = nc;
          parent[at(nm, k)] = j;
        }
      }
    }
  }
  int last = 0;
  double best = inf;
  for (int j = 0; j < m; ++j) {
    const double c = cost[at(full, j)] + distance(points[j + 1], points[0]);
    if (c < best) {
      best = c;
      last = j;
    }
  }
  TourOrder out;
  out.order.resize(n);
  std::size_t mask = full;
  for (int pos = n - 1; pos >= 1; --pos) {
    out.order[pos] = last + 1;
    const int prev = parent[at(mask, last)];
    mask &= ~(std::size_t{1} << last);
    last = prev;
  }
  out.order[0] = 0;
  // A tour and its reversal tie; keep the lexicographically smaller one.
  if (n > 2 && out.order[n - 1] < out.order[1]) std::reverse(out.order.begin() + 1, out.order.end());
  out.length = tour_length(out.order, points);
  return out;
}

namespace {

Vec3 project_to_disk(const Vec3& p, const Vec3& center, double r_s, double altitude) {
  const double dx = p.x - center.x, dy = p.y - center.y;
  const double rho = std::hypot(dx, dy);
  if (rho <= r_s) return Vec3{p.x, p.y, altitude};
  const double s = r_s / rho;
  return Vec3{center.x + dx * s, center.y + dy * s, altitude};
}

}  // namespace

RoutePlan refine_locations(const std::vector<int>& order, const std::vector<Vec3>& targets, double r_s,
                           double altitude, const RefineOptions& options, const std::vector<Vec3>* initial) {
  const std::size_t n = order.size();
  RoutePlan plan;
  plan.order = order;
  plan.points.resize(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const Vec3 start = initial ? (*initial)[j] : targets[j];
    plan.points[j] = project_to_disk(start, targets[j], r_s, altitude);
  }
  plan.length = tour_length(order, plan.points);
  if (n < 2 || r_s <= 0.0) return plan;

  double step = r_s / 10.0;
  const double min_step = r_s * 1e-12;
  std::vector<Vec3> candidate(plan.points);
  for (int it = 0; it < options.iterations && step > min_step; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      const int j = order[k];
      const Vec3& p = plan.points[j];
      Vec3 g{0.0, 0.0, 0.0};
      for (int nb : {order[(k + n - 1) % n], order[(k + 1) % n]}) {
        const Vec3 d = p - plan.points[nb];
        const double len = d.horizontal_norm();
        if (len > 0.0) g = g + Vec3{d.x / len, d.y / len, 0.0};
      }
      candidate[j] = project_to_disk(p - g * step, targets[j], r_s, altitude);
    }
    const double len = tour_length(order, candidate);
    if (len < plan.length) {
      const double improvement = (plan.length - len) / plan.length;
      plan.points = candidate;
      plan.length = len;
      if (improvement < options.relative_tolerance) break;
    } else {
      step *= 0.5;
      candidate = plan.points;
    }
  }
  return plan;
}

RoutePlan plan_route(const Environment& env) {
  const int n = env.num_tasks();
  const double h = env.config().uav_altitude;
  const double r_s = env.sensing_radius(h);
  std::vector<Vec3> targets(n);
  for (int j = 0; j < n; ++j) targets[j] = env.target(j);
  if (n == 1) return refine_locations({0}, targets, r_s, h);

  const TourOrder first = held_karp_order(targets);
  const RoutePlan refined = refine_locations(first.order, targets, r_s, h);
  const TourOrder second = held_karp_order(refined.points);
  RoutePlan out = refine_locations(second.order, targets, r_s, h, {}, &refined.points);
  if (out.length > refined.length) return refined;
  return out;
}

ShortestRouteAgent::ShortestRouteAgent(const Environment& env, int uav, std::shared_ptr<const RoutePlan> plan,
                                       std::uint64_t seed)
    : env_(&env), uav_(uav), plan_(std::move(plan)), seed_(seed) {}

void ShortestRouteAgent::begin_episode(int episode, bool) {
  Rng rng = make_stream(seed_, Stream::kRoute, static_cast<std::uint64_t>(episode), static_cast<std::uint64_t>(uav_));
  position_ = static_cast<int>(uniform_index(rng, plan_->order.size()));
  started_ = false;
}

Action ShortestRouteAgent::decide(const EnvState& view, Rng&) {
  const ActionSet set = env_->available_actions(view, uav_);
  if (set.singleton) return set.commitment;
  const int n = static_cast<int>(plan_->order.size());
  if (position_ < 0) position_ = 0;
  int pos = started_ ? (position_ + 1) % n : position_;
  for (int tries = 0; tries < n; ++tries, pos = (pos + 1) % n) {
    const int task = plan_->order[pos];
    if (std::find(set.tasks.begin(), set.tasks.end(), task) != set.tasks.end()) break;
  }
  position_ = pos;
  started_ = true;
  const int task = plan_->order[pos];
  return Action{task, plan_->points[task]};
}

std::vector<std::unique_ptr<Agent>> make_baseline_agents(const Environment& env, AgentKind kind, std::uint64_t seed) {
  std::vector<std::unique_ptr<Agent>> agents;
  std::shared_ptr<const RoutePlan> plan;
  if (kind == AgentKind::kShortestRoute) plan = std::make_shared<const RoutePlan>(plan_route(env));
  for (int i = 0; i < env.num_uavs(); ++i) {
    switch (kind) {
      case AgentKind::kGreedy: agents.push_back(std::make_unique<GreedyAgent>(env, i)); break;
      case AgentKind::kRandom: agents.push_back(std::make_unique<RandomAgent>(env, i)); break;
      case AgentKind::kShortestRoute: agents.push_back(std::make_unique<ShortestRouteAgent>(env, i, plan, seed)); break;
      default: throw std::invalid_argument("make_baseline_agents: not a baseline kind");
    }
  }
  return agents;
}

}  // namespace uavsim
