#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "uavsim/env.hpp"
#include "uavsim/policy.hpp"

namespace uavsim {

// Highest-AoI admissible task (lowest index on ties), sensed from the point
// of its disk nearest to the UAV.
Action greedy_policy(const Environment& env, const EnvState& state, int uav);

class GreedyAgent : public Agent {
 public:
  GreedyAgent(const Environment& env, int uav) : env_(&env), uav_(uav) {}
  AgentKind kind() const override { return AgentKind::kGreedy; }
  Action decide(const EnvState& view, Rng& rng) override;

 private:
  const Environment* env_;
  int uav_;
};

// Uniform admissible task, sensing point uniform over the task's disk.
class RandomAgent : public Agent {
 public:
  RandomAgent(const Environment& env, int uav) : env_(&env), uav_(uav) {}
  AgentKind kind() const override { return AgentKind::kRandom; }
  Action decide(const EnvState& view, Rng& rng) override;

 private:
  const Environment* env_;
  int uav_;
};

struct TourOrder {
  std::vector<int> order;  // starts at point 0
  double length = 0.0;
};

double tour_length(const std::vector<int>& order, const std::vector<Vec3>& points);

// Exact shortest closed tour by bitmask dynamic programming, 2 <= N <= 20.
TourOrder held_karp_order(const std::vector<Vec3>& points);

struct RoutePlan {
  std::vector<int> order;     // visiting order of task indices
  std::vector<Vec3> points;   // sensing point per task index
  double length = 0.0;        // closed tour through the points in order
};

struct RefineOptions {
  int iterations = 10000;
  double relative_tolerance = 1e-8;
};

// Projected gradient descent on the closed-tour length, each point confined to
// the disk of radius r_s around its target at the given altitude. Starts from
// `initial` when given, else from the targets. Tour length never increases.
RoutePlan refine_locations(const std::vector<int>& order, const std::vector<Vec3>& targets, double r_s,
                           double altitude, const RefineOptions& options = {},
                           const std::vector<Vec3>* initial = nullptr);

// Order on targets, refine, reorder on the refined points, refine again.
RoutePlan plan_route(const Environment& env);

// Cycles through the planned route from a random per-episode start,
// skipping tasks held by other UAVs.
class ShortestRouteAgent : public Agent {
 public:
  ShortestRouteAgent(const Environment& env, int uav, std::shared_ptr<const RoutePlan> plan, std::uint64_t seed);
  AgentKind kind() const override { return AgentKind::kShortestRoute; }
  void begin_episode(int episode, bool training) override;
  Action decide(const EnvState& view, Rng& rng) override;

  const RoutePlan& plan() const { return *plan_; }
  int position() const { return position_; }

 private:
  const Environment* env_;
  int uav_;
  std::shared_ptr<const RoutePlan> plan_;
  std::uint64_t seed_;
  int position_ = -1;
  bool started_ = false;
};

std::vector<std::unique_ptr<Agent>> make_baseline_agents(const Environment& env, AgentKind kind, std::uint64_t seed);

}  // namespace uavsim
