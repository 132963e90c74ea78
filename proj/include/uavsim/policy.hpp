#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "uavsim/env.hpp"
#include "uavsim/random.hpp"
#include "uavsim/replay.hpp"

namespace uavsim {

enum class AgentKind { kCa2c, kDqn, kDdpg, kGreedy, kShortestRoute, kRandom };

const char* to_string(AgentKind kind);
AgentKind parse_agent_kind(const std::string& name);

// Per-UAV decision maker driven by the episode runner. `decide` is only
// called in the UAV's decision cycles, on a state view that already carries
// the commitments made earlier in the same cycle by lower-indexed UAVs.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  virtual bool learns() const { return false; }

  // Called before the first cycle. `training` enables exploration and
  // experience recording; `episode` seeds per-episode state such as route
  // offsets.
  virtual void begin_episode(int /*episode*/, bool /*training*/) {}

  virtual Action decide(const EnvState& view, Rng& rng) = 0;

  // Reward for the cycle just stepped and the resulting state. Returns the
  // experience stored at a decision boundary, if any.
  virtual std::optional<Experience> observe(double /*reward*/, const EnvState& /*new_state*/) { return std::nullopt; }

  // Called after the last cycle; finalizes a pending transition as terminal.
  virtual std::optional<Experience> end_episode(const EnvState& /*final_state*/) { return std::nullopt; }

  // End-of-episode training invocation.
  virtual void train(double /*lr*/, Rng& /*rng*/) {}

  virtual void save(std::ostream& /*out*/) const {}
};

}  // namespace uavsim
