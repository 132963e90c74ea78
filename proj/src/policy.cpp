#include "uavsim/policy.hpp"

#include <stdexcept>

namespace uavsim {

const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kCa2c: return "ca2c";
    case AgentKind::kDqn: return "dqn";
    case AgentKind::kDdpg: return "ddpg";
    case AgentKind::kGreedy: return "greedy";
    case AgentKind::kShortestRoute: return "shortest-route";
    case AgentKind::kRandom: return "random";
  }
  return "?";
}

AgentKind parse_agent_kind(const std::string& name) {
  for (AgentKind k : {AgentKind::kCa2c, AgentKind::kDqn, AgentKind::kDdpg, AgentKind::kGreedy,
                      AgentKind::kShortestRoute, AgentKind::kRandom})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown agent kind: " + name);
}

}  // namespace uavsim
