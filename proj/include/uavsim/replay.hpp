#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "uavsim/env.hpp"
#include "uavsim/random.hpp"

namespace uavsim {

// Decision-boundary transition: features at a decision cycle, the committed
// action, features at the next decision boundary and the reward accumulated
// in between.
struct Experience {
  std::vector<double> state;
  Action action;
  std::vector<double> action_features;  // full continuous action vector; DDPG only
  std::vector<double> next_state;
  double reward = 0.0;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const Experience& operator[](std::size_t i) const { return items_[i]; }

  // Uniform batch: without replacement when size() >= batch, with replacement otherwise.
  std::vector<const Experience*> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Experience> items_;
};

}  // namespace uavsim
