#include "uavsim/replay.hpp"

#include <numeric>
#include <stdexcept>

namespace uavsim {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
}

void ReplayBuffer::push(Experience e) {
  if (e.reward < 0.0) throw std::invalid_argument("ReplayBuffer: negative reward");
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(e));
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("ReplayBuffer: sample from empty buffer");
  std::vector<const Experience*> out;
  out.reserve(batch);
  if (items_.size() < batch) {
    for (std::size_t b = 0; b < batch; ++b) out.push_back(&items_[uniform_index(rng, items_.size())]);
    return out;
  }
  // Partial Fisher-Yates.
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t k = b + uniform_index(rng, idx.size() - b);
    std::swap(idx[b], idx[k]);
    out.push_back(&items_[idx[b]]);
  }
  return out;
}

}  // namespace uavsim
