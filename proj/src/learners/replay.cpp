#include "learners/replay.hpp"

#include <stdexcept>

namespace learners {

ReplayMemory::ReplayMemory(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::runtime_error("replay: capacity must be >= 1");
  buf_.reserve(capacity);
}

void ReplayMemory::push(const matchenv::Experience& e) {
  if (size_ < capacity_) {
    buf_.push_back(e);
    size_ += 1;
  } else {
    buf_[next_] = e;
  }
  next_ = (next_ + 1) % capacity_;
}

const matchenv::Experience& ReplayMemory::sample(numkit::Rng& rng) const {
  if (size_ == 0) throw std::runtime_error("replay: sample from empty buffer");
  return buf_[rng.uniform_int(size_)];
}

}  // namespace learners
