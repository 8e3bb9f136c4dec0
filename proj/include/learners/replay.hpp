#pragma once
// Fixed-capacity experience buffer: FIFO overwrite, uniform sampling with
// replacement.

#include <vector>

#include "matchenv/world.hpp"
#include "numkit/rng.hpp"

namespace learners {

class ReplayMemory {
public:
  explicit ReplayMemory(int capacity);

  void push(const matchenv::Experience& e);
  int size() const { return size_; }
  int capacity() const { return capacity_; }
  const matchenv::Experience& sample(numkit::Rng& rng) const;
  const matchenv::Experience& at(int i) const { return buf_[i]; }

private:
  std::vector<matchenv::Experience> buf_;
  int capacity_ = 0;
  int next_ = 0;
  int size_ = 0;
};

}  // namespace learners
