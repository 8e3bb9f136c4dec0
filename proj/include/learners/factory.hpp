#pragma once
// Learner kinds and construction.

#include <memory>
#include <string>

#include "learners/a2c.hpp"
#include "learners/dqn.hpp"
#include "learners/learner.hpp"
#include "learners/tabular.hpp"

namespace learners {

enum class LearnerKind { tabq, dqn, a2c, dedqn, dea2c, mmfq };

LearnerKind learner_kind_from(const std::string& name);  // throws on unknown
std::string to_string(LearnerKind kind);

// density_head: -1 follows the learner kind, 0 forces it off, 1 forces it on.
// Forcing it off for an entropy/density learner is rejected.
std::unique_ptr<Learner> make_learner(LearnerKind kind, int zones,
                                      int num_agents, const HyperParams& hp,
                                      int density_head, uint64_t seed,
                                      long long budget);

}  // namespace learners
