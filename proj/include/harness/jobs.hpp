#pragma once
// Runs independent tasks, optionally in parallel across worker threads.
// Each task owns its outputs, so results are identical whatever the worker
// count; a serial path is kept as the reference implementation.

#include <functional>
#include <string>
#include <vector>

namespace harness {

struct Task {
  std::string name;
  std::function<void()> work;
};

// max_parallel <= 1 uses the serial reference path. The first task failure
// is rethrown (with the task name prepended) after all workers finish.
void run_tasks(std::vector<Task>& tasks, int max_parallel);

int default_task_parallelism();

}  // namespace harness
