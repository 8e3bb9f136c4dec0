#include "harness/jobs.hpp"

#include <exception>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace harness {

namespace {

// Every task runs even when an earlier one failed; the first failure is
// rethrown afterwards with the task name attached. Both execution paths
// share this contract so swapping them never changes observable behaviour.
void rethrow_first(const std::vector<Task>& tasks,
                   const std::vector<std::exception_ptr>& errors) {
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("task '" + tasks[i].name + "': " + e.what());
    }
  }
}

void run_serial(std::vector<Task>& tasks) {
  std::vector<std::exception_ptr> errors(tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    try {
      tasks[i].work();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(tasks, errors);
}

}  // namespace

void run_tasks(std::vector<Task>& tasks, int max_parallel) {
  if (tasks.empty()) return;
#ifdef _OPENMP
  if (max_parallel > 1) {
    const int n = static_cast<int>(tasks.size());
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_parallel)
    for (int i = 0; i < n; ++i) {
      try {
        tasks[i].work();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    rethrow_first(tasks, errors);
    return;
  }
#else
  (void)max_parallel;
#endif
  run_serial(tasks);
}

int default_task_parallelism() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace harness
