#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "acsplit/stepper.hpp"

namespace acsplit {

/// Runs fn(k) for k in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers finish.
template <class F>
void parallel_for(int count, int threads, F&& fn) {
  const int workers = std::clamp(threads, 1, std::max(1, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(m);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

struct CircleRun {
  PotentialSpec potential = PotentialSpec::quadratic_wr(100.0);
  int n = 128;
  double eps = 0.1;
  TimeStep tau = TimeStep(100.0);
  int steps = 0;  ///< 0: choose from the reference effective step
  double r0 = 0.4;
  NewtonOptions newton{};
  AdmmOptions admm{};

  StepperConfig config() const;
};

/// Effective-step coefficient reported for each family: 0.29 for the smooth
/// quadratic kinds, 0.25 standard, 0.5 barrier.
double reference_c_eff(const PotentialSpec& spec);

/// Steps for the radius to shrink from r0 to r0/2 at the reference rate.
int default_circle_steps(const PotentialSpec& spec, double eps, double r0);

RunResult run_circle(const CircleRun& spec, const RunHooks& hooks = {});

struct SweepPoint {
  TimeStep tau;
  int iterations;
  bool reached;
};

/// For each tau, steps from u0 until mm_energy <= level or `cap` steps.
std::vector<SweepPoint> sweep_tau(const StepperConfig& base, const ScalarField& u0,
                                  const std::vector<TimeStep>& taus, double level, int cap,
                                  int threads);

}  // namespace acsplit
