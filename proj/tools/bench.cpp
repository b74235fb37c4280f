// Serial vs OpenMP timing for the hot kernels: batch episode generation,
// the per-step score matrix behind the policy-gradient update, and the
// theorem audit loops.

#include <chrono>
#include <cstdio>

#include "qpg/parallel.hpp"
#include "qpg/theorem_lab.hpp"
#include "qpg/trainer.hpp"

using qpg::Exec;

namespace {

template <typename F>
double time_ms(F&& fn) {
  fn();  // warmup
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", qpg::hardware_threads());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  qpg::Rng rng(7);
  auto pol = qpg::policy::SoftmaxPqcPolicy::parity_head(4, 5, rng, 0.1);
  qpg::env::CartPoleEnv env;

  // batch rollout
  std::vector<qpg::train::EpisodeData> episodes;
  const double roll_serial =
      time_ms([&] { episodes = qpg::train::generate_episodes(pol, env, 64, 11, 0, Exec::serial); });
  const double roll_parallel =
      time_ms([&] { episodes = qpg::train::generate_episodes(pol, env, 64, 11, 0, Exec::parallel); });
  row("episode generation (64)", roll_serial, roll_parallel);

  // score matrix over the pooled steps
  std::vector<qpg::train::Trajectory> batch;
  std::vector<std::vector<double>> weights;
  for (auto& ep : episodes) {
    weights.push_back(std::vector<double>(ep.traj.steps.size(), 1.0));
    batch.push_back(ep.traj);
  }
  const double grad_serial =
      time_ms([&] { qpg::train::batch_gradient(pol, batch, weights, Exec::serial); });
  const double grad_parallel =
      time_ms([&] { qpg::train::batch_gradient(pol, batch, weights, Exec::parallel); });
  row("batch score gradient", grad_serial, grad_parallel);

  const double os_serial = time_ms([&] { qpg::theorem::one_shot_audit(20000, 3, Exec::serial); });
  const double os_parallel =
      time_ms([&] { qpg::theorem::one_shot_audit(20000, 3, Exec::parallel); });
  row("one-shot audit (20k)", os_serial, os_parallel);

  const double mdp_serial = time_ms([&] { qpg::theorem::mdp_audit(100, 5, Exec::serial); });
  const double mdp_parallel = time_ms([&] { qpg::theorem::mdp_audit(100, 5, Exec::parallel); });
  row("mdp audit (100)", mdp_serial, mdp_parallel);

  return 0;
}
