// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Budgets are enforced as part of each criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "qpg/cli.hpp"
#include "qpg/infometrics.hpp"
#include "qpg/theorem_lab.hpp"
#include "qpg/trainer.hpp"

namespace fs = std::filesystem;
using namespace qpg;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool pass, double seconds, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", criterion, what,
              seconds, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

template <typename F>
void run_criterion(int criterion, const char* what, double budget_seconds, F&& body) {
  const auto t0 = Clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (seconds > budget_seconds) {
    pass = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over the runtime budget");
  }
  report(criterion, what, pass, seconds, detail);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-4, std::abs(a), std::abs(b)}); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

train::TrainConfig default_config(std::uint64_t seed) {
  train::TrainConfig cfg;  // the shipped default: 5 layers, batch 10
  cfg.seed = seed;
  cfg.reward_target = 150.0;  // bounds the run once the criterion is met
  return cfg;
}

struct TrainOutcome {
  train::TrainResult result;
  std::uint64_t seed;
};

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  run_criterion(1, "plug-in MI matches brute force on 100 random tables", 1.0, [](std::string& d) {
    Rng rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int rows = 2 + rng.next_int(7);
      const int cols = 2 + rng.next_int(7);
      info::JointHistogram hist(rows, cols);
      std::vector<std::vector<long long>> counts(rows, std::vector<long long>(cols, 0));
      for (int a = 0; a < rows; ++a)
        for (int k = 1; k <= cols; ++k) {
          const int c = rng.next_int(50);
          hist.add(a, k, c);
          counts[a][k - 1] = c;
        }
      if (hist.total() == 0) {
        hist.add(0, 1, 1);
        counts[0][0] = 1;
      }
      worst = std::max(worst, std::abs(info::mutual_information(hist) -
                                       oracle::mi_bruteforce(counts)));
    }
    d = "max |diff| = " + std::to_string(worst);
    return worst < 1e-12;
  });

  run_criterion(2, "shift-rule and log-policy gradients match finite differences", 30.0,
                [](std::string& d) {
    Rng rng(202);
    const double h = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      auto pol = policy::SoftmaxPqcPolicy::parity_head(4, 2, rng, 1.0, rng.uniform(0.6, 1.4));
      auto theta = pol.flat_params();
      for (auto& v : theta) v = rng.uniform(-1.5, 1.5);
      pol.set_flat_params(theta);
      std::vector<double> state(4);
      for (auto& v : state) {
        v = rng.uniform(0.25, 1.2);
        if (rng.next_int(2)) v = -v;
      }

      // d<O>/d(theta) for the parity observable
      const auto input = policy::encode_input(state);
      const auto grad_obs =
          quantum::param_shift_gradient(pol.spec, pol.params, input, pol.action_obs[0]);
      for (int k = 0; k < pol.n_circuit_params(); ++k) {
        const double fd = oracle::central_diff(
            [&](double x) {
              auto p = pol.params;
              if (k < pol.spec.phi_count()) p.phi[k] = x;
              else p.lam[k - pol.spec.phi_count()] = x;
              return quantum::expectation(quantum::run_pqc(pol.spec, p, input),
                                          pol.action_obs[0]);
            },
            k < pol.spec.phi_count() ? pol.params.phi[k]
                                     : pol.params.lam[k - pol.spec.phi_count()],
            h);
        worst = std::max(worst, rel_err(grad_obs[k], fd));
      }

      // d log pi(a | s)/d(theta) across the full parameter vector
      const int action = rng.next_int(2);
      const auto grad_log = policy::log_policy_gradient(pol, state, action);
      for (int k = 0; k < pol.n_params(); ++k) {
        const double fd = oracle::central_diff(
            [&](double x) {
              auto p = pol;
              auto th = theta;
              th[k] = x;
              p.set_flat_params(th);
              return std::log(policy::action_probs(p, state).probs[action]);
            },
            theta[k], h);
        worst = std::max(worst, rel_err(grad_log[k], fd));
      }
    }
    d = "max rel err = " + std::to_string(worst);
    return worst < 1e-5;
  });

  run_criterion(3, "theorem audits: 1000 one-shot games and 200 small MDPs", 120.0,
                [](std::string& d) {
    const auto one_shot = theorem::one_shot_audit(1000, 303);
    const auto mdp = theorem::mdp_audit(200, 304);
    d = "one-shot violations " + std::to_string(one_shot.violations) + ", mdp violations " +
        std::to_string(mdp.violations) + ", max gradient-route error " +
        std::to_string(mdp.max_error);
    return one_shot.violations == 0 && mdp.violations == 0 && mdp.max_error <= 1e-9 &&
           one_shot.instances == 1000 && mdp.instances == 200;
  });

  run_criterion(4, "expressivity theorem chains and the JSD identity", 30.0, [](std::string& d) {
    const auto expr = theorem::expressivity_audit(500, 404);
    bool identity_ok = true;
    Rng rng(405);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + rng.next_int(6);
      const int dim = 2 + rng.next_int(3);
      info::DistributionWindow w(n);
      std::vector<std::vector<double>> joint(n, std::vector<double>(dim));
      for (int i = 0; i < n; ++i) {
        std::vector<double> p(dim);
        double sum = 0.0;
        for (auto& v : p) {
          v = 0.05 + rng.next_double();
          sum += v;
        }
        for (auto& v : p) v /= sum;
        for (int a = 0; a < dim; ++a) joint[i][a] = p[a] / n;
        w.push(p);
      }
      const double gap = std::abs(info::jsd_expressivity(w) - info::mi_joint(joint));
      worst = std::max(worst, gap);
      identity_ok = identity_ok && gap < 1e-12;
    }
    d = "construction violations " + std::to_string(expr.violations) + ", max identity gap " +
        std::to_string(worst);
    return expr.violations == 0 && expr.instances == 500 && identity_ok;
  });

  run_criterion(5, "proxy sandwich on 1000 random joints", 10.0, [](std::string& d) {
    const auto gap = theorem::proxy_gap_audit(1000, 505);
    d = "violations " + std::to_string(gap.violations) + ", min slack " +
        std::to_string(gap.min_slack);
    return gap.violations == 0 && gap.instances == 1000;
  });

  run_criterion(6, "pinsker inequality on 10000 random pairs", 30.0, [](std::string& d) {
    const auto pinsker = theorem::pinsker_audit(10000, 606);
    d = "violations " + std::to_string(pinsker.violations);
    return pinsker.violations == 0 && pinsker.instances == 10000;
  });

  // Criteria 7-9 share the training runs.
  std::vector<TrainOutcome> default_runs;
  std::vector<TrainOutcome> shallow_runs;
  const std::vector<std::uint64_t> seeds = {1, 2, 3};

  run_criterion(7, "default run reaches MA 150; shallow collapses or stalls", 1800.0,
                [&](std::string& d) {
    env::CartPoleEnv env;
    bool default_ok = false;
    for (const auto seed : seeds) {
      auto cfg = default_config(seed);
      info::MetricEngine metrics(cfg.bin_count, cfg.expressivity_window);
      TrainOutcome outcome{train::train(cfg, env, metrics), seed};
      if (outcome.result.reached_target && outcome.result.batches_run <= 500) default_ok = true;
      default_runs.push_back(std::move(outcome));
    }
    bool shallow_ok = true;
    for (const auto seed : seeds) {
      auto cfg = default_config(seed);
      cfg.n_layers = 1;
      info::MetricEngine metrics(cfg.bin_count, cfg.expressivity_window);
      TrainOutcome outcome{train::train(cfg, env, metrics), seed};
      double peak_ma = 0.0;
      for (const auto& s : outcome.result.series.samples)
        peak_ma = std::max(peak_ma, s.moving_avg_reward);
      if (!(outcome.result.early_stopped || peak_ma < 50.0)) shallow_ok = false;
      shallow_runs.push_back(std::move(outcome));
    }
    std::ostringstream ss;
    ss << "default batches:";
    for (const auto& run : default_runs)
      ss << ' ' << run.result.batches_run << (run.result.reached_target ? "(hit)" : "");
    ss << "; shallow stopped:";
    for (const auto& run : shallow_runs) ss << ' ' << (run.result.early_stopped ? "yes" : "no");
    d = ss.str();
    return default_ok && shallow_ok;
  });

  run_criterion(8, "completed runs track entropy and MI decay", 5.0, [&](std::string& d) {
    int completed = 0;
    std::ostringstream ss;
    for (const auto& run : default_runs) {
      if (run.result.early_stopped) continue;
      ++completed;
      const auto& samples = run.result.series.samples;
      std::vector<double> mi, ent;
      for (const auto& s : samples) {
        mi.push_back(s.mi_tet_proxy);
        ent.push_back(s.entropy);
      }
      const double corr = info::pearson_correlation(mi, ent);
      const double h0 = samples.front().entropy;
      const int tenth = std::max(1, (int)samples.size() / 10);
      double first = 0.0, last = 0.0;
      for (int i = 0; i < tenth; ++i) {
        first += mi[i] / tenth;
        last += mi[mi.size() - tenth + i] / tenth;
      }
      ss << "seed " << run.seed << ": corr " << corr << ", H0 " << h0 << ", MI " << first
         << " -> " << last << "; ";
      if (!(corr > 0.3)) return false;
      if (!(h0 >= 0.5 && h0 <= std::log(2.0) + 1e-6)) return false;
      if (!(last < first)) return false;
    }
    d = ss.str();
    return completed > 0;
  });

  run_criterion(9, "sup-ratio scaling constants bound every retained batch", 5.0,
                [&](std::string& d) {
    int checked = 0;
    for (const auto& run : default_runs) {
      const auto& series = run.result.series;
      const auto constants = info::estimate_scaling_constants(series);
      for (const auto& s : series.samples) {
        if (s.mi_tet_proxy <= 0.0) continue;
        ++checked;
        if (s.grad_norm > constants.c * std::sqrt(s.mi_tet_proxy) * (1.0 + 1e-9)) return false;
        if (s.expressivity_proxy > constants.k * s.mi_tet_proxy * (1.0 + 1e-9)) return false;
      }
    }
    d = std::to_string(checked) + " retained batches checked";
    return checked > 0;
  });

  run_criterion(10, "bin refinement keeps MI nondecreasing on a fixed pool", 30.0,
                [](std::string& d) {
    train::TrainConfig cfg = default_config(11);
    env::CartPoleEnv env;
    Rng init_rng(mix64(cfg.seed, 0x1a17));
    const auto pol = policy::SoftmaxPqcPolicy::parity_head(4, cfg.n_layers, init_rng, cfg.w_init,
                                                           cfg.beta_start);
    const auto episodes = train::generate_episodes(pol, env, cfg.batch_size, cfg.seed, 0);
    std::vector<double> returns;
    std::vector<int> actions;
    for (const auto& ep : episodes) {
      const auto g = train::compute_returns(ep.traj, cfg.gamma);
      for (std::size_t t = 0; t < g.size(); ++t) {
        returns.push_back(g[t]);
        actions.push_back(ep.traj.steps[t].action);
      }
    }
    const auto signal = train::normalize_returns(returns);
    const double mi1 = info::binned_mutual_information(actions, 2, signal, 1);
    const double mi2 = info::binned_mutual_information(actions, 2, signal, 2);
    const double mi10 = info::binned_mutual_information(actions, 2, signal, 10);
    const double mi50 = info::binned_mutual_information(actions, 2, signal, 50);
    std::ostringstream ss;
    ss << "MI(1,2,10,50) = " << mi1 << ", " << mi2 << ", " << mi10 << ", " << mi50;
    d = ss.str();
    return mi1 == 0.0 && mi2 <= mi10 + 1e-12 && mi10 <= mi50 + 1e-12;
  });

  run_criterion(11, "identical command and seed give byte-identical outputs", 120.0,
                [](std::string& d) {
    const fs::path base = fs::temp_directory_path() / "qpg_acceptance_det";
    fs::remove_all(base);
    fs::create_directories(base);
    train::TrainConfig cfg;
    cfg.n_layers = 2;
    cfg.batch_size = 3;
    cfg.max_batches = 5;
    cfg.early_stop_enabled = false;
    cfg.seed = 17;
    const std::string cfg_path = (base / "config.json").string();
    train::save_train_config(cfg, cfg_path);

    std::ostringstream sink;
    bool ok = true;
    ok &= cli::run({"train", "--config", cfg_path, "--out", (base / "a").string()}, sink, sink) == 0;
    ok &= cli::run({"train", "--config", cfg_path, "--out", (base / "b").string()}, sink, sink) == 0;
    ok &= slurp((base / "a/run.csv").string()) == slurp((base / "b/run.csv").string());
    ok &= slurp((base / "a/summary.json").string()) == slurp((base / "b/summary.json").string());
    ok &= slurp((base / "a/checkpoint.txt").string()) == slurp((base / "b/checkpoint.txt").string());

    ok &= cli::run({"theorems", "--instances", "50", "--seed", "4",
                    "--out", (base / "t1.json").string()}, sink, sink) == 0;
    ok &= cli::run({"theorems", "--instances", "50", "--seed", "4",
                    "--out", (base / "t2.json").string()}, sink, sink) == 0;
    ok &= slurp((base / "t1.json").string()) == slurp((base / "t2.json").string());

    ok &= cli::run({"bin-sweep", "--config", cfg_path, "--out", (base / "s1").string()}, sink,
                   sink) == 0;
    ok &= cli::run({"bin-sweep", "--config", cfg_path, "--out", (base / "s2").string()}, sink,
                   sink) == 0;
    ok &= slurp((base / "s1/sweep.csv").string()) == slurp((base / "s2/sweep.csv").string());
    ok &= slurp((base / "s1/sweep.json").string()) == slurp((base / "s2/sweep.json").string());

    fs::remove_all(base);
    d = "train, theorems and bin-sweep outputs compared byte for byte";
    return ok;
  });

  std::printf("%d of 11 criteria passed\n", 11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
