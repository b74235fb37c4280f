#pragma once

#include <cstdint>
#include <vector>

#include "qpg/env.hpp"
#include "qpg/infometrics.hpp"
#include "qpg/parallel.hpp"
#include "qpg/policy.hpp"

#include "json.hpp"

namespace qpg::theorem {

// One-shot game instance with the policy held as explicit probabilities
// plus per-action score vectors, so both the analytic softmax-linear
// parameterization and the PQC policy run through the same checks.
struct ExactOneShot {
  std::vector<double> probs;
  std::vector<std::vector<double>> scores;  // S(a) = d log pi(a) / d theta
  env::OneShotGame game;

  static ExactOneShot softmax_linear(const std::vector<double>& theta,
                                     const env::OneShotGame& game);
  static ExactOneShot from_pqc(const policy::SoftmaxPqcPolicy& pol,
                               const std::vector<double>& state, const env::OneShotGame& game);
};

// Covariance-vs-MI bounds on one game: sqrt(2) G R sqrt(I(A;R)) without
// binning and sqrt(2) G R sqrt(I(A;R~)) + G delta with binning.
struct OneShotReport {
  double grad_norm = 0.0;
  double g_max = 0.0;
  double mi_exact = 0.0;
  double mi_binned = 0.0;
  double delta = 0.0;
  double bound_exact = 0.0;
  double bound_binned = 0.0;
  double slack_exact = 0.0;  // bound - grad_norm
  double slack_binned = 0.0;
  bool violated = false;
  double score_mean_error = 0.0;  // ||E[S]|| under the policy
};

OneShotReport exact_one_shot_check(const ExactOneShot& instance, int bin_count);

// Finite-horizon MDP audit on the time-expanded state space (s, t), where
// the discounted occupancy d(t, s) makes the gradient lemma exact. The
// objective gradient is computed twice: through the occupancy lemma with
// backward-recursion Q values, and by direct differentiation of eta' over
// all enumerated trajectories.
struct MdpBoundForm {
  double mi = 0.0;      // I(A; Y~ | S, t), occupancy weighted
  double y_max = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool violated = false;
};

struct MdpReport {
  double grad_norm = 0.0;
  double g_max = 0.0;
  double lemma_vs_direct_error = 0.0;  // max |component difference|
  double d_pi_sum_error = 0.0;
  MdpBoundForm q_form;  // Y = Q^pi(s, a)
  MdpBoundForm g_form;  // Y = return sampled from step t (relative discounting)
  bool violated = false;
};

MdpReport exact_mdp_check(const env::TabularMdp& mdp, const std::vector<double>& policy_table,
                          int bin_count);

// E[grad log pi(a_t|s_t) * sum_{j<t} gamma^j R_j] = 0 and
// E_A[S(s, A) B(s)] = 0 for arbitrary state baselines, by enumeration.
struct BaselineReport {
  double max_past_reward_error = 0.0;
  double max_state_baseline_error = 0.0;
};

BaselineReport baseline_identity_check(const env::TabularMdp& mdp,
                                       const std::vector<double>& policy_table);

// Random joint over (S, Z, Y~, A) with A sampled from a (Y~, S)-indexed
// table, enforcing I(A; Z | Y~, S) = 0 exactly.
struct ExprConstruction {
  int n_s = 2;
  int n_z = 3;
  int n_y = 3;
  int n_a = 2;
  bool saturating = false;  // A a function of Y~ and Z determining Y~
};

struct ExprReport {
  double i_az_given_s = 0.0;
  double i_ay_given_s = 0.0;
  double jsd = 0.0;       // weighted JSD, must equal i_az_given_s
  double jsd_identity_error = 0.0;
  double d2 = 0.0;
  double dtv = 0.0;
  bool violated = false;
};

ExprReport expressivity_theorem_check(const ExprConstruction& cons, Rng& rng);

// Sandwich I(A;Y~) - I(A;S) <= I(A;Y~|S) <= I(A;Y~) + H(S|Y~) on a random
// strictly positive joint over (A, S, Y~).
struct GapReport {
  double i_ay = 0.0;
  double i_as = 0.0;
  double i_ay_given_s = 0.0;
  double h_s_given_y = 0.0;
  double slack_lower = 0.0;
  double slack_upper = 0.0;
  bool violated = false;
};

GapReport proxy_gap_check(int n_a, int n_s, int n_y, Rng& rng);

// ---- Randomized audits (embarrassingly parallel, per-instance streams) ----

struct InstanceRow {
  std::uint64_t seed = 0;  // derived stream seed, reproduces the instance
  double slack = 0.0;      // tightest inequality margin, negative = violated
  double error = 0.0;      // identity/agreement error where applicable
  bool violated = false;
};

struct AuditSummary {
  int instances = 0;
  int violations = 0;
  double min_slack = 0.0;
  double max_error = 0.0;  // largest identity/agreement error seen
  std::vector<InstanceRow> rows;
};

AuditSummary one_shot_audit(int n_instances, std::uint64_t seed, Exec exec = Exec::parallel);
AuditSummary one_shot_pqc_audit(int n_instances, std::uint64_t seed, Exec exec = Exec::parallel);
AuditSummary mdp_audit(int n_instances, std::uint64_t seed, Exec exec = Exec::parallel);
AuditSummary baseline_audit(int n_instances, std::uint64_t seed, Exec exec = Exec::parallel);
AuditSummary expressivity_audit(int n_instances, std::uint64_t seed, Exec exec = Exec::parallel);
AuditSummary proxy_gap_audit(int n_instances, std::uint64_t seed, Exec exec = Exec::parallel);
AuditSummary pinsker_audit(int n_pairs, std::uint64_t seed, Exec exec = Exec::parallel);

// Full suite sized from a base instance count; zero total violations is
// the pass condition.
nlohmann::json suite_report(int base_instances, std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace qpg::theorem
