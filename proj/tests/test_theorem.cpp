#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qpg/theorem_lab.hpp"

using namespace qpg;
using namespace qpg::theorem;

TEST_CASE("constant reward gives zero gradient and zero MI") {
  const auto game = env::OneShotGame::make({0.4, 0.4, 0.4}, 1.0);
  const auto inst = ExactOneShot::softmax_linear({0.3, -0.2, 0.9}, game);
  const auto rep = exact_one_shot_check(inst, 5);
  CHECK(rep.grad_norm < 1e-14);
  CHECK(std::abs(rep.mi_exact) < 1e-14);
  CHECK(std::abs(rep.mi_binned) < 1e-14);
  CHECK_FALSE(rep.violated);
  CHECK(rep.score_mean_error < 1e-14);
}

TEST_CASE("uniform policy over opposite rewards by enumeration") {
  const auto game = env::OneShotGame::make({1.0, -1.0}, 1.0);
  const auto inst = ExactOneShot::softmax_linear({0.0, 0.0}, game);
  const auto rep = exact_one_shot_check(inst, 4);

  // g = sum_a pi(a) S(a) R(a) with pi = (1/2, 1/2), S(0) = (1/2, -1/2)
  // => g = (1/2, -1/2), norm 1/sqrt(2)
  CHECK(rep.grad_norm == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // A determines R here, so I(A;R) = log 2
  CHECK(rep.mi_exact == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_FALSE(rep.violated);
  CHECK(rep.slack_exact >= 0.0);
  CHECK(rep.slack_binned >= 0.0);
}

TEST_CASE("one-shot audits find no violations") {
  const auto summary = one_shot_audit(1000, 12345);
  CHECK(summary.instances == 1000);
  CHECK(summary.violations == 0);
  CHECK(summary.min_slack >= 0.0);
  CHECK(summary.max_error < 1e-12);
}

TEST_CASE("pqc-policy one-shot audit at small scale") {
  const auto summary = one_shot_pqc_audit(25, 777);
  CHECK(summary.instances == 25);
  CHECK(summary.violations == 0);
  CHECK(summary.max_error < 1e-10);  // zero-mean score through param-shift
}

TEST_CASE("mdp check: two gradient routes agree and bounds hold") {
  Rng rng(5);
  const auto mdp = env::TabularMdp::random(rng, 2, 2, 3, 0.9);
  std::vector<double> pi(4);
  for (int s = 0; s < 2; ++s) {
    const auto probs = policy::softmax({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    pi[s * 2] = probs[0];
    pi[s * 2 + 1] = probs[1];
  }
  const auto rep = exact_mdp_check(mdp, pi, 4);
  CHECK(rep.lemma_vs_direct_error < 1e-9);
  CHECK(rep.d_pi_sum_error < 1e-12);
  CHECK_FALSE(rep.violated);
  CHECK(rep.q_form.slack >= 0.0);
  CHECK(rep.g_form.slack >= 0.0);
}

TEST_CASE("uniform policy on a symmetric-reward mdp has zero gradient") {
  // both actions behave identically, so the score covariance vanishes
  const std::vector<double> transition = {
      0.7, 0.3, 0.7, 0.3,  // s0: both actions
      0.2, 0.8, 0.2, 0.8,  // s1
  };
  const std::vector<double> rewards = {1.0, 1.0, -0.5, -0.5};
  const auto mdp = env::TabularMdp::make(2, 2, transition, rewards, 3, 0.9, {0.5, 0.5});
  const auto rep = exact_mdp_check(mdp, {0.5, 0.5, 0.5, 0.5}, 4);
  CHECK(rep.grad_norm < 1e-13);
  CHECK_FALSE(rep.violated);
}

TEST_CASE("mdp size limits are enforced") {
  Rng rng(7);
  const auto big = env::TabularMdp::random(rng, 9, 8, 3, 0.9);
  std::vector<double> pi(9 * 8, 1.0 / 8);
  CHECK_THROWS_AS(exact_mdp_check(big, pi, 4), std::invalid_argument);
  const auto deep = env::TabularMdp::random(rng, 2, 2, 11, 0.9);
  CHECK_THROWS_AS(exact_mdp_check(deep, std::vector<double>(4, 0.5), 4), std::invalid_argument);
}

TEST_CASE("mdp audit over random instances") {
  const auto summary = mdp_audit(50, 999);
  CHECK(summary.instances == 50);
  CHECK(summary.violations == 0);
  CHECK(summary.max_error < 1e-9);
}

TEST_CASE("baseline identities by enumeration") {
  Rng rng(9);
  const auto mdp = env::TabularMdp::random(rng, 2, 2, 2, 0.8);
  const auto rep = baseline_identity_check(mdp, {0.3, 0.7, 0.6, 0.4});
  CHECK(rep.max_past_reward_error < 1e-10);
  CHECK(rep.max_state_baseline_error < 1e-10);

  // deterministic policy has an identically zero score
  const auto det = baseline_identity_check(mdp, {1.0, 0.0, 0.0, 1.0});
  CHECK(det.max_past_reward_error < 1e-15);
  CHECK(det.max_state_baseline_error < 1e-15);

  const auto summary = baseline_audit(50, 4242);
  CHECK(summary.violations == 0);
}

TEST_CASE("expressivity construction basics") {
  Rng rng(11);
  ExprConstruction cons;
  const auto rep = expressivity_theorem_check(cons, rng);
  CHECK_FALSE(rep.violated);
  CHECK(rep.jsd_identity_error < 1e-12);
  CHECK(rep.i_az_given_s <= rep.i_ay_given_s + 1e-12);
  CHECK(rep.d2 <= 2.0 * rep.i_ay_given_s + 1e-12);
  CHECK(rep.dtv <= 0.5 * rep.i_ay_given_s + 1e-12);
}

TEST_CASE("saturating construction reaches equality") {
  Rng rng(13);
  ExprConstruction cons;
  cons.saturating = true;
  cons.n_a = 3;
  cons.n_y = 3;
  cons.n_z = 3;
  const auto rep = expressivity_theorem_check(cons, rng);
  CHECK_FALSE(rep.violated);
  CHECK(std::abs(rep.i_az_given_s - rep.i_ay_given_s) < 1e-12);
  CHECK(rep.i_az_given_s > 0.1);  // a non-trivial equality case
}

TEST_CASE("expressivity audit") {
  const auto summary = expressivity_audit(200, 31337);
  CHECK(summary.instances == 200);
  CHECK(summary.violations == 0);
  CHECK(summary.max_error < 1e-12);
}

TEST_CASE("proxy gap sandwich") {
  Rng rng(15);
  const auto rep = proxy_gap_check(3, 4, 3, rng);
  CHECK_FALSE(rep.violated);
  CHECK(rep.slack_lower >= -1e-12);
  CHECK(rep.slack_upper >= -1e-12);

  const auto summary = proxy_gap_audit(500, 2222);
  CHECK(summary.violations == 0);
}

TEST_CASE("degenerate conditioning collapses the sandwich") {
  // single state: I(A;Y|S) = I(A;Y), both slacks reduce to I(A;S) = 0 and H(S|Y) = 0
  Rng rng(17);
  const auto rep = proxy_gap_check(3, 1, 4, rng);
  CHECK(std::abs(rep.i_as) < 1e-12);
  CHECK(std::abs(rep.h_s_given_y) < 1e-12);
  CHECK(std::abs(rep.i_ay_given_s - rep.i_ay) < 1e-12);
}

TEST_CASE("pinsker audit") {
  const auto summary = pinsker_audit(2000, 808);
  CHECK(summary.violations == 0);
  CHECK(summary.min_slack >= 0.0);
}

TEST_CASE("suite report aggregates and stays deterministic") {
  const auto r1 = suite_report(40, 5150);
  const auto r2 = suite_report(40, 5150);
  CHECK(r1 == r2);
  CHECK(r1["total_violations"].get<int>() == 0);
  CHECK(r1["one_shot"]["instances"].get<int>() == 40);
  CHECK(r1["pinsker"]["instances"].get<int>() == 400);

  const auto empty = suite_report(0, 1);
  CHECK(empty["total_violations"].get<int>() == 0);
  CHECK(empty["one_shot"]["instances"].get<int>() == 0);
}

TEST_CASE("serial and parallel audits agree") {
  const auto serial = one_shot_audit(200, 64, Exec::serial);
  const auto parallel = one_shot_audit(200, 64, Exec::parallel);
  CHECK(serial.violations == parallel.violations);
  CHECK(serial.min_slack == parallel.min_slack);
  CHECK(serial.max_error == parallel.max_error);

  const auto ms = mdp_audit(20, 65, Exec::serial);
  const auto mp = mdp_audit(20, 65, Exec::parallel);
  CHECK(ms.min_slack == mp.min_slack);
  CHECK(ms.max_error == mp.max_error);
}
