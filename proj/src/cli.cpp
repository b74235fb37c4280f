#include "qpg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpg/infometrics.hpp"
#include "qpg/svg.hpp"
#include "qpg/theorem_lab.hpp"
#include "qpg/trainer.hpp"

namespace fs = std::filesystem;

namespace qpg::cli {

namespace {

const std::vector<std::string> kMetricNames = {"mi_tet_proxy", "entropy", "grad_norm",
                                               "expressivity_proxy", "mean_reward"};

std::vector<std::vector<double>> metric_columns(const info::MetricSeries& series) {
  std::vector<std::vector<double>> cols(5);
  for (const auto& s : series.samples) {
    cols[0].push_back(s.mi_tet_proxy);
    cols[1].push_back(s.entropy);
    cols[2].push_back(s.grad_norm);
    cols[3].push_back(s.expressivity_proxy);
    cols[4].push_back(s.mean_reward);
  }
  return cols;
}

nlohmann::json correlation_matrix(const info::MetricSeries& series) {
  const auto cols = metric_columns(series);
  nlohmann::json matrix;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    nlohmann::json row;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      try {
        row[kMetricNames[j]] = info::pearson_correlation(cols[i], cols[j]);
      } catch (const std::exception&) {
        row[kMetricNames[j]] = nullptr;  // degenerate variance
      }
    }
    matrix[kMetricNames[i]] = row;
  }
  return matrix;
}

nlohmann::json config_json(const train::TrainConfig& cfg) {
  return nlohmann::json::parse(train::train_config_json(cfg));
}

struct RunData {
  std::string name;
  info::MetricSeries series;
  nlohmann::json summary;  // may be null when summary.json is absent
};

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::optional<int> layers, std::ostream& out,
              std::ostream& err) {
  train::TrainConfig cfg;
  try {
    cfg = train::load_train_config(config_path);
    if (seed) cfg.seed = *seed;
    if (layers) cfg.n_layers = *layers;
    cfg.validate();
  } catch (const std::exception& e) {
    err << "train: " << e.what() << '\n';
    return 2;
  }
  try {
    fs::create_directories(out_dir);
    info::MetricEngine engine(cfg.bin_count, cfg.expressivity_window);
    env::CartPoleEnv proto;
    const auto result = train::train(cfg, proto, engine);

    train::write_run_csv(result.series, out_dir + "/run.csv");
    policy::save_checkpoint(result.policy, out_dir + "/checkpoint.txt");

    nlohmann::json summary;
    summary["config"] = config_json(cfg);
    summary["seed"] = cfg.seed;
    summary["batches_run"] = result.batches_run;
    summary["episodes_total"] = result.episodes_total;
    summary["early_stopped"] = result.early_stopped;
    summary["reached_target"] = result.reached_target;
    summary["final_moving_avg"] =
        result.series.samples.empty() ? 0.0 : result.series.samples.back().moving_avg_reward;
    summary["g_max_observed"] = result.g_max_observed;
    summary["y_max_observed"] = result.y_max_observed;
    summary["bin_delta_max"] = result.bin_delta_max;
    summary["correlations"] = correlation_matrix(result.series);
    try {
      const auto constants = info::estimate_scaling_constants(result.series);
      summary["scaling_constants"] = {{"C", constants.c}, {"K", constants.k}};
      const info::BoundParams bounds{result.g_max_observed, result.y_max_observed, 1.0,
                                     result.bin_delta_max};
      int raw_violations = 0, scaled_violations = 0;
      for (const auto& check : info::bound_report(result.series, bounds, constants)) {
        if (check.raw == info::BoundFlag::violated) ++raw_violations;
        if (check.scaled == info::BoundFlag::violated) ++scaled_violations;
      }
      summary["bound_violations"] = {{"raw", raw_violations}, {"scaled", scaled_violations}};
    } catch (const std::exception&) {
      summary["scaling_constants"] = nullptr;
      summary["bound_violations"] = nullptr;
    }
    std::ofstream sf(out_dir + "/summary.json");
    sf << summary.dump(2) << '\n';

    out << "train: " << result.batches_run << " batches, final moving average "
        << summary["final_moving_avg"].get<double>()
        << (result.early_stopped ? " (early stopped)" : "")
        << (result.reached_target ? " (reached target)" : "") << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "train: " << e.what() << '\n';
    return 2;
  }
}

int cmd_bin_sweep(const std::string& config_path, const std::string& out_dir,
                  std::vector<int> bins, std::optional<std::uint64_t> seed,
                  std::optional<int> layers, std::ostream& out, std::ostream& err) {
  if (bins.empty()) {
    err << "bin-sweep: --bins must list at least one bin count\n";
    return 2;
  }
  train::TrainConfig cfg;
  try {
    cfg = train::load_train_config(config_path);
    if (seed) cfg.seed = *seed;
    if (layers) cfg.n_layers = *layers;
    cfg.validate();
    for (int b : bins)
      if (b < 1) throw std::invalid_argument("bin counts must be >= 1");
  } catch (const std::exception& e) {
    err << "bin-sweep: " << e.what() << '\n';
    return 2;
  }
  try {
    fs::create_directories(out_dir);
    env::CartPoleEnv proto;
    Rng init_rng(mix64(cfg.seed, 0x1a17));
    auto pol = policy::SoftmaxPqcPolicy::parity_head(proto.state_dim(), cfg.n_layers, init_rng,
                                                     cfg.w_init, cfg.beta_start);
    const auto episodes =
        train::generate_episodes(pol, proto, cfg.batch_size, cfg.seed, /*batch_index=*/0);
    std::vector<double> pooled_returns;
    std::vector<int> pooled_actions;
    for (const auto& ep : episodes) {
      train::Trajectory traj = ep.traj;
      const auto returns = train::compute_returns(traj, cfg.gamma);
      for (std::size_t t = 0; t < traj.steps.size(); ++t) {
        pooled_returns.push_back(returns[t]);
        pooled_actions.push_back(traj.steps[t].action);
      }
    }
    const auto signal =
        cfg.normalize ? train::normalize_returns(pooled_returns) : pooled_returns;

    nlohmann::json rows = nlohmann::json::array();
    std::ofstream csv(out_dir + "/sweep.csv");
    csv << "bins,mi_tet_proxy\n";
    svg::Series curve;
    curve.name = "I(A;Y~)";
    for (int b : bins) {
      const double mi = info::binned_mutual_information(pooled_actions, 2, signal, b);
      rows.push_back({{"bins", b}, {"mi_tet_proxy", mi}});
      csv << b << ',' << mi << '\n';
      curve.x.push_back(b);
      curve.y.push_back(mi);
      out << "B = " << b << "  MI = " << mi << '\n';
    }
    nlohmann::json j;
    j["config"] = config_json(cfg);
    j["samples"] = pooled_actions.size();
    j["sweep"] = rows;
    std::ofstream jf(out_dir + "/sweep.json");
    jf << j.dump(2) << '\n';
    svg::ChartSpec spec;
    spec.title = "MI vs bin count (first batch)";
    spec.x_label = "bin count B";
    spec.y_label = "nats";
    svg::write_line_chart(out_dir + "/sweep.svg", spec, {curve});
    return 0;
  } catch (const std::exception& e) {
    err << "bin-sweep: " << e.what() << '\n';
    return 2;
  }
}

int cmd_theorems(const std::string& out_path, int instances, std::uint64_t seed,
                 std::ostream& out, std::ostream& err) {
  if (instances < 0) {
    err << "theorems: --instances must be >= 0\n";
    return 2;
  }
  try {
    const auto report = theorem::suite_report(instances, seed);
    if (!out_path.empty()) {
      fs::create_directories(fs::path(out_path).parent_path().empty()
                                 ? "."
                                 : fs::path(out_path).parent_path().string());
      std::ofstream f(out_path);
      f << report.dump(2) << '\n';
    }
    for (const auto& key : {"one_shot", "one_shot_pqc", "mdp", "baseline", "expressivity",
                            "proxy_gap", "pinsker"})
      out << key << ": " << report[key]["violations"].get<int>() << " violations / "
          << report[key]["instances"].get<int>() << " instances\n";
    const int total = report["total_violations"].get<int>();
    out << "total violations: " << total << '\n';
    return total == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "theorems: " << e.what() << '\n';
    return 2;
  }
}

void write_correlation_files(const RunData& run, const std::string& out_dir) {
  const auto matrix = correlation_matrix(run.series);
  std::ofstream jf(out_dir + "/" + run.name + "_correlations.json");
  jf << matrix.dump(2) << '\n';
  std::ofstream cf(out_dir + "/" + run.name + "_correlations.csv");
  cf << "metric";
  for (const auto& n : kMetricNames) cf << ',' << n;
  cf << '\n';
  for (const auto& a : kMetricNames) {
    cf << a;
    for (const auto& b : kMetricNames) {
      cf << ',';
      if (matrix[a][b].is_null()) cf << "nan";
      else cf << matrix[a][b].get<double>();
    }
    cf << '\n';
  }
}

void write_run_charts(const RunData& run, const std::string& out_dir, bool scaled,
                      std::ostream& err) {
  std::vector<double> xs, reward, moving, mi, ent, grad, expr;
  for (const auto& s : run.series.samples) {
    xs.push_back(s.batch_index);
    reward.push_back(s.mean_reward);
    moving.push_back(s.moving_avg_reward);
    mi.push_back(s.mi_tet_proxy);
    ent.push_back(s.entropy);
    grad.push_back(s.grad_norm);
    expr.push_back(s.expressivity_proxy);
  }

  svg::ChartSpec reward_spec;
  reward_spec.title = run.name + ": reward";
  reward_spec.x_label = "batch";
  reward_spec.y_label = "reward";
  svg::write_line_chart(out_dir + "/" + run.name + "_reward.svg", reward_spec,
                        {{"reward", xs, reward, "#1f77b4", 0},
                         {"moving avg (10)", xs, moving, "#d62728", 0}});

  svg::ChartSpec me_spec;
  me_spec.title = run.name + ": MI proxy vs policy entropy";
  me_spec.x_label = "batch";
  me_spec.y_label = "I(A;Y~) nats";
  me_spec.y2_label = "H(A|S) nats";
  svg::write_line_chart(out_dir + "/" + run.name + "_mi_entropy.svg", me_spec,
                        {{"I(A;Y~)", xs, mi, "#1f77b4", 0}, {"entropy", xs, ent, "#2ca02c", 1}});

  // bound charts need the run summary for constants and raw bound params
  double c_const = 0.0, k_const = 0.0, g_max = 0.0, y_max = 0.0, delta = 0.0;
  bool have_constants = false;
  if (!run.summary.is_null()) {
    g_max = run.summary.value("g_max_observed", 0.0);
    y_max = run.summary.value("y_max_observed", 0.0);
    delta = run.summary.value("bin_delta_max", 0.0);
    if (run.summary.contains("scaling_constants") && !run.summary["scaling_constants"].is_null()) {
      c_const = run.summary["scaling_constants"].value("C", 0.0);
      k_const = run.summary["scaling_constants"].value("K", 0.0);
      have_constants = true;
    }
  }
  if ((scaled && !have_constants) || (!scaled && run.summary.is_null())) {
    err << "report: " << run.name << ": missing summary data, bound charts skipped\n";
    return;
  }

  std::vector<double> grad_bound(xs.size()), expr_bound(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double root = std::sqrt(std::max(0.0, mi[i]));
    grad_bound[i] = scaled ? c_const * root
                           : std::sqrt(2.0) * g_max * y_max * root + g_max * delta;
    expr_bound[i] = scaled ? k_const * mi[i] : mi[i];
  }
  auto bands_for = [&](const std::vector<double>& lhs, const std::vector<double>& rhs) {
    std::vector<svg::Band> bands;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x0 = i == 0 ? xs[i] : 0.5 * (xs[i - 1] + xs[i]);
      const double x1 = i + 1 == xs.size() ? xs[i] : 0.5 * (xs[i] + xs[i + 1]);
      bands.push_back({x0, x1, lhs[i] <= rhs[i] + 1e-12 ? "#d9d9d9" : "#f4a6a6"});
    }
    return bands;
  };

  svg::ChartSpec gb_spec;
  gb_spec.title = run.name + (scaled ? ": grad norm vs C*sqrt(MI)" : ": grad norm vs raw bound");
  gb_spec.x_label = "batch";
  gb_spec.y_label = "norm";
  svg::write_line_chart(out_dir + "/" + run.name + "_bound_grad.svg", gb_spec,
                        {{"grad norm", xs, grad, "#1f77b4", 0},
                         {"bound", xs, grad_bound, "#d62728", 0}},
                        bands_for(grad, grad_bound));

  svg::ChartSpec eb_spec;
  eb_spec.title = run.name + (scaled ? ": expressivity vs K*MI" : ": expressivity vs MI");
  eb_spec.x_label = "batch";
  eb_spec.y_label = "nats";
  svg::write_line_chart(out_dir + "/" + run.name + "_bound_expr.svg", eb_spec,
                        {{"expressivity", xs, expr, "#1f77b4", 0},
                         {"bound", xs, expr_bound, "#d62728", 0}},
                        bands_for(expr, expr_bound));
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, bool scaled,
               std::ostream& out, std::ostream& err) {
  std::vector<RunData> runs;
  for (const auto& dir : run_dirs) {
    RunData run;
    run.name = fs::path(dir).filename().string();
    if (run.name.empty()) run.name = fs::path(dir).parent_path().filename().string();
    try {
      run.series = train::read_run_csv(dir + "/run.csv");
      if (fs::exists(dir + "/summary.json")) {
        std::ifstream sf(dir + "/summary.json");
        sf >> run.summary;
      }
      runs.push_back(std::move(run));
    } catch (const std::exception& e) {
      err << "report: " << dir << ": " << e.what() << '\n';
    }
  }
  if (runs.empty()) {
    err << "report: no readable runs\n";
    return 2;
  }
  try {
    fs::create_directories(out_dir);
    for (const auto& run : runs) {
      write_run_charts(run, out_dir, scaled, err);
      write_correlation_files(run, out_dir);
      out << "report: wrote charts for " << run.name << '\n';
    }
    if (runs.size() > 1) {
      std::vector<svg::Series> series;
      const std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                "#8c564b"};
      for (std::size_t i = 0; i < runs.size(); ++i) {
        svg::Series s;
        s.name = runs[i].name;
        s.color = palette[i % palette.size()];
        for (const auto& sample : runs[i].series.samples) {
          s.x.push_back(sample.batch_index);
          s.y.push_back(sample.mi_tet_proxy);
        }
        series.push_back(std::move(s));
      }
      svg::ChartSpec cmp_spec;
      cmp_spec.title = "MI proxy per architecture";
      cmp_spec.x_label = "batch";
      cmp_spec.y_label = "I(A;Y~) nats";
      svg::write_line_chart(out_dir + "/comparison_mi.svg", cmp_spec, series);
    }
    return 0;
  } catch (const std::exception& e) {
    err << "report: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"quantum policy-gradient lab"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> layers;
  std::vector<int> bins;
  int instances = 1000;
  std::uint64_t theorem_seed = 0;
  bool scaled = false;
  std::vector<std::string> run_dirs;

  auto* train_cmd = app.add_subcommand("train", "train a softmax-PQC policy on CartPole");
  train_cmd->add_option("--config", config_path, "config JSON path")->required();
  train_cmd->add_option("--out", out_path, "output directory")->required();
  train_cmd->add_option("--seed", seed, "seed override");
  train_cmd->add_option("--layers", layers, "layer-count override");

  auto* sweep_cmd = app.add_subcommand("bin-sweep", "MI of one fixed batch across bin counts");
  sweep_cmd->add_option("--config", config_path, "config JSON path")->required();
  sweep_cmd->add_option("--out", out_path, "output directory")->required();
  sweep_cmd->add_option("--bins", bins, "bin counts to evaluate")
      ->delimiter(',')
      ->default_val(std::vector<int>{2, 5, 10, 20, 50});
  sweep_cmd->add_option("--seed", seed, "seed override");
  sweep_cmd->add_option("--layers", layers, "layer-count override");

  auto* thm_cmd = app.add_subcommand("theorems", "run the exact theorem audit suite");
  thm_cmd->add_option("--out", out_path, "report JSON path");
  thm_cmd->add_option("--instances", instances, "base instance count");
  thm_cmd->add_option("--seed", theorem_seed, "audit seed");

  auto* report_cmd = app.add_subcommand("report", "charts and correlations from run dirs");
  report_cmd->add_option("runs", run_dirs, "run directories")->required();
  report_cmd->add_option("--out", out_path, "output directory")->required();
  report_cmd->add_flag("--scaled", scaled, "use estimated scaling constants for bounds");

  std::vector<const char*> argv;
  argv.push_back("qpglab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  if (train_cmd->parsed()) return cmd_train(config_path, out_path, seed, layers, out, err);
  if (sweep_cmd->parsed())
    return cmd_bin_sweep(config_path, out_path, bins, seed, layers, out, err);
  if (thm_cmd->parsed()) return cmd_theorems(out_path, instances, theorem_seed, out, err);
  if (report_cmd->parsed()) return cmd_report(run_dirs, out_path, scaled, out, err);
  err << "unknown subcommand\n";
  return 2;
}

}  // namespace qpg::cli
