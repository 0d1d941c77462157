// Command-line front end for the LFSM toolkit: simulation, estimation,
// triangular decomposition, forecasting, the simulation study and the
// rolling backtest, plus a `reproduce` command that regenerates the standard
// scan CSVs. Exit codes: 0 success, 1 input error, 2 numerical failure;
// failures leave a one-line JSON record on stderr.

#include "lfsm/decomposition.hpp"
#include "lfsm/errors.hpp"
#include "lfsm/estimation.hpp"
#include "lfsm/evaluation.hpp"
#include "lfsm/forecast.hpp"
#include "lfsm/io.hpp"
#include "lfsm/model.hpp"
#include "lfsm/rng.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

namespace {

using lfsm::InputError;

int default_jobs() {
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Writer that is either stdout ("-") or a file, checked on open.
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw InputError("cannot write '" + path + "'");
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_json(const std::string& path, const nlohmann::json& j) {
  OutStream os(path);
  os.get() << j.dump(2) << '\n';
}

struct SimulateArgs {
  lfsm::LfsmParams params;
  lfsm::SimConfig sim;
  std::uint64_t seed = 1;
  std::string out = "-";
};

struct SeriesInArgs {
  std::string in;
  double dt = 0.0;  // 0: take spacing from the file (or 1.0 if single column)
};

// --in is validated after config merging rather than marked required, so a
// config file can supply it too.
void add_series_in(CLI::App* cmd, SeriesInArgs& args) {
  cmd->add_option("--in", args.in, "input CSV (time,value or single column)");
  cmd->add_option("--dt", args.dt,
                  "sample spacing for single-column input (default 1)");
}

const SeriesInArgs& require_in(const SeriesInArgs& args) {
  if (args.in.empty()) throw InputError("--in is required (flag or config)");
  return args;
}

void add_config_option(CLI::App* cmd, std::string& path) {
  cmd->add_option("--config", path,
                  "INI file of defaults, keyed by long option name");
}

// Fill options from an INI file after the command line has been parsed.
// CLI11 only reads config files registered on the root command, never on a
// subcommand, so the merge is done by hand: a key applies only when the
// matching option was not given on the command line (flags > config >
// defaults), and values pass through the option's usual conversion checks.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI{}.from_config(in);
  } catch (const CLI::Error& e) {
    throw InputError("config file '" + path + "': " + std::string(e.what()));
  }
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty()) {
      throw InputError("config file '" + path + "': unexpected section '" +
                       item.fullname() + "'");
    }
    CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
    if (opt == nullptr) {
      throw InputError("config file '" + path + "': unknown key '" +
                       item.name + "' for command '" + cmd->get_name() + "'");
    }
    if (!opt->empty()) continue;  // the command line already set it
    try {
      for (const std::string& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError("config file '" + path + "', key '" + item.name +
                       "': " + std::string(e.what()));
    }
  }
}

int run_simulate(const SimulateArgs& a) {
  lfsm::Rng rng(a.seed);
  const lfsm::TimeSeries ts = lfsm::simulate_lfsm(a.params, a.sim, rng);
  OutStream os(a.out);
  lfsm::emit_series_csv(ts, os.get());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear fractional stable motion toolkit"};
  app.set_version_flag("--version", "lfsm 0.1.0");
  app.require_subcommand(1);
  std::string config_path;  // shared: only one subcommand parses per run

  // simulate ---------------------------------------------------------------
  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "sample a path to CSV");
  sim_cmd->add_option("--alpha", sim_args.params.alpha, "stability index in (0,2]");
  sim_cmd->add_option("--hurst", sim_args.params.hurst, "self-similarity exponent in (0,1)");
  sim_cmd->add_option("--sigma", sim_args.params.sigma, "scale parameter");
  sim_cmd->add_option("--dt", sim_args.sim.dt, "integration step");
  sim_cmd->add_option("--horizon", sim_args.sim.horizon, "simulate on [0, horizon]");
  sim_cmd->add_option("--truncation", sim_args.sim.truncation,
                      "kernel memory kept, in time units");
  sim_cmd->add_option("--seed", sim_args.seed, "random seed");
  sim_cmd->add_option("--out", sim_args.out, "output path or - for stdout");
  add_config_option(sim_cmd, config_path);

  // estimate ---------------------------------------------------------------
  SeriesInArgs est_in;
  lfsm::EstimationConfig est_cfg;
  std::string est_format = "json", est_out = "-";
  auto* est_cmd = app.add_subcommand("estimate",
                                     "estimate (alpha, hurst, sigma) from a series");
  add_series_in(est_cmd, est_in);
  est_cmd->add_option("--tau0", est_cfg.tau0, "base increment lag (time units)");
  est_cmd->add_option("--theta-grid", est_cfg.theta_grid,
                      "frequencies for the stability regression")
      ->delimiter(',');
  est_cmd->add_option("--tau-grid", est_cfg.tau_grid,
                      "lags for the self-similarity regression")
      ->delimiter(',');
  est_cmd->add_option("--format", est_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  est_cmd->add_option("--out", est_out, "output path or - for stdout");
  add_config_option(est_cmd, config_path);

  // decompose ----------------------------------------------------------------
  double dec_alpha = 1.5, dec_hurst = 0.5, dec_tol = 1e-10;
  std::int64_t dec_t = 1;
  int dec_d = 5;
  std::string dec_format = "csv", dec_out = "-";
  auto* dec_cmd = app.add_subcommand(
      "decompose", "solve the triangular coefficient system");
  dec_cmd->add_option("--alpha", dec_alpha, "stability index");
  dec_cmd->add_option("--hurst", dec_hurst, "self-similarity exponent");
  dec_cmd->add_option("--t", dec_t, "window start time (integer >= 1)");
  dec_cmd->add_option("--d", dec_d, "system dimension");
  dec_cmd->add_option("--tol", dec_tol, "residual tolerance per equation");
  dec_cmd->add_option("--format", dec_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  dec_cmd->add_option("--out", dec_out, "output path or - for stdout");
  add_config_option(dec_cmd, config_path);

  // forecast -----------------------------------------------------------------
  SeriesInArgs fc_in;
  lfsm::EstimationConfig fc_est;
  int fc_d = 3;
  double fc_alpha = 0.0, fc_hurst = 0.0, fc_sigma = 0.0;  // 0: estimate
  std::string fc_out = "-";
  auto* fc_cmd = app.add_subcommand(
      "forecast", "one-step forecast from the end of a series");
  add_series_in(fc_cmd, fc_in);
  fc_cmd->add_option("--d", fc_d, "observation window dimension");
  fc_cmd->add_option("--alpha", fc_alpha,
                     "known stability index (omit to estimate)");
  fc_cmd->add_option("--hurst", fc_hurst,
                     "known self-similarity exponent (omit to estimate)");
  fc_cmd->add_option("--sigma", fc_sigma, "known scale (omit to estimate)");
  fc_cmd->add_option("--tau0", fc_est.tau0,
                     "base lag for estimation (time units)");
  fc_cmd->add_option("--out", fc_out, "output path or - for stdout");
  add_config_option(fc_cmd, config_path);

  // study --------------------------------------------------------------------
  lfsm::StudyConfig study_cfg;
  study_cfg.jobs = default_jobs();
  std::string study_out = "-";
  auto* study_cmd = app.add_subcommand(
      "study", "forecast-sign Monte Carlo over a parameter grid");
  study_cmd->add_option("--alpha", study_cfg.alphas, "stability grid")
      ->delimiter(',');
  study_cmd->add_option("--hurst", study_cfg.hursts, "hurst grid")
      ->delimiter(',');
  study_cmd->add_option("--d", study_cfg.window_dims, "window dimensions")
      ->delimiter(',');
  study_cmd->add_option("--length", study_cfg.series_length,
                        "observations per cell");
  study_cmd->add_option("--dt", study_cfg.sim.dt,
                        "sub-observation integration step");
  study_cmd->add_option("--truncation", study_cfg.sim.truncation,
                        "kernel memory in time units");
  study_cmd->add_option("--seed", study_cfg.seed, "master seed");
  study_cmd->add_option("--jobs", study_cfg.jobs, "worker threads");
  study_cmd->add_option("--out", study_out, "output path or - for stdout");
  add_config_option(study_cmd, config_path);

  // backtest -------------------------------------------------------------
  SeriesInArgs bt_in;
  lfsm::BacktestConfig bt_cfg;
  bt_cfg.jobs = default_jobs();
  std::string bt_out = "-", bt_summary_out = "-";
  auto* bt_cmd = app.add_subcommand(
      "backtest", "rolling estimate-and-forecast evaluation on a series");
  add_series_in(bt_cmd, bt_in);
  bt_cmd->add_option("--window", bt_cfg.window, "observations per window");
  bt_cmd->add_option("--d", bt_cfg.d, "forecast window dimension");
  bt_cmd->add_option("--step", bt_cfg.step, "forecast step in samples");
  bt_cmd->add_option("--tau0", bt_cfg.est.tau0,
                     "base lag for estimation (time units)");
  bt_cmd->add_option("--jobs", bt_cfg.jobs, "worker threads");
  bt_cmd->add_option("--out", bt_out, "per-window CSV path or -");
  bt_cmd->add_option("--summary-out", bt_summary_out,
                     "summary JSON path or -");
  add_config_option(bt_cmd, config_path);

  // reproduce ------------------------------------------------------------
  std::string rep_dir = ".";
  bool rep_quick = false;
  std::uint64_t rep_seed = 42;
  int rep_jobs = default_jobs();
  auto* rep_cmd = app.add_subcommand(
      "reproduce",
      "regenerate the standard scan CSVs (existence frontier, hit-ratio "
      "scans over hurst and alpha)");
  rep_cmd->add_option("--out-dir", rep_dir, "directory for the CSV files");
  rep_cmd->add_flag("--quick", rep_quick, "smaller grids and shorter paths");
  rep_cmd->add_option("--seed", rep_seed, "master seed");
  rep_cmd->add_option("--jobs", rep_jobs, "worker threads");
  add_config_option(rep_cmd, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << lfsm::error_record("input", e.what()) << '\n';
    return 1;
  }

  try {
    for (CLI::App* cmd : {sim_cmd, est_cmd, dec_cmd, fc_cmd, study_cmd,
                          bt_cmd, rep_cmd}) {
      if (cmd->parsed()) apply_config(cmd, config_path);
    }

    if (sim_cmd->parsed()) return run_simulate(sim_args);

    if (est_cmd->parsed()) {
      require_in(est_in);
      const lfsm::TimeSeries ts = lfsm::ingest_csv_file(est_in.in, est_in.dt);
      const lfsm::EstimationResult r = lfsm::estimate(ts, est_cfg);
      OutStream os(est_out);
      if (est_format == "json") {
        os.get() << lfsm::estimation_to_json(r).dump(2) << '\n';
      } else {
        os.get() << "alpha_hat,h_hat,sigma_hat\n"
                 << lfsm::format_g12(r.alpha_hat) << ','
                 << lfsm::format_g12(r.h_hat) << ','
                 << lfsm::format_g12(r.sigma_hat) << '\n';
      }
      return 0;
    }

    if (dec_cmd->parsed()) {
      lfsm::SolveReport report;
      const lfsm::DecompositionCoeffs C =
          lfsm::solve_coefficients(dec_alpha, dec_hurst, dec_t, dec_d,
                                   dec_tol, &report);
      OutStream os(dec_out);
      if (dec_format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < C.d; ++i) {
          nlohmann::json row = nlohmann::json::array();
          for (int j = 0; j <= i; ++j) row.push_back(C.at(i, j));
          rows.push_back(std::move(row));
        }
        os.get() << nlohmann::json{{"alpha", C.alpha},
                                   {"hurst", C.hurst},
                                   {"t", C.t},
                                   {"d", C.d},
                                   {"kernel_pow", C.kernel_pow},
                                   {"a", rows},
                                   {"max_residual", report.max_residual},
                                   {"total_iterations", report.total_iterations}}
                        .dump(2)
                 << '\n';
      } else {
        os.get() << "i,j,a\n";
        for (int i = 0; i < C.d; ++i)
          for (int j = 0; j <= i; ++j)
            os.get() << i << ',' << j << ',' << lfsm::format_g12(C.at(i, j))
                     << '\n';
      }
      return 0;
    }

    if (fc_cmd->parsed()) {
      require_in(fc_in);
      const lfsm::TimeSeries ts = lfsm::ingest_csv_file(fc_in.in, fc_in.dt);
      lfsm::LfsmParams p;
      nlohmann::json extra;
      const bool have_all = fc_alpha > 0.0 && fc_hurst > 0.0 && fc_sigma > 0.0;
      if (have_all) {
        p = {fc_alpha, fc_hurst, fc_sigma};
      } else {
        const lfsm::EstimationResult e = lfsm::estimate(ts, fc_est);
        p = {fc_alpha > 0.0 ? fc_alpha : e.alpha_hat,
             fc_hurst > 0.0 ? fc_hurst : e.h_hat,
             fc_sigma > 0.0 ? fc_sigma : e.sigma_hat};
        extra = lfsm::estimation_to_json(e);
      }
      const lfsm::ForecastResult r = lfsm::predict_next(ts, p, fc_d);
      nlohmann::json j = lfsm::forecast_to_json(r);
      j["alpha"] = p.alpha;
      j["hurst"] = p.hurst;
      j["sigma"] = p.sigma;
      if (!extra.is_null()) j["estimation"] = extra;
      write_json(fc_out, j);
      return 0;
    }

    if (study_cmd->parsed()) {
      const auto rows = lfsm::run_simulation_study(study_cfg);
      OutStream os(study_out);
      lfsm::emit_study_csv(rows, os.get());
      return 0;
    }

    if (bt_cmd->parsed()) {
      require_in(bt_in);
      const lfsm::TimeSeries ts = lfsm::ingest_csv_file(bt_in.in, bt_in.dt);
      const lfsm::BacktestReport rep = lfsm::run_backtest(ts, bt_cfg);
      {
        OutStream os(bt_out);
        lfsm::emit_backtest_csv(rep, os.get());
      }
      write_json(bt_summary_out, lfsm::backtest_summary_json(rep));
      return 0;
    }

    if (rep_cmd->parsed()) {
      namespace fs = std::filesystem;
      std::error_code ec;
      fs::create_directories(rep_dir, ec);
      if (ec) throw InputError("cannot create '" + rep_dir + "'");

      // Existence frontier at t = 1, d = 7.
      std::vector<double> f_alphas, f_hursts;
      for (double a = 0.2; a <= 2.0001; a += rep_quick ? 0.2 : 0.1)
        f_alphas.push_back(a);
      for (double h = 0.1; h <= 0.9001; h += 0.1) f_hursts.push_back(h);
      const auto cells =
          lfsm::scan_existence_frontier(f_alphas, f_hursts, 1, 7);
      {
        std::ofstream os(fs::path(rep_dir) / "frontier_t1_d7.csv");
        if (!os) throw InputError("cannot write frontier CSV");
        lfsm::emit_frontier_csv(cells, os);
      }

      // Hit-ratio scans, one over hurst at fixed alpha and one over alpha
      // at fixed hurst.
      lfsm::StudyConfig c;
      c.seed = rep_seed;
      c.jobs = rep_jobs;
      c.series_length = rep_quick ? 501 : 2001;
      c.sim.dt = rep_quick ? 0.05 : 0.01;
      c.window_dims = {2, 5};

      c.alphas = {1.5};
      c.hursts = {0.3, 0.4, 0.5, 2.0 / 3.0, 0.7, 0.8, 0.9};
      const auto h_rows = lfsm::run_simulation_study(c);
      {
        std::ofstream os(fs::path(rep_dir) / "study_hurst_scan.csv");
        if (!os) throw InputError("cannot write hurst scan CSV");
        lfsm::emit_study_csv(h_rows, os);
      }

      c.alphas = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
      c.hursts = {0.8};
      const auto a_rows = lfsm::run_simulation_study(c);
      {
        std::ofstream os(fs::path(rep_dir) / "study_alpha_scan.csv");
        if (!os) throw InputError("cannot write alpha scan CSV");
        lfsm::emit_study_csv(a_rows, os);
      }
      std::cout << "wrote " << rep_dir << "/frontier_t1_d7.csv, "
                << rep_dir << "/study_hurst_scan.csv, "
                << rep_dir << "/study_alpha_scan.csv\n";
      return 0;
    }
  } catch (const lfsm::NumericError& e) {
    std::cerr << lfsm::error_record("numerical", e.what()) << '\n';
    return 2;
  } catch (const lfsm::InputError& e) {
    std::cerr << lfsm::error_record("input", e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << lfsm::error_record("input", e.what()) << '\n';
    return 1;
  }
  return 0;
}
