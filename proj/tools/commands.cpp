#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "platoon/csv.hpp"
#include "platoon/hv_model.hpp"
#include "platoon/model_io.hpp"
#include "platoon/svg.hpp"

namespace platoon::cli {

namespace fs = std::filesystem;

datagen::CorpusOptions corpus_options(const io::Config& cfg) {
  datagen::CorpusOptions o;
  o.n_sets = static_cast<int>(cfg.integer("datagen.sets", 9));
  o.train_sets = static_cast<int>(cfg.integer("datagen.train_sets", 6));
  o.stride_percent = static_cast<int>(cfg.integer("gp.stride_percent", 20));
  o.seed = static_cast<std::uint64_t>(cfg.integer("datagen.seed", 11));

  if (cfg.has("datagen.plateau_levels")) {
    o.profile.plateau_levels = cfg.numbers("datagen.plateau_levels");
  }
  o.profile.plateau_count = static_cast<int>(cfg.integer("datagen.plateau_count", 6));
  o.profile.plateau_duration = cfg.number("datagen.plateau_duration", 20.0);
  o.profile.ramp_accel = cfg.number("datagen.ramp_accel", 1.0);
  o.profile.dt = cfg.number("scenario.dt", 0.25);

  o.driver.gain = cfg.number("datagen.gain", 1.0);
  o.driver.zero_tc = cfg.number("datagen.zero_tc", 12.0);
  o.driver.damping = cfg.number("datagen.damping", 0.8);
  o.driver.natural_tc = cfg.number("datagen.natural_tc", 9.0);
  o.driver.delay = cfg.number("datagen.delay", 0.75);
  o.driver.noise_std = cfg.number("datagen.noise_std", 0.1);
  o.driver.noise_tau = cfg.number("datagen.noise_tau", 2.0);
  o.driver.nonlin_amp = cfg.number("datagen.nonlin_amp", 0.3);

  o.provenance = cfg.dump();
  return o;
}

mpc::Config mpc_config(const io::Config& cfg, mpc::Mode mode) {
  mpc::Config m;
  m.horizon = static_cast<int>(cfg.integer("scenario.horizon", 6));
  m.q1 = cfg.number("scenario.q1", 5.0);
  m.q2 = cfg.number("scenario.q2", 5.0);
  m.r = cfg.number("scenario.r", 20.0);
  m.dt = cfg.number("scenario.dt", 0.25);
  m.delta = cfg.number("scenario.delta", 20.0);
  m.delta_ext = cfg.number("scenario.delta_ext", 0.0);
  m.p_def = cfg.number("scenario.p_def", 0.95);
  m.v_min = cfg.number("scenario.v_min", -35.0);
  m.v_max = cfg.number("scenario.v_max", 35.0);
  m.a_min = cfg.number("scenario.a_min", -5.0);
  m.a_max = cfg.number("scenario.a_max", 5.0);
  m.warm_start = cfg.integer("scenario.warm_start", 1) != 0;
  m.mode = mode;
  return m;
}

sim::ScenarioConfig scenario_config(const io::Config& cfg) {
  sim::ScenarioConfig s;
  s.n_av = static_cast<int>(cfg.integer("scenario.n_av", 2));
  s.dt = cfg.number("scenario.dt", 0.25);
  s.duration = cfg.number("scenario.duration", 80.0);
  const double spacing_factor = cfg.number("scenario.spacing_factor", 1.2);
  s.init_spacing = spacing_factor * cfg.number("scenario.delta", 20.0);
  s.seed = static_cast<std::uint64_t>(cfg.integer("scenario.seed", 1));

  s.v_ref_schedule.clear();
  std::istringstream in(cfg.str("scenario.v_ref", "0:20, 30:10"));
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw IoError("config: scenario.v_ref entries must be t:value");
    }
    s.v_ref_schedule.emplace_back(std::stod(item.substr(0, colon)),
                                  std::stod(item.substr(colon + 1)));
  }
  return s;
}

Paths resolve_paths(const io::Config& cfg) {
  Paths p;
  p.corpus = cfg.str("paths.corpus", "data/corpus");
  p.models = cfg.str("paths.models", "data/models");
  p.out = cfg.str("paths.out", "out");
  return p;
}

int cmd_datagen(const io::Config& cfg) {
  const Paths paths = resolve_paths(cfg);
  const datagen::CorpusOptions opts = corpus_options(cfg);
  const datagen::CorpusManifest manifest = datagen::make_corpus(opts, paths.corpus);
  std::cout << "wrote " << manifest.entries.size() << " sets to " << paths.corpus.string()
            << " (" << manifest.train_sets << " train_source, stride " << manifest.stride
            << ")\n";
  return 0;
}

namespace {

struct SeriesData {
  std::vector<double> hv, lead;
};

SeriesData load_series(const fs::path& file) {
  const io::Table t = io::read_csv(file);
  const std::size_t ih = t.column_index("v_H");
  const std::size_t il = t.column_index("v_AV");
  SeriesData s;
  s.hv.reserve(t.rows.size());
  s.lead.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    s.hv.push_back(row[ih]);
    s.lead.push_back(row[il]);
  }
  return s;
}

gp::Dataset strided_training_data(const datagen::CorpusManifest& manifest,
                                  const fs::path& corpus_dir, const hv::ArxCoefficients& arx,
                                  int stride_percent) {
  std::vector<double> in0, in1, tgt;
  for (const auto& entry : manifest.entries) {
    if (entry.role != "train_source") {
      continue;
    }
    const SeriesData s = load_series(corpus_dir / entry.file);
    const gp::Dataset full = hv::build_discrepancy_dataset(s.hv, s.lead, arx);
    const auto idx = datagen::stride_indices(static_cast<std::size_t>(full.size()),
                                             stride_percent);
    for (std::size_t i : idx) {
      const auto col = static_cast<Eigen::Index>(i);
      in0.push_back(full.inputs(0, col));
      in1.push_back(full.inputs(1, col));
      tgt.push_back(full.targets(col));
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(tgt.size());
  gp::Inputs inputs(2, m);
  Eigen::VectorXd targets(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    inputs(0, i) = in0[static_cast<std::size_t>(i)];
    inputs(1, i) = in1[static_cast<std::size_t>(i)];
    targets(i) = tgt[static_cast<std::size_t>(i)];
  }
  return gp::Dataset(std::move(inputs), std::move(targets));
}

double mean_prediction_seconds(const gp::DiscrepancyPredictor& model, const gp::Inputs& xs) {
  const auto t0 = std::chrono::steady_clock::now();
  double sink = 0.0;
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    sink += model.predict(xs.col(i)).mean;
  }
  const auto t1 = std::chrono::steady_clock::now();
  volatile double keep = sink;
  (void)keep;
  return std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(xs.cols());
}

}  // namespace

int cmd_train(const io::Config& cfg) {
  const Paths paths = resolve_paths(cfg);
  const auto manifest = datagen::read_manifest(paths.corpus / "manifest.txt");
  const hv::ArxCoefficients arx = hv::ArxCoefficients::reference();

  const int stride_percent = static_cast<int>(cfg.integer("gp.stride_percent", 20));
  const gp::Dataset train = strided_training_data(manifest, paths.corpus, arx, stride_percent);
  std::cout << "training GP on " << train.size() << " strided discrepancy samples\n";

  gp::TrainerOptions topts;
  topts.restarts = static_cast<int>(cfg.integer("gp.restarts", 5));
  topts.max_iters = static_cast<int>(cfg.integer("gp.max_iters", 150));
  topts.grad_tol = cfg.number("gp.tol", 1e-5);
  topts.seed = static_cast<std::uint64_t>(cfg.integer("gp.seed", 7));
  const gp::Model full = gp::fit(train, gp::heuristic_init(train), topts);

  const int m_tilde = static_cast<int>(cfg.integer("gp.inducing", 20));
  const gp::InducingSet inducing = gp::select_inducing(full, m_tilde);
  const gp::SparseModel sparse = gp::fic_precompute(full.hyperparams(), inducing, train);

  std::error_code ec;
  fs::create_directories(paths.models, ec);
  if (ec) {
    throw IoError("train: cannot create " + paths.models.string());
  }
  io::save_model(paths.models / "gp_full.json", full, cfg.dump());
  io::save_model(paths.models / "gp_sparse.json", sparse, cfg.dump());

  // accuracy on the held-out sets: ARX free run vs GP-corrected free run
  std::ostringstream report;
  report << "model accuracy (free-run RMSE vs measured, m/s)\n";
  report << "set            ARX     ARX+GP  sparse\n";
  auto full_ptr = std::make_shared<gp::Model>(full);
  auto sparse_ptr = std::make_shared<gp::SparseModel>(sparse);
  const hv::HvModel arx_only{arx, nullptr};
  const hv::HvModel with_full{arx, full_ptr};
  const hv::HvModel with_sparse{arx, sparse_ptr};
  double sum_arx = 0.0, sum_full = 0.0, sum_sparse = 0.0;
  int test_count = 0;
  gp::Inputs test_inputs;
  std::vector<double> ti0, ti1;
  for (const auto& entry : manifest.entries) {
    if (entry.role != "test") {
      continue;
    }
    const SeriesData s = load_series(paths.corpus / entry.file);
    const auto ev_arx = hv::evaluate_rollout(arx_only, s.hv, s.lead);
    const auto ev_full = hv::evaluate_rollout(with_full, s.hv, s.lead);
    const auto ev_sparse = hv::evaluate_rollout(with_sparse, s.hv, s.lead);
    char line[128];
    std::snprintf(line, sizeof(line), "%-14s %-7.3f %-7.3f %-7.3f\n", entry.file.c_str(),
                  ev_arx.arx_rmse, ev_full.corrected_rmse, ev_sparse.corrected_rmse);
    report << line;
    sum_arx += ev_arx.arx_rmse;
    sum_full += ev_full.corrected_rmse;
    sum_sparse += ev_sparse.corrected_rmse;
    ++test_count;
    const gp::Dataset d = hv::build_discrepancy_dataset(s.hv, s.lead, arx);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      ti0.push_back(d.inputs(0, i));
      ti1.push_back(d.inputs(1, i));
    }
  }
  if (test_count == 0) {
    throw IoError("train: corpus has no test sets");
  }
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %-7.3f %-7.3f %-7.3f\n", "average",
                sum_arx / test_count, sum_full / test_count, sum_sparse / test_count);
  report << line;
  std::snprintf(line, sizeof(line),
                "improvement over ARX: full %.1f%%, sparse %.1f%% (expect full < sparse RMSE; "
                "deviation flagged: %s)\n",
                100.0 * (1.0 - sum_full / sum_arx), 100.0 * (1.0 - sum_sparse / sum_arx),
                (sum_full <= sum_sparse && sum_sparse <= sum_arx) ? "no" : "yes");
  report << line;

  test_inputs.resize(2, static_cast<Eigen::Index>(ti0.size()));
  for (std::size_t i = 0; i < ti0.size(); ++i) {
    test_inputs(0, static_cast<Eigen::Index>(i)) = ti0[i];
    test_inputs(1, static_cast<Eigen::Index>(i)) = ti1[i];
  }
  const double t_full = mean_prediction_seconds(full, test_inputs);
  const double t_sparse = mean_prediction_seconds(sparse, test_inputs);
  std::snprintf(line, sizeof(line),
                "per-prediction time: full %.3g s, sparse %.3g s (%.1fx faster, m=%ld, "
                "inducing=%d)\n",
                t_full, t_sparse, t_full / t_sparse, static_cast<long>(train.size()), m_tilde);
  report << line;

  fs::create_directories(paths.out, ec);
  std::ofstream rf(paths.out / "train_report.txt");
  if (!rf) {
    throw IoError("train: cannot write report");
  }
  for (const std::string& l : cfg.dump()) {
    rf << "# " << l << "\n";
  }
  rf << report.str();
  std::cout << report.str();
  return 0;
}

namespace {

io::Table log_to_table(const sim::TrajectoryLog& log) {
  io::Table t;
  t.provenance = log.provenance;
  t.columns = {"t"};
  for (int i = 1; i <= log.n_av; ++i) {
    t.columns.push_back("p_av" + std::to_string(i));
    t.columns.push_back("v_av" + std::to_string(i));
    t.columns.push_back("a_av" + std::to_string(i));
  }
  for (const char* c : {"p_hv", "v_hv", "mu_hv", "sigma2_hv", "dist_av_hv", "bound",
                        "solve_time"}) {
    t.columns.push_back(c);
  }
  for (const auto& r : log.rows) {
    std::vector<double> row{r.t};
    for (int i = 0; i < log.n_av; ++i) {
      row.push_back(r.av_pos[static_cast<std::size_t>(i)]);
      row.push_back(r.av_vel[static_cast<std::size_t>(i)]);
      row.push_back(r.av_accel[static_cast<std::size_t>(i)]);
    }
    row.insert(row.end(), {r.hv_pos, r.hv_vel, r.hv_mu, r.hv_var, r.dist_av_hv, r.bound,
                           r.solve_time});
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct SimOutcome {
  sim::TrajectoryLog log;
  double mean_solve = 0.0, max_solve = 0.0, std_solve = 0.0;
};

SimOutcome run_mode(const io::Config& cfg, mpc::Mode mode, std::uint64_t seed) {
  const Paths paths = resolve_paths(cfg);
  const sim::ScenarioConfig scenario = scenario_config(cfg);
  const hv::ArxCoefficients arx = hv::ArxCoefficients::reference();

  auto plant_gp = std::make_shared<gp::Model>(io::load_full_model(paths.models / "gp_full.json"));
  const hv::HvModel plant{arx, plant_gp};

  std::shared_ptr<const gp::DiscrepancyPredictor> ctrl_pred;
  if (mode == mpc::Mode::kGp) {
    ctrl_pred = std::make_shared<gp::SparseModel>(
        io::load_sparse_model(paths.models / "gp_sparse.json"));
  }
  mpc::Controller controller(mpc_config(cfg, mode), arx, ctrl_pred);

  SimOutcome out;
  out.log = sim::run_scenario(scenario, controller, plant, seed);
  out.log.provenance = cfg.dump();
  out.log.provenance.push_back("mode = " + std::string(mode == mpc::Mode::kGp ? "gp" : "nominal"));
  out.log.provenance.push_back("seed = " + std::to_string(seed));

  double sum = 0.0, sq = 0.0;
  for (const auto& r : out.log.rows) {
    sum += r.solve_time;
    out.max_solve = std::max(out.max_solve, r.solve_time);
  }
  const double n = std::max<std::size_t>(out.log.rows.size(), 1);
  out.mean_solve = sum / n;
  for (const auto& r : out.log.rows) {
    sq += (r.solve_time - out.mean_solve) * (r.solve_time - out.mean_solve);
  }
  out.std_solve = std::sqrt(sq / n);
  return out;
}

}  // namespace

int cmd_simulate(const io::Config& cfg, const std::string& mode_name) {
  const mpc::Mode mode = (mode_name == "nominal") ? mpc::Mode::kNominal : mpc::Mode::kGp;
  const Paths paths = resolve_paths(cfg);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("scenario.seed", 1));

  const SimOutcome out = run_mode(cfg, mode, seed);

  std::error_code ec;
  fs::create_directories(paths.out, ec);
  const fs::path log_path = paths.out / ("trajectory_" + mode_name + ".csv");
  io::write_csv(log_path, log_to_table(out.log));

  std::ostringstream summary;
  summary << "mode: " << mode_name << ", seed: " << seed << "\n";
  if (out.log.rows.empty()) {
    summary << "empty log (zero-duration scenario); initial state only\n";
    const sim::ScenarioConfig scenario = scenario_config(cfg);
    const sim::PlatoonState s0 = sim::initial_state(scenario);
    for (int i = 0; i < scenario.n_av; ++i) {
      summary << "  AV " << (i + 1) << " position: " << s0.av_pos(i) << " m\n";
    }
    summary << "  HV position: " << s0.hv_pos << " m\n";
  } else {
    const auto fin = out.log.final_positions();
    for (std::size_t i = 0; i + 1 < fin.size(); ++i) {
      summary << "  AV " << (i + 1) << " final position: " << fin[i] << " m\n";
    }
    summary << "  HV final position: " << fin.back() << " m\n";
    summary << "  min HV-AV distance: " << out.log.min_hv_gap() << " m\n";
  }
  std::ofstream sf(paths.out / ("summary_" + mode_name + ".txt"));
  for (const std::string& l : cfg.dump()) {
    sf << "# " << l << "\n";
  }
  sf << summary.str();
  std::cout << summary.str() << "log: " << log_path.string() << "\n";
  return 0;
}

int cmd_bench(const io::Config& cfg) {
  const Paths paths = resolve_paths(cfg);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("scenario.seed", 1));

  // modes timed sequentially on the same scenario and seed, so the numbers
  // are not polluted by each other
  const SimOutcome nominal = run_mode(cfg, mpc::Mode::kNominal, seed);
  const SimOutcome gp = run_mode(cfg, mpc::Mode::kGp, seed);

  std::ostringstream table;
  table << "per-step controller time over the scenario (s); modes timed sequentially\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-10s %-10s %-10s\n", "controller", "mean", "max",
                "std");
  table << line;
  std::snprintf(line, sizeof(line), "%-12s %-10.3g %-10.3g %-10.3g\n", "nominal",
                nominal.mean_solve, nominal.max_solve, nominal.std_solve);
  table << line;
  std::snprintf(line, sizeof(line), "%-12s %-10.3g %-10.3g %-10.3g\n", "gp", gp.mean_solve,
                gp.max_solve, gp.std_solve);
  table << line;
  std::snprintf(line, sizeof(line), "gp/nominal mean ratio: %.3f\n",
                gp.mean_solve / nominal.mean_solve);
  table << line;

  std::error_code ec;
  fs::create_directories(paths.out, ec);
  std::ofstream bf(paths.out / "bench.txt");
  for (const std::string& l : cfg.dump()) {
    bf << "# " << l << "\n";
  }
  bf << table.str();
  std::cout << table.str();
  return 0;
}

int cmd_report(const fs::path& log_path, const fs::path& out_dir) {
  const io::Table t = io::read_csv(log_path);
  if (t.rows.empty()) {
    throw MalformedLog("report: log has no rows");
  }

  int n_av = 0;
  while (true) {
    const std::string name = "p_av" + std::to_string(n_av + 1);
    bool found = false;
    for (const auto& c : t.columns) {
      if (c == name) {
        found = true;
        break;
      }
    }
    if (!found) {
      break;
    }
    ++n_av;
  }
  if (n_av == 0) {
    throw MalformedLog("report: no AV columns in log");
  }

  auto column = [&](const std::string& name) {
    const std::size_t idx = t.column_index(name);
    std::vector<double> v(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      v[i] = t.rows[i][idx];
    }
    return v;
  };
  const std::vector<double> time = column("t");

  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};

  io::LinePlot vel;
  vel.title = "velocity tracking";
  vel.x_label = "t (s)";
  vel.y_label = "velocity (m/s)";
  vel.provenance = t.provenance;
  for (int i = 1; i <= n_av; ++i) {
    vel.series.push_back({"AV " + std::to_string(i), time, column("v_av" + std::to_string(i)),
                          kColors[(i - 1) % 5], false});
  }
  vel.series.push_back({"HV", time, column("v_hv"), "#d62728", false});
  // the reference schedule is recoverable from the embedded config
  for (const std::string& line : t.provenance) {
    const std::string key = "scenario.v_ref = ";
    if (line.rfind(key, 0) == 0) {
      std::vector<double> ref(time.size());
      std::vector<std::pair<double, double>> sched;
      std::istringstream in(line.substr(key.size()));
      std::string item;
      while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          continue;
        }
        sched.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      }
      for (std::size_t i = 0; i < time.size(); ++i) {
        double v = 0.0;
        for (const auto& [start, value] : sched) {
          if (time[i] >= start) {
            v = value;
          }
        }
        ref[i] = v;
      }
      vel.series.push_back({"v_ref", time, ref, "#555555", true});
      break;
    }
  }

  io::LinePlot pos;
  pos.title = "vehicle positions";
  pos.x_label = "t (s)";
  pos.y_label = "position (m)";
  pos.provenance = t.provenance;
  for (int i = 1; i <= n_av; ++i) {
    pos.series.push_back({"AV " + std::to_string(i), time, column("p_av" + std::to_string(i)),
                          kColors[(i - 1) % 5], false});
  }
  pos.series.push_back({"HV", time, column("p_hv"), "#d62728", false});

  io::LinePlot dist;
  dist.title = "inter-vehicle distances";
  dist.x_label = "t (s)";
  dist.y_label = "distance (m)";
  dist.provenance = t.provenance;
  for (int i = 1; i < n_av; ++i) {
    const auto pa = column("p_av" + std::to_string(i));
    const auto pb = column("p_av" + std::to_string(i + 1));
    std::vector<double> gap(pa.size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
      gap[k] = pa[k] - pb[k];
    }
    dist.series.push_back({"AV " + std::to_string(i) + "-AV " + std::to_string(i + 1), time,
                           std::move(gap), kColors[(i - 1) % 5], false});
  }
  dist.series.push_back({"AV-HV", time, column("dist_av_hv"), "#d62728", false});
  dist.series.push_back({"bound", time, column("bound"), "#555555", true});

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const std::string stem = log_path.stem().string();
  io::write_svg(out_dir / (stem + "_velocity.svg"), vel);
  io::write_svg(out_dir / (stem + "_positions.svg"), pos);
  io::write_svg(out_dir / (stem + "_distances.svg"), dist);
  std::cout << "wrote 3 plots for " << stem << " to " << out_dir.string() << "\n";
  return 0;
}

}  // namespace platoon::cli
