#include "platoon/datagen.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "platoon/config.hpp"
#include "platoon/csv.hpp"
#include "platoon/rng.hpp"

namespace platoon::datagen {

void DriverResponseConfig::validate() const {
  if (!(natural_tc > 0.0) || !(damping > 0.0)) {
    throw std::invalid_argument("driver: natural_tc and damping must be > 0");
  }
  if (delay < 0.0 || noise_std < 0.0 || nonlin_amp < 0.0 || !(noise_tau > 0.0)) {
    throw std::invalid_argument("driver: negative delay/noise/nonlinearity");
  }
}

void ScenarioProfile::validate() const {
  if (plateau_levels.empty() || plateau_count < 1) {
    throw std::invalid_argument("profile: needs plateau levels");
  }
  if (plateau_duration < 20.0) {
    throw std::invalid_argument("profile: plateau duration must be >= 20 s");
  }
  if (!(ramp_accel > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("profile: ramp_accel and dt must be > 0");
  }
}

std::vector<double> generate_lead_profile(const ScenarioProfile& p) {
  p.validate();
  Rng rng(p.seed);

  // plateau order: repeated seeded permutations of the level set, so every
  // level appears and orderings differ across seeds
  std::vector<double> order;
  while (static_cast<int>(order.size()) < p.plateau_count) {
    std::vector<double> block = p.plateau_levels;
    for (std::size_t i = block.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.integer() % i);
      std::swap(block[i - 1], block[j]);
    }
    order.insert(order.end(), block.begin(), block.end());
  }
  order.resize(static_cast<std::size_t>(p.plateau_count));

  std::vector<double> lead;
  lead.push_back(0.0);
  double v = 0.0;
  const int plateau_steps = static_cast<int>(std::llround(p.plateau_duration / p.dt));
  for (double target : order) {
    const double dir = (target >= v) ? 1.0 : -1.0;
    while (std::abs(target - v) > p.ramp_accel * p.dt) {
      v += dir * p.ramp_accel * p.dt;
      lead.push_back(v);
    }
    v = target;
    for (int i = 0; i < plateau_steps; ++i) {
      lead.push_back(v);
    }
  }
  return lead;
}

namespace {

// controllable canonical state space of num(s)/den(s), den monic
struct StateSpace {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
};

StateSpace tf_to_ss(std::vector<double> num, std::vector<double> den) {
  const double lead = den.front();
  for (double& x : den) x /= lead;
  for (double& x : num) x /= lead;
  const int n = static_cast<int>(den.size()) - 1;
  StateSpace ss;
  ss.a = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    ss.a(0, j) = -den[static_cast<std::size_t>(j + 1)];
  }
  for (int i = 1; i < n; ++i) {
    ss.a(i, i - 1) = 1.0;
  }
  ss.b = Eigen::VectorXd::Zero(n);
  ss.b(0) = 1.0;
  ss.c = Eigen::RowVectorXd::Zero(n);
  // pad numerator (degree < n) on the left
  const int offset = n - static_cast<int>(num.size());
  for (int j = 0; j < static_cast<int>(num.size()); ++j) {
    ss.c(offset + j) = num[static_cast<std::size_t>(j)];
  }
  return ss;
}

// exact ZOH discretization via the augmented matrix exponential
void zoh(const StateSpace& ss, double dt, Eigen::MatrixXd& ad, Eigen::VectorXd& bd) {
  const int n = static_cast<int>(ss.a.rows());
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = ss.a * dt;
  aug.topRightCorner(n, 1) = ss.b * dt;
  const Eigen::MatrixXd e = aug.exp();
  ad = e.topLeftCorner(n, n);
  bd = e.topRightCorner(n, 1);
}

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      r[i + j] += p[i] * q[j];
    }
  }
  return r;
}

}  // namespace

std::vector<double> simulate_ground_truth_driver(const DriverResponseConfig& cfg,
                                                 std::span<const double> lead, double dt,
                                                 std::uint64_t seed) {
  cfg.validate();
  if (lead.empty()) {
    throw std::invalid_argument("driver: empty lead series");
  }
  const double tw = cfg.natural_tc;
  // K (1 + Tz s) / (Tw^2 s^2 + 2 gamma Tw s + 1), controllable canonical
  StateSpace ss = tf_to_ss({cfg.gain * cfg.zero_tc, cfg.gain}, {tw * tw, 2.0 * cfg.damping * tw, 1.0});
  Eigen::MatrixXd ad;
  Eigen::VectorXd bd;
  zoh(ss, dt, ad, bd);

  const int delay_steps = static_cast<int>(std::llround(cfg.delay / dt));
  const double rho = std::exp(-dt / cfg.noise_tau);
  const double innovation = cfg.noise_std * std::sqrt(1.0 - rho * rho);

  Rng rng(seed);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  double w = 0.0;
  std::vector<double> out(lead.size());
  for (std::size_t k = 0; k < lead.size(); ++k) {
    const double y = ss.c.dot(x);
    w = rho * w + innovation * rng.gaussian();
    out[k] = std::clamp(y + cfg.nonlin_amp * std::sin(y / 5.0) + w, 0.0, 35.0);
    const std::size_t uk = (static_cast<int>(k) >= delay_steps) ? k - static_cast<std::size_t>(delay_steps) : 0;
    x = ad * x + bd * lead[uk];
  }
  return out;
}

hv::ArxCoefficients derive_arx(const DriverResponseConfig& cfg, double dt) {
  cfg.validate();
  const double tw = cfg.natural_tc;
  const double td = cfg.delay;

  std::vector<double> num{cfg.gain * cfg.zero_tc, cfg.gain};
  std::vector<double> den{tw * tw, 2.0 * cfg.damping * tw, 1.0};
  if (td > 0.0) {
    // second-order Pade approximation of the delay
    num = poly_mul(num, {td * td / 12.0, -td / 2.0, 1.0});
    den = poly_mul(den, {td * td / 12.0, td / 2.0, 1.0});
  }
  StateSpace ss = tf_to_ss(num, den);
  Eigen::MatrixXd ad;
  Eigen::VectorXd bd;
  zoh(ss, dt, ad, bd);

  // discrete transfer function via Faddeev-LeVerrier:
  // adj(zI - Ad) = sum_k M_k z^{n-k}, char(z) = z^n + a_1 z^{n-1} + ...
  const int n = static_cast<int>(ad.rows());
  hv::ArxCoefficients arx;
  Eigen::MatrixXd mk = Eigen::MatrixXd::Identity(n, n);
  double ak = 0.0;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      mk = ad * mk + ak * Eigen::MatrixXd::Identity(n, n);
    }
    arx.b[static_cast<std::size_t>(k - 1)] = ss.c * mk * bd;
    ak = -(ad * mk).trace() / static_cast<double>(k);
    arx.c[static_cast<std::size_t>(k - 1)] = ak;
  }
  return arx;
}

std::vector<std::size_t> stride_indices(std::size_t count, int percent) {
  if (percent <= 0 || percent > 100) {
    throw std::invalid_argument("stride_indices: percent out of range");
  }
  const std::size_t stride = static_cast<std::size_t>(std::llround(100.0 / percent));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < count; i += stride) {
    idx.push_back(i);
  }
  return idx;
}

CorpusManifest make_corpus(const CorpusOptions& opts, const std::filesystem::path& out_dir) {
  if (opts.train_sets < 0 || opts.train_sets > opts.n_sets) {
    throw std::invalid_argument("make_corpus: train/test split inconsistent");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("make_corpus: cannot create " + out_dir.string());
  }

  CorpusManifest manifest;
  manifest.stride = static_cast<int>(std::llround(100.0 / opts.stride_percent));
  manifest.train_sets = opts.train_sets;

  for (int s = 0; s < opts.n_sets; ++s) {
    ScenarioProfile prof = opts.profile;
    prof.seed = opts.seed * 1000 + static_cast<std::uint64_t>(s);
    const std::vector<double> lead = generate_lead_profile(prof);
    const std::vector<double> hvv =
        simulate_ground_truth_driver(opts.driver, lead, prof.dt, prof.seed + 500);

    io::Table table;
    table.columns = {"t", "v_H", "v_AV"};
    table.provenance = opts.provenance;
    table.provenance.push_back("set_seed = " + std::to_string(prof.seed));
    table.rows.reserve(lead.size());
    for (std::size_t k = 0; k < lead.size(); ++k) {
      table.rows.push_back({static_cast<double>(k) * prof.dt, hvv[k], lead[k]});
    }
    const std::string name = "set_" + std::to_string(s) + ".csv";
    io::write_csv(out_dir / name, table);

    CorpusManifest::Entry e;
    e.file = name;
    e.role = (s < opts.train_sets) ? "train_source" : "test";
    e.seed = prof.seed;
    e.samples = lead.size();
    manifest.entries.push_back(std::move(e));
  }

  std::ofstream mf(out_dir / "manifest.txt");
  if (!mf) {
    throw IoError("make_corpus: cannot write manifest");
  }
  mf << "# corpus manifest\n";
  for (const std::string& line : opts.provenance) {
    mf << "# " << line << "\n";
  }
  mf << "sets = " << opts.n_sets << "\n";
  mf << "train_sets = " << opts.train_sets << "\n";
  mf << "stride = " << manifest.stride << "\n";
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    mf << "set." << i << ".file = " << e.file << "\n";
    mf << "set." << i << ".role = " << e.role << "\n";
    mf << "set." << i << ".seed = " << e.seed << "\n";
    mf << "set." << i << ".samples = " << e.samples << "\n";
  }
  return manifest;
}

CorpusManifest read_manifest(const std::filesystem::path& manifest_path) {
  const io::Config cfg = io::Config::parse_file(manifest_path);
  CorpusManifest m;
  const int sets = static_cast<int>(cfg.integer("sets"));
  m.train_sets = static_cast<int>(cfg.integer("train_sets"));
  m.stride = static_cast<int>(cfg.integer("stride"));
  for (int i = 0; i < sets; ++i) {
    const std::string p = "set." + std::to_string(i) + ".";
    CorpusManifest::Entry e;
    e.file = cfg.str(p + "file");
    e.role = cfg.str(p + "role");
    e.seed = static_cast<std::uint64_t>(cfg.integer(p + "seed"));
    e.samples = static_cast<std::size_t>(cfg.integer(p + "samples"));
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace platoon::datagen
