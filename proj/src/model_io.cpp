#include "platoon/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace platoon::io {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(v(i));
  }
  return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

json inputs_to_json(const gp::Inputs& x) {
  json a = json::array();
  for (int d = 0; d < 2; ++d) {
    json row = json::array();
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      row.push_back(x(d, i));
    }
    a.push_back(std::move(row));
  }
  return a;
}

gp::Inputs inputs_from_json(const json& a) {
  if (a.size() != 2) {
    throw IoError("model: inputs must have two rows");
  }
  const std::size_t m = a[0].size();
  gp::Inputs x(2, static_cast<Eigen::Index>(m));
  for (int d = 0; d < 2; ++d) {
    for (std::size_t i = 0; i < m; ++i) {
      x(d, static_cast<Eigen::Index>(i)) = a[d][i].get<double>();
    }
  }
  return x;
}

// lower triangle only, row by row
json chol_to_json(const Eigen::MatrixXd& l) {
  json a = json::array();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j <= i; ++j) {
      row.push_back(l(i, j));
    }
    a.push_back(std::move(row));
  }
  return a;
}

Eigen::MatrixXd chol_from_json(const json& a) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = a[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != i + 1) {
      throw IoError("model: malformed Cholesky triangle");
    }
    for (Eigen::Index j = 0; j <= i; ++j) {
      l(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  return l;
}

json hyper_to_json(const gp::Hyperparams& h) {
  return json{{"signal_var", h.signal_var},
              {"length_sq", {h.length_sq(0), h.length_sq(1)}},
              {"noise_var", h.noise_var}};
}

gp::Hyperparams hyper_from_json(const json& j) {
  gp::Hyperparams h;
  h.signal_var = j.at("signal_var").get<double>();
  h.length_sq << j.at("length_sq")[0].get<double>(), j.at("length_sq")[1].get<double>();
  h.noise_var = j.at("noise_var").get<double>();
  return h;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("model: cannot open " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("model: parse failure in " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "platoon-gp-model") {
    throw IoError("model: " + path.string() + " is not a model file");
  }
  return j;
}

void dump_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("model: cannot write " + path.string());
  }
  out << j.dump(1, '\t') << "\n";
  if (!out) {
    throw IoError("model: write failed for " + path.string());
  }
}

}  // namespace

void save_model(const std::filesystem::path& path, const gp::Model& model,
                const std::vector<std::string>& provenance) {
  json j{{"format", "platoon-gp-model"},
         {"version", 1},
         {"kind", "full"},
         {"hyperparams", hyper_to_json(model.hyperparams())},
         {"inputs", inputs_to_json(model.data().inputs)},
         {"targets", vector_to_json(model.data().targets)},
         {"alpha", vector_to_json(model.alpha())},
         {"chol_jitter", model.factor().jitter},
         {"chol", chol_to_json(model.factor().L)},
         {"provenance", provenance}};
  dump_json(path, j);
}

void save_model(const std::filesystem::path& path, const gp::SparseModel& model,
                const std::vector<std::string>& provenance) {
  json j{{"format", "platoon-gp-model"},
         {"version", 1},
         {"kind", "sparse"},
         {"hyperparams", hyper_to_json(model.hyperparams())},
         {"inducing", inputs_to_json(model.inducing().points)},
         {"weights", vector_to_json(model.weights())},
         {"chol_kuu", chol_to_json(model.chol_kuu())},
         {"chol_a", chol_to_json(model.chol_a())},
         {"provenance", provenance}};
  dump_json(path, j);
}

gp::Model load_full_model(const std::filesystem::path& path) {
  const json j = load_json(path);
  if (j.value("kind", "") != "full") {
    throw IoError("model: " + path.string() + " is not a full GP model");
  }
  gp::Dataset data(inputs_from_json(j.at("inputs")), vector_from_json(j.at("targets")));
  linalg::CholFactor chol;
  chol.L = chol_from_json(j.at("chol"));
  chol.jitter = j.value("chol_jitter", 0.0);
  return gp::Model::from_parts(std::move(data), hyper_from_json(j.at("hyperparams")),
                               std::move(chol), vector_from_json(j.at("alpha")));
}

gp::SparseModel load_sparse_model(const std::filesystem::path& path) {
  const json j = load_json(path);
  if (j.value("kind", "") != "sparse") {
    throw IoError("model: " + path.string() + " is not a sparse GP model");
  }
  return gp::SparseModel::from_factors(
      hyper_from_json(j.at("hyperparams")), gp::InducingSet{inputs_from_json(j.at("inducing"))},
      chol_from_json(j.at("chol_kuu")), chol_from_json(j.at("chol_a")),
      vector_from_json(j.at("weights")));
}

std::string model_kind(const std::filesystem::path& path) {
  return load_json(path).value("kind", "");
}

}  // namespace platoon::io
