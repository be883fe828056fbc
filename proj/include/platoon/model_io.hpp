#ifndef PLATOON_MODEL_IO_HPP
#define PLATOON_MODEL_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "platoon/gp.hpp"
#include "platoon/sparse_gp.hpp"

namespace platoon::io {

/// Self-describing JSON files so training and simulation can be separate
/// invocations. Full models carry hyperparameters, training inputs, alpha and
/// the Cholesky factor; sparse models mirror that plus the inducing set.
void save_model(const std::filesystem::path& path, const gp::Model& model,
                const std::vector<std::string>& provenance = {});
void save_model(const std::filesystem::path& path, const gp::SparseModel& model,
                const std::vector<std::string>& provenance = {});

gp::Model load_full_model(const std::filesystem::path& path);
gp::SparseModel load_sparse_model(const std::filesystem::path& path);

/// "full" or "sparse" without loading the numeric payload.
std::string model_kind(const std::filesystem::path& path);

}  // namespace platoon::io

#endif
