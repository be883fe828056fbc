// Timing comparison of the serial reference kernels against the OpenMP
// variants, plus exact-vs-sparse prediction cost. Not a correctness test;
// the equivalence checks live in tests/.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "platoon/gp.hpp"
#include "platoon/rng.hpp"
#include "platoon/sparse_gp.hpp"

using namespace platoon;

namespace {

gp::Dataset random_dataset(Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  gp::Inputs x(2, m);
  Eigen::VectorXd d(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(0, i) = 10.0 + 10.0 * rng.uniform();
    x(1, i) = 10.0 + 10.0 * rng.uniform();
    d(i) = std::sin(x(0, i) / 3.0) + 0.1 * rng.gaussian();
  }
  return gp::Dataset(std::move(x), std::move(d));
}

template <typename F>
double time_it(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads: %d\n\n", omp_get_max_threads());

  gp::Hyperparams h;
  h.signal_var = 1.0;
  h.length_sq << 4.0, 4.0;
  h.noise_var = 0.01;

  std::printf("%-26s %10s %10s %8s\n", "kernel", "serial(s)", "openmp(s)", "speedup");
  for (Eigen::Index m : {500, 1000, 2000}) {
    const gp::Dataset data = random_dataset(m, 42);
    Eigen::MatrixXd ref, par;
    const double ts = time_it([&] { ref = gp::gram_matrix_serial(data.inputs, h); });
    const double tp = time_it([&] { par = gp::gram_matrix(data.inputs, h); });
    std::printf("gram m=%-20ld %10.4f %10.4f %8.2f  (identical: %s)\n", static_cast<long>(m), ts,
                tp, ts / tp, (ref - par).cwiseAbs().maxCoeff() == 0.0 ? "yes" : "NO");
  }

  const gp::Dataset data = random_dataset(2000, 7);
  const gp::Model model = gp::Model::build(data, h);
  const gp::Dataset queries = random_dataset(2000, 8);

  std::vector<gp::Prediction> a, b;
  const double ts = time_it([&] { a = model.predict_batch_serial(queries.inputs); });
  const double tp = time_it([&] { b = model.predict_batch(queries.inputs); });
  std::printf("predict_batch m=2000       %10.4f %10.4f %8.2f\n", ts, tp, ts / tp);

  const gp::InducingSet z = gp::select_inducing(model, 20, {.max_iters = 0});
  const gp::SparseModel sparse = gp::fic_precompute(h, z, data);
  std::vector<gp::Prediction> c;
  const double tf = time_it([&] { c = sparse.predict_batch_serial(queries.inputs); });
  std::printf("\nper-prediction: exact %.3g s, sparse(20) %.3g s, ratio %.1fx\n",
              ts / static_cast<double>(queries.inputs.cols()),
              tf / static_cast<double>(queries.inputs.cols()), ts / tf);
  return 0;
}
