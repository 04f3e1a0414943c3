#include "regen/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "regen/brownian.hpp"
#include "regen/composition.hpp"
#include "regen/random.hpp"

namespace regen {

namespace {

constexpr double kBiasThreshold = 0.5;

const char* const kNormalizationNote =
    "normalization uses (2 sigma^2 mu^-3 (2 beta + 1)^-1 log n logloglog n)^(1/2) Phi(n); "
    "the specialized gamma-family forms 2 lambda (log n)^3 logloglog n and "
    "2 |psi''(lambda)| psi'(lambda)^-3 (log n)^3 logloglog n drop the factor "
    "(2 beta + 1)^-1 = 1/3 and are not used";
const char* const kMeanJumpNote =
    "the mean-jump constant m in the compound Poisson normalization (2 s^2 m^-3 t log log t)^(1/2) "
    "is taken to be E[xi]; s^2 = Var[xi]";
const char* const kApproxNote =
    "compound Poisson K is replaced by the approximation sum "
    "sum_k 1{xi_1 + ... + xi_(k-1) + |log(1 - e^-xi_k)| <= t}, standing in for K at n = e^t";
const char* const kDiagnosticNote =
    "iterated-logarithm scales are out of reach at these sizes; normalized trajectories are "
    "diagnostics, not assertions";

void check_unique_streams(const std::vector<std::uint64_t>& ids) {
  if (std::set<std::uint64_t>(ids.begin(), ids.end()).size() != ids.size())
    throw std::logic_error("stream id collision between replicates");
}

std::vector<GridSummary> summarize_grid(const std::vector<ResultRecord>& records,
                                        const std::vector<double>& grid, std::uint64_t reps,
                                        std::optional<double> ks_variance) {
  std::vector<GridSummary> out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::vector<double> z(reps);
    for (std::uint64_t i = 0; i < reps; ++i) z[i] = records[j * reps + i].normalized;
    GridSummary s;
    s.n = grid[j];
    s.count = reps;
    s.mean = sample_mean(z);
    s.variance = reps > 1 ? sample_variance(z) : 0.0;
    if (ks_variance && reps >= 20 && s.variance > 0.0) s.ks = ks_statistic(z, *ks_variance);
    out.push_back(s);
  }
  return out;
}

TrajectorySummary summarize_trajectory(std::uint64_t replicate, std::uint64_t stream,
                                       const std::vector<ResultRecord>& records) {
  RunningExtremes ext;
  for (const ResultRecord& r : records) ext.append(r.normalized);
  return {replicate, stream, ext.running_max(), ext.running_min(), ext.coverage(), ext.count(),
          ext.hits()};
}

unsigned resolve_threads(const RunOptions& opts) {
  return opts.threads > 0 ? opts.threads : default_worker_count();
}

}  // namespace

unsigned default_worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("REGEN_LIL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap <= 0)
      throw std::invalid_argument(std::string("REGEN_LIL_THREADS must be a positive integer, got '") +
                                  env + "'");
    n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& body) {
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto loop = [&] {
    for (std::uint64_t i; !failed && (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ExperimentResult run_clt_experiment(const ExperimentManifest& manifest, const RunOptions& opts) {
  if (manifest.kind != ExperimentKind::clt) throw ManifestError("kind must be clt");
  manifest.validate();
  const LevyModel model = manifest.levy_model();
  const DecrementSampler sampler(model);
  const auto& grid = manifest.n_grid;
  const std::uint64_t reps = manifest.replicates;

  std::vector<double> center = centering_grid(model, grid);
  std::vector<double> scale;
  for (double n : grid) scale.push_back(theorem_normalization(model, n, NormalizationVariant::clt));

  ExperimentResult result;
  result.manifest = manifest;
  result.records.resize(grid.size() * reps);
  std::vector<std::uint64_t> streams(reps);
  parallel_for(reps, resolve_threads(opts), [&](std::uint64_t i) {
    const std::uint64_t id = derive_stream_id("clt", i);
    streams[i] = id;
    RandomStream rng(manifest.master_seed, id);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto k = static_cast<double>(
          sampler.sample_block_count(static_cast<std::uint64_t>(grid[j]), rng));
      result.records[j * reps + i] = {grid[j], k, center[j], scale[j],
                                      (k - center[j]) / scale[j], i, id};
    }
  });
  check_unique_streams(streams);
  const double limit_variance = 1.0 / (2.0 * model.beta() + 1.0);
  result.grid = summarize_grid(result.records, grid, reps, limit_variance);
  result.notes.push_back("limit law Normal(0, (2 beta + 1)^-1); convergence is logarithmic in n, "
                         "so per-n summaries are trend diagnostics");
  return result;
}

ExperimentResult run_lil_experiment(const ExperimentManifest& manifest, const RunOptions& opts) {
  if (manifest.kind != ExperimentKind::lil) throw ManifestError("kind must be lil");
  manifest.validate();
  const LevyModel model = manifest.levy_model();
  const auto& grid = manifest.n_grid;
  const std::uint64_t reps = manifest.replicates;

  ExperimentResult result;
  result.manifest = manifest;
  result.diagnostic = true;
  result.notes.push_back(kDiagnosticNote);

  std::vector<double> center, scale;
  if (model.is_compound_poisson()) {
    for (double t : grid) {
      center.push_back(cp_centering(model.jump(), t));
      scale.push_back(cp_lil_normalization(model.jump(), t));
    }
    result.notes.push_back(kMeanJumpNote);
    result.notes.push_back(kApproxNote);
  } else {
    const auto n_max = static_cast<std::uint64_t>(grid.back());
    double eps = manifest.epsilon;
    if (eps == 0.0) eps = select_truncation(model, n_max, kBiasThreshold);
    const double bias = truncation_bias_bound(model, n_max, eps);
    if (bias > kBiasThreshold) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "epsilon: truncation bias bound %.4g exceeds %.2g expected blocks at n = %.0f; "
                    "use epsilon <= %.3g",
                    bias, kBiasThreshold, grid.back(),
                    select_truncation(model, n_max, kBiasThreshold));
      throw ManifestError(buf);
    }
    result.epsilon_used = eps;
    result.truncation_bias = bias;
    center = centering_grid(model, grid);
    for (double n : grid) scale.push_back(theorem_normalization(model, n, NormalizationVariant::lil));
    result.notes.push_back(kNormalizationNote);
  }

  result.records.resize(grid.size() * reps);
  std::vector<std::uint64_t> streams(reps);
  parallel_for(reps, resolve_threads(opts), [&](std::uint64_t i) {
    const std::uint64_t id = derive_stream_id("lil", i);
    streams[i] = id;
    RandomStream rng(manifest.master_seed, id);
    auto emit = [&](std::size_t j, double raw) {
      result.records[j * reps + i] = {grid[j], raw, center[j], scale[j],
                                      (raw - center[j]) / scale[j], i, id};
    };
    if (model.is_compound_poisson()) {
      const CpApproxTrajectory traj(model.jump(), grid.back(), rng);
      for (std::size_t j = 0; j < grid.size(); ++j)
        emit(j, static_cast<double>(traj.count_at(grid[j])));
    } else {
      PathwiseTrajectory traj(model, result.epsilon_used, rng);
      for (std::size_t j = 0; j < grid.size(); ++j)
        emit(j, static_cast<double>(traj.extend_to(static_cast<std::uint64_t>(grid[j]))));
    }
  });
  check_unique_streams(streams);

  result.grid = summarize_grid(result.records, grid, reps, std::nullopt);
  for (std::uint64_t i = 0; i < reps; ++i) {
    std::vector<ResultRecord> traj;
    for (std::size_t j = 0; j < grid.size(); ++j) traj.push_back(result.records[j * reps + i]);
    result.trajectories.push_back(summarize_trajectory(i, streams[i], traj));
  }
  return result;
}

ExperimentResult run_bm_lil_experiment(const ExperimentManifest& manifest, const RunOptions& opts) {
  if (manifest.kind != ExperimentKind::bm_lil) throw ManifestError("kind must be bm_lil");
  manifest.validate();
  const KernelSpec kernel = KernelSpec::parse(manifest.kernel, manifest.alpha);
  std::vector<double> grid;
  for (double t : manifest.n_grid) {
    const double snapped = std::round(t / manifest.step) * manifest.step;
    if (!(snapped > std::exp(1.0)))
      throw ManifestError("n_grid: checkpoint " + std::to_string(t) + " rounds below e");
    if (grid.empty() || snapped > grid.back()) grid.push_back(snapped);
  }
  const std::uint64_t reps = manifest.replicates;
  std::vector<double> scale;
  for (double t : grid) scale.push_back(bm_lil_normalization(kernel, t));

  ExperimentResult result;
  result.manifest = manifest;
  result.diagnostic = true;
  result.notes.push_back(kDiagnosticNote);
  result.records.resize(grid.size() * reps);
  std::vector<std::uint64_t> streams(reps);
  parallel_for(reps, resolve_threads(opts), [&](std::uint64_t i) {
    const std::uint64_t id = derive_stream_id("bm_lil", i);
    streams[i] = id;
    RandomStream rng(manifest.master_seed, id);
    // The whole path is kept: at step 1 and T = 1e6 that is 8 MB.
    const BrownianPath path = simulate_bm(grid.back(), manifest.step, rng);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = convolve_bm(path, kernel, grid[j]);
      result.records[j * reps + i] = {grid[j], v, 0.0, scale[j], v / scale[j], i, id};
    }
  });
  check_unique_streams(streams);
  result.grid = summarize_grid(result.records, grid, reps, std::nullopt);
  for (std::uint64_t i = 0; i < reps; ++i) {
    std::vector<ResultRecord> traj;
    for (std::size_t j = 0; j < grid.size(); ++j) traj.push_back(result.records[j * reps + i]);
    result.trajectories.push_back(summarize_trajectory(i, streams[i], traj));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentManifest& manifest, const RunOptions& opts) {
  switch (manifest.kind) {
    case ExperimentKind::clt: return run_clt_experiment(manifest, opts);
    case ExperimentKind::lil: return run_lil_experiment(manifest, opts);
    case ExperimentKind::bm_lil: return run_bm_lil_experiment(manifest, opts);
    case ExperimentKind::validate: break;
  }
  throw ManifestError("kind: validate manifests are not runnable experiments");
}

std::string ExperimentResult::summary_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = manifest.schema_version;
  j["kind"] = std::string(to_string(manifest.kind));
  if (manifest.kind != ExperimentKind::bm_lil) j["model"] = manifest.levy_model().descriptor();
  j["replicates"] = manifest.replicates;
  j["master_seed"] = manifest.master_seed;
  j["diagnostic"] = diagnostic;
  if (manifest.kind == ExperimentKind::lil && manifest.model != "cp") {
    j["epsilon"] = epsilon_used;
    j["truncation_bias_bound"] = truncation_bias;
  }
  if (manifest.kind == ExperimentKind::bm_lil) {
    j["kernel"] = manifest.kernel;
    j["alpha"] = manifest.alpha;
    j["step"] = manifest.step;
  }
  auto& g = j["grid"] = nlohmann::ordered_json::array();
  for (const GridSummary& s : grid) {
    nlohmann::ordered_json row{{"n", s.n}, {"count", s.count}, {"mean", s.mean},
                               {"variance", s.variance}};
    if (s.ks) {
      row["ks_distance"] = s.ks->distance;
      row["ks_critical_1pct"] = s.ks->critical;
      row["ks_pass_1pct"] = s.ks->pass_1pct;
    }
    g.push_back(row);
  }
  if (!trajectories.empty()) {
    auto& t = j["trajectories"] = nlohmann::ordered_json::array();
    for (const TrajectorySummary& s : trajectories) {
      t.push_back({{"replicate", s.replicate},
                   {"stream_id", s.stream_id},
                   {"running_max", s.running_max},
                   {"running_min", s.running_min},
                   {"count", s.count},
                   {"coverage", s.coverage},
                   {"coverage_hits", s.hits}});
    }
  }
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

}  // namespace regen
