#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regen/experiment.hpp"
#include "regen/levy_model.hpp"
#include "regen/validation.hpp"

namespace regen::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LevyModel parse_model(const std::string& text) {
  try {
    return LevyModel::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--model: ") + e.what());
  }
}

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
  try {
    return parse_number_list(text);
  } catch (const std::exception& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "master seed (determines every random output)");
  cmd->add_option("--threads", c.threads, "worker threads (default: hardware, capped by REGEN_LIL_THREADS)");
  cmd->add_option("--out", c.out_dir, "directory for manifest.txt, results.csv and summary.json");
}

int emit(const ExperimentResult& result, const Common& c, std::ostream& out) {
  if (c.out_dir.empty()) {
    out << records_to_csv(result.records);
  } else {
    persist(result, c.out_dir);
    out << result.summary_json();
  }
  return kExitOk;
}

RunOptions options(const Common& c) { return RunOptions{c.threads}; }

int phi_table(const std::string& model_text, const std::string& t_text, std::ostream& out) {
  const LevyModel model = parse_model(model_text);
  const std::vector<double> ts = parse_list("--t", t_text);
  const bool family = !model.is_compound_poisson();
  out << "t,phi,phi_log_derivative,phi_asymptotic,asymptotic_error,centering,clt_normalization,"
         "lil_normalization\n";
  for (double t : ts) {
    if (!(t > 0.0)) throw UsageError("--t: entries must be > 0");
    const double value = phi(model, t, PhiMethod::quadrature);
    const double deriv = phi_log_derivative(model, std::log(t));
    const double asym = family ? phi_asymptotic(model, t) : NAN;
    const double center = t >= 1.0 && family ? centering(model, t) : NAN;
    const double clt =
        family && t > 1.0 ? theorem_normalization(model, t, NormalizationVariant::clt) : NAN;
    const double lil = family && t > std::exp(std::exp(1.0))
                           ? theorem_normalization(model, t, NormalizationVariant::lil)
                           : NAN;
    out << num(t) << ',' << num(value) << ',' << num(deriv) << ',' << num(asym) << ','
        << num(value - asym) << ',' << num(center) << ',' << num(clt) << ',' << num(lil) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regenerative composition structures: special functions, samplers and "
               "limit-theorem experiments"};
  app.name("regen_lil");
  app.require_subcommand(1, 1);

  std::string model_text, t_text, n_text, manifest_path, kernel = "power";
  std::uint64_t reps = 1, nmax = 0;
  int reps_signed = 0;
  double eps = 0.0, alpha = 1.0, horizon = 0.0, step = 1.0;
  Common common;

  auto* phi_cmd = app.add_subcommand("phi-table", "tabulate Phi, phi', expansion error, centering "
                                                  "and normalizations");
  phi_cmd->add_option("--model", model_text, "model descriptor, e.g. \"kind=gamma theta=1 lambda=1\"")
      ->required();
  phi_cmd->add_option("--t", t_text, "list of t values: 1e3,1e4 or geo:lo:hi:count")->required();

  auto* clt_cmd = app.add_subcommand("clt", "normalized K_n ensembles from the exact sampler");
  clt_cmd->add_option("--model", model_text, "model descriptor")->required();
  clt_cmd->add_option("--n", n_text, "list of n values")->required();
  clt_cmd->add_option("--reps", reps_signed, "replicates per n")->required();
  add_common(clt_cmd, common);

  auto* lil_cmd = app.add_subcommand("lil", "coupled trajectories n -> K_n with iterated-logarithm "
                                            "normalization (diagnostic)");
  lil_cmd->add_option("--model", model_text, "model descriptor")->required();
  lil_cmd->add_option("--nmax", nmax, "largest n (for cp models: largest log-scale time t)")
      ->required();
  lil_cmd->add_option("--eps", eps, "small-jump truncation; 0 selects it automatically");
  lil_cmd->add_option("--reps", reps_signed, "number of trajectories");
  add_common(lil_cmd, common);

  auto* bm_cmd = app.add_subcommand("bm-lil", "Brownian convolution trajectories (diagnostic)");
  bm_cmd->add_option("--alpha", alpha, "kernel index alpha > 0")->required();
  bm_cmd->add_option("--T", horizon, "horizon")->required();
  bm_cmd->add_option("--step", step, "grid spacing")->required();
  bm_cmd->add_option("--kernel", kernel, "power or power_log");
  bm_cmd->add_option("--reps", reps_signed, "number of trajectories");
  add_common(bm_cmd, common);

  auto* validate_cmd = app.add_subcommand("validate", "run the invariant suite");
  add_common(validate_cmd, common);

  auto* replay_cmd = app.add_subcommand("replay", "re-run a persisted manifest");
  replay_cmd->add_option("--manifest", manifest_path, "manifest.txt written by an earlier run")
      ->required();
  add_common(replay_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto checked_reps = [&](bool given, int fallback) -> std::uint64_t {
    const int r = given ? reps_signed : fallback;
    if (r < 1) throw UsageError("--reps must be a positive integer, got " + std::to_string(r));
    return static_cast<std::uint64_t>(r);
  };

  try {
    if (*phi_cmd) return phi_table(model_text, t_text, out);

    if (*validate_cmd) {
      const bool ok = report_checks(run_validation_suite(common.seed), out);
      return ok ? kExitOk : kExitValidation;
    }

    ExperimentManifest manifest;
    if (*clt_cmd) {
      reps = checked_reps(true, 0);
      manifest = ExperimentManifest::for_model(ExperimentKind::clt, parse_model(model_text));
      manifest.n_grid = parse_list("--n", n_text);
    } else if (*lil_cmd) {
      reps = checked_reps(lil_cmd->count("--reps") > 0, 1);
      const LevyModel model = parse_model(model_text);
      manifest = ExperimentManifest::for_model(ExperimentKind::lil, model);
      const double lo = model.is_compound_poisson() ? 3.0 : 16.0;
      if (!(static_cast<double>(nmax) >= lo))
        throw UsageError("--nmax must be at least " + num(lo));
      manifest.n_grid = geometric_checkpoints(lo, static_cast<double>(nmax), 1.05, 1.0);
      manifest.epsilon = eps;
    } else if (*bm_cmd) {
      reps = checked_reps(bm_cmd->count("--reps") > 0, 1);
      if (!(step > 0.0)) throw UsageError("--step must be > 0");
      if (!(horizon >= 3.0)) throw UsageError("--T must be at least 3");
      manifest.kind = ExperimentKind::bm_lil;
      manifest.model = "none";
      manifest.alpha = alpha;
      manifest.step = step;
      manifest.kernel = kernel;
      manifest.n_grid = geometric_checkpoints(3.0, horizon, 1.05, step);
    } else {
      manifest = load_manifest(manifest_path);
      reps = manifest.replicates;
      if (replay_cmd->count("--seed") > 0)
        throw UsageError("--seed: replay takes the seed from the manifest");
    }
    if (!*replay_cmd) manifest.master_seed = common.seed;
    manifest.replicates = reps;
    manifest.validate();
    return emit(run_experiment(manifest, options(common)), common, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ManifestError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace regen::cli
