#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "regen/experiment.hpp"

namespace regen {

namespace {

constexpr std::string_view kCsvHeader = "n,raw,centering,normalization,normalized,replicate,stream_id";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double to_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  // from_chars does not accept a leading '+'.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ManifestError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  return v;
}

std::uint64_t to_u64(std::string_view text, std::string_view what) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ManifestError("cannot parse " + std::string(what) + " from '" + std::string(text) +
                        "' (expected a nonnegative integer)");
  return v;
}

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) ? r : v;
}

bool is_integer(double v) { return std::floor(v) == v; }

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::clt: return "clt";
    case ExperimentKind::lil: return "lil";
    case ExperimentKind::bm_lil: return "bm_lil";
    case ExperimentKind::validate: return "validate";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  text = trim(text);
  if (text == "clt") return ExperimentKind::clt;
  if (text == "lil") return ExperimentKind::lil;
  if (text == "bm_lil") return ExperimentKind::bm_lil;
  if (text == "validate") return ExperimentKind::validate;
  throw ManifestError("unknown experiment kind '" + std::string(text) + "'");
}

SchemaVersionError::SchemaVersionError(int found, int expected)
    : ManifestError("manifest schema_version " + std::to_string(found) +
                    " does not match the supported schema_version " + std::to_string(expected)),
      found_(found),
      expected_(expected) {}

std::vector<double> parse_number_list(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ManifestError("empty number list");
  if (text.substr(0, 4) == "geo:") {
    std::vector<std::string_view> parts;
    std::string_view rest = text.substr(4);
    for (;;) {
      const auto colon = rest.find(':');
      parts.push_back(rest.substr(0, colon));
      if (colon == std::string_view::npos) break;
      rest.remove_prefix(colon + 1);
    }
    if (parts.size() != 3)
      throw ManifestError("geometric range must look like geo:lo:hi:count, got '" +
                          std::string(text) + "'");
    const double lo = to_double(parts[0], "geo lower end");
    const double hi = to_double(parts[1], "geo upper end");
    const std::uint64_t count = to_u64(parts[2], "geo count");
    if (!(lo > 0.0) || !(hi >= lo) || count == 0)
      throw ManifestError("geometric range needs 0 < lo <= hi and count >= 1");
    if (count == 1) return {lo};
    std::vector<double> out;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(count - 1);
      out.push_back(snap(lo * std::pow(hi / lo, frac)));
    }
    return out;
  }
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(to_double(text.substr(start, comma == std::string_view::npos ? comma : comma - start),
                            "list entry"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_number_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += shortest(values[i]);
  }
  return out;
}

std::vector<double> geometric_checkpoints(double lo, double hi, double ratio, double quantum) {
  if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0) || !(quantum > 0.0))
    throw std::invalid_argument("geometric_checkpoints: need 0 < lo <= hi, ratio > 1, quantum > 0");
  std::vector<double> out;
  for (double t = lo; t <= hi * (1.0 + 1e-12); t *= ratio) {
    const double q = std::ceil(t / quantum - 1e-9) * quantum;
    if (q > hi * (1.0 + 1e-12)) break;
    if (out.empty() || q > out.back()) out.push_back(q);
  }
  if (out.empty() || out.back() < hi) {
    const double q = std::floor(hi / quantum + 1e-9) * quantum;
    if (out.empty() || q > out.back()) out.push_back(q);
  }
  return out;
}

LevyModel ExperimentManifest::levy_model() const {
  try {
    if (model == "gamma") return LevyModel::gamma(theta, lambda);
    if (model == "gammalike") return LevyModel::gamma_like(theta, lambda);
    if (model == "cp") {
      if (jump == "exp") return LevyModel::compound_poisson(JumpDistribution::exponential(rate));
      return LevyModel::compound_poisson(JumpDistribution::parse(jump));
    }
  } catch (const ManifestError&) {
    throw;
  } catch (const std::exception& e) {
    throw ManifestError(std::string("model: ") + e.what());
  }
  throw ManifestError("model: expected gamma, gammalike or cp, got '" + model + "'");
}

ExperimentManifest ExperimentManifest::for_model(ExperimentKind kind, const LevyModel& m) {
  ExperimentManifest out;
  out.kind = kind;
  out.model = std::string(to_string(m.kind()));
  if (m.is_compound_poisson()) {
    const JumpDistribution& j = m.jump();
    if (j.kind() == JumpDistribution::Kind::exponential) {
      out.jump = "exp";
      out.rate = j.rate();
    } else {
      out.jump = j.spec();
    }
  } else {
    out.theta = m.theta();
    out.lambda = m.lambda();
  }
  return out;
}

void ExperimentManifest::validate() const {
  if (schema_version != kSchemaVersion) throw SchemaVersionError(schema_version, kSchemaVersion);
  if (replicates == 0) throw ManifestError("replicates must be >= 1");
  if (n_grid.empty()) throw ManifestError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!std::isfinite(n_grid[i]) || !(n_grid[i] > 0.0))
      throw ManifestError("n_grid entries must be finite and > 0");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1]))
      throw ManifestError("n_grid must be strictly increasing");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ManifestError("epsilon must be >= 0");

  const double e = std::exp(1.0);
  switch (kind) {
    case ExperimentKind::validate: return;
    case ExperimentKind::bm_lil:
      if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ManifestError("alpha must be > 0");
      if (!(step > 0.0) || !std::isfinite(step)) throw ManifestError("step must be > 0");
      if (kernel != "power" && kernel != "power_log")
        throw ManifestError("kernel must be power or power_log");
      if (!(n_grid.front() > e)) throw ManifestError("n_grid entries must exceed e for bm_lil");
      return;
    case ExperimentKind::clt: {
      const LevyModel m = levy_model();
      if (m.is_compound_poisson())
        throw ManifestError("model: clt needs a gamma or gammalike model");
      for (double n : n_grid)
        if (!is_integer(n) || n < 10.0) throw ManifestError("n_grid entries must be integers >= 10");
      return;
    }
    case ExperimentKind::lil: {
      const LevyModel m = levy_model();
      if (m.is_compound_poisson()) {
        if (!(n_grid.front() > e)) throw ManifestError("n_grid (time t) entries must exceed e");
        return;
      }
      for (double n : n_grid)
        if (!is_integer(n) || !(n > std::exp(e)))
          throw ManifestError("n_grid entries must be integers > e^e");
      return;
    }
  }
}

std::string ExperimentManifest::to_text() const {
  std::ostringstream out;
  out << "# regen_lil experiment manifest\n";
  out << "schema_version = " << schema_version << '\n';
  out << "kind = " << to_string(kind) << '\n';
  out << "model = " << model << '\n';
  out << "theta = " << shortest(theta) << '\n';
  out << "lambda = " << shortest(lambda) << '\n';
  out << "jump = " << jump << '\n';
  out << "rate = " << shortest(rate) << '\n';
  out << "n_grid = " << format_number_list(n_grid) << '\n';
  out << "replicates = " << replicates << '\n';
  out << "master_seed = " << master_seed << '\n';
  out << "epsilon = " << shortest(epsilon) << '\n';
  if (kind == ExperimentKind::bm_lil) {
    out << "alpha = " << shortest(alpha) << '\n';
    out << "step = " << shortest(step) << '\n';
    out << "kernel = " << kernel << '\n';
  }
  return out.str();
}

ExperimentManifest ExperimentManifest::from_text(std::string_view text) {
  std::map<std::string, std::string, std::less<>> fields;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ManifestError("manifest line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (fields.count(key)) throw ManifestError("manifest: duplicate key " + key);
    fields.emplace(key, std::string(trim(line.substr(eq + 1))));
  }

  auto version = fields.find("schema_version");
  if (version == fields.end()) throw ManifestError("manifest: missing schema_version");
  const auto v = static_cast<int>(to_u64(version->second, "schema_version"));
  if (v != kSchemaVersion) throw SchemaVersionError(v, kSchemaVersion);

  ExperimentManifest m;
  m.schema_version = v;
  for (const auto& [key, value] : fields) {
    if (key == "schema_version") continue;
    if (key == "kind") m.kind = parse_experiment_kind(value);
    else if (key == "model") m.model = value;
    else if (key == "theta") m.theta = to_double(value, key);
    else if (key == "lambda") m.lambda = to_double(value, key);
    else if (key == "jump") m.jump = value;
    else if (key == "rate") m.rate = to_double(value, key);
    else if (key == "n_grid") m.n_grid = parse_number_list(value);
    else if (key == "replicates") m.replicates = to_u64(value, key);
    else if (key == "master_seed") m.master_seed = to_u64(value, key);
    else if (key == "epsilon") m.epsilon = to_double(value, key);
    else if (key == "alpha") m.alpha = to_double(value, key);
    else if (key == "step") m.step = to_double(value, key);
    else if (key == "kernel") m.kernel = value;
    else throw ManifestError("manifest: unknown key '" + key + "'");
  }
  for (const char* required : {"kind", "n_grid", "replicates", "master_seed"})
    if (!fields.count(required)) throw ManifestError(std::string("manifest: missing ") + required);
  return m;
}

std::string records_to_csv(const std::vector<ResultRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  char buf[256];
  for (const ResultRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%" PRIu64 ",%" PRIu64 "\n", r.n,
                  r.raw, r.centering, r.normalization, r.normalized, r.replicate, r.stream_id);
    out += buf;
  }
  return out;
}

std::vector<ResultRecord> records_from_csv(std::string_view text) {
  const auto nl = text.find('\n');
  if (trim(text.substr(0, nl)) != kCsvHeader)
    throw ManifestError("results CSV: unexpected header");
  std::vector<ResultRecord> out;
  text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  while (!text.empty()) {
    const auto end = text.find('\n');
    const std::string_view line = trim(text.substr(0, end));
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 7) throw ManifestError("results CSV: expected 7 columns");
    out.push_back({to_double(cells[0], "n"), to_double(cells[1], "raw"),
                   to_double(cells[2], "centering"), to_double(cells[3], "normalization"),
                   to_double(cells[4], "normalized"), to_u64(cells[5], "replicate"),
                   to_u64(cells[6], "stream_id")});
  }
  return out;
}

void persist(const ExperimentManifest& manifest, const std::vector<ResultRecord>& records,
             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "manifest.txt", manifest.to_text());
  write_file(dir / "results.csv", records_to_csv(records));
}

void persist(const ExperimentResult& result, const std::filesystem::path& dir) {
  persist(result.manifest, result.records, dir);
  write_file(dir / "summary.json", result.summary_json());
}

ExperimentManifest load_manifest(const std::filesystem::path& file) {
  return ExperimentManifest::from_text(read_file(file));
}

LoadedExperiment load(const std::filesystem::path& dir) {
  LoadedExperiment out;
  out.manifest = load_manifest(dir / "manifest.txt");
  out.records = records_from_csv(read_file(dir / "results.csv"));
  return out;
}

}  // namespace regen
