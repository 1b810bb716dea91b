// ldpot command-line driver. Every command reads a JSON config, writes its
// tables under --out together with manifest.json, and exits 0 when all
// internal checks pass, 1 on a failed check, 2 on a configuration error.

#include "ldpot/bernstein_markov.hpp"
#include "ldpot/detail/linalg.hpp"
#include "ldpot/energy.hpp"
#include "ldpot/ensembles.hpp"
#include "ldpot/fekete.hpp"
#include "ldpot/io.hpp"
#include "ldpot/ldp.hpp"
#include "ldpot/polynomials.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using ldpot::Index;
using ldpot::io::ConfigError;
using ldpot::io::CsvTable;
using ldpot::io::Json;

namespace {

constexpr const char* kVersion = "ldpot 1.0.0";
constexpr int kSchemaVersion = 1;

const std::vector<std::string> kTopLevelKeys = {
    "schema_version", "set",    "weight",   "nu",          "k",           "k_max",
    "k_range",        "samples", "seed",    "eps",         "eta",         "delta_bar",
    "restarts",       "max_sweeps", "moment_degree", "target", "sampler", "burn_in",
    "thin",           "trials",  "weights", "mass_density", "reference"};

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class Run {
 public:
  Run(std::string command, Json config, fs::path out, int tasks)
      : command_(std::move(command)), config_(std::move(config)), out_(std::move(out)), tasks_(tasks) {}

  int execute();
  void writeManifest(bool pass, const std::string& error) const;

 private:
  // Config accessors.
  template <typename T>
  T value(const std::string& key) const {
    if (!config_.contains(key)) throw ConfigError("missing key '" + key + "'");
    try {
      return config_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("key '" + key + "' has the wrong type");
    }
  }
  template <typename T>
  T value(const std::string& key, T fallback) const {
    return config_.contains(key) ? value<T>(key) : fallback;
  }
  std::uint64_t seed() const {
    if (!config_.contains("seed")) throw ConfigError("'seed' is required for command " + command_);
    return value<std::uint64_t>("seed");
  }
  std::optional<std::uint64_t> seedIfAny() const {
    return config_.contains("seed") ? std::optional(value<std::uint64_t>("seed")) : std::nullopt;
  }
  ldpot::CompactSetSpec set() const { return ldpot::io::specFromJson(value<Json>("set")); }
  ldpot::Weight weight() const {
    return ldpot::Weight::parse(value<std::string>("weight", std::string("0")));
  }
  std::vector<int> kRange() const;
  ldpot::DiscreteMeasure nu(const ldpot::CompactSetSpec& spec) const;
  ldpot::DiscreteMeasure measureByName(const Json& j, const ldpot::CompactSetSpec& spec,
                                       const ldpot::Weight& Q) const;
  std::optional<std::function<double(double)>> referenceCdf() const;

  std::string file(const std::string& name) {
    artifacts_.push_back(name);
    return (out_ / name).string();
  }
  void saveJson(const std::string& name, const Json& j) {
    std::ofstream f(file(name), std::ios::binary);
    f << j.dump(2) << '\n';
  }
  void check(std::string name, double v, double tol, bool pass) {
    checks_.push_back({std::move(name), v, tol, pass});
  }

  int fekete();
  int tdiam();
  int zk();
  int sample();
  int bm();
  int equilibrium();
  int rate();
  int ldpVerify();

  std::string command_;
  Json config_;
  fs::path out_;
  int tasks_;
  std::vector<std::string> artifacts_;
  std::vector<Check> checks_;

 public:
  const std::vector<Check>& checks() const { return checks_; }
};

std::vector<int> Run::kRange() const {
  if (config_.contains("k_range")) {
    const Json r = config_.at("k_range");
    if (r.is_array() && r.size() == 2 && r[0].is_number_integer() && r[1].is_number_integer() &&
        r[0].get<int>() <= r[1].get<int>()) {
      // [lo, hi] inclusive.
      std::vector<int> ks;
      for (int k = r[0].get<int>(); k <= r[1].get<int>(); ++k) ks.push_back(k);
      return ks;
    }
    if (r.is_object()) {
      ldpot::io::requireKeys(r, {"values"}, "k_range");
      return r.at("values").get<std::vector<int>>();
    }
    throw ConfigError("k_range must be [lo, hi] or {\"values\": [...]}");
  }
  const int kMax = value<int>("k_max");
  std::vector<int> ks;
  for (int k = 1; k <= kMax; ++k) ks.push_back(k);
  return ks;
}

ldpot::DiscreteMeasure Run::nu(const ldpot::CompactSetSpec& spec) const {
  const Json j = value<Json>("nu", Json{{"construction", "uniform"}});
  ldpot::io::requireKeys(j, {"construction", "k_max", "path"}, "nu");
  const std::string kind = j.value("construction", std::string("uniform"));
  if (kind == "uniform") {
    if (spec.kind() == ldpot::CompactSetSpec::Kind::IntervalUnion) return ldpot::uniformMeasure(spec);
    return ldpot::DiscreteMeasure::uniform(ldpot::discretize(spec));
  }
  if (kind == "arcsine") return ldpot::arcsineMeasure(spec);
  if (kind == "bm") {
    if (!j.contains("k_max")) throw ConfigError("nu.k_max is required for construction bm");
    return ldpot::constructBmMeasure(spec, j.at("k_max").get<int>()).nu;
  }
  if (kind == "file") {
    if (!j.contains("path")) throw ConfigError("nu.path is required for construction file");
    std::ifstream f(j.at("path").get<std::string>());
    if (!f) throw ConfigError("cannot read " + j.at("path").get<std::string>());
    Json m;
    try {
      f >> m;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad measure file: ") + e.what());
    }
    return ldpot::io::measureFromJson(m);
  }
  throw ConfigError("unknown nu construction '" + kind + "'");
}

ldpot::DiscreteMeasure Run::measureByName(const Json& j, const ldpot::CompactSetSpec& spec,
                                          const ldpot::Weight& Q) const {
  if (j.is_object()) return ldpot::io::measureFromJson(j);
  const std::string name = j.get<std::string>();
  if (name == "uniform") return ldpot::uniformMeasure(spec);
  if (name == "arcsine") return ldpot::arcsineMeasure(spec);
  if (name == "equilibrium") return ldpot::equilibriumMeasure(spec, Q).muEq;
  throw ConfigError("unknown target '" + name + "'");
}

std::optional<std::function<double(double)>> Run::referenceCdf() const {
  if (!config_.contains("reference")) return std::nullopt;
  const Json r = config_.at("reference");
  ldpot::io::requireKeys(r, {"kind", "radius", "lo", "hi"}, "reference");
  const std::string kind = r.value("kind", std::string());
  if (kind == "arcsine") {
    const double lo = r.value("lo", -1.0);
    const double hi = r.value("hi", 1.0);
    return [lo, hi](double x) { return ldpot::arcsineCdf(x, lo, hi); };
  }
  if (kind == "semicircle") {
    const double radius = r.value("radius", 1.0);
    return [radius](double x) { return ldpot::semicircleCdf(x, radius); };
  }
  throw ConfigError("unknown reference kind '" + kind + "'");
}

int Run::fekete() {
  const auto spec = set();
  const auto Q = weight();
  ldpot::FeketeOptions o;
  o.restarts = value<int>("restarts", 3);
  o.seed = seedIfAny().value_or(0);
  o.maxSweeps = value<Index>("max_sweeps", 200);
  CsvTable table({"k", "N_k", "log_vdm_q", "delta_qk", "normalized", "iterations", "sweeps",
                  "converged", "lebesgue"});
  CsvTable points({"k", "j", "coordinate", "re", "im"});
  bool allConverged = true;
  for (int k : kRange()) {
    o.seed = ldpot::detail::substreamSeed(seedIfAny().value_or(0), static_cast<std::uint64_t>(k));
    const ldpot::FeketeReport r = ldpot::feketePoints(spec, Q, k, o);
    table.row().add(k).add(r.config.size()).add(r.logVdmQ).add(r.deltaQk).add(r.normalized);
    table.add(r.iterations).add(r.sweeps).add(r.converged ? 1 : 0).add(r.lebesgue);
    for (Index j = 0; j < r.config.size(); ++j) {
      for (Index c = 0; c < r.config.points().rows(); ++c) {
        const auto z = r.config.points()(c, j);
        points.row().add(k).add(j).add(c).add(z.real()).add(z.imag());
      }
    }
    allConverged = allConverged && r.converged;
  }
  table.save(file("fekete.csv"));
  points.save(file("fekete_points.csv"));
  check("exchange_converged", allConverged ? 1.0 : 0.0, 0.0, allConverged);
  return 0;
}

int Run::tdiam() {
  const auto spec = set();
  const auto Q = weight();
  ldpot::FeketeOptions o;
  o.restarts = value<int>("restarts", 3);
  o.seed = seedIfAny().value_or(0);
  const int kMax = value<int>("k_max");
  const ldpot::TransfiniteDiameter td = ldpot::transfiniteDiameter(spec, Q, kMax, o);
  CsvTable table({"k", "N_k", "delta_qk", "normalized"});
  for (const auto& r : td.reports) table.row().add(r.k).add(r.config.size()).add(r.deltaQk).add(r.normalized);
  table.save(file("tdiam.csv"));
  Json summary{{"limit_log_model", td.limit.logModel},
               {"limit_richardson", td.limit.richardson},
               {"monotone", td.monotone}};
  if (spec.dimension() == 1) {
    const auto eq = ldpot::equilibriumMeasure(spec, Q);
    const double predicted = std::exp(-0.5 * eq.IQmin);
    const double gap = std::abs(td.limit.logModel - predicted) / predicted;
    summary["energy_prediction"] = predicted;
    summary["relative_gap"] = gap;
    check("w_energy_identity", gap, 0.02, gap < 0.02);
  }
  saveJson("tdiam.json", summary);
  return 0;
}

int Run::zk() {
  const auto spec = set();
  const auto Q = weight();
  const auto measure = nu(spec);
  CsvTable table({"k", "N_k", "log_Z_k", "normalized"});
  bool finite = true;
  std::vector<int> ks;
  std::vector<double> values;
  for (int k : kRange()) {
    const ldpot::PartitionFunction z = ldpot::partitionFunction(measure, Q, k);
    table.row().add(k).add(z.Nk).add(z.logZ).add(z.normalized);
    finite = finite && std::isfinite(z.logZ);
    if (k > 0) ks.push_back(k), values.push_back(z.normalized);
  }
  table.save(file("zk.csv"));
  if (finite && ks.size() >= 3) {
    const auto lim = ldpot::extrapolateLimit(ks, values);
    saveJson("zk.json", {{"limit_log_model", lim.logModel}, {"limit_richardson", lim.richardson}});
  }
  check("partition_function_finite", finite ? 1.0 : 0.0, 0.0, finite);
  return 0;
}

int Run::sample() {
  const std::uint64_t s = seed();
  const auto spec = set();
  const auto Q = weight();
  const auto measure = nu(spec);
  const int k = value<int>("k");
  const Index count = value<Index>("samples");
  const std::string sampler = value<std::string>("sampler", std::string("dpp"));
  ldpot::EnsembleSample draws;
  if (sampler == "dpp") {
    draws = ldpot::sampleDpp(measure, Q, k, count, s, tasks_);
  } else if (sampler == "mcmc") {
    draws = ldpot::sampleMcmc(measure, Q, k, count, value<Index>("burn_in", 1000),
                              value<Index>("thin", 10), s, tasks_);
  } else {
    throw ConfigError("unknown sampler '" + sampler + "'");
  }
  {
    std::ofstream f(file("samples.jsonl"), std::ios::binary);
    ldpot::io::writeSampleJsonl(f, draws);
  }
  CsvTable table({"index", "log_vdm_q"});
  for (std::size_t i = 0; i < draws.configs.size(); ++i) {
    table.row().add(i).add(draws.configs[i].cached(draws.weightId).value_or(NAN));
  }
  table.save(file("samples.csv"));
  CsvTable intensity({"atom", "re", "im", "intensity"});
  const Eigen::VectorXd kk = ldpot::inclusionIntensity(measure, Q, k);
  for (Index i = 0; i < measure.size(); ++i) {
    const auto z = measure.atoms()(0, i);
    intensity.row().add(i).add(z.real()).add(z.imag()).add(kk(i));
  }
  intensity.save(file("intensity.csv"));
  Json summary{{"k", k}, {"samples", count}, {"sampler", sampler}, {"nu_id", draws.nuId},
               {"weight_id", draws.weightId}};
  if (std::isfinite(draws.acceptanceRate)) summary["acceptance_rate"] = draws.acceptanceRate;
  if (config_.contains("eta")) {
    double deltaBar = 0.0;
    if (config_.contains("delta_bar")) {
      deltaBar = value<double>("delta_bar");
    } else {
      ldpot::FeketeOptions o;
      o.seed = s;
      deltaBar = ldpot::transfiniteDiameter(spec, Q, std::max(3, value<int>("k_max", 12)), o).limit.logModel;
    }
    const auto t = ldpot::tailBoundCheck(draws, value<double>("eta"), deltaBar);
    summary["tail_bound"] = {{"eta", t.eta},           {"delta_bar", t.deltaBar},
                             {"bound", t.bound},       {"empirical", t.empirical},
                             {"stderr", t.stderr},     {"pass", t.pass}};
    check("tail_bound", t.empirical, t.bound + 2.0 * t.stderr, t.pass);
  }
  saveJson("sample.json", summary);
  return 0;
}

int Run::bm() {
  const std::uint64_t s = seed();
  const auto spec = set();
  const auto Q = weight();
  const int kMax = value<int>("k_max");
  const Index trials = value<Index>("trials", 1000);
  const ldpot::BmConstruction built = ldpot::constructBmMeasure(spec, kMax);
  const ldpot::DiscreteMeasure measure = config_.contains("nu") ? nu(spec) : built.nu;
  saveJson("bm_nu.json", ldpot::io::toJson(measure));

  CsvTable table({"k", "M_k", "M_k_root", "bound_m_k_k2_over_c", "max_ratio", "violations"});
  Index violations = 0;
  double worstGap = 0.0;
  for (int k = 1; k <= std::max(1, kMax / 2); ++k) {
    const auto r = ldpot::verifyBmInequality(measure, spec, Q, k, trials,
                                             ldpot::detail::substreamSeed(s, static_cast<std::uint64_t>(k)),
                                             config_.contains("nu") ? nullptr : &built);
    table.row().add(k).add(r.bmConstant).add(std::pow(r.bmConstant, 1.0 / k)).add(r.explicitBound);
    table.add(r.maxRatio).add(r.christoffelViolations + r.explicitViolations);
    violations += r.christoffelViolations + r.explicitViolations;
    if (std::isfinite(r.bmConstant)) {
      worstGap = std::max(worstGap, ldpot::kernelSectionCheck(measure, spec, Q, k).relativeGap);
    }
  }
  table.save(file("bm.csv"));
  check("bm_inequality_violations", static_cast<double>(violations), 0.0, violations == 0);
  check("kernel_section_optimality", worstGap, 1e-6, worstGap < 1e-6);

  if (config_.contains("weights")) {
    std::vector<ldpot::Weight> ws;
    for (const auto& w : value<std::vector<std::string>>("weights")) ws.push_back(ldpot::Weight::parse(w));
    const auto reports = ldpot::strongBmScan(measure, spec, ws, kRange());
    CsvTable scan({"weight", "k", "M_k", "M_k_root"});
    Json verdicts = Json::array();
    for (const auto& r : reports) {
      for (std::size_t i = 0; i < r.ks.size(); ++i) scan.row().add(r.weight).add(r.ks[i]).add(r.mk[i]).add(r.mkRoot[i]);
      verdicts.push_back({{"weight", r.weight}, {"slope", r.slope}, {"verdict", ldpot::toString(r.verdict)}});
    }
    scan.save(file("bm_scan.csv"));
    saveJson("bm_scan.json", verdicts);
  }
  if (config_.contains("mass_density")) {
    const Json md = config_.at("mass_density");
    ldpot::io::requireKeys(md, {"T", "radii", "centers"}, "mass_density");
    const ldpot::PointSet centers = md.contains("centers") ? ldpot::io::pointsFromJson(md.at("centers"))
                                                           : measure.atoms();
    const auto rep = ldpot::massDensityCheck(measure, centers, md.at("T").get<double>(),
                                             md.at("radii").get<std::vector<double>>());
    CsvTable t({"center", "radius", "mass", "bound", "status"});
    for (const auto& row : rep.rows) t.row().add(row.center).add(row.radius).add(row.mass).add(row.bound).add(ldpot::toString(row.status));
    t.save(file("mass_density.csv"));
    saveJson("mass_density.json", {{"spacing", rep.spacing},
                                   {"pass_fraction", rep.passFraction},
                                   {"verdict", ldpot::toString(rep.verdict)}});
  }
  return 0;
}

int Run::equilibrium() {
  const auto spec = set();
  const auto Q = weight();
  const ldpot::EquilibriumResult eq = ldpot::equilibriumMeasure(spec, Q);
  CsvTable table({"re", "im", "mass", "cell", "density", "potential", "extremal"});
  const auto& cells = *eq.muEq.cells();
  for (Index i = 0; i < eq.muEq.size(); ++i) {
    const auto z = eq.muEq.atoms()(0, i);
    const double m = eq.muEq.masses()(i);
    table.row().add(z.real()).add(z.imag()).add(m).add(cells(i)).add(cells(i) > 0 ? m / cells(i) : 0.0);
    table.add(eq.potential(i)).add(eq.extremal(i));
  }
  table.save(file("equilibrium.csv"));
  Json summary{{"F", eq.F}, {"IQ_min", eq.IQmin}, {"kkt_residual", eq.kktResidual},
               {"converged", eq.converged}, {"iterations", eq.iterations}};
  check("kkt_residual", eq.kktResidual, 1e-6, eq.kktResidual < 1e-6);
  if (auto cdf = referenceCdf()) {
    const double d = ldpot::cdfSupDistance(eq.muEq, *cdf);
    summary["cdf_sup_distance"] = d;
    check("reference_cdf", d, 0.01, d < 0.01);
  }
  saveJson("equilibrium.json", summary);
  return 0;
}

int Run::rate() {
  const std::uint64_t s = seed();
  const auto spec = set();
  const auto Q = weight();
  const auto measure = nu(spec);
  const auto target = measureByName(value<Json>("target", Json("uniform")), spec, Q);
  ldpot::RateOptions ro;
  ro.samples = value<Index>("samples", 4000);
  ro.seed = s;
  ro.tasks = tasks_;
  const ldpot::RateEstimate r = ldpot::rateEstimate(target, spec, measure, Q, kRange(),
                                                    value<double>("eps"), value<int>("moment_degree", 2), ro);
  CsvTable table({"k", "N_k", "mode", "estimate", "stderr", "estimate_half", "stderr_half",
                  "bracket_mid", "zero_flag", "feasibility_floor", "feasible"});
  for (const auto& row : r.rows) {
    table.row().add(row.k).add(row.Nk).add(ldpot::toString(row.mode)).add(row.estimate).add(row.stderr);
    table.add(row.estimateHalf).add(row.stderrHalf).add(row.bracketMid());
    table.add((row.zeroFlag || row.zeroFlagHalf) ? 1 : 0).add(row.floor).add(row.feasible ? 1 : 0);
  }
  table.save(file("rate.csv"));
  const int best = r.largestFeasible();
  saveJson("rate.json", {{"epsilon", r.epsilon},
                         {"moment_degree", r.momentDegree},
                         {"prediction", r.prediction},
                         {"inf_prediction", r.infPrediction},
                         {"inf_prediction_half", r.infPredictionHalf},
                         {"largest_feasible_k", best >= 0 ? r.rows[static_cast<std::size_t>(best)].k : -1}});
  check("feasible_estimate", best, 0.0, best >= 0);
  return 0;
}

int Run::ldpVerify() {
  const std::uint64_t s = seed();
  const auto spec = set();
  const auto Q = weight();
  const auto measure = nu(spec);
  ldpot::LdpReportConfig rc;
  rc.ks = kRange();
  rc.epsilon = value<double>("eps", 0.05);
  rc.momentDegree = value<int>("moment_degree", 2);
  rc.samples = value<Index>("samples", 2000);
  rc.seed = s;
  rc.tasks = tasks_;
  rc.eta = value<double>("eta", 0.1);
  rc.referenceCdf = referenceCdf();
  rc.configHash = ldpot::hexDigest(ldpot::fnv1a(config_.dump()));
  const ldpot::LdpReport rep = ldpot::ldpReport(spec, measure, Q, rc);
  Json checks = Json::array();
  CsvTable table({"name", "k", "value", "prediction", "tolerance", "pass"});
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"k", c.k}, {"value", c.value}, {"prediction", c.prediction},
                      {"tolerance", c.tolerance}, {"pass", c.pass}});
    table.row().add(c.name).add(c.k).add(c.value).add(c.prediction).add(c.tolerance).add(c.pass ? 1 : 0);
    check(c.name, c.value, c.tolerance, c.pass);
  }
  saveJson("report.json", {{"config_hash", rep.configHash}, {"checks", checks}});
  table.save(file("report.csv"));
  return 0;
}

int Run::execute() {
  ldpot::io::requireKeys(config_, kTopLevelKeys, "config");
  if (config_.contains("schema_version") && value<int>("schema_version") != kSchemaVersion) {
    throw ConfigError("unsupported schema_version");
  }
  if (command_ == "fekete") return fekete();
  if (command_ == "tdiam") return tdiam();
  if (command_ == "zk") return zk();
  if (command_ == "sample") return sample();
  if (command_ == "bm") return bm();
  if (command_ == "equilibrium") return equilibrium();
  if (command_ == "rate") return rate();
  if (command_ == "ldp-verify") return ldpVerify();
  throw ConfigError("unknown command " + command_);
}

void Run::writeManifest(bool pass, const std::string& error) const {
  Json files = artifacts_;
  Json m{{"command", command_},
         {"config_hash", ldpot::hexDigest(ldpot::fnv1a(config_.dump()))},
         {"seed", config_.contains("seed") ? config_.at("seed") : Json(nullptr)},
         {"tasks", tasks_},
         {"artifact_files", files},
         {"pass", pass},
         {"version", kVersion},
         {"schema_version", kSchemaVersion}};
  Json checks = Json::array();
  for (const auto& c : checks_) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  m["checks"] = checks;
  if (!error.empty()) m["error"] = error;
  std::ofstream f(out_ / "manifest.json", std::ios::binary);
  f << m.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted pluripotential toolkit: Fekete points, ensembles, energies, LDP checks"};
  app.set_version_flag("--version", kVersion);
  std::string configPath;
  std::string outDir = "out";
  int tasks = 1;
  const std::vector<std::string> commands = {"fekete", "tdiam", "zk", "sample", "bm",
                                             "equilibrium", "rate", "ldp-verify"};
  std::vector<CLI::App*> subs;
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", configPath, "JSON config file")->required();
    sub->add_option("--out,-o", outDir, "output directory");
    sub->add_option("--tasks,-j", tasks, "worker threads (recorded in the manifest)")
        ->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }
  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  std::string command;
  for (auto* sub : subs) {
    if (sub->parsed()) command = sub->get_name();
  }

  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) {
    std::cerr << "cannot create " << outDir << ": " << ec.message() << '\n';
    return 2;
  }
  Json config = Json::object();
  std::string error;
  int code = 0;
  {
    std::ifstream f(configPath);
    if (!f) {
      error = "cannot read config " + configPath;
    } else {
      try {
        f >> config;
      } catch (const nlohmann::json::exception& e) {
        error = std::string("invalid JSON: ") + e.what();
        config = Json::object();
      }
    }
  }
  Run run(command, config, outDir, tasks);
  if (!error.empty()) {
    std::cerr << error << '\n';
    run.writeManifest(false, error);
    return 2;
  }
  try {
    code = run.execute();
  } catch (const ldpot::WeightParseError& e) {
    error = std::string("weight: ") + e.what() + " at offset " + std::to_string(e.offset());
    code = 2;
  } catch (const ldpot::InvalidArgument& e) {
    error = e.what();
    code = 2;
  } catch (const nlohmann::json::exception& e) {
    error = std::string("config: ") + e.what();
    code = 2;
  } catch (const std::exception& e) {
    error = e.what();
    code = 1;
  }
  bool pass = code == 0;
  if (pass) {
    for (const auto& c : run.checks()) {
      if (!c.pass) {
        pass = false;
        code = 1;
        error = "check failed: " + c.name + " (value " + ldpot::io::formatDouble(c.value) +
                ", tolerance " + ldpot::io::formatDouble(c.tolerance) + ")";
        break;
      }
    }
  }
  if (!error.empty()) std::cerr << error << '\n';
  run.writeManifest(pass, error);
  return code;
}
