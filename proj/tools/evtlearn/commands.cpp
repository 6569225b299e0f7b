#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "evtlearn/anomaly.hpp"
#include "evtlearn/bounds.hpp"
#include "evtlearn/classification.hpp"
#include "evtlearn/crossval.hpp"
#include "evtlearn/csv.hpp"
#include "evtlearn/experiments.hpp"
#include "evtlearn/model_io.hpp"
#include "evtlearn/regression.hpp"
#include "evtlearn/simulate.hpp"
#include "evtlearn/tail.hpp"
#include "evtlearn/transforms.hpp"

namespace evtlearn::cli {

namespace {

// Schema helpers. An empty fallback marks an optional key with no value.
KeySpec text(std::string name, std::optional<std::string> fallback, std::vector<std::string> choices = {}) {
  return {std::move(name), KeyType::kString, std::move(fallback), Range::any(), std::move(choices)};
}
KeySpec real(std::string name, std::optional<std::string> fallback, Range range = Range::any()) {
  return {std::move(name), KeyType::kReal, std::move(fallback), range, {}};
}
KeySpec count(std::string name, std::optional<std::string> fallback, Range range = Range::at_least(0)) {
  return {std::move(name), KeyType::kCount, std::move(fallback), range, {}};
}
KeySpec reals(std::string name, std::optional<std::string> fallback, Range range = Range::any()) {
  return {std::move(name), KeyType::kRealList, std::move(fallback), range, {}};
}

Schema join(Schema a, const Schema& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const Schema kInputKeys{text("input", std::nullopt), text("target", ""), text("label", "")};
const Schema kTailKeys{count("k", "", Range::at_least(1)), real("tau", "", Range::left_open(0.0, 1.0))};
const Schema kFitKeys{real("norm", "2", Range::at_least(1.0)),
                      text("standardization", "none", {"none", "rank"})};
const Schema kCvKeys{count("folds", "5", Range::at_least(2)), count("lambda_points", "50", Range::at_least(1)),
                     real("lambda_ratio", "0.001", Range::left_open(0.0, 1.0))};

class Sink {
 public:
  explicit Sink(const std::optional<std::filesystem::path>& path) {
    if (path) {
      file_ = std::make_unique<std::ofstream>(*path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot write '" + path->string() + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::filesystem::path require_out(const Invocation& inv) {
  if (!inv.out) throw ConfigError(inv.command + " writes a model file and needs --out");
  return *inv.out;
}

std::optional<std::string> optional_text(const Config& cfg, const std::string& key) {
  if (!cfg.has(key)) return std::nullopt;
  return cfg.str(key);
}

Dataset load_input(const Config& cfg, const std::string& key = "input") {
  CsvSchema schema{optional_text(cfg, "target"), optional_text(cfg, "label")};
  return ingest_csv(cfg.str(key), schema);
}

std::size_t tail_size(const Config& cfg, std::size_t n) {
  const bool has_k = cfg.has("k");
  const bool has_tau = cfg.has("tau");
  if (has_k == has_tau) throw ConfigError("set exactly one of 'k' and 'tau'");
  const std::size_t k = has_k ? cfg.count("k") : tail_count(n, cfg.real("tau"));
  if (k < 1) throw ConfigError("tail size is 0; increase 'tau'");
  if (k > n) throw ConfigError("k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  return k;
}

NormSpec norm_of(const Config& cfg) { return NormSpec(cfg.real("norm")); }

Standardization standardization_of(const Config& cfg) { return parse_standardization(cfg.str("standardization")); }

// ---- standardize

const Schema kStandardizeSchema = join(kInputKeys, {text("method", "rank", {"rank", "known-pareto"}),
                                                    text("margin", "unit-frechet",
                                                         {"unit-frechet", "unit-pareto", "standard-uniform",
                                                          "exponential"})});

void run_standardize(const Config& cfg, const Invocation& inv) {
  Dataset data = load_input(cfg);
  if (cfg.str("method") == "rank") {
    data.x = rank_transform_rows(fit_margins(data.x), data.x);
  } else {
    const std::string& m = cfg.str("margin");
    double (*f)(double) = cdf::unit_frechet;
    if (m == "unit-pareto") f = cdf::unit_pareto;
    if (m == "standard-uniform") f = cdf::standard_uniform;
    if (m == "exponential") f = cdf::exponential;
    data.x = pareto_standardize_rows(KnownMargins::replicate(f, data.d()), data.x);
  }
  Sink sink(inv.out);
  write_dataset_csv(sink.stream(), data);
}

// ---- angular-measure

const Schema kAngularSchema = join(join(kInputKeys, kTailKeys), {real("norm", "inf", Range::at_least(1.0)),
                                                                 reals("region_lower", "", Range::closed(0, 1)),
                                                                 reals("region_upper", "", Range::closed(0, 1))});

void run_angular_measure(const Config& cfg, const Invocation& inv) {
  const Dataset data = load_input(cfg);
  const std::size_t k = tail_size(cfg, data.n());
  const auto d = static_cast<Eigen::Index>(data.d());
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd hi = Eigen::VectorXd::Ones(d);
  const auto bounds = [&](const std::string& key, Eigen::VectorXd& v) {
    if (!cfg.has(key)) return;
    const auto values = cfg.reals(key);
    if (values.size() != data.d()) throw ConfigError(key + ": expected " + std::to_string(d) + " values");
    for (Eigen::Index j = 0; j < d; ++j) v(j) = values[static_cast<std::size_t>(j)];
  };
  bounds("region_lower", lo);
  bounds("region_upper", hi);
  const AngularRegion box = [&](const Eigen::VectorXd& angle) {
    return (angle.array() >= lo.array()).all() && (angle.array() <= hi.array()).all();
  };
  const double measure = empirical_angular_measure(data, k, box, norm_of(cfg));
  Sink sink(inv.out);
  write_csv_row(sink.stream(), {"n", "k", "measure"});
  write_csv_row(sink.stream(), {std::to_string(data.n()), std::to_string(k), format_double(measure)});
}

// ---- mvset-fit / score

const Schema kMvsetSchema = join(join(kInputKeys, kTailKeys),
                                 {real("alpha", "0.9", Range::left_open(0.0, 1.0)),
                                  real("psi", "", Range::at_least(0.0)),
                                  real("delta", "0.1", Range::left_open(0.0, 1.0)),
                                  count("grid_m", "4", Range::at_least(1))});

void run_mvset_fit(const Config& cfg, const Invocation& inv) {
  const auto out = require_out(inv);
  const Dataset data = load_input(cfg);
  const std::size_t k = tail_size(cfg, data.n());
  const double psi = cfg.has("psi") ? cfg.real("psi") : default_psi(cfg.real("delta"), k);
  const AngularGrid grid = build_grid(data.d(), cfg.count("grid_m"));
  save_model_file(out, angular_mvset(data, k, cfg.real("alpha"), psi, grid));
}

const Schema kScoreSchema = join(kInputKeys, {text("model", std::nullopt), text("train", std::nullopt),
                                              text("variant", "cell-mass", {"cell-mass", "nested-level"})});

void run_score(const Config& cfg, const Invocation& inv) {
  const MvSetModel model = load_mvset_model_file(cfg.str("model"));
  const Dataset train = load_input(cfg, "train");
  const Dataset data = load_input(cfg);
  if (train.d() != model.grid.d() || data.d() != model.grid.d()) {
    throw std::invalid_argument("dimension of the data does not match the model");
  }
  const MarginalModel margins = fit_margins(train.x);
  const AngularScore variant = cfg.str("variant") == "cell-mass" ? AngularScore::kCellMass : AngularScore::kNestedLevel;
  Sink sink(inv.out);
  write_csv_row(sink.stream(), {"row", "score"});
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const double s = anomaly_score(model, margins, data.x.row(i).transpose(), variant);
    write_csv_row(sink.stream(), {std::to_string(i + 1), format_double(s)});
  }
}

// ---- fit-xlasso / fit-classifier

const Schema kXlassoSchema = join(join(join(kInputKeys, kTailKeys), join(kFitKeys, kCvKeys)),
                                  {real("lambda", "", Range::at_least(0.0)),
                                   real("tolerance", "1e-8", Range::above(0.0))});

void run_fit_xlasso(const Config& cfg, const Invocation& inv) {
  const auto out = require_out(inv);
  const Dataset data = load_input(cfg);
  if (!data.target) throw ConfigError("fit-xlasso needs 'target'");
  const std::size_t k = tail_size(cfg, data.n());
  const NormSpec norm = norm_of(cfg);
  const Standardization s = standardization_of(cfg);
  const TailSample tail = select_extremes(data, k, norm, s);
  double lambda = 0.0;
  if (cfg.has("lambda")) {
    lambda = cfg.real("lambda");
  } else {
    const double p = static_cast<double>(k) / static_cast<double>(data.n());
    const auto grid = log_lambda_grid(lambda_max(tail), cfg.count("lambda_points"), cfg.real("lambda_ratio"));
    const CvPlan plan = make_folds(data.n(), CvScheme::kfold(cfg.count("folds")), inv.seed);
    lambda = grid_select(xlasso_rule(norm, s), grid, data, plan, p, inv.threads).best;
  }
  LassoOptions options;
  options.tolerance = cfg.real("tolerance");
  save_model_file(out, fit_xlasso(tail, lambda, options));
}

const Schema kClassifierSchema = join(join(kInputKeys, kTailKeys),
                                      join(kFitKeys, {text("mode", "constrained", {"constrained", "lagrangian"}),
                                                      real("value", std::nullopt, Range::at_least(0.0))}));

void run_fit_classifier(const Config& cfg, const Invocation& inv) {
  const auto out = require_out(inv);
  const Dataset data = load_input(cfg);
  if (!data.labels) throw ConfigError("fit-classifier needs 'label'");
  const std::size_t k = tail_size(cfg, data.n());
  const TailSample tail = select_extremes(data, k, norm_of(cfg), standardization_of(cfg));
  const double v = cfg.real("value");
  const ClassifierMode mode = cfg.str("mode") == "constrained" ? ClassifierMode::constrained(v)
                                                               : ClassifierMode::lagrangian(v);
  save_model_file(out, fit_logistic_lasso(tail, mode));
}

// ---- cv

const Schema kCvSchema = join(join(kInputKeys, join(kFitKeys, kCvKeys)),
                              {text("rule", "xlasso", {"xlasso", "ols", "logistic"}),
                               real("p", "0.1", Range::left_open(0.0, 1.0)),
                               reals("grid", "", Range::at_least(0.0)),
                               text("scheme", "kfold", {"kfold", "loo"})});

void run_cv(const Config& cfg, const Invocation& inv) {
  const Dataset data = load_input(cfg);
  const NormSpec norm = norm_of(cfg);
  const Standardization s = standardization_of(cfg);
  const std::string& rule_name = cfg.str("rule");
  const double p = cfg.real("p");
  TailRule rule;
  std::vector<double> grid;
  if (rule_name == "logistic") {
    if (!data.labels) throw ConfigError("rule 'logistic' needs 'label'");
    if (!cfg.has("grid")) throw ConfigError("rule 'logistic' needs a 'grid' of l1 radii");
    rule = constrained_logistic_rule(norm, s);
    grid = cfg.reals("grid");
  } else {
    if (!data.target) throw ConfigError("rule '" + rule_name + "' needs 'target'");
    if (rule_name == "ols") {
      rule = ols_rule(norm, s);
      grid = {0.0};
    } else {
      rule = xlasso_rule(norm, s);
      if (cfg.has("grid")) {
        grid = cfg.reals("grid");
      } else {
        const std::size_t k = std::max<std::size_t>(1, tail_count(data.n(), p));
        grid = log_lambda_grid(lambda_max(select_extremes(data, k, norm, s)), cfg.count("lambda_points"),
                               cfg.real("lambda_ratio"));
      }
    }
  }
  const CvScheme scheme =
      cfg.str("scheme") == "loo" ? CvScheme::leave_one_out() : CvScheme::kfold(cfg.count("folds"));
  const CvPlan plan = make_folds(data.n(), scheme, inv.seed);
  const GridSelection sel = grid_select(rule, grid, data, plan, p, inv.threads);
  Sink sink(inv.out);
  write_cv_table(sink.stream(), sel);
}

// ---- simulate

const Schema kSimulateSchema{text("generator", "additive", {"additive", "classification", "logistic"}),
                             count("n", "1000", Range::at_least(1)),
                             count("d", "10", Range::at_least(1)),
                             real("a", "0.5", Range::left_open(0.0, 1.0)),
                             real("norm_p", "2", Range::at_least(1.0)),
                             text("noise", "truncated-gaussian", {"truncated-gaussian", "none"}),
                             real("noise_lo", "-2"),
                             real("noise_hi", "2")};

void run_simulate(const Config& cfg, const Invocation& inv) {
  Rng rng(inv.seed);
  const std::size_t n = cfg.count("n");
  const std::size_t d = cfg.count("d");
  const double a = cfg.real("a");
  const std::string& gen = cfg.str("generator");
  Dataset data;
  if (gen == "additive") {
    AdditiveModelSpec spec = AdditiveModelSpec::defaults(d, a);
    if (cfg.str("noise") == "none") {
      spec.noise.reset();
    } else {
      spec.noise = NoiseSpec{cfg.real("noise_lo"), cfg.real("noise_hi")};
    }
    spec.validate();
    data = gen_additive_regression(n, spec, rng);
  } else if (gen == "classification") {
    if (std::isinf(cfg.real("norm_p"))) throw ConfigError("norm_p must be finite for the classification generator");
    data = gen_classification_rv(n, d, a, cfg.real("norm_p"), rng);
  } else {
    data.x = mv_logistic(n, d, a, rng);
  }
  Sink sink(inv.out);
  write_dataset_csv(sink.stream(), data);
}

// ---- bounds

const Schema kBoundsSchema{text("requests", "vc_tail_bound,b_term,k_tilde,residual_bound,xlasso_prediction_bound"),
                           count("n", "5000", Range::at_least(1)),
                           count("k", "50", Range::at_least(1)),
                           count("d", "100", Range::at_least(1)),
                           real("p", "0.01", Range::closed(0.0, 1.0)),
                           real("delta", "0.1", Range::open(0.0, 1.0)),
                           count("vc_dim", "1", Range::at_least(1)),
                           real("m_eps", "2", Range::at_least(0.0)),
                           real("beta_star_l1", "5", Range::at_least(0.0)),
                           real("c_factor", "1", Range::at_least(1.0)),
                           real("b_bar", "0", Range::at_least(0.0)),
                           count("mc_replications", "1000", Range::at_least(100)),
                           count("mc_d", "100", Range::at_least(1)),
                           real("mc_a", "0.5", Range::left_open(0.0, 1.0))};

void run_bounds(const Config& cfg, const Invocation& inv) {
  BoundInputs in;
  in.n = cfg.count("n");
  in.k = cfg.count("k");
  in.d = cfg.count("d");
  in.p = cfg.real("p");
  in.delta = cfg.real("delta");
  in.vc_dim = cfg.count("vc_dim");
  in.m_eps = cfg.real("m_eps");
  in.beta_star_l1 = cfg.real("beta_star_l1");
  in.c_factor = cfg.real("c_factor");
  in.b_bar = cfg.real("b_bar");
  if (in.k > in.n) throw ConfigError("k must not exceed n");

  McSpec mc;
  mc.delta = in.delta;
  mc.k = in.k;
  mc.n = in.n;
  mc.replications = cfg.count("mc_replications");
  mc.seed = inv.seed;
  mc.threads = inv.threads;
  mc.model = AdditiveModelSpec::defaults(cfg.count("mc_d"), cfg.real("mc_a"));
  mc.m_eps = in.m_eps;

  std::vector<std::string> requests;
  std::istringstream ss(cfg.str("requests"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) requests.push_back(item);
  }
  std::ostringstream buffer;
  try {
    emit_bounds_report(buffer, requests, in, mc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Sink sink(inv.out);
  sink.stream() << buffer.str();
}

// ---- experiments

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  std::filesystem::path p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

const Schema kExperimentSimSchema = join(kCvKeys, {count("n", "10000", Range::at_least(2)),
                                                   count("d", "100", Range::at_least(1)),
                                                   real("a", "0.5", Range::left_open(0.0, 1.0)),
                                                   count("replications", "20", Range::at_least(1)),
                                                   count("n_test", "1000000", Range::at_least(1)),
                                                   real("tau_test", "0.01", Range::left_open(0.0, 1.0)),
                                                   reals("taus", "0.011,0.015,0.02,0.025,0.03,0.035,0.04,0.045,0.05",
                                                         Range::left_open(0.0, 1.0))});

void run_experiment_sim(const Config& cfg, const Invocation& inv) {
  SimExperimentConfig ec;
  ec.n = cfg.count("n");
  ec.d = cfg.count("d");
  ec.a = cfg.real("a");
  ec.replications = cfg.count("replications");
  ec.n_test = cfg.count("n_test");
  ec.tau_test = cfg.real("tau_test");
  ec.taus = cfg.reals("taus");
  ec.cv_folds = cfg.count("folds");
  ec.lambda_points = cfg.count("lambda_points");
  ec.lambda_ratio = cfg.real("lambda_ratio");
  ec.seed = inv.seed;
  ec.threads = inv.threads;
  const ExperimentResult result = run_simulated_xlasso_experiment(ec);
  Sink sink(inv.out);
  write_mse_rows(sink.stream(), result.rows);
  if (inv.out) {
    Sink summary(sibling(*inv.out, ".summary.csv"));
    write_mse_summary(summary.stream(), result.summary);
  } else {
    std::cout << '\n';
    write_mse_summary(std::cout, result.summary);
  }
}

const Schema kExperimentPortfolioSchema =
    join(kCvKeys, {text("input", std::nullopt),
                   text("target", "Trans"),
                   count("columns", "49", Range::at_least(2)),
                   count("splits", "50", Range::at_least(1)),
                   real("train_fraction", "0.2", Range::open(0.0, 1.0)),
                   reals("taus", "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5", Range::left_open(0.0, 1.0)),
                   real("tau_test", "0.005", Range::left_open(0.0, 1.0))});

void run_experiment_portfolio(const Config& cfg, const Invocation& inv) {
  const Dataset data = ingest_csv(cfg.str("input"), CsvSchema{cfg.str("target"), std::nullopt});
  PortfolioConfig pc;
  pc.expected_columns = cfg.count("columns");
  pc.splits = cfg.count("splits");
  pc.train_fraction = cfg.real("train_fraction");
  pc.taus = cfg.reals("taus");
  pc.tau_test = cfg.real("tau_test");
  pc.cv_folds = cfg.count("folds");
  pc.lambda_points = cfg.count("lambda_points");
  pc.lambda_ratio = cfg.real("lambda_ratio");
  pc.seed = inv.seed;
  pc.threads = inv.threads;
  const PortfolioResult result = run_portfolio_experiment(data, pc);
  Sink sink(inv.out);
  write_mse_rows(sink.stream(), result.errors.rows);
  if (inv.out) {
    Sink summary(sibling(*inv.out, ".summary.csv"));
    write_mse_summary(summary.stream(), result.errors.summary);
    Sink support(sibling(*inv.out, ".support.csv"));
    write_support(support.stream(), result.support);
  } else {
    std::cout << '\n';
    write_mse_summary(std::cout, result.errors.summary);
    std::cout << '\n';
    write_support(std::cout, result.support);
  }
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> all{
      {"standardize", "rank or known-margin Pareto standardization of a CSV", kStandardizeSchema, run_standardize},
      {"angular-measure", "empirical angular measure of a box of angles", kAngularSchema, run_angular_measure},
      {"mvset-fit", "fit an angular minimum-volume set", kMvsetSchema, run_mvset_fit},
      {"score", "anomaly scores from an MV-set model", kScoreSchema, run_score},
      {"fit-xlasso", "l1-penalized least squares on extreme angles", kXlassoSchema, run_fit_xlasso},
      {"fit-classifier", "l1 logistic classifier on extreme angles", kClassifierSchema, run_fit_classifier},
      {"cv", "tail cross-validation over a hyperparameter grid", kCvSchema, run_cv},
      {"simulate", "generate a synthetic dataset", kSimulateSchema, run_simulate},
      {"bounds", "evaluate finite-sample bounds and Monte-Carlo checks", kBoundsSchema, run_bounds},
      {"experiment-sim", "simulated XLASSO versus OLS experiment", kExperimentSimSchema, run_experiment_sim},
      {"experiment-portfolio", "XLASSO versus OLS on portfolio returns", kExperimentPortfolioSchema,
       run_experiment_portfolio},
  };
  return all;
}

void execute(const Command& command, const Invocation& inv) {
  Config cfg = inv.config_path ? Config::load(*inv.config_path, command.schema) : Config(command.schema);
  for (const auto& kv : inv.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.require_complete();
  command.run(cfg, inv);
}

}  // namespace evtlearn::cli
