#include "archmx/cli.hpp"

#include "archmx/anova.hpp"
#include "archmx/error.hpp"
#include "archmx/estimate.hpp"
#include "archmx/io.hpp"
#include "archmx/kernel.hpp"
#include "archmx/select.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace archmx::cli {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string series;
  std::string covariates;
  std::string data;
  std::string target;
  std::string date_column;
  bool log_returns = false;
  std::optional<std::uint64_t> seed;
};

struct MethodOptions {
  std::string method = "kernel";
  std::vector<double> bandwidth;
  std::string kernel = "gaussian";
  std::size_t knots = 3;
  int order = 4;
};

struct LoadedData {
  ReturnSeries series;
  CovariatePanel panel;
  json input_hash;
  std::size_t dropped_rows = 0;
};

std::vector<std::string> header_of(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    cells.push_back(cell);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return cells;
}

std::optional<std::string> detect_date(const std::string& path, const std::string& requested) {
  const auto header = header_of(path);
  if (!requested.empty()) return requested;
  if (std::find(header.begin(), header.end(), "date") != header.end()) return std::string("date");
  return std::nullopt;
}

void add_data_options(CLI::App* cmd, DataOptions& o) {
  auto* series = cmd->add_option("--series", o.series, "Series CSV (date,value)");
  auto* cov = cmd->add_option("--covariates", o.covariates, "Covariates CSV (date + named columns)");
  auto* data = cmd->add_option("--data", o.data, "Single CSV holding the series and its covariates");
  cmd->add_option("--target", o.target, "Series column within --data");
  series->needs(cov);
  cov->needs(series);
  data->excludes(series)->excludes(cov);
  cmd->add_option("--date-column", o.date_column, "Date column name (default: 'date' when present)");
  cmd->add_flag("--log-returns", o.log_returns, "Convert every price column to log returns");
  cmd->add_option("--seed", o.seed, "Seed recorded in the report");
}

void add_method_options(CLI::App* cmd, MethodOptions& m, bool allow_spline = true) {
  auto* method = cmd->add_option("--method", m.method, "Estimator for m(x)");
  method->check(allow_spline ? CLI::IsMember({"kernel", "spline"}) : CLI::IsMember({"kernel"}));
  auto* bw = cmd->add_option("--bandwidth", m.bandwidth, "Kernel bandwidth(s): one shared value or one per covariate");
  cmd->add_option("--kernel", m.kernel, "Kernel function")->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  auto* knots = cmd->add_option("--knots", m.knots, "Interior knots per covariate (spline)");
  cmd->add_option("--order", m.order, "Spline order");
  bw->excludes(knots);
}

LoadedData load_data(const DataOptions& o) {
  if (o.data.empty() && o.series.empty()) throw UsageError("either --series/--covariates or --data is required");
  if (!o.data.empty()) {
    if (o.target.empty()) throw UsageError("--data requires --target");
    io::IngestOptions opts;
    opts.series_column = o.target;
    opts.date_column = detect_date(o.data, o.date_column);
    if (o.log_returns) {
      for (const auto& name : header_of(o.data)) {
        if (!opts.date_column || name != *opts.date_column) opts.price_columns_to_log_return.push_back(name);
      }
    }
    const auto ds = io::ingest_csv(o.data, opts);
    return {ds.series(), ds.panel(), json{{"data", io::file_hash(o.data)}}, ds.dropped_rows};
  }
  const auto sdate = detect_date(o.series, o.date_column);
  const auto cdate = detect_date(o.covariates, o.date_column);
  if (sdate.has_value() != cdate.has_value() || (sdate && *sdate != *cdate)) {
    throw Error(ErrorCode::MissingColumn, "series and covariate files must share a date column or both lack one");
  }
  std::vector<std::string> cov_log;
  if (o.log_returns) {
    for (const auto& name : header_of(o.covariates)) {
      if (!cdate || name != *cdate) cov_log.push_back(name);
    }
  }
  const auto ds = io::ingest_pair(o.series, o.covariates, sdate, o.log_returns, cov_log);
  return {ds.series(), ds.panel(),
          json{{"series", io::file_hash(o.series)}, {"covariates", io::file_hash(o.covariates)}}, ds.dropped_rows};
}

KernelType kernel_type(const std::string& name) {
  return name == "epanechnikov" ? KernelType::Epanechnikov : KernelType::Gaussian;
}

std::optional<KernelConfig> kernel_config(const MethodOptions& m) {
  if (m.bandwidth.empty()) {
    if (m.kernel == "gaussian") return std::nullopt;
    throw UsageError("--kernel other than gaussian needs an explicit --bandwidth");
  }
  KernelConfig cfg;
  cfg.bandwidth = Eigen::Map<const Eigen::VectorXd>(m.bandwidth.data(), static_cast<Eigen::Index>(m.bandwidth.size()));
  cfg.kernel = kernel_type(m.kernel);
  return cfg;
}

SplineConfig spline_config(const MethodOptions& m) {
  SplineConfig cfg;
  cfg.order = m.order;
  cfg.internal_knots = {m.knots};
  return cfg;
}

EstimatorChoice estimator_of(const MethodOptions& m) {
  if (m.method == "spline") return spline_config(m);
  return KernelEstimator{kernel_config(m)};
}

std::size_t resolve_covariate(const CovariatePanel& panel, const std::string& spec) {
  if (const auto idx = panel.find(spec)) return *idx;
  std::size_t pos = 0;
  std::size_t value = 0;
  try {
    value = std::stoul(spec, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == spec.size() && value >= 1 && value <= panel.dim()) return value - 1;
  throw Error(ErrorCode::IndexOutOfRange, "unknown covariate '" + spec + "'");
}

json nullable(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

json test_json(const TestResult& r, const CovariatePanel& panel) {
  return json{{"covariate", panel.names()[r.covariate]},
              {"covariate_index", r.covariate + 1},
              {"t_n", r.t_n},
              {"mst", r.mst},
              {"mse", r.mse},
              {"k_n", r.k_n},
              {"tau_hat", r.tau_hat},
              {"n_eff", r.n_eff},
              {"z", r.z},
              {"p_value", r.p_value},
              {"alpha_hat", r.alpha_hat},
              {"bandwidth", r.bandwidth},
              {"warnings", r.warnings}};
}

void write_json(const std::string& path, const json& j) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

std::ofstream open_csv(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
  return out;
}

// ---- commands ----

struct SimulateArgs {
  std::string scenario = "test2";
  int model = 1;
  std::size_t n = 1000;
  double rho = 0.0;
  std::string shock = "normal";
  double c = 0.0;
  std::uint64_t seed = 1;
  bool standardize = false;
  std::size_t burnin = dgp::kDefaultBurnin;
  std::vector<std::string> out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& os) {
  dgp::Scenario scenario{};
  dgp::Shock shock;
  try {
    scenario = dgp::parse_scenario(a.scenario);
    shock = dgp::parse_shock(a.shock);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto model = dgp::make_model(scenario, a.model, a.c);
  const auto design = dgp::simulate_design(model, shock, a.n, a.rho, a.seed, a.standardize, a.burnin);
  io::write_series_csv(a.out[0], design.series.values());
  io::write_covariates_csv(a.out[1], design.panel);
  os << "wrote " << a.n << " observations of " << dgp::to_string(scenario) << " model " << a.model << " to "
     << a.out[0] << " and " << a.out[1] << '\n';
  return kExitOk;
}

struct FitArgs {
  DataOptions data;
  MethodOptions method;
  std::size_t p = 1;
  std::string out;
};

int cmd_fit(const FitArgs& a, std::ostream& os) {
  const auto d = load_data(a.data);
  validate_inputs(d.series, d.panel, a.p);
  const FittedModel fit = a.method.method == "spline"
                              ? fit_bspline_qmle(d.series, d.panel, a.p, spline_config(a.method))
                              : fit_partially_linear(d.series, d.panel, a.p, kernel_config(a.method));
  const auto& v = fit.residuals;
  json report{{"command", "fit"},
              {"input_hash", d.input_hash},
              {"seed", nullable(a.data.seed)},
              {"method", a.method.method},
              {"p", a.p},
              {"alpha_hat", fit.alpha_hat},
              {"n", d.series.size()},
              {"n_eff", v.size()},
              {"dropped_rows", d.dropped_rows},
              {"covariates", d.panel.names()},
              {"residual_mean", mean(v)},
              {"residual_variance", sample_variance(v)},
              {"tau_hat", rice_variance(v)},
              {"k_n", v.size() >= 50 ? json(choose_kn(v.size())) : json(nullptr)},
              {"p_values", json::array()},
              {"adjusted_p_values", json::array()},
              {"cutoffs", json::array()},
              {"warnings", fit.warnings}};
  if (const auto* km = std::get_if<KernelMethod>(&fit.method)) {
    report["bandwidth"] = std::vector<double>(km->bandwidth.data(), km->bandwidth.data() + km->bandwidth.size());
    report["kernel"] = km->kernel == KernelType::Gaussian ? "gaussian" : "epanechnikov";
  } else {
    const auto& sm = std::get<SplineMethod>(fit.method);
    report["bandwidth"] = nullptr;
    report["knots"] = sm.knots;
    report["order"] = sm.order;
  }
  if (fit.objective) report["objective"] = *fit.objective;
  std::vector<double> median_point;
  for (const auto j : fit.covariates_used) {
    auto col = d.panel.column(j);
    std::vector<double> c(col.begin(), col.end());
    std::nth_element(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2), c.end());
    median_point.push_back(c[c.size() / 2]);
  }
  report["m_hat_at_median"] = predict_m(fit, median_point);
  write_json(a.out, report);
  os << "alpha_hat:";
  for (const double x : fit.alpha_hat) os << ' ' << x;
  os << "\nreport: " << a.out << '\n';
  return kExitOk;
}

struct TestArgs {
  DataOptions data;
  MethodOptions method;
  std::size_t p = 1;
  std::string covariate;
  std::optional<std::size_t> kn;
  double level = 0.05;
  std::string out;
};

int cmd_test(const TestArgs& a, std::ostream& os) {
  const auto d = load_data(a.data);
  const std::size_t l = resolve_covariate(d.panel, a.covariate);
  const auto r = test_covariate(d.series, d.panel, l, a.p, estimator_of(a.method), a.kn);
  json report = test_json(r, d.panel);
  report["command"] = "test";
  report["input_hash"] = d.input_hash;
  report["seed"] = nullable(a.data.seed);
  report["method"] = a.method.method;
  report["p"] = a.p;
  report["level"] = a.level;
  report["dropped_rows"] = d.dropped_rows;
  report["p_values"] = std::vector<double>{r.p_value};
  report["adjusted_p_values"] = std::vector<double>{r.p_value};
  report["cutoffs"] = std::vector<double>{a.level};
  report["reject"] = r.p_value < a.level;
  write_json(a.out, report);
  os << d.panel.names()[l] << ": T_n=" << r.t_n << " z=" << r.z << " p=" << r.p_value << '\n';
  return kExitOk;
}

struct SelectArgs {
  DataOptions data;
  MethodOptions method;
  std::size_t p = 1;
  double q = 0.05;
  std::optional<std::size_t> kn;
  std::string out;
};

int cmd_select(const SelectArgs& a, std::ostream& os) {
  const auto d = load_data(a.data);
  const auto run = select_variables(d.series, d.panel, a.p, a.q, estimator_of(a.method), a.kn);
  const auto& s = run.selection;
  json tests = json::array();
  for (const auto& t : run.tests) tests.push_back(test_json(t, d.panel));
  std::vector<std::string> names;
  std::vector<std::size_t> indices;
  for (const auto i : s.selected) {
    names.push_back(d.panel.names()[i]);
    indices.push_back(i + 1);
  }
  std::vector<std::size_t> order;
  for (const auto i : s.order) order.push_back(i + 1);
  const auto& first = run.tests.front();
  json report{{"command", "select"},
              {"input_hash", d.input_hash},
              {"seed", nullable(a.data.seed)},
              {"method", a.method.method},
              {"p", a.p},
              {"q", a.q},
              {"n_eff", first.n_eff},
              {"k_n", first.k_n},
              {"tau_hat", first.tau_hat},
              {"bandwidth", first.bandwidth},
              {"dropped_rows", d.dropped_rows},
              {"covariates", d.panel.names()},
              {"p_values", s.p_values},
              {"adjusted_p_values", s.adjusted},
              {"cutoffs", s.cutoffs},
              {"order", order},
              {"k", s.k},
              {"selected", names},
              {"selected_indices", indices},
              {"tests", tests}};
  write_json(a.out, report);
  os << "selected " << s.k << " of " << d.panel.dim() << ':';
  for (const auto& name : names) os << " [" << name << ']';
  os << '\n';
  return kExitOk;
}

struct StudyArgs {
  std::string config;
  std::string out;
  std::string report;
  std::optional<std::size_t> threads;
};

mc::StudyConfig load_study(const StudyArgs& a) {
  auto cfg = study_from_json(read_json(a.config));
  if (a.threads) cfg.threads = a.threads;
  return cfg;
}

int cmd_mc_test(const StudyArgs& a, std::ostream& os, std::ostream& es) {
  const auto cfg = load_study(a);
  if (mc::is_long_running(cfg)) es << "note: long-running configuration (n=" << cfg.n << ", R=" << cfg.replications << ")\n";
  const auto rows = mc::run_rejection_study(cfg);
  auto out = open_csv(a.out);
  out << "c,rejection_rate,mc_stderr,failures\n";
  json jrows = json::array();
  for (const auto& r : rows) {
    out << io::format_double(r.c) << ',' << io::format_double(r.rate) << ',' << io::format_double(r.mc_stderr) << ','
        << r.failures << '\n';
    jrows.push_back({{"c", r.c}, {"rate", r.rate}, {"mc_stderr", r.mc_stderr}, {"valid", r.valid}, {"failures", r.failures}});
    os << "c=" << r.c << " rate=" << r.rate << " (se " << r.mc_stderr << ", failures " << r.failures << ")\n";
  }
  if (!a.report.empty()) {
    write_json(a.report, {{"command", "mc-test"}, {"config", study_to_json(cfg)}, {"rows", jrows},
                          {"input_hash", io::file_hash(a.config)}, {"seed", cfg.master_seed}});
  }
  return kExitOk;
}

int cmd_mc_select(const StudyArgs& a, std::ostream& os, std::ostream& es) {
  const json j = read_json(a.config);
  std::vector<int> models;
  std::vector<std::string> shocks;
  json base = j;
  if (j.contains("model_id") && j["model_id"].is_array()) {
    models = j["model_id"].get<std::vector<int>>();
    base.erase("model_id");
  }
  if (j.contains("shock") && j["shock"].is_array()) {
    shocks = j["shock"].get<std::vector<std::string>>();
    base.erase("shock");
  }
  auto cfg0 = study_from_json(base);
  if (a.threads) cfg0.threads = a.threads;
  if (models.empty()) models.push_back(cfg0.model_id);
  if (shocks.empty()) shocks.push_back(cfg0.shock.label());

  auto out = open_csv(a.out);
  out << "model,shock,cs,is,ce,ie\n";
  json jrows = json::array();
  for (const int m : models) {
    for (const auto& sh : shocks) {
      auto cfg = cfg0;
      cfg.model_id = m;
      cfg.shock = dgp::parse_shock(sh);
      if (!dgp::make_model(cfg.scenario, m).is_selection()) {
        throw Error(ErrorCode::InvalidArgument, "mc-select needs a selection scenario");
      }
      if (mc::is_long_running(cfg)) es << "note: long-running configuration (n=" << cfg.n << ", R=" << cfg.replications << ")\n";
      const auto res = mc::run_selection_study(cfg);
      out << m << ',' << cfg.shock.label() << ',' << io::format_double(res.mean_cs) << ','
          << io::format_double(res.mean_is) << ',' << io::format_double(res.mean_ce) << ','
          << io::format_double(res.mean_ie) << '\n';
      jrows.push_back({{"model", m},
                       {"shock", cfg.shock.label()},
                       {"cs", res.mean_cs},
                       {"is", res.mean_is},
                       {"ce", res.mean_ce},
                       {"ie", res.mean_ie},
                       {"per_covariate_frequency", res.per_covariate_freq},
                       {"valid", res.valid},
                       {"failures", res.failures}});
      os << "model " << m << ' ' << cfg.shock.label() << ": C.S.=" << res.mean_cs << " I.S.=" << res.mean_is
         << " C.E.=" << res.mean_ce << " I.E.=" << res.mean_ie << '\n';
    }
  }
  if (!a.report.empty()) {
    write_json(a.report, {{"command", "mc-select"}, {"config", j}, {"rows", jrows},
                          {"input_hash", io::file_hash(a.config)}, {"seed", cfg0.master_seed}});
  }
  return kExitOk;
}

struct FixtureArgs {
  std::string out;
  std::size_t n = 2500;
  std::uint64_t seed = 1;
};

int cmd_fixture(const FixtureArgs& a, std::ostream& os) {
  io::write_market_fixture(a.out, a.n, a.seed);
  os << "wrote " << a.n << " rows of synthetic market prices to " << a.out << '\n';
  return kExitOk;
}

}  // namespace

mc::StudyConfig study_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "study config must be a JSON object");
  static const std::vector<std::string> known{"scenario", "model_id", "n",      "rho",    "shock",   "standardize_shocks",
                                              "replications", "master_seed", "c_grid", "q", "level", "k_n",
                                              "bandwidth", "method", "burnin", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::ParseError, "unknown study config key '" + key + "'");
    }
  }
  mc::StudyConfig cfg;
  try {
    if (j.contains("scenario")) cfg.scenario = dgp::parse_scenario(j["scenario"].get<std::string>());
    if (j.contains("model_id")) cfg.model_id = j["model_id"].get<int>();
    if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
    if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
    if (j.contains("shock")) cfg.shock = dgp::parse_shock(j["shock"].get<std::string>());
    if (j.contains("standardize_shocks")) cfg.standardize_shocks = j["standardize_shocks"].get<bool>();
    if (j.contains("replications")) cfg.replications = j["replications"].get<std::size_t>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("c_grid")) cfg.c_grid = j["c_grid"].get<std::vector<double>>();
    if (j.contains("q")) cfg.q = j["q"].get<double>();
    if (j.contains("level")) cfg.level = j["level"].get<double>();
    if (j.contains("k_n") && !j["k_n"].is_null()) cfg.k_n = j["k_n"].get<std::size_t>();
    if (j.contains("bandwidth") && !j["bandwidth"].is_null()) cfg.bandwidth = j["bandwidth"].get<double>();
    if (j.contains("method")) cfg.method = j["method"].get<std::string>();
    if (j.contains("burnin")) cfg.burnin = j["burnin"].get<std::size_t>();
    if (j.contains("threads") && !j["threads"].is_null()) cfg.threads = j["threads"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("study config: ") + e.what());
  }
  mc::validate(cfg);
  return cfg;
}

json study_to_json(const mc::StudyConfig& cfg) {
  return json{{"scenario", dgp::to_string(cfg.scenario)},
              {"model_id", cfg.model_id},
              {"n", cfg.n},
              {"rho", cfg.rho},
              {"shock", cfg.shock.label()},
              {"standardize_shocks", cfg.standardize_shocks},
              {"replications", cfg.replications},
              {"master_seed", cfg.master_seed},
              {"c_grid", cfg.c_grid},
              {"q", cfg.q},
              {"level", cfg.level},
              {"k_n", cfg.k_n ? json(*cfg.k_n) : json(nullptr)},
              {"bandwidth", cfg.bandwidth ? json(*cfg.bandwidth) : json(nullptr)},
              {"method", cfg.method},
              {"burnin", cfg.burnin},
              {"threads", cfg.threads ? json(*cfg.threads) : json(nullptr)}};
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semiparametric ARCH(p)-m(X) estimation, covariate testing and selection"};
  app.name("archmx");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a table model and write series/covariate CSVs");
  simulate->add_option("--scenario", sim.scenario, "test2, test5, select5 or select10")->required();
  simulate->add_option("--model", sim.model, "Model id 1..8")->required();
  simulate->add_option("--n", sim.n, "Sample size")->required();
  simulate->add_option("--rho", sim.rho, "Covariate correlation decay");
  simulate->add_option("--shock", sim.shock, "normal, laplace[:b], t[:df], scaled-t[:df[:scale]]");
  simulate->add_option("--c", sim.c, "Signal strength in [0,1] (test scenarios)");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_flag("--standardize-shocks", sim.standardize, "Scale shocks to unit variance");
  simulate->add_option("--burnin", sim.burnin, "Burn-in length");
  simulate->add_option("--out", sim.out, "series.csv covariates.csv")->required()->expected(2);

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "Estimate alpha and m(x)");
  add_data_options(fitc, fit.data);
  add_method_options(fitc, fit.method);
  fitc->add_option("--p", fit.p, "ARCH order")->required();
  fitc->add_option("--out", fit.out, "Report JSON")->required();

  TestArgs test;
  auto* testc = app.add_subcommand("test", "Test the significance of one covariate");
  add_data_options(testc, test.data);
  add_method_options(testc, test.method);
  testc->add_option("--covariate", test.covariate, "Covariate name or 1-based index")->required();
  testc->add_option("--p", test.p, "ARCH order")->required();
  testc->add_option("--kn", test.kn, "Window size (odd)");
  testc->add_option("--level", test.level, "Significance level recorded as the cutoff");
  testc->add_option("--out", test.out, "Report JSON")->required();

  SelectArgs sel;
  auto* selc = app.add_subcommand("select", "Test every covariate and select with FDR control");
  add_data_options(selc, sel.data);
  add_method_options(selc, sel.method);
  selc->add_option("--p", sel.p, "ARCH order")->required();
  selc->add_option("--q", sel.q, "FDR level");
  selc->add_option("--kn", sel.kn, "Window size (odd)");
  selc->add_option("--out", sel.out, "Report JSON")->required();

  StudyArgs mct;
  auto* mctc = app.add_subcommand("mc-test", "Rejection-rate study over a grid of c");
  mctc->add_option("--config", mct.config, "Study JSON")->required();
  mctc->add_option("--out", mct.out, "rates.csv")->required();
  mctc->add_option("--report", mct.report, "Optional JSON with config and per-row details");
  mctc->add_option("--threads", mct.threads, "Worker cap");

  StudyArgs mcs;
  auto* mcsc = app.add_subcommand("mc-select", "Selection study");
  mcsc->add_option("--config", mcs.config, "Study JSON (model_id and shock may be arrays)")->required();
  mcsc->add_option("--out", mcs.out, "metrics.csv")->required();
  mcsc->add_option("--report", mcs.report, "Optional JSON with config and per-row details");
  mcsc->add_option("--threads", mcs.threads, "Worker cap");

  FixtureArgs fix;
  auto* fixc = app.add_subcommand("fixture", "Write a synthetic 11-covariate daily price file");
  fixc->add_option("--out", fix.out, "Output CSV")->required();
  fixc->add_option("--n", fix.n, "Number of price rows");
  fixc->add_option("--seed", fix.seed, "Seed");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*fitc) return cmd_fit(fit, out);
    if (*testc) return cmd_test(test, out);
    if (*selc) return cmd_select(sel, out);
    if (*mctc) return cmd_mc_test(mct, out, err);
    if (*mcsc) return cmd_mc_select(mcs, out, err);
    if (*fixc) return cmd_fixture(fix, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << "usage error: no command\n";
  return kExitUsage;
}

}  // namespace archmx::cli
