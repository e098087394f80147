#include "sigtrade/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sigtrade/errors.hpp"
#include "sigtrade/rng.hpp"
#include "sigtrade/serialize.hpp"
#include "sigtrade/stats.hpp"

namespace sigtrade {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Seed streams for the independent random stages.
constexpr std::uint64_t kStreamBoot = 0xB007;
constexpr std::uint64_t kStreamPerm = 0x9E2A;
constexpr std::uint64_t kStreamMc = 0x4D43;

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

json parse_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in)
    throw DataError(ErrorKind::io, std::string(what) + " not found: '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(ErrorKind::parse,
                      std::string(what) + " '" + path.string() + "': " + e.what());
  }
  return j;
}

[[noreturn]] void bad_key(const std::string& key, const char* expected) {
  throw ConfigError(ErrorKind::bad_config, "config key '" + key + "' must be " + expected);
}

double get_num(const json& j, const std::string& key, double def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number()) bad_key(key, "a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number_integer()) bad_key(key, "an integer");
  return j.at(key).get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& key, std::uint64_t def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number_integer()) bad_key(key, "an integer");
  return j.at(key).get<std::uint64_t>();
}

std::string get_str(const json& j, const std::string& key, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_string()) bad_key(key, "a string");
  return j.at(key).get<std::string>();
}

std::string require_str(const json& j, const std::string& key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ConfigError(ErrorKind::bad_config,
                      std::string(where) + " needs a string key '" + key + "'");
  return j.at(key).get<std::string>();
}

std::string sanitize_name(const std::string& name) {
  std::string out = name;
  for (char& c : out)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      c = '_';
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void write_json(const fs::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

Date parse_config_date(const json& j, const std::string& key, const char* where) {
  return Date::parse(require_str(j, key, where));
}

}  // namespace

Manifest load_manifest(const fs::path& path) {
  const json j = parse_json_file(path, "manifest");
  if (!j.is_object()) throw ConfigError(ErrorKind::bad_config, "manifest must be a JSON object");
  Manifest m;
  m.price = require_str(j, "price", "manifest");
  m.analysis_end = parse_config_date(j, "analysis_end", "manifest");
  m.leave_out_end = parse_config_date(j, "leave_out_end", "manifest");
  if (!(m.analysis_end < m.leave_out_end))
    throw ConfigError(ErrorKind::bad_config,
                      "manifest: leave_out_end must be after analysis_end");
  if (!j.contains("signals") || !j.at("signals").is_array() || j.at("signals").empty())
    throw ConfigError(ErrorKind::bad_config, "manifest needs a nonempty 'signals' array");
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  for (const auto& e : j.at("signals")) {
    if (!e.is_object())
      throw ConfigError(ErrorKind::bad_config, "manifest signal entries must be objects");
    ManifestEntry entry;
    entry.name = require_str(e, "name", "manifest signal");
    entry.path = resolve(base, require_str(e, "path", "manifest signal"));
    entry.extra_lag = get_int(e, "extra_lag", 0);
    if (entry.extra_lag < 0)
      throw ConfigError(ErrorKind::bad_config, "manifest: extra_lag must be nonnegative");
    for (const auto& prev : m.signals)
      if (prev.name == entry.name)
        throw ConfigError(ErrorKind::bad_config,
                          "manifest lists signal '" + entry.name + "' twice");
    m.signals.push_back(std::move(entry));
  }
  bool has_price = false;
  for (const auto& e : m.signals) has_price = has_price || e.name == m.price;
  if (!has_price)
    throw ConfigError(ErrorKind::bad_config,
                      "manifest price '" + m.price + "' is not among the signals");
  return m;
}

RunConfig RunConfig::load(const fs::path& path) {
  const json j = parse_json_file(path, "config");
  if (!j.is_object()) throw ConfigError(ErrorKind::bad_config, "config must be a JSON object");
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");

  RunConfig rc;
  rc.manifest_path = resolve(base, require_str(j, "manifest", "config"));
  rc.out_dir = resolve(base, get_str(j, "out", "out"));
  rc.seed = get_u64(j, "seed", 0);
  rc.threads = get_int(j, "threads", 0);
  rc.gap_policy = gap_policy_from_string(get_str(j, "gap_policy", "fail"));

  if (j.contains("var")) {
    const auto& v = j.at("var");
    rc.var.lag = get_int(v, "lag", 0);
    rc.var.max_lag = get_int(v, "max_lag", 6);
    if (rc.var.lag < 0 || rc.var.max_lag < 1)
      throw ConfigError(ErrorKind::bad_config, "config: var.lag/max_lag out of range");
  }
  if (j.contains("irf")) {
    const auto& v = j.at("irf");
    rc.irf.horizon = get_int(v, "horizon", rc.irf.horizon);
    rc.irf.n_boot = get_int(v, "n_boot", rc.irf.n_boot);
    rc.irf.threshold = get_num(v, "threshold", rc.irf.threshold);
    rc.irf.n_perm = get_int(v, "n_perm", rc.irf.n_perm);
    if (v.contains("ordering")) {
      if (!v.at("ordering").is_array()) bad_key("irf.ordering", "an array of variable names");
      for (const auto& s : v.at("ordering")) {
        if (!s.is_string()) bad_key("irf.ordering", "an array of variable names");
        rc.irf.ordering.push_back(s.get<std::string>());
      }
    }
    if (rc.irf.horizon < 1 || rc.irf.threshold < 0.0)
      throw ConfigError(ErrorKind::bad_config, "config: irf settings out of range");
  }
  if (j.contains("strategies")) {
    const auto& v = j.at("strategies");
    rc.strategies.rsi_window = get_int(v, "rsi_window", rc.strategies.rsi_window);
    rc.strategies.rsi_hi = get_num(v, "rsi_hi", rc.strategies.rsi_hi);
    rc.strategies.rsi_lo = get_num(v, "rsi_lo", rc.strategies.rsi_lo);
    rc.strategies.random_traders = get_int(v, "random_traders", rc.strategies.random_traders);
  }
  if (j.contains("costs")) {
    const auto& v = j.at("costs");
    rc.costs.cost = get_num(v, "cost", rc.costs.cost);
    rc.costs.mode = trade_mode_from_string(get_str(v, "mode", "full"));
    if (v.contains("sweep")) {
      if (!v.at("sweep").is_array()) bad_key("costs.sweep", "an array of numbers");
      rc.costs.sweep.clear();
      for (const auto& c : v.at("sweep")) {
        if (!c.is_number()) bad_key("costs.sweep", "an array of numbers");
        rc.costs.sweep.push_back(c.get<double>());
      }
    }
  }
  if (j.contains("evaluation")) {
    const auto& v = j.at("evaluation");
    rc.evaluation.risk_free = get_num(v, "risk_free", rc.evaluation.risk_free);
    rc.evaluation.kde_bandwidth = get_num(v, "kde_bandwidth", rc.evaluation.kde_bandwidth);
    rc.evaluation.kde_grid = get_int(v, "kde_grid", rc.evaluation.kde_grid);
  }
  if (j.contains("sentiment")) {
    const auto& v = j.at("sentiment");
    rc.sentiment.configured = true;
    rc.sentiment.corpus = resolve(base, require_str(v, "corpus", "config sentiment"));
    rc.sentiment.valence_lexicon =
        resolve(base, require_str(v, "valence_lexicon", "config sentiment"));
    rc.sentiment.polarity_lexicon =
        resolve(base, require_str(v, "polarity_lexicon", "config sentiment"));
    rc.sentiment.start = parse_config_date(v, "start", "config sentiment");
    rc.sentiment.end = parse_config_date(v, "end", "config sentiment");
  }
  return rc;
}

std::pair<Panel, Manifest> load_panel(const RunConfig& config) {
  Manifest manifest = load_manifest(config.manifest_path);
  std::vector<Signal> signals;
  signals.reserve(manifest.signals.size());
  for (const auto& e : manifest.signals) signals.push_back(load_signal_csv(e.path, e.name));
  std::vector<Signal> aligned =
      signals.size() >= 2 ? align(signals, config.gap_policy) : std::move(signals);
  return {Panel(std::move(aligned), manifest.analysis_end, manifest.leave_out_end),
          std::move(manifest)};
}

namespace {

json report_json(const StationarityReport& rep, const ZParams* z) {
  json j{{"signal", rep.signal_name},
         {"adf_stat", rep.adf_stat},
         {"adf_p", rep.adf_p},
         {"kpss_stat", rep.kpss_stat},
         {"kpss_p", rep.kpss_p},
         {"verdict", to_string(rep.verdict)},
         {"differences_applied", rep.differences_applied}};
  if (z) {
    j["z_mean"] = z->mean;
    j["z_sd"] = z->sd;
  } else {
    j["z_mean"] = nullptr;
    j["z_sd"] = nullptr;
  }
  return j;
}

void write_analyze_artifacts(const RunConfig& rc, const AnalyzeResult& res) {
  const fs::path out = rc.out_dir;

  json stationarity{{"reports", json::array()}};
  for (const auto& rep : res.reports) {
    const auto it = res.z_params.find(rep.signal_name);
    stationarity["reports"].push_back(
        report_json(rep, it == res.z_params.end() ? nullptr : &it->second));
  }
  write_json(out / "stationarity.json", stationarity);

  json lag{{"auto", res.auto_lag}, {"lag", res.lag}};
  if (res.auto_lag) {
    json bic = json::object();
    for (const auto& [p, b] : res.lag_selection.bic_by_lag) bic[std::to_string(p)] = b;
    lag["bic_by_lag"] = std::move(bic);
  }
  write_json(out / "lag_selection.json", lag);

  json fitj{{"variables", res.fit.variable_names},
            {"lag", res.fit.lag},
            {"t_effective", res.fit.t_effective},
            {"trend", vector_json(res.fit.trend)},
            {"intercept", vector_json(res.fit.intercept)},
            {"sigma", matrix_json(res.fit.sigma)},
            {"sigma_ml", matrix_json(res.fit.sigma_ml)}};
  json phis = json::array();
  for (std::size_t i = 0; i < res.fit.phi.size(); ++i)
    phis.push_back(json{{"lag", i + 1}, {"matrix", matrix_json(res.fit.phi[i])}});
  fitj["phi"] = std::move(phis);
  write_json(out / "var_fit.json", fitj);

  json diagj{{"max_lag", res.diagnostics.max_lag},
             {"residual_correlation", matrix_json(res.diagnostics.residual_correlation)},
             {"equations", json::array()}};
  for (std::size_t eq = 0; eq < res.diagnostics.variable_names.size(); ++eq) {
    json lbs = json::array(), lbp = json::array();
    for (int h = 0; h < res.diagnostics.max_lag; ++h) {
      lbs.push_back(res.diagnostics.lb_stat(static_cast<Eigen::Index>(eq), h));
      lbp.push_back(res.diagnostics.lb_p(static_cast<Eigen::Index>(eq), h));
    }
    diagj["equations"].push_back(json{{"name", res.diagnostics.variable_names[eq]},
                                      {"lb_stat", std::move(lbs)},
                                      {"lb_p", std::move(lbp)}});
  }
  write_json(out / "residual_diagnostics.json", diagj);

  json irfj{{"variables", res.irf.variable_names},
            {"horizon", res.irf.horizon},
            {"n_boot", res.irf.n_boot},
            {"skipped_replicates", res.irf.skipped_replicates},
            {"ordering", res.ordering},
            {"responses", json::array()}};
  std::ostringstream csv;
  csv << "impulse,response,h,value,lo,hi\n";
  for (const auto& impulse : res.irf.variable_names) {
    for (const auto& response : res.irf.variable_names) {
      const auto i = res.irf.index_of(impulse);
      const auto jdx = res.irf.index_of(response);
      json value = json::array(), lo = json::array(), hi = json::array(), cum = json::array();
      for (int h = 0; h <= res.irf.horizon; ++h) {
        const auto hs = static_cast<std::size_t>(h);
        value.push_back(res.irf.response[hs](jdx, i));
        lo.push_back(res.irf.ci_low[hs](jdx, i));
        hi.push_back(res.irf.ci_high[hs](jdx, i));
        cum.push_back(res.irf.cumulative[hs](jdx, i));
        csv << impulse << ',' << response << ',' << h << ','
            << format_double(res.irf.response[hs](jdx, i)) << ','
            << format_double(res.irf.ci_low[hs](jdx, i)) << ','
            << format_double(res.irf.ci_high[hs](jdx, i)) << '\n';
      }
      irfj["responses"].push_back(json{{"impulse", impulse},
                                       {"response", response},
                                       {"value", std::move(value)},
                                       {"lo", std::move(lo)},
                                       {"hi", std::move(hi)},
                                       {"cumulative", std::move(cum)}});
    }
  }
  write_json(out / "irf.json", irfj);
  write_file_atomic(out / "irf.csv", csv.str());

  json screenj{{"response", "ret"},
               {"threshold", rc.irf.threshold},
               {"horizon", res.irf.horizon},
               {"hits", json::array()}};
  for (const auto& hit : res.screen)
    screenj["hits"].push_back(json{{"impulse", hit.impulse},
                                   {"sign", hit.sign},
                                   {"cumulative_at_horizon", hit.cumulative_at_horizon},
                                   {"h1_response", hit.h1_response}});
  write_json(out / "screen.json", screenj);

  if (res.permutation) {
    const auto& perm = *res.permutation;
    json cells = json::array();
    for (std::size_t i = 0; i < perm.variable_names.size(); ++i)
      for (std::size_t jdx = 0; jdx < perm.variable_names.size(); ++jdx)
        cells.push_back(json{
            {"impulse", perm.variable_names[i]},
            {"response", perm.variable_names[jdx]},
            {"observed_h1",
             perm.observed_h1(static_cast<Eigen::Index>(jdx), static_cast<Eigen::Index>(i))},
            {"p", perm.p(static_cast<Eigen::Index>(jdx), static_cast<Eigen::Index>(i))}});
    write_json(out / "permutation.json",
               json{{"n_perm", perm.n_perm},
                    {"lag", perm.lag},
                    {"skipped", perm.skipped},
                    {"cells", std::move(cells)}});
  }
}

}  // namespace

AnalyzeResult run_analyze(const RunConfig& config) {
  auto [panel, manifest] = load_panel(config);
  const Signal& price = panel.signal(manifest.price);
  for (const auto& s : panel.signals())
    if (s.name == "ret" && s.name != manifest.price)
      throw ConfigError(ErrorKind::bad_config,
                        "signal name 'ret' is reserved for the returns series");

  std::vector<std::string> variables{"ret"};
  for (const auto& s : panel.signals())
    if (s.name != manifest.price) variables.push_back(s.name);

  AnalyzeResult res;
  res.ordering = config.irf.ordering.empty() ? variables : config.irf.ordering;
  {
    auto a = res.ordering, b = variables;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b)
      throw ConfigError(ErrorKind::bad_config,
                        "irf.ordering must be a permutation of the model variables");
  }

  const Signal ret = compute_returns(price, "ret");
  std::map<std::string, Signal> transformed;
  for (const auto& var : variables) {
    const Signal& base = var == "ret" ? ret : panel.signal(var);
    const Signal analysis_slice = base.slice(base.first_date(), panel.analysis_end());
    auto [txf_slice, rep] = auto_stationarize(analysis_slice, 2);
    (void)txf_slice;  // decisions are made on the analysis slice only
    Signal full = rep.differences_applied > 0 ? difference(base, rep.differences_applied) : base;
    if (var != "ret") {
      auto [z, zp] = z_transform(full, full.first_date(), panel.analysis_end());
      full = std::move(z);
      res.z_params[var] = zp;
    }
    rep.signal_name = var;
    res.reports.push_back(rep);
    transformed.emplace(var, std::move(full));
  }

  // All transformed series live on the raw axis minus some leading rows;
  // cut them to the latest first date so they share the axis again.
  Date common_first = transformed.begin()->second.first_date();
  for (const auto& [name, s] : transformed)
    common_first = std::max(common_first, s.first_date());
  std::vector<Signal> tsignals;
  tsignals.reserve(res.ordering.size());
  for (const auto& var : res.ordering) {
    const Signal& s = transformed.at(var);
    tsignals.push_back(s.slice(common_first, s.last_date()));
  }
  Panel tpanel(std::move(tsignals), panel.analysis_end(), panel.leave_out_end());

  if (config.var.lag > 0) {
    res.auto_lag = false;
    res.lag = config.var.lag;
  } else {
    res.auto_lag = true;
    res.lag_selection = select_lag(tpanel, config.var.max_lag);
    res.lag = res.lag_selection.lag;
  }
  res.fit = fit_var(tpanel, res.lag);
  res.irf = bootstrap_irf(res.fit, tpanel, config.irf.horizon, config.irf.n_boot,
                          derive_seed(config.seed, kStreamBoot), config.threads);
  res.screen = cumulative_screen(res.irf, "ret", config.irf.threshold);
  if (config.irf.n_perm > 0)
    res.permutation = permutation_test(tpanel, res.lag, config.irf.horizon, config.irf.n_perm,
                                       derive_seed(config.seed, kStreamPerm), config.threads);
  const int diag_lag = std::min(10, res.fit.t_effective - 1);
  res.diagnostics = residual_diagnostics(res.fit, diag_lag);

  write_analyze_artifacts(config, res);
  return res;
}

namespace {

json spec_to_json(const StrategySpec& spec) {
  switch (spec.kind) {
    case StrategyKind::signal:
      return json{{"kind", "signal"},
                  {"signal", spec.signal_name},
                  {"sign", spec.sign},
                  {"extra_lag", spec.extra_lag}};
    case StrategyKind::combined: {
      json members = json::array();
      for (const auto& m : spec.members) members.push_back(spec_to_json(m));
      return json{{"kind", "combined"}, {"members", std::move(members)}};
    }
    default:
      return json{{"kind", to_string(spec.kind)}};
  }
}

StrategySpec spec_from_json(const json& j) {
  StrategySpec spec;
  spec.kind = strategy_kind_from_string(require_str(j, "kind", "strategy spec"));
  switch (spec.kind) {
    case StrategyKind::signal:
      spec.signal_name = require_str(j, "signal", "signal strategy spec");
      spec.sign = get_int(j, "sign", 1);
      spec.extra_lag = get_int(j, "extra_lag", 0);
      if (spec.sign != 1 && spec.sign != -1)
        throw ConfigError(ErrorKind::bad_config, "strategy sign must be +1 or -1");
      break;
    case StrategyKind::combined: {
      if (!j.contains("members") || !j.at("members").is_array() || j.at("members").empty())
        throw ConfigError(ErrorKind::bad_config, "combined spec needs nonempty members");
      for (const auto& m : j.at("members")) spec.members.push_back(spec_from_json(m));
      break;
    }
    default:
      break;
  }
  return spec;
}

}  // namespace

DesignResult run_design(const RunConfig& config) {
  const json screen = parse_json_file(config.out_dir / "screen.json", "screening output");
  const Manifest manifest = load_manifest(config.manifest_path);
  std::map<std::string, int> extra_lag;
  for (const auto& e : manifest.signals) extra_lag[e.name] = e.extra_lag;

  DesignResult res;
  if (!screen.contains("hits") || !screen.at("hits").is_array())
    throw DataError(ErrorKind::parse, "screen.json has no hits array");
  for (const auto& hit : screen.at("hits")) {
    StrategySpec spec;
    spec.kind = StrategyKind::signal;
    spec.signal_name = require_str(hit, "impulse", "screen hit");
    spec.sign = get_int(hit, "sign", 1);
    if (auto it = extra_lag.find(spec.signal_name); it != extra_lag.end())
      spec.extra_lag = it->second;
    res.specs.push_back(std::move(spec));
  }
  if (!res.specs.empty()) {
    StrategySpec combined;
    combined.kind = StrategyKind::combined;
    combined.members = res.specs;
    res.specs.push_back(std::move(combined));
  }

  json out{{"strategies", json::array()}};
  for (const auto& spec : res.specs) out["strategies"].push_back(spec_to_json(spec));
  if (res.specs.empty()) out["warning"] = "screening selected no impulses; nothing to trade";
  write_json(config.out_dir / "strategies.json", out);
  return res;
}

namespace {

void write_prediction_csv(const fs::path& path, const PredictionSeries& preds) {
  std::ostringstream out;
  out << "date,prediction\n";
  for (std::size_t i = 0; i < preds.size(); ++i)
    out << preds.dates[i].to_string() << ',' << preds.values[i] << '\n';
  write_file_atomic(path, out.str());
}

void write_ledger_csv(const fs::path& path, const Ledger& ledger) {
  std::ostringstream out;
  out << "date,prediction,action,nUSD,nBTC,CR,profit_pct\n";
  for (const auto& r : ledger.rows)
    out << r.date.to_string() << ',' << r.prediction << ',' << to_string(r.action) << ','
        << format_double(r.cash) << ',' << format_double(r.asset) << ',' << format_double(r.cr)
        << ',' << format_double(r.profit_pct) << '\n';
  write_file_atomic(path, out.str());
}

json diagnostics_json(const ReturnDiagnostics& d) {
  return json{{"lognormal_mu", d.lognormal_mu},
              {"lognormal_sigma", d.lognormal_sigma},
              {"shift", d.shift},
              {"ks_stat", d.ks_stat},
              {"ks_p", d.ks_p},
              {"lb_stat", d.lb_stat},
              {"lb_p", d.lb_p},
              {"lb_lags", d.lb_lags},
              {"adf_stat", d.adf_stat},
              {"adf_p", d.adf_p},
              {"kpss_stat", d.kpss_stat},
              {"kpss_p", d.kpss_p},
              {"verdict", to_string(d.verdict)}};
}

}  // namespace

BacktestResult run_backtest_stage(const RunConfig& config) {
  auto [panel, manifest] = load_panel(config);
  const std::vector<Date> eval_dates = panel.leave_out_dates();
  if (eval_dates.size() < 2)
    throw ConfigError(ErrorKind::bad_config, "leave-out period has fewer than 2 days");
  const Signal price_eval =
      panel.signal(manifest.price).slice(eval_dates.front(), eval_dates.back());

  const json designed =
      parse_json_file(config.out_dir / "strategies.json", "designed strategies");
  std::vector<StrategySpec> specs;
  if (designed.contains("strategies") && designed.at("strategies").is_array())
    for (const auto& s : designed.at("strategies")) specs.push_back(spec_from_json(s));

  // Technical benchmarks always run alongside the designed set.
  for (const auto kind :
       {StrategyKind::momentum, StrategyKind::upd, StrategyKind::rsi, StrategyKind::buy_and_hold}) {
    StrategySpec spec;
    spec.kind = kind;
    spec.signal_name = manifest.price;
    spec.window = config.strategies.rsi_window;
    spec.rsi_hi = config.strategies.rsi_hi;
    spec.rsi_lo = config.strategies.rsi_lo;
    specs.push_back(std::move(spec));
  }

  const CostModel cost = CostModel::flat(config.costs.cost);
  BacktestResult res;
  std::ostringstream sweep_csv;
  sweep_csv << "strategy,cost,final_profit_pct\n";

  for (const auto& spec : specs) {
    StrategyEval ev;
    ev.name = spec.name();
    const PredictionSeries preds = predict(spec, panel, eval_dates);
    ev.ledger = run_backtest(price_eval, preds, cost, config.costs.mode);
    try {
      ev.sharpe = sharpe(ev.ledger, config.evaluation.risk_free);
    } catch (const NumericError&) {
      ev.degenerate = true;  // constant capital path
    }
    try {
      ev.diagnostics = return_diagnostics(ev.ledger);
    } catch (const Error&) {
      ev.diagnostics = std::nullopt;
    }

    const std::string file = sanitize_name(ev.name);
    write_prediction_csv(config.out_dir / "predictions" / ("pred_" + file + ".csv"), preds);
    write_ledger_csv(config.out_dir / "ledgers" / ("ledger_" + file + ".csv"), ev.ledger);

    const std::vector<double> profits = profit_distribution(ev.ledger);
    std::ostringstream pcsv;
    pcsv << "date,profit_pct\n";
    for (std::size_t i = 0; i < profits.size(); ++i)
      pcsv << ev.ledger.rows[i].date.to_string() << ',' << format_double(profits[i]) << '\n';
    write_file_atomic(config.out_dir / "profits" / ("profits_" + file + ".csv"), pcsv.str());

    const KdeCurve curve =
        kde(profits, config.evaluation.kde_bandwidth, config.evaluation.kde_grid);
    std::ostringstream kcsv;
    kcsv << "x,density\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i)
      kcsv << format_double(curve.x[i]) << ',' << format_double(curve.density[i]) << '\n';
    write_file_atomic(config.out_dir / "kde" / ("kde_" + file + ".csv"), kcsv.str());

    for (const auto& [c, profit] : cost_sweep(price_eval, preds, config.costs.sweep,
                                              config.costs.mode))
      sweep_csv << ev.name << ',' << format_double(c) << ',' << format_double(profit) << '\n';

    res.strategies.push_back(std::move(ev));
  }
  write_file_atomic(config.out_dir / "cost_sweep.csv", sweep_csv.str());

  res.random = monte_carlo_random(price_eval, config.strategies.random_traders, cost,
                                  derive_seed(config.seed, kStreamMc), config.threads);
  {
    double sum = 0.0;
    int kept = 0;
    for (std::size_t i = 0; i < res.random.trader_mean_return.size(); ++i) {
      if (res.random.trader_sd_return[i] > 0.0) {
        sum += std::sqrt(365.0) *
               (res.random.trader_mean_return[i] - config.evaluation.risk_free) /
               res.random.trader_sd_return[i];
        ++kept;
      }
    }
    res.random_skipped_degenerate = res.random.n_traders - kept;
    res.random_mean_sharpe = kept > 0 ? sum / static_cast<double>(kept) : 0.0;
  }
  {
    std::ostringstream env;
    env << "date,mean_profit_pct,sd_profit_pct\n";
    for (std::size_t i = 0; i < res.random.dates.size(); ++i)
      env << res.random.dates[i].to_string() << ',' << format_double(res.random.mean_profit[i])
          << ',' << format_double(res.random.sd_profit[i]) << '\n';
    write_file_atomic(config.out_dir / "random_envelope.csv", env.str());

    std::ostringstream fin;
    fin << "trader,final_profit_pct\n";
    for (std::size_t i = 0; i < res.random.final_profits.size(); ++i)
      fin << i << ',' << format_double(res.random.final_profits[i]) << '\n';
    write_file_atomic(config.out_dir / "random_final_profits.csv", fin.str());
  }

  for (std::size_t i = 0; i < res.strategies.size(); ++i) {
    for (std::size_t j = i + 1; j < res.strategies.size(); ++j) {
      const auto pa = profit_distribution(res.strategies[i].ledger);
      const auto pb = profit_distribution(res.strategies[j].ledger);
      res.wilcoxon.emplace_back(res.strategies[i].name, res.strategies[j].name,
                                wilcoxon_rank_sum(pa, pb));
    }
  }

  json report{{"cost", config.costs.cost},
              {"mode", to_string(config.costs.mode)},
              {"risk_free", config.evaluation.risk_free},
              {"strategies", json::array()},
              {"notes",
               {{"ks", "KS p-values are computed against the fitted distribution without "
                       "parameter-estimation correction and are anti-conservative"}}}};
  for (const auto& ev : res.strategies) {
    json s{{"name", ev.name},
           {"n_days", ev.ledger.rows.size()},
           {"final_profit_pct", ev.ledger.final_profit_pct()},
           {"degenerate", ev.degenerate}};
    if (ev.degenerate) {
      s["sharpe_annualized"] = nullptr;
      s["mean_daily_return"] = nullptr;
      s["sd_daily_return"] = nullptr;
    } else {
      s["sharpe_annualized"] = ev.sharpe.annualized;
      s["mean_daily_return"] = ev.sharpe.mean_daily;
      s["sd_daily_return"] = ev.sharpe.sd_daily;
    }
    s["diagnostics"] = ev.diagnostics ? diagnostics_json(*ev.diagnostics) : json(nullptr);
    report["strategies"].push_back(std::move(s));
  }
  {
    std::vector<double> fp = res.random.final_profits;
    const double mean_fp = mean(fp);
    const double sd_fp = sample_sd(fp);
    const double mean_mu = mean(res.random.trader_mean_return);
    report["random"] = json{{"n_traders", res.random.n_traders},
                            {"mean_sharpe", res.random_mean_sharpe},
                            {"skipped_degenerate", res.random_skipped_degenerate},
                            {"mean_daily_return", mean_mu},
                            {"mean_final_profit_pct", mean_fp},
                            {"sd_final_profit_pct", sd_fp}};
  }
  json wj = json::array();
  for (const auto& [a, b, w] : res.wilcoxon)
    wj.push_back(json{{"a", a}, {"b", b}, {"statistic", w.statistic}, {"p", w.p},
                      {"exact", w.exact}});
  report["wilcoxon"] = std::move(wj);
  write_json(config.out_dir / "eval_report.json", report);
  return res;
}

SentimentResult run_sentiment_stage(const RunConfig& config) {
  if (!config.sentiment.configured)
    throw ConfigError(ErrorKind::bad_config, "config has no 'sentiment' section");
  const Lexicon valence = Lexicon::load_valence_csv(config.sentiment.valence_lexicon);
  const Lexicon polarity = Lexicon::load_polarity_csv(config.sentiment.polarity_lexicon);
  std::ifstream corpus(config.sentiment.corpus);
  if (!corpus)
    throw DataError(ErrorKind::io,
                    "cannot open corpus '" + config.sentiment.corpus.string() + "'");

  SentimentResult res;
  res.signals =
      build_signals(corpus, valence, polarity, config.sentiment.start, config.sentiment.end);
  res.volume_csv = config.out_dir / "t_n.csv";
  res.valence_csv = config.out_dir / "t_val.csv";
  res.polarization_csv = config.out_dir / "t_pol.csv";
  save_signal_csv(res.signals.volume, res.volume_csv);
  save_signal_csv(res.signals.valence, res.valence_csv);
  save_signal_csv(res.signals.polarization, res.polarization_csv);
  write_json(config.out_dir / "sentiment_summary.json",
             json{{"records_read", res.signals.records_read},
                  {"records_skipped", res.signals.records_skipped},
                  {"days_with_documents", res.signals.volume.size()},
                  {"days_with_valence", res.signals.valence.size()}});
  return res;
}

void run_report_stage(const RunConfig& config) {
  const json eval = parse_json_file(config.out_dir / "eval_report.json", "evaluation report");
  json report{{"evaluation", eval}};
  for (const char* name :
       {"screen.json", "stationarity.json", "lag_selection.json", "permutation.json",
        "sentiment_summary.json"}) {
    const fs::path p = config.out_dir / name;
    if (fs::exists(p)) {
      std::string key = name;
      key = key.substr(0, key.size() - 5);
      report[key] = parse_json_file(p, name);
    }
  }

  // Side-by-side table: strategy, annualized Sharpe, mean daily return in
  // percent per day.
  json table = json::array();
  std::ostringstream txt;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %12s %16s\n", "strategy", "SR",
                "mean_daily_ret_%");
  txt << line;
  auto add_row = [&](const std::string& name, const json& sr, const json& mu) {
    table.push_back(json{{"strategy", name}, {"sharpe_annualized", sr},
                         {"mean_daily_return_pct", mu}});
    if (sr.is_null() || mu.is_null()) {
      std::snprintf(line, sizeof(line), "%-24s %12s %16s\n", name.c_str(), "n/a", "n/a");
    } else {
      std::snprintf(line, sizeof(line), "%-24s %12.4f %16.4f\n", name.c_str(),
                    sr.get<double>(), mu.get<double>() * 100.0);
    }
    txt << line;
  };
  if (eval.contains("strategies"))
    for (const auto& s : eval.at("strategies"))
      add_row(s.at("name").get<std::string>(), s.at("sharpe_annualized"),
              s.at("mean_daily_return"));
  if (eval.contains("random"))
    add_row("random (mean)", eval.at("random").at("mean_sharpe"),
            eval.at("random").at("mean_daily_return"));
  report["table"] = std::move(table);

  write_json(config.out_dir / "report.json", report);
  write_file_atomic(config.out_dir / "summary.txt", txt.str());
}

}  // namespace sigtrade
