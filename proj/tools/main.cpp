// Command line front end: one subcommand per pipeline stage, all driven by a
// JSON run configuration.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "sigtrade/errors.hpp"
#include "sigtrade/pipeline.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;       // overrides config when nonempty
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;          // <0 = keep config value
};

void add_common(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "run configuration JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opt.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opt.seed, "master seed (overrides config)")
      ->each([&opt](const std::string&) { opt.seed_set = true; });
  cmd->add_option("--threads", opt.threads, "worker threads, 0 = all cores");
}

sigtrade::RunConfig load_config(const CliOptions& opt) {
  sigtrade::RunConfig config = sigtrade::RunConfig::load(opt.config_path);
  if (!opt.out_dir.empty()) config.out_dir = opt.out_dir;
  if (opt.seed_set) config.seed = opt.seed;
  if (opt.threads >= 0) config.threads = opt.threads;
  return config;
}

int run_stage(const char* stage, const CliOptions& opt) {
  try {
    const sigtrade::RunConfig config = load_config(opt);
    const std::string name(stage);
    if (name == "analyze") {
      const auto res = sigtrade::run_analyze(config);
      std::printf("analyze: lag=%d, %zu screened impulse(s), artifacts in %s\n", res.lag,
                  res.screen.size(), config.out_dir.string().c_str());
    } else if (name == "design") {
      const auto res = sigtrade::run_design(config);
      std::printf("design: %zu strategy spec(s) written to %s\n", res.specs.size(),
                  config.out_dir.string().c_str());
    } else if (name == "backtest") {
      const auto res = sigtrade::run_backtest_stage(config);
      std::printf("backtest: %zu strategies, %d random traders, artifacts in %s\n",
                  res.strategies.size(), res.random.n_traders,
                  config.out_dir.string().c_str());
    } else if (name == "sentiment") {
      const auto res = sigtrade::run_sentiment_stage(config);
      std::printf("sentiment: %lld record(s) read, %zu day(s) with documents\n",
                  static_cast<long long>(res.signals.records_read),
                  res.signals.volume.size());
    } else {
      sigtrade::run_report_stage(config);
      std::printf("report: written to %s\n", config.out_dir.string().c_str());
    }
    return 0;
  } catch (const sigtrade::Error& e) {
    std::fprintf(stderr, "sigtrade %s: %s: %s\n", stage, to_string(e.kind()), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sigtrade %s: %s\n", stage, e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signal-driven trading analysis pipeline"};
  app.require_subcommand(1);

  CliOptions opt;
  const char* stages[] = {"analyze", "design", "backtest", "sentiment", "report"};
  const char* descriptions[] = {
      "stationarize signals, fit the lag model, screen shock responses",
      "turn screened responses into strategy specifications",
      "simulate strategies over the leave-out window and evaluate them",
      "build daily volume/valence/polarization series from a corpus",
      "collect stage outputs into report.json and summary.txt"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(stages[i], descriptions[i]), opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad usage is a configuration error
  }

  for (const char* stage : stages)
    if (app.get_subcommand(stage)->parsed()) return run_stage(stage, opt);
  return 1;
}
