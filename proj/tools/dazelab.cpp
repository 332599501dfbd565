#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "daze/error.hpp"
#include "daze/lab.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kVerification = 2, kTraining = 3 };

struct Common {
  std::string config;
  std::string out;
  std::string seeds;
  unsigned jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file (flat namespaced keys)")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory (default: $DAZELAB_OUT or ./dazelab_out)");
  cmd->add_option("--seeds", c.seeds, "seed list, e.g. 0-4 or 1,3,7 (overrides run.seeds)");
  cmd->add_option("--jobs", c.jobs, "parallel worker threads")->check(CLI::PositiveNumber);
}

daze::RunConfig load(const Common& c) {
  daze::RunConfig config = c.config.empty() ? daze::RunConfig::defaults(daze::EnvKind::gridworld)
                                            : daze::load_config(c.config);
  if (!c.seeds.empty()) config.seeds = daze::parse_seeds(c.seeds);
  return config;
}

daze::RunOptions options(const Common& c) {
  daze::RunOptions o;
  o.jobs = c.jobs;
  o.out_dir = c.out.empty() ? daze::default_out_dir() : std::filesystem::path(c.out);
  return o;
}

std::size_t failed(const daze::CellResult& cell) { return cell.metrics.failed_seeds; }

int report_failures(std::size_t n) {
  if (n == 0) return kOk;
  std::cerr << "dazelab: " << n << " seed(s) failed during training\n";
  return kTraining;
}

int cmd_train(const Common& c) {
  const auto config = load(c);
  const auto opts = options(c);
  const auto result = daze::run_experiment(config, opts);
  std::vector<daze::RunMetrics> rows;
  if (result.control) rows.push_back(result.control->metrics);
  rows.push_back(result.run.metrics);
  daze::write_csv(std::cout, rows);
  return report_failures(failed(result.run) + (result.control ? failed(*result.control) : 0));
}

int cmd_eval(const Common& c) {
  const auto config = load(c);
  const auto cell = daze::run_evaluation(config, options(c));
  daze::write_csv(std::cout, {cell.metrics});
  return kOk;
}

int cmd_sweep(const Common& c) {
  const auto config = load(c);
  const auto result = daze::run_ablation(config, options(c));
  std::vector<daze::RunMetrics> rows{result.control->metrics};
  std::size_t failures = failed(*result.control);
  for (const auto& cell : result.cells) {
    rows.push_back(cell.metrics);
    failures += failed(cell);
  }
  daze::write_csv(std::cout, rows);
  for (const auto& t : result.trends) {
    std::cerr << "beta=" << daze::format_number(t.beta) << " spearman(asr,k)=" << daze::format_number(t.spearman)
              << '\n';
  }
  return report_failures(failures);
}

int cmd_verify(const Common& c) {
  auto config = load(c);
  // The first seed offsets the instance seeds.
  if (!c.seeds.empty()) config.verify.seed = config.seeds.front();
  const auto summary = daze::run_verification(config, options(c));
  std::size_t passed = 0;
  for (const auto& r : summary.rows) passed += r.status == "pass";
  std::cout << "checks passed: " << passed << ", failed: " << summary.failures << ", skipped: " << summary.skipped
            << '\n';
  if (summary.negative_control) {
    std::cout << "negative control witnesses: " << summary.negative_control->witnesses.size() << '\n';
  }
  return summary.passed ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Daze attack lab: theorem verification, training and sweeps"};
  app.require_subcommand(1);
  Common common;
  auto* verify = app.add_subcommand("verify", "check the optimality theorems on random tabular MDPs");
  auto* train = app.add_subcommand("train", "train and evaluate one config plus its no-attack control");
  auto* eval = app.add_subcommand("eval", "evaluate saved policies without training");
  auto* sweep = app.add_subcommand("sweep", "beta x k ablation sweep");
  for (auto* cmd : {verify, train, eval, sweep}) add_common(cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*verify) return cmd_verify(common);
    if (*train) return cmd_train(common);
    if (*eval) return cmd_eval(common);
    return cmd_sweep(common);
  } catch (const daze::ConfigError& e) {
    std::cerr << "dazelab: invalid config: " << e.what() << '\n';
    return kValidation;
  } catch (const daze::ArgumentError& e) {
    std::cerr << "dazelab: invalid argument: " << e.what() << '\n';
    return kValidation;
  } catch (const daze::TrainingError& e) {
    std::cerr << "dazelab: training failed: " << e.what() << '\n';
    return kTraining;
  } catch (const std::exception& e) {
    std::cerr << "dazelab: " << e.what() << '\n';
    return kTraining;
  }
}
