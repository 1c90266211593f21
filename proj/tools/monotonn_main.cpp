// Command-line front end: generate, train, evaluate, export-contour,
// export-trends. Every command is deterministic given its full flag set.
// Exit codes: 0 success, 2 validation error, 3 numeric divergence, 4 I/O.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "monotonn/commands.hpp"
#include "monotonn/errors.hpp"

namespace {

void add_data_options(CLI::App* cmd, monotonn::DataOptions& data) {
  cmd->add_option("--data", data.data_path, "Canonical dataset CSV");
  cmd->add_option("--adult-train", data.adult_train_path, "Census training file (original layout)");
  cmd->add_option("--adult-test", data.adult_test_path, "Census test file (original layout)");
  cmd->add_option("--task", data.task, "Task override for CSV data: regression|classification");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monotonn: partial-monotonicity training and evaluation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file (flags override)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();

  bool deterministic = true;
  app.add_flag("--deterministic,!--no-deterministic", deterministic,
               "Deterministic execution (always on; single-threaded fixed-order reductions)");

  monotonn::GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic sin(x)+e^y dataset");
  generate->add_option("--n", gen.n, "Sample count")->capture_default_str();
  generate->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  generate->add_option("--noise-std", gen.noise_std, "Gaussian label noise")->capture_default_str();
  generate->add_option("--out", gen.out, "Output CSV path")->required();

  monotonn::TrainOptions tr;
  CLI::App* train = app.add_subcommand("train", "Train a model with the monotonicity penalty");
  add_data_options(train, tr.data);
  train->add_option("--monotone", tr.monotone,
                    "Monotone features, e.g. y:+1 or education-num:+1,capital-gain:+1");
  train->add_option("--hidden", tr.hidden_dims, "Hidden layer widths")->capture_default_str();
  train->add_option("--activation", tr.activation, "Hidden activation: tanh|softplus|relu")
      ->capture_default_str();
  train->add_option("--init", tr.init_scheme, "Init scheme: glorot|normal")->capture_default_str();
  train->add_option("--lr", tr.config.learning_rate, "SGD learning rate")->capture_default_str();
  train->add_option("--batch", tr.config.batch_size, "Minibatch size")->capture_default_str();
  train->add_option("--epochs", tr.config.epochs, "Epoch count")->capture_default_str();
  train->add_option("--weight", tr.config.penalty_weight, "Penalty weight")->capture_default_str();
  std::string regime = "weighted";
  train->add_option("--regime", regime, "weighted|switching")->capture_default_str();
  train->add_option("--switch-frequency", tr.config.switch_frequency,
                    "Minibatches per phase (switching regime)");
  train->add_option("--switch-empirical", tr.config.empirical_phase_steps,
                    "Override: empirical-phase length in minibatches");
  train->add_option("--switch-penalty", tr.config.penalty_phase_steps,
                    "Override: penalty-phase length in minibatches");
  train->add_option("--seed", tr.config.seed, "Seed for init, shuffling and probes")
      ->capture_default_str();
  train->add_flag("!--no-shuffle", tr.config.shuffle, "Disable per-epoch shuffling");
  train->add_flag("--plain", tr.config.plain, "Plain training: empirical risk only");
  train->add_option("--probe-size", tr.config.probe_size, "Per-epoch metric probe subset size")
      ->capture_default_str();
  train->add_option("--probe-grid", tr.config.probe_resolution, "Probe sweep resolution")
      ->capture_default_str();
  train->add_option("--out", tr.out, "Output model path")->required();
  train->add_option("--log", tr.log_path, "Epoch log CSV path");
  train->add_flag("--quiet", tr.quiet, "Suppress the summary line");

  monotonn::EvaluateOptions ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a model: AUC/MSE and M_k");
  add_data_options(evaluate, ev.data);
  evaluate->add_option("--model", ev.model_path, "Model file")->required();
  evaluate->add_option("--monotone", ev.monotone, "Monotone features (default: dataset convention)");
  evaluate->add_option("--split", ev.eval_split, "Census pair: evaluate train|test")
      ->capture_default_str();
  evaluate->add_option("--grid", ev.grid_resolution, "Sweep resolution G")->capture_default_str();
  evaluate->add_option("--out", ev.out, "JSON report path")->required();
  evaluate->add_option("--mk-csv", ev.mk_csv, "Optional feature,mk CSV export");
  evaluate->add_option("--delta-csv", ev.delta_csv, "Optional per-sample indicator CSV export");
  evaluate->add_flag("--quiet", ev.quiet, "Do not echo the report");

  monotonn::ContourOptions co;
  CLI::App* contour = app.add_subcommand("export-contour", "Export a score grid over [0,1]^2");
  contour->add_option("--model", co.model_path, "Model file (2-D input)");
  contour->add_option("--resolution", co.resolution, "Grid points per axis")->capture_default_str();
  contour->add_flag("--analytic", co.analytic, "Export the target sin(x)+e^y instead");
  contour->add_option("--out", co.out, "Output CSV path")->required();

  monotonn::TrendsOptions tro;
  CLI::App* trends = app.add_subcommand("export-trends", "Export conditioned trend curves");
  add_data_options(trends, tro.data);
  trends->add_option("--model", tro.model_path, "Model file")->required();
  trends->add_option("--feature", tro.feature, "Swept feature (name or index)")->required();
  trends->add_option("--anchors", tro.anchors, "Anchor sample count")->capture_default_str();
  trends->add_option("--seed", tro.seed, "Anchor sampling seed")->capture_default_str();
  trends->add_option("--grid", tro.grid_resolution, "Sweep resolution")->capture_default_str();
  trends->add_option("--out", tro.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) {
      monotonn::cmd_generate(gen);
    } else if (*train) {
      if (regime == "weighted") tr.config.regime = monotonn::TrainRegime::kWeighted;
      else if (regime == "switching") tr.config.regime = monotonn::TrainRegime::kSwitching;
      else throw monotonn::ConfigError("unknown regime '" + regime + "'");
      monotonn::cmd_train(tr);
    } else if (*evaluate) {
      monotonn::cmd_evaluate(ev);
    } else if (*contour) {
      monotonn::cmd_export_contour(co);
    } else if (*trends) {
      monotonn::cmd_export_trends(tro);
    }
  } catch (const monotonn::ConfigError& e) {
    std::cerr << "monotonn: " << e.what() << "\n";
    return 2;
  } catch (const monotonn::NumericError& e) {
    std::cerr << "monotonn: " << e.what() << "\n";
    return 3;
  } catch (const monotonn::IoError& e) {
    std::cerr << "monotonn: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "monotonn: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
