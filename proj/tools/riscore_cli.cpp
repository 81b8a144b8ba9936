// riscore: command-line driver for the generation and evaluation pipeline.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riscore/errors.hpp"
#include "riscore/io.hpp"
#include "riscore/pipeline.hpp"
#include "riscore/run_config.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

void log_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"event", "error"}, {"kind", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextually reconstructed riddle generation and evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mock_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  app.add_option("--mock", mock_path, "Mock backend script; no network access");
  app.add_option("--seed", seed, "Global seed (overrides the config)");

  std::optional<std::string> dataset;
  const auto add_dataset = [&](CLI::App* sub) {
    sub->add_option("--dataset", dataset, "Restrict to one dataset")
        ->check(CLI::IsMember({"brainteaser", "riddlesense"}));
  };

  auto* ingest = app.add_subcommand("ingest", "Load and validate the configured corpora");
  add_dataset(ingest);
  std::optional<double> threshold;
  auto* dedup = app.add_subcommand("dedup", "Drop RiddleSense questions too close to BrainTeaser ones");
  dedup->add_option("--threshold", threshold, "Cosine similarity threshold")->check(CLI::Range(0.0, 1.0));
  app.add_subcommand("embed", "Embed every riddle and category label into the cache");
  auto* reconstruct = app.add_subcommand("reconstruct", "Generate one reconstructed QA pair per training riddle");
  add_dataset(reconstruct);
  auto* distract = app.add_subcommand("distract", "Generate distractors for the reconstructed pairs");
  add_dataset(distract);
  auto* assemble = app.add_subcommand("assemble", "Assemble multiple-choice riddles and the pair inventory");
  add_dataset(assemble);

  auto* run = app.add_subcommand("run", "Evaluate one strategy x shots x selection");
  riscore::RunArgs run_args;
  std::string strategy = "riscore";
  std::string selection;
  std::string run_dataset = "brainteaser";
  std::string resume;
  run->add_option("--strategy", strategy)
      ->check(CLI::IsMember({"cot-zs", "fs-rand", "fs-sim", "cot-fs", "riscore", "riscore-m"}));
  run->add_option("--shots", run_args.shots)->check(CLI::IsMember({2, 4, 8}));
  run->add_option("--selection", selection)->check(CLI::IsMember({"rand", "sim"}));
  run->add_option("--dataset", run_dataset)->check(CLI::IsMember({"brainteaser", "riddlesense"}));
  run->add_option("--resume", resume, "Continue an interrupted run id");

  app.add_subcommand("report", "Aggregate finished runs into the results table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  riscore::RunConfig config;
  riscore::PipelineOptions options;
  try {
    config = riscore::load_run_config(config_path);
    if (seed) config.seed = seed;
    if (!mock_path.empty()) options.mock_script = nlohmann::json::parse(riscore::io::read_text(mock_path));
  } catch (const std::exception& e) {
    log_error("config", e.what());
    return kExitConfig;
  }

  try {
    riscore::Pipeline pipeline(config, options);
    nlohmann::json out;
    if (ingest->parsed()) {
      out = pipeline.ingest(dataset);
    } else if (dedup->parsed()) {
      out = pipeline.dedup(threshold);
    } else if (app.got_subcommand("embed")) {
      out = pipeline.embed();
    } else if (reconstruct->parsed()) {
      out = pipeline.reconstruct(dataset);
    } else if (distract->parsed()) {
      out = pipeline.distract(dataset);
    } else if (assemble->parsed()) {
      out = pipeline.assemble(dataset);
    } else if (run->parsed()) {
      run_args.strategy = *riscore::parse_strategy(strategy);
      run_args.dataset = run_dataset;
      if (!selection.empty()) run_args.selection = riscore::parse_selection(selection);
      if (!resume.empty()) run_args.resume = resume;
      const auto dir = pipeline.run(run_args);
      std::cout << riscore::io::read_text(dir / "report.json");
      return 0;
    } else if (app.got_subcommand("report")) {
      std::cout << pipeline.report();
      return 0;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const riscore::Error& e) {
    if (e.code() == riscore::ErrorCode::Config) {
      log_error("config", e.what());
      return kExitConfig;
    }
    log_error(std::string(riscore::to_string(e.code())), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    log_error("runtime", e.what());
    return kExitRuntime;
  }
}
