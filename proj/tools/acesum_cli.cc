#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "acesum/app.h"
#include "acesum/eval.h"

namespace {

using acesum::AppConfig;

struct PathFlag {
  std::string flag;
  std::string env;
  std::filesystem::path* target;
};

bool given_on_command_line(int argc, char** argv, const std::string& flag) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == flag || (arg.starts_with(flag) && arg.size() > flag.size() && arg[flag.size()] == '=')) {
      return true;
    }
  }
  return false;
}

int run_ablation(const AppConfig& config, std::size_t seeds, std::size_t entities,
                 std::size_t reviews, bool json) {
  using namespace acesum;
  const std::vector<Pooling> variants = {Pooling::kMip, Pooling::kMax, Pooling::kMean,
                                         Pooling::kAttention};
  std::vector<AblationRow> mean(variants.size());
  for (std::size_t s = 1; s <= seeds; ++s) {
    const auto planted = make_planted_corpus(s, entities, reviews);
    TrainConfig train = config.train;
    train.seed = s;
    const auto rows = run_ablation(planted, train, variants);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      mean[i].pooling = rows[i].pooling;
      mean[i].scores.doc_f1 += rows[i].scores.doc_f1 / static_cast<double>(seeds);
      mean[i].scores.sent_f1 += rows[i].scores.sent_f1 / static_cast<double>(seeds);
    }
  }
  std::cout << (json ? ablation_records(mean) : format_ablation_table(mean));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  AppConfig config;
  CLI::App app{"Aspect-controllable opinion summarization"};
  app.set_config("--config", "", "Key-value config file");
  app.require_subcommand(1);
  app.fallthrough();

  std::vector<PathFlag> paths = {{"--corpus", "ACESUM_CORPUS", &config.corpus},
                                 {"--aspects", "ACESUM_ASPECTS", &config.aspects},
                                 {"--embeddings", "ACESUM_EMBEDDINGS", &config.embeddings},
                                 {"--model", "ACESUM_MODEL", &config.model},
                                 {"--dataset", "ACESUM_DATASET", &config.dataset},
                                 {"--eval-set", "ACESUM_EVAL_SET", &config.eval_set}};
  for (const auto& p : paths) {
    app.add_option(p.flag, *p.target, "Path (env " + p.env + ")");
  }

  auto& tc = config.train;
  std::string pooling = "mip";
  app.add_option("--lr", tc.learning_rate, "Learning rate")->capture_default_str();
  app.add_option("--steps", tc.steps, "Training steps")->capture_default_str();
  app.add_option("--heads", tc.heads, "Attention heads per pooling level")->capture_default_str();
  app.add_option("--warmup", tc.warmup_steps, "Warm-up steps")->capture_default_str();
  app.add_option("--weight-decay", tc.weight_decay)->capture_default_str();
  app.add_option("--seed", tc.seed, "Training seed")->capture_default_str();
  app.add_option("--pooling", pooling, "mip, max, mean or attention")->capture_default_str();
  app.add_option("--max-sentences", tc.limits.max_sentences)->capture_default_str();
  app.add_option("--max-tokens", tc.limits.max_tokens_per_sentence)->capture_default_str();
  app.add_option("--log-every", tc.log_every)->capture_default_str();

  auto& sc = config.synth;
  app.add_option("--keywords", sc.keyword_count, "Keywords per example")->capture_default_str();
  app.add_option("--token-budget", sc.token_budget, "Controller sentence budget")
      ->capture_default_str();
  app.add_option("--examples-per-entity", sc.max_examples_per_entity)->capture_default_str();
  app.add_option("--synth-seed", sc.seed)->capture_default_str();
  bool continuous = false;
  app.add_flag("--continuous-target", continuous, "Rank against raw document predictions");

  auto& lc = config.summarizer.lexrank;
  app.add_option("--pool-budget", config.summarizer.pool_token_budget)->capture_default_str();
  app.add_option("--summary-budget", lc.summary_token_budget)->capture_default_str();
  app.add_option("--damping", lc.damping)->capture_default_str();
  app.add_option("--similarity-threshold", lc.similarity_threshold)->capture_default_str();
  app.add_option("--redundancy-threshold", lc.redundancy_threshold)->capture_default_str();
  app.add_option("--host", config.host)->capture_default_str();
  app.add_option("--port", config.port)->capture_default_str();

  auto* label = app.add_subcommand("label", "Silver labels per review");
  std::string label_out;
  label->add_option("-o,--output", label_out, "Output file (default stdout)");

  app.add_subcommand("train", "Train the controller induction model");
  app.add_subcommand("build", "Build the synthetic controller dataset");

  auto* summarize = app.add_subcommand("summarize", "Summarize one entity");
  std::string entity;
  std::vector<std::string> aspects;
  summarize->add_option("-e,--entity", entity, "Entity id")->required();
  summarize->add_option("-a,--aspect", aspects, "Aspect name (repeatable; none = general)");

  auto* eval = app.add_subcommand("eval", "ROUGE evaluation against reference summaries");
  bool eval_json = false;
  std::string aggregation = "mean";
  eval->add_flag("--json", eval_json, "Emit JSON records");
  eval->add_option("--aggregate", aggregation, "mean or max over references");

  app.add_subcommand("serve", "Run the HTTP summarization service");

  auto* ablation = app.add_subcommand("ablation", "Pooling ablation on planted corpora");
  std::size_t ablation_seeds = 5, entities = 20, reviews = 10;
  bool ablation_json = false;
  ablation->add_option("--seeds", ablation_seeds)->capture_default_str();
  ablation->add_option("--entities", entities)->capture_default_str();
  ablation->add_option("--reviews", reviews)->capture_default_str();
  ablation->add_flag("--json", ablation_json);

  CLI11_PARSE(app, argc, argv);

  for (const auto& p : paths) {
    const char* value = std::getenv(p.env.c_str());
    if (value != nullptr && *value != '\0' && !given_on_command_line(argc, argv, p.flag)) {
      *p.target = value;
    }
  }

  try {
    tc.pooling = acesum::parse_pooling(pooling);
    sc.target_mode = continuous ? acesum::TargetMode::kContinuous : acesum::TargetMode::kSign;
    if (aggregation == "max") {
      config.aggregation = acesum::RefAggregation::kMax;
    } else if (aggregation != "mean") {
      throw std::invalid_argument("--aggregate must be mean or max");
    }
    acesum::validate(tc);
    acesum::validate(sc);
    acesum::validate(lc);

    if (label->parsed()) {
      if (label_out.empty()) {
        acesum::cmd_label(config, std::cout, std::cerr);
      } else {
        std::ofstream out(label_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + label_out);
        acesum::cmd_label(config, out, std::cerr);
      }
    } else if (app.got_subcommand("train")) {
      acesum::cmd_train(config, std::cerr);
    } else if (app.got_subcommand("build")) {
      acesum::cmd_build(config, std::cerr);
    } else if (summarize->parsed()) {
      acesum::cmd_summarize(config, entity, aspects, std::cout);
    } else if (eval->parsed()) {
      acesum::cmd_eval(config, eval_json ? acesum::ReportFormat::kJson : acesum::ReportFormat::kTable,
                       std::cout);
    } else if (app.got_subcommand("serve")) {
      acesum::cmd_serve(config, std::cerr);
    } else if (ablation->parsed()) {
      return run_ablation(config, ablation_seeds, entities, reviews, ablation_json);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
