#ifndef ACESUM_APP_H_
#define ACESUM_APP_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "acesum/eval.h"
#include "acesum/mil.h"
#include "acesum/service.h"
#include "acesum/summarizer.h"
#include "acesum/synthesis.h"

namespace acesum {

struct AppConfig {
  std::filesystem::path corpus;
  std::filesystem::path aspects;
  std::filesystem::path embeddings;
  std::filesystem::path model;
  std::filesystem::path dataset;
  std::filesystem::path eval_set;
  TrainConfig train;
  SynthConfig synth;
  SummarizerConfig summarizer;
  RefAggregation aggregation = RefAggregation::kMean;
  std::string host = "127.0.0.1";
  int port = 8080;
};

// Throws std::invalid_argument for an unset or missing input file.
void require_file(const std::filesystem::path& path, const std::string& what);

// Writes one {"entity_id", "review_id", "labels"} record per review and
// returns the positive rate of every aspect. An empty corpus file gives
// empty output and zero rates.
std::vector<double> cmd_label(const AppConfig& config, std::ostream& out, std::ostream& log);

// Trains on silver labels and writes config.model.
MilModel cmd_train(const AppConfig& config, std::ostream& log);

DatasetStats cmd_build(const AppConfig& config, std::ostream& log);

// Prints one summary record followed by a newline.
void cmd_summarize(const AppConfig& config, const std::string& entity_id,
                   const std::vector<std::string>& aspects, std::ostream& out);

enum class ReportFormat { kTable, kJson };

std::vector<EvalRow> cmd_eval(const AppConfig& config, ReportFormat format, std::ostream& out);

// Loads corpus, aspects, embeddings and model once.
SummaryService load_service(const AppConfig& config);

// Blocks until the server stops.
void cmd_serve(const AppConfig& config, std::ostream& log);

}  // namespace acesum

#endif  // ACESUM_APP_H_
