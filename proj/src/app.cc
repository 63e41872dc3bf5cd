#include "acesum/app.h"

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "acesum/corpus.h"
#include "acesum/encoder.h"
#include "acesum/numeric_format.h"
#include "json.hpp"

namespace acesum {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

Corpus load_input_corpus(const AppConfig& config) {
  require_file(config.aspects, "aspect spec file");
  require_file(config.corpus, "corpus");
  return load_corpus(config.corpus, load_aspects(config.aspects));
}

EmbeddingTable load_table(const AppConfig& config) {
  require_file(config.embeddings, "embeddings");
  return load_embeddings(config.embeddings);
}

std::vector<AspectLabels> corpus_labels(const Corpus& corpus) {
  std::vector<AspectLabels> labels;
  for (const auto& entity : corpus.entities) {
    for (const auto& review : entity.reviews) labels.push_back(silver_label(review, corpus.aspects));
  }
  return labels;
}

}  // namespace

void require_file(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) throw std::invalid_argument(what + " path is not set");
  if (!std::filesystem::is_regular_file(path)) {
    throw std::invalid_argument(what + " not found: " + path.string());
  }
}

std::vector<double> cmd_label(const AppConfig& config, std::ostream& out, std::ostream& log) {
  require_file(config.aspects, "aspect spec file");
  require_file(config.corpus, "corpus");
  const auto aspects = load_aspects(config.aspects);
  std::vector<double> rates(aspects.size(), 0.0);
  const std::string content = slurp(config.corpus);
  std::size_t reviews = 0;
  if (!blank(content)) {
    const Corpus corpus = load_corpus_from_string(content, aspects);
    for (const auto& entity : corpus.entities) {
      for (const auto& review : entity.reviews) {
        const auto labels = silver_label(review, aspects);
        for (std::size_t a = 0; a < labels.size(); ++a) rates[a] += labels[a] > 0 ? 1.0 : 0.0;
        out << nlohmann::json{{"entity_id", review.entity_id},
                              {"review_id", review.review_id},
                              {"labels", labels}}
                   .dump()
            << '\n';
        ++reviews;
      }
    }
  }
  log << "aspect\tpositive_rate\n";
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    if (reviews > 0) rates[a] /= static_cast<double>(reviews);
    log << aspects[a].name << '\t' << format_double(rates[a]) << '\n';
  }
  return rates;
}

MilModel cmd_train(const AppConfig& config, std::ostream& log) {
  if (config.model.empty()) throw std::invalid_argument("model output path is not set");
  const Corpus corpus = load_input_corpus(config);
  const EmbeddingTable table = load_table(config);
  log << "training on " << corpus.review_count() << " reviews, " << corpus.aspect_count()
      << " aspects, " << config.train.steps << " steps\n";
  const MilModel model =
      train(corpus, corpus_labels(corpus), table, config.train,
            [&log](std::size_t step, double loss) {
              log << "step " << step << " loss " << format_double(loss) << '\n';
            });
  save_model(model, config.model);
  log << "wrote " << config.model.string() << " (" << model_fingerprint(model) << ")\n";
  return model;
}

DatasetStats cmd_build(const AppConfig& config, std::ostream& log) {
  if (config.dataset.empty()) throw std::invalid_argument("dataset output path is not set");
  require_file(config.model, "model");
  const Corpus corpus = load_input_corpus(config);
  const EmbeddingTable table = load_table(config);
  const MilModel model = load_model(config.model);
  const auto stats = build_dataset(corpus, model, table, config.synth, config.dataset);
  log << "wrote " << stats.total << " examples from " << stats.per_entity.size()
      << " entities to " << config.dataset.string() << '\n';
  return stats;
}

SummaryService load_service(const AppConfig& config) {
  require_file(config.model, "model");
  Corpus corpus = load_input_corpus(config);
  EmbeddingTable table = load_table(config);
  MilModel model = load_model(config.model);
  return SummaryService(std::move(corpus), std::move(table), std::move(model), config.summarizer);
}

void cmd_summarize(const AppConfig& config, const std::string& entity_id,
                   const std::vector<std::string>& aspects, std::ostream& out) {
  const SummaryService service = load_service(config);
  out << service.summarize_record({entity_id, aspects}) << '\n';
}

std::vector<EvalRow> cmd_eval(const AppConfig& config, ReportFormat format, std::ostream& out) {
  require_file(config.aspects, "aspect spec file");
  require_file(config.eval_set, "eval set");
  require_file(config.model, "model");
  const auto aspects = load_aspects(config.aspects);
  const auto examples = load_eval_set(config.eval_set, aspects);
  const EmbeddingTable table = load_table(config);
  const MilModel model = load_model(config.model);
  const auto rows = evaluate(examples, aspects, model, table, {config.summarizer, config.aggregation});
  out << (format == ReportFormat::kTable ? format_eval_table(rows) : eval_records(rows));
  return rows;
}

void cmd_serve(const AppConfig& config, std::ostream& log) {
  const SummaryService service = load_service(config);
  HttpServer server(service);
  const int port = server.bind(config.host, config.port);
  log << "serving " << service.corpus().entities.size() << " entities on http://" << config.host
      << ':' << port << " (model " << service.model_version() << ")" << std::endl;
  server.listen();
}

}  // namespace acesum
