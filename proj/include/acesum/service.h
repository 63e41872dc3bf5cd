#ifndef ACESUM_SERVICE_H_
#define ACESUM_SERVICE_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acesum/corpus.h"
#include "acesum/encoder.h"
#include "acesum/mil.h"
#include "acesum/summarizer.h"

namespace acesum {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kServiceVersion = "acesum-service/1";

class NotFoundError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class BadRequestError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SummarizeRequest {
  std::string entity_id;
  std::vector<std::string> aspects;  // names; empty means every aspect
};

struct SummarizeResponse {
  std::string entity_id;
  std::vector<std::size_t> codes;
  std::vector<std::string> aspect_names;
  std::string query_bitmask;
  std::string model_version;
  Summary summary;
};

// Parses {"entity_id": "...", "aspects": ["..."]}. Throws BadRequestError.
SummarizeRequest parse_summarize_request(std::string_view body);

// Immutable summarization state shared by the CLI and the HTTP service.
class SummaryService {
 public:
  SummaryService(Corpus corpus, EmbeddingTable table, MilModel model, SummarizerConfig config);

  // Throws NotFoundError for an unknown entity and BadRequestError for an
  // unknown aspect name; both messages list what is available.
  SummarizeResponse summarize(const SummarizeRequest& request) const;

  // The response as one JSON record (no trailing newline).
  std::string summarize_record(const SummarizeRequest& request) const;

  std::string entities_record() const;
  std::string aspects_record() const;
  std::string health_record() const;

  const Corpus& corpus() const { return corpus_; }
  const std::string& model_version() const { return model_version_; }

 private:
  Corpus corpus_;
  EmbeddingTable table_;
  MilModel model_;
  SummarizerConfig config_;
  std::string model_version_;
};

std::string to_record(const SummarizeResponse& response);

// HTTP front end for a SummaryService:
//   GET  /health     GET /entities     GET /aspects     POST /summarize
class HttpServer {
 public:
  explicit HttpServer(const SummaryService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds to an ephemeral port when port is 0. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace acesum

#endif  // ACESUM_SERVICE_H_
