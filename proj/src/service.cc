#include "acesum/service.h"

#include <algorithm>

#include "httplib.h"
#include "json.hpp"

namespace acesum {

namespace {

using nlohmann::json;

std::string list_names(const std::vector<std::string>& names, std::size_t limit = 20) {
  std::string out;
  for (std::size_t i = 0; i < names.size() && i < limit; ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  if (names.size() > limit) out += ", ... (" + std::to_string(names.size()) + " total)";
  return out;
}

}  // namespace

SummarizeRequest parse_summarize_request(std::string_view body) {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::parse_error& e) {
    throw BadRequestError(std::string("malformed JSON: ") + e.what());
  }
  if (!parsed.is_object()) throw BadRequestError("request must be a JSON object");
  SummarizeRequest request;
  const auto entity = parsed.find("entity_id");
  if (entity == parsed.end() || !entity->is_string()) {
    throw BadRequestError("missing string field 'entity_id'");
  }
  request.entity_id = entity->get<std::string>();
  if (const auto aspects = parsed.find("aspects"); aspects != parsed.end() && !aspects->is_null()) {
    if (!aspects->is_array()) throw BadRequestError("'aspects' must be an array of names");
    for (const auto& a : *aspects) {
      if (!a.is_string()) throw BadRequestError("'aspects' must be an array of names");
      request.aspects.push_back(a.get<std::string>());
    }
  }
  return request;
}

SummaryService::SummaryService(Corpus corpus, EmbeddingTable table, MilModel model,
                               SummarizerConfig config)
    : corpus_(std::move(corpus)),
      table_(std::move(table)),
      model_(std::move(model)),
      config_(config),
      model_version_(model_fingerprint(model_)) {
  if (model_.aspect_count != corpus_.aspect_count()) {
    throw std::invalid_argument("model has " + std::to_string(model_.aspect_count) +
                                " aspects but the aspect file lists " +
                                std::to_string(corpus_.aspect_count()));
  }
  if (model_.dimension != table_.dimension()) {
    throw std::invalid_argument("model dimension does not match the embedding table");
  }
  validate(config_.lexrank);
}

SummarizeResponse SummaryService::summarize(const SummarizeRequest& request) const {
  const Entity* entity = corpus_.find_entity(request.entity_id);
  if (entity == nullptr) {
    std::vector<std::string> ids;
    for (const auto& e : corpus_.entities) ids.push_back(e.id);
    throw NotFoundError("unknown entity '" + request.entity_id + "'; available: " + list_names(ids));
  }
  std::vector<std::size_t> codes;
  for (const auto& name : request.aspects) {
    const auto it = std::find_if(corpus_.aspects.begin(), corpus_.aspects.end(),
                                 [&](const AspectSpec& a) { return a.name == name; });
    if (it == corpus_.aspects.end()) {
      std::vector<std::string> names;
      for (const auto& a : corpus_.aspects) names.push_back(a.name);
      throw BadRequestError("unknown aspect '" + name + "'; available: " + list_names(names));
    }
    codes.push_back(it->aspect_id);
  }
  const Query query = codes.empty() ? Query::all(corpus_.aspect_count())
                                    : Query::of(corpus_.aspect_count(), codes);
  SummarizeResponse response;
  response.entity_id = entity->id;
  response.codes = query.codes();
  for (const auto code : response.codes) response.aspect_names.push_back(corpus_.aspects[code].name);
  response.query_bitmask = query.bitmask();
  response.model_version = model_version_;
  response.summary = acesum::summarize(entity->reviews, query, model_, table_, config_);
  return response;
}

std::string to_record(const SummarizeResponse& response) {
  json sentences = json::array();
  for (const auto& s : response.summary.sentences) {
    sentences.push_back({{"text", s.text},
                         {"review_id", s.review_id},
                         {"sentence_index", s.sentence_index},
                         {"salience", s.salience}});
  }
  const json record = {{"schema_version", kSchemaVersion},
                       {"entity_id", response.entity_id},
                       {"aspects", response.aspect_names},
                       {"codes", response.codes},
                       {"query", response.query_bitmask},
                       {"model_version", response.model_version},
                       {"token_count", response.summary.token_count},
                       {"sentences", std::move(sentences)}};
  return record.dump();
}

std::string SummaryService::summarize_record(const SummarizeRequest& request) const {
  return to_record(summarize(request));
}

std::string SummaryService::entities_record() const {
  json entities = json::array();
  for (const auto& e : corpus_.entities) {
    entities.push_back({{"entity_id", e.id}, {"reviews", e.reviews.size()}});
  }
  return json{{"schema_version", kSchemaVersion}, {"entities", std::move(entities)}}.dump();
}

std::string SummaryService::aspects_record() const {
  json aspects = json::array();
  for (const auto& a : corpus_.aspects) {
    aspects.push_back({{"id", a.aspect_id}, {"name", a.name}, {"seeds", a.seeds}});
  }
  return json{{"schema_version", kSchemaVersion}, {"aspects", std::move(aspects)}}.dump();
}

std::string SummaryService::health_record() const {
  return json{{"status", "ok"},
              {"version", kServiceVersion},
              {"schema_version", kSchemaVersion},
              {"model_version", model_version_}}
      .dump();
}

struct HttpServer::Impl {
  const SummaryService& service;
  httplib::Server server;
  std::string host;
  int port = -1;

  explicit Impl(const SummaryService& s) : service(s) {}
};

HttpServer::HttpServer(const SummaryService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& server = impl_->server;
  const auto& svc = impl_->service;
  auto reply = [](httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json");
  };
  auto error = [reply](httplib::Response& res, int status, const std::string& message) {
    reply(res, status, json{{"error", message}}.dump());
  };

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get("/health", [&svc, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, svc.health_record());
  });
  server.Get("/entities", [&svc, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, svc.entities_record());
  });
  server.Get("/aspects", [&svc, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, svc.aspects_record());
  });
  server.Post("/summarize", [&svc, reply, error](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, 200, svc.summarize_record(parse_summarize_request(req.body)));
    } catch (const NotFoundError& e) {
      error(res, 404, e.what());
    } catch (const BadRequestError& e) {
      error(res, 400, e.what());
    } catch (const std::exception& e) {
      error(res, 500, e.what());
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return impl_->port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace acesum
