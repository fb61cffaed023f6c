#pragma once

// HTTP front end for a ReviewSession. Needs cpp-httplib and nlohmann/json.

#include <httplib.h>

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "tamcorr/corpus.hpp"
#include "tamcorr/review.hpp"

namespace tamcorr {

/// Serves /v1 over a session. Candidate data is immutable after
/// construction; verdict writes are serialized inside ReviewSession.
class ReviewService {
 public:
  using json = nlohmann::json;

  /// Loads the session's corpus; refuses to start if it has malformed records
  /// or if any candidate refers to a missing record.
  explicit ReviewService(ReviewSession session) : session_(std::move(session)) {
    auto loaded = load_corpus_file(session_.header().corpus_path, session_.taxonomy(), false);
    if (!loaded.errors.empty())
      throw SessionError("corpus has malformed records (first: " + loaded.errors.front().message +
                         ")");
    corpus_ = std::move(loaded.corpus);
    for (std::size_t i = 0; i < corpus_.examples.size(); ++i)
      example_index_.emplace(corpus_.examples[i].id, i);
    for (const auto& c : session_.candidates())
      if (!example_index_.contains(c.example_id))
        throw SessionError("candidate " + c.example_id + " is not in the corpus");
    routes();
  }

  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  /// Serves files from `dir` under "/" (e.g. the built review client).
  bool mount_static(const std::string& dir) { return server_.set_mount_point("/", dir); }

  /// Binds to host:port; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool running() const { return server_.is_running(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  const ReviewSession& session() const { return session_; }

  json candidate_json(std::size_t rank) const {
    const auto& c = session_.candidates()[rank];
    const auto& tax = session_.taxonomy();
    const Example& e = corpus_.examples[example_index_.at(c.example_id)];
    auto label = [&](LabelIndex i) {
      return json{{"id", tax[i].id}, {"symbol", tax[i].symbol}, {"gloss", tax[i].description}};
    };
    ScannedLine scan = scan_tagged_line(e.english.raw);
    auto span = [&](const Span& s) {
      return json{{"tokenBegin", s.begin},
                  {"tokenEnd", s.end},
                  {"byteBegin", scan.token_bytes[s.begin].begin},
                  {"byteEnd", scan.token_bytes[s.end - 1].end}};
    };
    json v_spans = json::array();
    for (const auto& s : e.english.v_segments) v_spans.push_back(span(s));
    json j = {
        {"id", c.example_id},
        {"rank", rank + 1},
        {"original", label(c.original)},
        {"proposed", label(c.proposed)},
        {"pOriginal", c.p_original},
        {"pProposed", c.p_proposed},
        {"confidenceM1", c.confidence_m1},
        {"confidenceM2", c.confidence_m2},
        {"support", c.support},
        {"learner", std::string(to_string(c.learner))},
        {"mode", std::string(to_string(c.mode))},
        {"japanese", e.japanese},
        {"sentence", scan.plain},
        {"tokens", scan.tokens},
        {"vSpans", v_spans},
        {"vjSpan", e.english.vj_segment ? span(*e.english.vj_segment) : json(nullptr)},
        {"verdict", nullptr},
    };
    if (auto v = session_.live_verdict(c.example_id)) j["verdict"] = verdict_json(*v);
    return j;
  }

  json verdict_json(const ReviewVerdict& v) const {
    return {{"candidate", v.candidate_ref},
            {"decision", std::string(to_string(v.decision))},
            {"label", v.edit_label ? json(session_.taxonomy()[*v.edit_label].id) : json(nullptr)},
            {"annotator", v.annotator},
            {"timestamp", v.timestamp}};
  }

  json progress_json() const {
    auto p = session_.progress();
    return {{"total", p.total},
            {"reviewed", p.reviewed},
            {"accepted", p.accepted},
            {"rejected", p.rejected},
            {"edited", p.edited},
            {"cursor", p.cursor},
            {"next", p.cursor < p.total ? json(session_.candidates()[p.cursor].example_id)
                                        : json(nullptr)}};
  }

 private:
  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }
  static void error(httplib::Response& res, int status, const std::string& msg) {
    reply(res, status, json{{"error", msg}});
  }

  void routes() {
    server_.Get("/v1/candidates", [this](const httplib::Request& req, httplib::Response& res) {
      std::size_t offset = 0, limit = 50;
      try {
        if (req.has_param("offset")) offset = std::stoul(req.get_param_value("offset"));
        if (req.has_param("limit")) limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::exception&) {
        return error(res, 400, "offset and limit must be non-negative integers");
      }
      const auto total = session_.candidates().size();
      json items = json::array();
      for (std::size_t r = offset; r < total && r < offset + limit; ++r)
        items.push_back(candidate_json(r));
      reply(res, 200, {{"total", total}, {"offset", offset}, {"limit", limit}, {"items", items}});
    });

    server_.Get(R"(/v1/candidates/([^/]+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  auto rank = session_.rank_of(req.matches[1].str());
                  if (!rank) return error(res, 404, "unknown candidate " + req.matches[1].str());
                  reply(res, 200, candidate_json(*rank));
                });

    server_.Post(R"(/v1/candidates/([^/]+)/verdict)",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   const std::string ref = req.matches[1].str();
                   if (!session_.find_candidate(ref))
                     return error(res, 404, "unknown candidate " + ref);
                   json body = json::parse(req.body, nullptr, false);
                   if (body.is_discarded() || !body.is_object())
                     return error(res, 400, "body must be a JSON object");
                   ReviewVerdict v;
                   v.candidate_ref = ref;
                   auto text = [&](const char* key) -> std::optional<std::string> {
                     if (!body.contains(key) || body[key].is_null()) return std::string();
                     if (!body[key].is_string()) return std::nullopt;
                     return body[key].get<std::string>();
                   };
                   auto decision_text = text("decision");
                   auto annotator = text("annotator");
                   if (!annotator) return error(res, 400, "annotator must be a string");
                   auto decision = decision_text ? parse_decision(*decision_text) : std::nullopt;
                   if (!decision)
                     return error(res, 400, "decision must be accept, reject or edit");
                   v.decision = *decision;
                   if (body.contains("label") && !body["label"].is_null()) {
                     if (!body["label"].is_string())
                       return error(res, 400, "label must be a category id");
                     auto label = session_.taxonomy().find_id(body["label"].get<std::string>());
                     if (!label) return error(res, 400, "unknown category id");
                     v.edit_label = *label;
                   }
                   v.annotator = *annotator;
                   try {
                     v = session_.record(std::move(v));
                   } catch (const VerdictError& e) {
                     return error(res, 400, e.what());
                   } catch (const SessionError& e) {
                     return error(res, 500, e.what());
                   }
                   reply(res, 200, {{"verdict", verdict_json(v)}, {"progress", progress_json()}});
                 });

    server_.Get("/v1/progress", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, progress_json());
    });

    server_.Get("/v1/taxonomy", [this](const httplib::Request&, httplib::Response& res) {
      json labels = json::array();
      for (const auto& l : session_.taxonomy().labels())
        labels.push_back({{"id", l.id},
                          {"symbol", l.symbol},
                          {"group", std::string(to_string(l.group))},
                          {"description", l.description}});
      reply(res, 200, {{"labels", labels}});
    });
  }

  ReviewSession session_;
  Corpus corpus_;
  std::unordered_map<std::string, std::size_t> example_index_;
  httplib::Server server_;
};

}  // namespace tamcorr
