#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tamcorr/correction.hpp"
#include "tamcorr/corpus.hpp"

namespace tamcorr {

enum class Decision { Accept, Reject, Edit };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Accept: return "accept";
    case Decision::Reject: return "reject";
    case Decision::Edit: return "edit";
  }
  return "?";
}

inline std::optional<Decision> parse_decision(std::string_view s) {
  if (s == "accept") return Decision::Accept;
  if (s == "reject") return Decision::Reject;
  if (s == "edit") return Decision::Edit;
  return std::nullopt;
}

struct ReviewVerdict {
  std::string candidate_ref;  // example id
  Decision decision = Decision::Accept;
  std::optional<LabelIndex> edit_label;
  std::string annotator;
  std::string timestamp;  // RFC 3339, UTC

  bool operator==(const ReviewVerdict&) const = default;
};

inline std::string utc_timestamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerdictError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReviewProgress {
  std::size_t total = 0;
  std::size_t reviewed = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t edited = 0;
  std::size_t cursor = 0;  // first unreviewed rank position; == total when done
};

/// Header of a session file: where the corpus and ranked candidates live.
struct SessionHeader {
  std::string corpus_path;
  std::string candidates_path;
  std::string taxonomy_path;  // empty: built-in default
};

inline constexpr std::string_view kSessionMagic = "#tamcorr-session\tv1";

/// Append-only verdict log over a fixed, ranked candidate list. The file
/// is the source of truth: replaying it reconstructs the state exactly.
/// Each verdict is fsync'ed before record() returns.
class ReviewSession {
 public:
  /// Creates the session file when absent, then opens it.
  static ReviewSession open_or_create(const std::string& session_path,
                                      const SessionHeader& header) {
    if (!std::filesystem::exists(session_path)) {
      std::ofstream out(session_path, std::ios::binary);
      if (!out) throw SessionError("cannot create session file: " + session_path);
      out << kSessionMagic << '\n'
          << "#corpus\t" << header.corpus_path << '\n'
          << "#candidates\t" << header.candidates_path << '\n'
          << "#taxonomy\t" << header.taxonomy_path << '\n';
      out.flush();
      if (!out) throw SessionError("cannot write session file: " + session_path);
    }
    return open(session_path);
  }

  /// Opens an existing session and replays it. Any malformed header or
  /// verdict line, or a torn final line, is a SessionError.
  static ReviewSession open(const std::string& session_path) {
    std::ifstream in(session_path, std::ios::binary);
    if (!in) throw SessionError("cannot open session file: " + session_path);
    std::string line;
    auto corrupt = [&](std::size_t lineno, const std::string& why) -> void {
      throw SessionError("corrupted session file " + session_path + " line " +
                         std::to_string(lineno) + ": " + why);
    };
    if (!std::getline(in, line) || line != kSessionMagic) corrupt(1, "missing session header");
    SessionHeader header;
    auto header_field = [&](std::size_t lineno, std::string_view name) {
      if (!std::getline(in, line)) corrupt(lineno, "truncated header");
      auto cols = split(line, '\t');
      if (cols.size() != 2 || cols[0] != name)
        corrupt(lineno, "expected '" + std::string(name) + "' header line");
      return std::string(cols[1]);
    };
    header.corpus_path = header_field(2, "#corpus");
    header.candidates_path = header_field(3, "#candidates");
    header.taxonomy_path = header_field(4, "#taxonomy");

    Taxonomy taxonomy = header.taxonomy_path.empty() ? Taxonomy::default_taxonomy()
                                                     : Taxonomy::from_file(header.taxonomy_path);
    std::ifstream cin(header.candidates_path, std::ios::binary);
    if (!cin) throw SessionError("cannot open candidate file: " + header.candidates_path);
    auto candidates = read_candidates(cin, taxonomy);

    ReviewSession s(session_path, header, std::move(taxonomy), std::move(candidates));
    std::size_t lineno = 4;
    bool truncated_tail = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (in.eof()) truncated_tail = true;  // last line lacks '\n'
      if (line.empty()) continue;
      ReviewVerdict v;
      try {
        v = s.parse_verdict_line(line);
        s.validate(v);
      } catch (const std::exception& e) {
        corrupt(lineno, e.what());
      }
      s.apply(std::move(v));
    }
    if (truncated_tail) corrupt(lineno, "last verdict line is incomplete");
    return s;
  }

  ReviewSession(ReviewSession&& o) noexcept
      : path_(std::move(o.path_)),
        header_(std::move(o.header_)),
        taxonomy_(std::move(o.taxonomy_)),
        candidates_(std::move(o.candidates_)),
        index_(std::move(o.index_)),
        history_(std::move(o.history_)),
        live_(std::move(o.live_)) {}

  const SessionHeader& header() const { return header_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  const std::string& path() const { return path_; }
  const std::vector<CorrectionCandidate>& candidates() const { return candidates_; }

  const CorrectionCandidate* find_candidate(std::string_view ref) const {
    auto it = index_.find(std::string(ref));
    return it == index_.end() ? nullptr : &candidates_[it->second];
  }
  std::optional<std::size_t> rank_of(std::string_view ref) const {
    auto it = index_.find(std::string(ref));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Validates, persists, then applies. Throws VerdictError for an invalid
  /// verdict and SessionError when the log cannot be written.
  ReviewVerdict record(ReviewVerdict v) {
    if (v.timestamp.empty()) v.timestamp = utc_timestamp_now();
    std::unique_lock lock(mutex_);
    validate(v);
    append_durably(format_verdict_line(v));
    apply(v);
    return v;
  }

  std::optional<ReviewVerdict> live_verdict(std::string_view ref) const {
    std::shared_lock lock(mutex_);
    auto it = live_.find(std::string(ref));
    if (it == live_.end()) return std::nullopt;
    return history_[it->second];
  }

  std::vector<ReviewVerdict> history() const {
    std::shared_lock lock(mutex_);
    return history_;
  }

  ReviewProgress progress() const {
    std::shared_lock lock(mutex_);
    ReviewProgress p;
    p.total = candidates_.size();
    p.cursor = candidates_.size();
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      auto it = live_.find(candidates_[i].example_id);
      if (it == live_.end()) {
        p.cursor = std::min(p.cursor, i);
        continue;
      }
      ++p.reviewed;
      switch (history_[it->second].decision) {
        case Decision::Accept: ++p.accepted; break;
        case Decision::Reject: ++p.rejected; break;
        case Decision::Edit: ++p.edited; break;
      }
    }
    return p;
  }

  /// example id -> category for every live accept (the proposal) and edit
  /// (the annotator's label).
  std::map<std::string, LabelIndex> accepted_corrections() const {
    std::shared_lock lock(mutex_);
    std::map<std::string, LabelIndex> out;
    for (const auto& [ref, idx] : live_) {
      const auto& v = history_[idx];
      if (v.decision == Decision::Accept)
        out[ref] = candidates_[index_.at(ref)].proposed;
      else if (v.decision == Decision::Edit)
        out[ref] = *v.edit_label;
    }
    return out;
  }

  std::string format_verdict_line(const ReviewVerdict& v) const {
    std::string line = v.candidate_ref + '\t' + std::string(to_string(v.decision)) + '\t';
    if (v.edit_label) line += taxonomy_[*v.edit_label].id;
    line += '\t' + v.annotator + '\t' + v.timestamp + '\n';
    return line;
  }

 private:
  ReviewSession(std::string path, SessionHeader header, Taxonomy taxonomy,
                std::vector<CorrectionCandidate> candidates)
      : path_(std::move(path)),
        header_(std::move(header)),
        taxonomy_(std::move(taxonomy)),
        candidates_(std::move(candidates)) {
    for (std::size_t i = 0; i < candidates_.size(); ++i)
      if (!index_.emplace(candidates_[i].example_id, i).second)
        throw SessionError("candidate file lists " + candidates_[i].example_id + " twice");
  }

  ReviewVerdict parse_verdict_line(std::string_view line) const {
    auto cols = split(line, '\t');
    if (cols.size() != 5) throw VerdictError("expected 5 columns");
    ReviewVerdict v;
    v.candidate_ref = std::string(cols[0]);
    auto d = parse_decision(cols[1]);
    if (!d) throw VerdictError("unknown decision '" + std::string(cols[1]) + "'");
    v.decision = *d;
    if (!cols[2].empty()) {
      auto label = taxonomy_.find_id(cols[2]);
      if (!label) throw VerdictError("unknown category '" + std::string(cols[2]) + "'");
      v.edit_label = *label;
    }
    v.annotator = std::string(cols[3]);
    v.timestamp = std::string(cols[4]);
    if (v.timestamp.empty()) throw VerdictError("missing timestamp");
    return v;
  }

  void validate(const ReviewVerdict& v) const {
    const CorrectionCandidate* c = find_candidate(v.candidate_ref);
    if (!c) throw VerdictError("unknown candidate '" + v.candidate_ref + "'");
    if (v.decision == Decision::Edit) {
      if (!v.edit_label) throw VerdictError("edit verdict needs a category");
      if (*v.edit_label >= taxonomy_.size()) throw VerdictError("edit category out of range");
      if (*v.edit_label == c->original)
        throw VerdictError("edit category equals the original category");
    } else if (v.edit_label) {
      throw VerdictError(std::string(to_string(v.decision)) + " verdict must not carry a category");
    }
    for (const auto* field : {&v.annotator, &v.timestamp})
      if (field->find_first_of("\t\r\n") != std::string::npos)
        throw VerdictError("annotator and timestamp must not contain tabs or newlines");
  }

  void apply(ReviewVerdict v) {
    live_[v.candidate_ref] = history_.size();
    history_.push_back(std::move(v));
  }

  void append_durably(const std::string& line) {
    int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (fd < 0) throw SessionError("cannot open session file for append: " + std::string(std::strerror(errno)));
    std::size_t off = 0;
    while (off < line.size()) {
      ssize_t n = ::write(fd, line.data() + off, line.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        int err = errno;
        ::close(fd);
        throw SessionError("session write failed: " + std::string(std::strerror(err)));
      }
      off += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
      int err = errno;
      ::close(fd);
      throw SessionError("session fsync failed: " + std::string(std::strerror(err)));
    }
    ::close(fd);
  }

  std::string path_;
  SessionHeader header_;
  Taxonomy taxonomy_;
  std::vector<CorrectionCandidate> candidates_;
  std::unordered_map<std::string, std::size_t> index_;  // example id -> rank position
  std::vector<ReviewVerdict> history_;
  std::unordered_map<std::string, std::size_t> live_;  // example id -> history index
  mutable std::shared_mutex mutex_;
};

/// Corpus text with every live accept/edit verdict applied. Rejected and
/// unreviewed candidates leave their records untouched.
inline std::string corrected_corpus_text(const ReviewSession& session) {
  auto loaded = load_corpus_file(session.header().corpus_path, session.taxonomy(), false);
  if (!loaded.errors.empty())
    throw SessionError("corpus " + session.header().corpus_path + " has " +
                       std::to_string(loaded.errors.size()) +
                       " malformed records; fix them before exporting (first: " +
                       loaded.errors.front().message + ")");
  Corpus corrected = apply_corrections(loaded.corpus, session.accepted_corrections());
  return serialize_corpus(corrected, session.taxonomy());
}

inline void export_corrected(const std::string& session_path, const std::string& out_path) {
  ReviewSession session = ReviewSession::open(session_path);
  std::string text = corrected_corpus_text(session);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
  if (!out) throw std::runtime_error("error writing " + out_path);
}

}  // namespace tamcorr
