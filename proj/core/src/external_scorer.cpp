#include "qecomb/external_scorer.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <map>

#include <json.hpp>

#include "qecomb/errors.hpp"

namespace qecomb {

namespace {

using nlohmann::json;

// Requests in flight at once; keeps both sides' socket buffers from
// filling up while neither reads.
constexpr std::size_t kWindow = 64;

std::string errno_text() { return std::strerror(errno); }

}  // namespace

std::string resolve_scorer_endpoint(const std::string& configured) {
  const char* env = std::getenv(kScorerEndpointEnv);
  if (env && *env) return env;
  return configured;
}

struct ExternalScorer::Connection {
  int fd = -1;
  pid_t child = -1;
  std::string buffer;

  ~Connection() {
    if (fd >= 0) ::close(fd);
    if (child > 0) {
      int status = 0;
      ::waitpid(child, &status, 0);
    }
  }

  void send_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const auto n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ScorerError("external scorer write failed: " + errno_text());
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    for (;;) {
      const auto nl = buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      const auto n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ScorerError("external scorer read failed: " + errno_text());
      }
      if (n == 0) throw ScorerError("external scorer closed the connection");
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

namespace {

void spawn(ExternalScorer::Connection& c, const std::string& command);

}  // namespace

ExternalScorer::ExternalScorer(const std::string& endpoint)
    : conn_(std::make_unique<Connection>()) {
  if (endpoint.rfind("tcp:", 0) == 0) {
    const auto rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ScorerError("bad tcp endpoint: " + endpoint);
    const auto host = rest.substr(0, colon);
    const auto port = rest.substr(colon + 1);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
      throw ScorerError("cannot resolve " + endpoint + ": " + ::gai_strerror(rc));
    }
    for (auto* ai = res; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        conn_->fd = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (conn_->fd < 0) throw ScorerError("cannot connect to " + endpoint);
  } else {
    const auto command = endpoint.rfind("stdio:", 0) == 0 ? endpoint.substr(6) : endpoint;
    if (command.empty()) throw ScorerError("empty external scorer command");
    spawn(*conn_, command);
  }

  json hello;
  try {
    hello = json::parse(conn_->read_line());
  } catch (const json::exception& e) {
    throw ScorerError(std::string("malformed hello from external scorer: ") + e.what());
  }
  if (!hello.is_object() || hello.value("protocol", 0) != kProtocolVersion) {
    throw ScorerError("external scorer speaks an unsupported protocol");
  }
  if (hello.contains("capabilities")) {
    for (const auto& c : hello.at("capabilities")) {
      if (c.is_string()) capabilities_.push_back(c.get<std::string>());
    }
  }
  for (const auto& c : capabilities_) {
    tokens_ = tokens_ || c == "tokens";
    sentence_ = sentence_ || c == "sentence";
  }
  if (!tokens_ && !sentence_) {
    throw ScorerError("external scorer offers neither token nor sentence scores");
  }
}

ExternalScorer::~ExternalScorer() = default;

namespace {

void spawn(ExternalScorer::Connection& c, const std::string& command) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw ScorerError("socketpair failed: " + errno_text());
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw ScorerError("fork failed: " + errno_text());
  }
  if (pid == 0) {
    ::close(sv[0]);
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  c.fd = sv[0];
  c.child = pid;
}

std::vector<json> exchange(ExternalScorer::Connection& conn, long long& next_id,
                           const char* kind, const TokenSeq& source,
                           std::span<const TokenSeq> hypotheses) {
  const std::string src = join(source);
  std::vector<json> replies(hypotheses.size());
  for (std::size_t start = 0; start < hypotheses.size(); start += kWindow) {
    const std::size_t end = std::min(hypotheses.size(), start + kWindow);
    std::map<long long, std::size_t> pending;
    std::string out;
    for (std::size_t i = start; i < end; ++i) {
      const long long id = next_id++;
      pending.emplace(id, i);
      out += json{{"id", id}, {"kind", kind}, {"source", src},
                  {"hypothesis", join(hypotheses[i])}}
                 .dump();
      out += '\n';
    }
    conn.send_all(out);
    while (!pending.empty()) {
      json r;
      try {
        r = json::parse(conn.read_line());
      } catch (const json::exception& e) {
        throw ScorerError(std::string("malformed reply from external scorer: ") + e.what());
      }
      if (!r.is_object() || !r.contains("id") || !r.at("id").is_number_integer()) {
        throw ScorerError("external scorer reply without an id");
      }
      const auto id = r.at("id").get<long long>();
      if (r.contains("code")) {
        throw ScorerError("external scorer error " + r.at("code").dump() + " for request " +
                          std::to_string(id) + ": " + r.value("message", std::string()));
      }
      const auto it = pending.find(id);
      if (it == pending.end()) {
        throw ScorerError("external scorer replied to unknown request " + std::to_string(id));
      }
      replies[it->second] = std::move(r);
      pending.erase(it);
    }
  }
  return replies;
}

double probability(const json& v) {
  if (!v.is_number()) throw ScorerError("non-numeric probability from external scorer");
  const double p = v.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) throw ScorerError("probability outside [0, 1] from external scorer");
  return p;
}

}  // namespace

std::vector<LabelVector> ExternalScorer::label_batch(
    const TokenSeq& source, std::span<const TokenSeq> hypotheses) const {
  if (!tokens_) return Scorer::label_batch(source, hypotheses);
  std::lock_guard lock(mutex_);
  const auto replies = exchange(*conn_, next_id_, "tokens", source, hypotheses);
  std::vector<LabelVector> out(hypotheses.size());
  for (std::size_t i = 0; i < replies.size(); ++i) {
    const auto& r = replies[i];
    if (!r.contains("word_probs") || !r.contains("gap_probs")) {
      throw ScorerError("token reply lacks word_probs or gap_probs");
    }
    for (const auto& v : r.at("word_probs")) out[i].words.push_back(probability(v));
    for (const auto& v : r.at("gap_probs")) out[i].gaps.push_back(probability(v));
    if (out[i].words.size() != hypotheses[i].size() || !out[i].well_formed()) {
      throw ScorerError("token reply shape does not match the hypothesis length");
    }
  }
  return out;
}

std::vector<double> ExternalScorer::score_batch(
    const TokenSeq& source, std::span<const TokenSeq> hypotheses) const {
  std::vector<double> out;
  out.reserve(hypotheses.size());
  if (tokens_) {
    for (const auto& l : label_batch(source, hypotheses)) out.push_back(aggregate_q(l));
    return out;
  }
  std::lock_guard lock(mutex_);
  for (const auto& r : exchange(*conn_, next_id_, "sentence", source, hypotheses)) {
    if (!r.contains("score")) throw ScorerError("sentence reply lacks a score");
    const double s = probability(r.at("score"));
    if (!(s > 0.0)) throw ScorerError("sentence score must lie in (0, 1]");
    out.push_back(s);
  }
  return out;
}

}  // namespace qecomb
