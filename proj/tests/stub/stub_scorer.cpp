// Constant-output scorer speaking the line protocol, for client tests.
//
//   stub_scorer              serve one peer on stdin/stdout
//   stub_scorer --tcp        listen on 127.0.0.1, print "port N", serve one
//                            connection
//
// Words score 0.7, gaps 0.9, sentences 0.5 unless overridden.

#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

struct Options {
  bool tcp = false;
  bool shuffle = false;
  long die_after = -1;
  std::string capabilities = "tokens,sentence";
  double word = 0.7;
  double gap = 0.9;
  double score = 0.5;
  bool bad_shape = false;
  bool error = false;
};

class Peer {
 public:
  Peer(int in, int out) : in_(in), out_(out) {}

  // Returns false at end of input.
  bool read_line(std::string& line, int timeout_ms) {
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return true;
      }
      if (timeout_ms >= 0) {
        pollfd p{in_, POLLIN, 0};
        if (::poll(&p, 1, timeout_ms) <= 0) return false;
      }
      char chunk[4096];
      const auto n = ::read(in_, chunk, sizeof chunk);
      if (n <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void write(const std::string& text) {
    std::size_t off = 0;
    while (off < text.size()) {
      const auto n = ::write(out_, text.data() + off, text.size() - off);
      if (n <= 0) std::_Exit(1);
      off += static_cast<std::size_t>(n);
    }
  }

 private:
  int in_;
  int out_;
  std::string buffer_;
};

std::size_t count_tokens(const std::string& text) {
  std::size_t n = 0;
  bool in = false;
  for (const char c : text) {
    const bool space = c == ' ' || c == '\t';
    if (!space && !in) ++n;
    in = !space;
  }
  return n;
}

std::string reply(const Options& o, const std::string& line) {
  json req;
  try {
    req = json::parse(line);
  } catch (const json::exception& e) {
    return json{{"id", -1}, {"code", "malformed"}, {"message", e.what()}}.dump();
  }
  const auto id = req.value("id", -1LL);
  if (o.error) return json{{"id", id}, {"code", "adapter"}, {"message", "forced failure"}}.dump();
  if (req.value("kind", std::string()) == "sentence") {
    return json{{"id", id}, {"score", o.score}}.dump();
  }
  std::size_t m = count_tokens(req.value("hypothesis", std::string()));
  if (o.bad_shape) ++m;
  return json{{"id", id},
              {"word_probs", std::vector<double>(m, o.word)},
              {"gap_probs", std::vector<double>(m + 1, o.gap)}}
      .dump();
}

int serve(const Options& o, Peer& peer) {
  json caps = json::array();
  std::size_t from = 0;
  while (from <= o.capabilities.size()) {
    const auto comma = std::min(o.capabilities.find(',', from), o.capabilities.size());
    if (comma > from) caps.push_back(o.capabilities.substr(from, comma - from));
    from = comma + 1;
  }
  peer.write(json{{"protocol", 1}, {"capabilities", caps}}.dump() + "\n");

  long seen = 0;
  std::string line;
  while (peer.read_line(line, -1)) {
    std::vector<std::string> batch = {line};
    if (o.shuffle) {
      while (peer.read_line(line, 50)) batch.push_back(line);
      std::reverse(batch.begin(), batch.end());
    }
    std::string out;
    for (const auto& l : batch) {
      if (o.die_after >= 0 && seen >= o.die_after) std::_Exit(1);
      ++seen;
      out += reply(o, l) + "\n";
    }
    peer.write(out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Stub scorer"};
  app.add_flag("--tcp", o.tcp, "Listen on a loopback TCP port");
  app.add_flag("--shuffle", o.shuffle, "Answer buffered requests in reverse order");
  app.add_option("--die-after", o.die_after, "Exit without replying after N requests");
  app.add_option("--capabilities", o.capabilities);
  app.add_option("--word", o.word);
  app.add_option("--gap", o.gap);
  app.add_option("--score", o.score);
  app.add_flag("--bad-shape", o.bad_shape, "Reply with one word probability too many");
  app.add_flag("--error", o.error, "Answer every request with an error");
  CLI11_PARSE(app, argc, argv);

  if (!o.tcp) {
    Peer peer(STDIN_FILENO, STDOUT_FILENO);
    return serve(o, peer);
  }

  const int ls = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (ls < 0 || ::bind(ls, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(ls, 1) != 0) {
    std::perror("listen");
    return 1;
  }
  socklen_t len = sizeof addr;
  ::getsockname(ls, reinterpret_cast<sockaddr*>(&addr), &len);
  std::printf("port %d\n", ntohs(addr.sin_port));
  std::fflush(stdout);
  const int fd = ::accept(ls, nullptr, nullptr);
  ::close(ls);
  if (fd < 0) return 1;
  Peer peer(fd, fd);
  const int rc = serve(o, peer);
  ::close(fd);
  return rc;
}
