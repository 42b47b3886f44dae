/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rankfuse/bridge.h"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <thread>

#include "rankfuse/error.h"

namespace rankfuse::bridge {
namespace {

[[noreturn]] void BridgeFail(const std::string& msg) { Fail(ErrorCode::kBridge, msg); }

void WriteAll(int fd, const std::string& data, bool socket) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = socket ? ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL)
                             : ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      BridgeFail(std::string("write to peer failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

// Reads from fd until `buffer` holds a full line or the deadline passes.
std::string ReadLine(int fd, std::string& buffer, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) BridgeFail("timed out waiting for a response");
    pollfd p{fd, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      BridgeFail(std::string("poll failed: ") + std::strerror(errno));
    }
    if (r == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(fd, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      BridgeFail(std::string("read from peer failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      BridgeFail(buffer.empty() ? "peer closed the connection"
                                : "peer closed the connection mid-line: " + buffer);
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

json DatasetPayload(const Dataset& data) {
  json rows = json::array();
  for (std::size_t r = 0; r < data.size(); ++r) {
    rows.push_back(std::vector<double>(data.x.row(r).begin(), data.x.row(r).end()));
  }
  json kinds = json::array();
  for (auto k : data.schema.kinds()) kinds.push_back(FeatureKindName(k));
  return {{"features", data.schema.names()}, {"kinds", kinds}, {"rows", rows}};
}

std::vector<double> FiniteArray(const json& response, const char* key, const std::string& raw) {
  if (!response.contains(key) || !response[key].is_array()) {
    BridgeFail(std::string("response lacks '") + key + "': " + raw);
  }
  std::vector<double> out;
  out.reserve(response[key].size());
  for (const auto& v : response[key]) {
    if (!v.is_number()) BridgeFail(std::string("non-numeric entry in '") + key + "': " + raw);
    const double x = v.get<double>();
    if (!std::isfinite(x)) BridgeFail(std::string("non-finite entry in '") + key + "': " + raw);
    out.push_back(x);
  }
  return out;
}

class BridgeFitted final : public FittedExplainer {
 public:
  BridgeFitted(Session& session, std::string name, std::string handle, FeatureSchema schema)
      : session_(session), name_(std::move(name)), handle_(std::move(handle)),
        schema_(std::move(schema)) {}

  ExplainOutput Explain(const Predictor&, std::span<const double> x,
                        std::uint64_t seed) const override {
    auto scores = session_.Explain(name_, handle_, x, seed);
    if (scores.size() != schema_.size()) {
      BridgeFail("explain returned " + std::to_string(scores.size()) + " scores for " +
                 std::to_string(schema_.size()) + " features");
    }
    ExplainOutput out{Explanation(schema_, std::move(scores), name_), {}};
    out.diagnostics.flags.push_back("bridge");
    return out;
  }

 private:
  Session& session_;
  std::string name_;
  std::string handle_;
  FeatureSchema schema_;
};

}  // namespace

// ------------------------------------------------------------ transports ---

ChildProcessTransport::ChildProcessTransport(const std::string& command) {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    BridgeFail(std::string("pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) BridgeFail(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ChildProcessTransport::~ChildProcessTransport() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    // Closing stdin asks the server to exit; give it a moment, then insist.
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

void ChildProcessTransport::Send(const std::string& line) {
  WriteAll(to_child_, line + "\n", false);
}

std::string ChildProcessTransport::Receive(std::chrono::milliseconds timeout) {
  return ReadLine(from_child_, buffer_, timeout);
}

TcpTransport::TcpTransport(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
  if (rc != 0) BridgeFail("cannot resolve " + host + ": " + ::gai_strerror(rc));
  for (addrinfo* a = res; a != nullptr; a = a->ai_next) {
    fd_ = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) BridgeFail("cannot connect to " + host + ":" + std::to_string(port));
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpTransport::Send(const std::string& line) { WriteAll(fd_, line + "\n", true); }

std::string TcpTransport::Receive(std::chrono::milliseconds timeout) {
  return ReadLine(fd_, buffer_, timeout);
}

void LoopbackTransport::Send(const std::string& line) { pending_.push_back(handler_(line)); }

std::string LoopbackTransport::Receive(std::chrono::milliseconds) {
  if (pending_.empty()) BridgeFail("timed out waiting for a response");
  std::string line = std::move(pending_.front());
  pending_.erase(pending_.begin());
  return line;
}

std::vector<TranscriptLine> ParseTranscript(const std::string& text) {
  std::vector<TranscriptLine> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    if (line.size() < 2 || (line[0] != '>' && line[0] != '<') || line[1] != ' ') {
      Fail(ErrorCode::kData, "transcript line " + std::to_string(number) + " is malformed");
    }
    out.push_back({line[0] == '>', line.substr(2)});
  }
  return out;
}

std::string FormatTranscript(const std::vector<TranscriptLine>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l.outgoing ? "> " : "< ";
    out += l.line;
    out += '\n';
  }
  return out;
}

void RecordingTransport::Send(const std::string& line) {
  transcript_.push_back({true, line});
  inner_->Send(line);
}

std::string RecordingTransport::Receive(std::chrono::milliseconds timeout) {
  std::string line = inner_->Receive(timeout);
  transcript_.push_back({false, line});
  return line;
}

void ReplayTransport::Send(const std::string& line) {
  if (next_ >= transcript_.size() || !transcript_[next_].outgoing) {
    BridgeFail("replay: unexpected request: " + line);
  }
  if (transcript_[next_].line != line) {
    BridgeFail("replay: request diverges from the recording at line " +
               std::to_string(next_ + 1) + ": " + line);
  }
  ++next_;
}

std::string ReplayTransport::Receive(std::chrono::milliseconds) {
  if (next_ >= transcript_.size() || transcript_[next_].outgoing) {
    BridgeFail("replay: no recorded response at line " + std::to_string(next_ + 1));
  }
  return transcript_[next_++].line;
}

std::unique_ptr<Transport> OpenTransport(const std::string& address) {
  const std::string prefix = "tcp://";
  if (address.rfind(prefix, 0) == 0) {
    const std::string rest = address.substr(prefix.size());
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
      Fail(ErrorCode::kInvalidArgument, "bridge address needs a port: " + address);
    }
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      Fail(ErrorCode::kInvalidArgument, "bad port in bridge address: " + address);
    }
    return std::make_unique<TcpTransport>(rest.substr(0, colon), port);
  }
  return std::make_unique<ChildProcessTransport>(address);
}

// ------------------------------------------------------------------ hash ---

std::uint64_t DatasetHash(const Matrix& x) {
  std::uint64_t h = 14695981039346656037ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  feed(x.rows());
  feed(x.cols());
  for (double v : x.data()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    feed(bits);
  }
  return h;
}

std::string HashHex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

// --------------------------------------------------------------- session ---

Session::Session(std::unique_ptr<Transport> transport, SessionOptions options)
    : transport_(std::move(transport)), options_(options) {}

Session::~Session() {
  try {
    Shutdown();
  } catch (...) {
  }
}

json Session::Call(json request) {
  std::lock_guard<std::mutex> lock(mu_);
  if (shut_down_) BridgeFail("session already shut down");
  const std::int64_t id = next_id_++;
  request["id"] = id;
  transport_->Send(request.dump());
  const std::string raw = transport_->Receive(options_.timeout);
  json response;
  try {
    response = json::parse(raw);
  } catch (const json::exception&) {
    BridgeFail("malformed response line: " + raw);
  }
  if (!response.is_object()) BridgeFail("response is not an object: " + raw);
  if (!response.contains("id") || response["id"] != id) {
    BridgeFail("response id mismatch (expected " + std::to_string(id) + "): " + raw);
  }
  if (response.contains("error")) {
    BridgeFail("server error: " + raw);
  }
  response["_raw"] = raw;
  return response;
}

const HandshakeInfo& Session::Handshake(std::uint64_t seed) {
  json r = Call({{"op", "handshake"}, {"version", kProtocolVersion}, {"seed", seed}});
  const std::string raw = r["_raw"];
  if (!r.contains("version") || !r["version"].is_number_integer()) {
    BridgeFail("handshake lacks a version: " + raw);
  }
  info_.version = r["version"];
  if (info_.version != kProtocolVersion) {
    BridgeFail("protocol version mismatch (client " + std::to_string(kProtocolVersion) +
               "): " + raw);
  }
  try {
    info_.capabilities = r.value("capabilities", std::vector<std::string>{});
  } catch (const json::exception&) {
    BridgeFail("handshake capabilities malformed: " + raw);
  }
  info_.params = r.value("params", json::object());
  return info_;
}

std::vector<double> Session::Predict(const Matrix& rows) {
  json jr = json::array();
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    jr.push_back(std::vector<double>(rows.row(r).begin(), rows.row(r).end()));
  }
  json response = Call({{"op", "predict"}, {"rows", jr}});
  const std::string raw = response["_raw"];
  auto probs = FiniteArray(response, "probs", raw);
  if (probs.size() != rows.rows()) {
    BridgeFail("predict returned " + std::to_string(probs.size()) + " probabilities for " +
               std::to_string(rows.rows()) + " rows: " + raw);
  }
  for (double p : probs) {
    if (p < 0.0 || p > 1.0) BridgeFail("probability outside [0, 1]: " + raw);
  }
  return probs;
}

std::string Session::Fit(const std::string& explainer, const Dataset& data) {
  const std::string hash = HashHex(DatasetHash(data.x));
  json response = Call({{"op", "fit"}, {"explainer", explainer},
                        {"dataset", DatasetPayload(data)}, {"hash", hash}});
  const std::string raw = response["_raw"];
  if (!response.contains("hash") || response["hash"] != hash) {
    BridgeFail("fit ack hash mismatch (sent " + hash + "): " + raw);
  }
  if (!response.contains("handle") || !response["handle"].is_string()) {
    BridgeFail("fit ack lacks a handle: " + raw);
  }
  return response["handle"];
}

std::vector<double> Session::Explain(const std::string& explainer, const std::string& handle,
                                     std::span<const double> row, std::uint64_t seed) {
  json response = Call({{"op", "explain"}, {"explainer", explainer}, {"handle", handle},
                        {"row", std::vector<double>(row.begin(), row.end())},
                        {"seed", seed}});
  return FiniteArray(response, "scores", response["_raw"]);
}

void Session::Shutdown() {
  if (shut_down_) return;
  Call({{"op", "shutdown"}});
  shut_down_ = true;
}

// -------------------------------------------------------------- adapters ---

std::vector<double> BridgePredictor::PredictProba(const Matrix& rows) const {
  Require(rows.cols() == schema_.size(), "row width does not match the schema");
  if (rows.rows() == 0) return {};
  return session_.Predict(rows);
}

std::unique_ptr<FittedExplainer> BridgeExplainer::Fit(const Dataset& data, std::uint64_t) const {
  std::string handle = session_.Fit(name_, data);
  return std::make_unique<BridgeFitted>(session_, name_, std::move(handle), data.schema);
}

ExplainerFactory BridgeExplainerFactory(Session& session) {
  return [&session](const std::string& name) -> std::unique_ptr<Explainer> {
    return std::make_unique<BridgeExplainer>(session, name);
  };
}

}  // namespace rankfuse::bridge
