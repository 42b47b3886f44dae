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

#ifndef RANKFUSE_BRIDGE_H_
#define RANKFUSE_BRIDGE_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rankfuse/dataset.h"
#include "rankfuse/explainers.h"
#include "rankfuse/pipeline.h"
#include "rankfuse/predictor.h"

namespace rankfuse::bridge {

using json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;

// Moves single lines (without the trailing newline) to and from a peer.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void Send(const std::string& line) = 0;
  // Throws a kBridge error when nothing arrives before the timeout.
  virtual std::string Receive(std::chrono::milliseconds timeout) = 0;
};

// Spawns `/bin/sh -c command` and talks over its stdin/stdout.
class ChildProcessTransport final : public Transport {
 public:
  explicit ChildProcessTransport(const std::string& command);
  ~ChildProcessTransport() override;

  ChildProcessTransport(const ChildProcessTransport&) = delete;
  ChildProcessTransport& operator=(const ChildProcessTransport&) = delete;

  void Send(const std::string& line) override;
  std::string Receive(std::chrono::milliseconds timeout) override;

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// Same framing over a TCP connection.
class TcpTransport final : public Transport {
 public:
  TcpTransport(const std::string& host, int port);
  ~TcpTransport() override;

  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void Send(const std::string& line) override;
  std::string Receive(std::chrono::milliseconds timeout) override;

 private:
  int fd_ = -1;
  std::string buffer_;
};

// In-process peer: every request line is answered by `handler`.
class LoopbackTransport final : public Transport {
 public:
  using Handler = std::function<std::string(const std::string&)>;
  explicit LoopbackTransport(Handler handler) : handler_(std::move(handler)) {}

  void Send(const std::string& line) override;
  std::string Receive(std::chrono::milliseconds timeout) override;

 private:
  Handler handler_;
  std::vector<std::string> pending_;
};

// A transcript is the ordered list of lines, each tagged with its direction.
struct TranscriptLine {
  bool outgoing = true;
  std::string line;
};

std::vector<TranscriptLine> ParseTranscript(const std::string& text);
std::string FormatTranscript(const std::vector<TranscriptLine>& lines);

// Passes traffic through to `inner` and keeps a copy.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(std::unique_ptr<Transport> inner) : inner_(std::move(inner)) {}

  void Send(const std::string& line) override;
  std::string Receive(std::chrono::milliseconds timeout) override;

  const std::vector<TranscriptLine>& transcript() const { return transcript_; }

 private:
  std::unique_ptr<Transport> inner_;
  std::vector<TranscriptLine> transcript_;
};

// Plays a recorded transcript back. Outgoing lines must match the recording
// exactly; any divergence is a kBridge error.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(std::vector<TranscriptLine> transcript)
      : transcript_(std::move(transcript)) {}

  void Send(const std::string& line) override;
  std::string Receive(std::chrono::milliseconds timeout) override;

  bool finished() const { return next_ == transcript_.size(); }

 private:
  std::vector<TranscriptLine> transcript_;
  std::size_t next_ = 0;
};

// "tcp://host:port" connects over TCP; anything else is run as a command.
std::unique_ptr<Transport> OpenTransport(const std::string& address);

// FNV-1a 64 over n, d and the little-endian IEEE-754 bytes of x (row-major).
std::uint64_t DatasetHash(const Matrix& x);
std::string HashHex(std::uint64_t hash);

struct SessionOptions {
  std::chrono::milliseconds timeout{60000};
};

struct HandshakeInfo {
  int version = 0;
  std::vector<std::string> capabilities;
  json params;
};

// One logical connection. Requests are strictly sequential; the mutex only
// guards against accidental sharing.
class Session {
 public:
  explicit Session(std::unique_ptr<Transport> transport, SessionOptions options = {});
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const HandshakeInfo& Handshake(std::uint64_t seed);
  const HandshakeInfo& handshake() const { return info_; }

  std::vector<double> Predict(const Matrix& rows);
  // Sends the dataset and returns the fit handle; the echoed hash must match.
  std::string Fit(const std::string& explainer, const Dataset& data);
  std::vector<double> Explain(const std::string& explainer, const std::string& handle,
                              std::span<const double> row, std::uint64_t seed);
  void Shutdown();

  // Sends `request` with a fresh id and returns the validated response.
  json Call(json request);

 private:
  std::unique_ptr<Transport> transport_;
  SessionOptions options_;
  HandshakeInfo info_;
  std::int64_t next_id_ = 1;
  bool shut_down_ = false;
  std::mutex mu_;
};

class BridgePredictor final : public Predictor {
 public:
  BridgePredictor(Session& session, FeatureSchema schema)
      : session_(session), schema_(std::move(schema)) {}

  const FeatureSchema& schema() const override { return schema_; }
  std::vector<double> PredictProba(const Matrix& rows) const override;

 private:
  Session& session_;
  FeatureSchema schema_;
};

// Explainer whose fit state lives on the server under an opaque handle. The
// model passed to Explain is ignored: the server explains its own predictor.
class BridgeExplainer final : public Explainer {
 public:
  BridgeExplainer(Session& session, std::string name)
      : session_(session), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  std::unique_ptr<FittedExplainer> Fit(const Dataset& data, std::uint64_t seed) const override;

 private:
  Session& session_;
  std::string name_;
};

ExplainerFactory BridgeExplainerFactory(Session& session);

}  // namespace rankfuse::bridge

#endif  // RANKFUSE_BRIDGE_H_
