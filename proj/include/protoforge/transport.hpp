/*
 * Copyright 2026 The Protoforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "protoforge/bytes.hpp"

namespace protoforge::transport {

using Clock = std::chrono::steady_clock;

/// Ordered, reliable, duplex message channel to named peers. receive()
/// throws Error(Timeout) once the deadline passes and Error(TransportClosed)
/// when the channel is shut down.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(std::string_view peer, ByteView message) = 0;
  virtual Bytes receive(std::string_view peer, Clock::time_point deadline) = 0;
  virtual void close() {}
};

/// Co-resident sessions exchanging messages through per-(sender, receiver)
/// FIFO queues. The network must outlive its endpoints.
class InProcNetwork {
 public:
  std::unique_ptr<Transport> endpoint(std::string self);
  /// Wakes every blocked receiver with TransportClosed.
  void shutdown();

 private:
  class Endpoint;
  using Key = std::pair<std::string, std::string>;  // (from, to)

  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<Key, std::deque<Bytes>> queues_;
  bool closed_ = false;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// "host:port"; throws Error(InvalidEndpoint).
Endpoint parse_endpoint(std::string_view text);

/// Point-to-point stream transport; the peer argument is ignored. Messages
/// are framed with a 4-byte big-endian length prefix.
class TcpListener {
 public:
  explicit TcpListener(const Endpoint& bindTo);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  [[nodiscard]] std::uint16_t port() const noexcept { return port_; }
  /// Throws Error(Timeout) if nobody connects before the deadline.
  std::unique_ptr<Transport> accept(Clock::time_point deadline);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// With `retry`, refused connections are retried until the deadline
/// (Error(Timeout)); otherwise they fail at once with ConnectionRefused.
std::unique_ptr<Transport> tcp_connect(const Endpoint& peer, Clock::time_point deadline, bool retry = true);

/// Passes every outgoing message through a hook before forwarding it.
class InterceptingTransport : public Transport {
 public:
  using Hook = std::function<void(std::string_view peer, Bytes& message)>;

  InterceptingTransport(std::unique_ptr<Transport> inner, Hook onSend)
      : inner_(std::move(inner)), onSend_(std::move(onSend)) {}

  void send(std::string_view peer, ByteView message) override;
  Bytes receive(std::string_view peer, Clock::time_point deadline) override {
    return inner_->receive(peer, deadline);
  }
  void close() override { inner_->close(); }

 private:
  std::unique_ptr<Transport> inner_;
  Hook onSend_;
};

}  // namespace protoforge::transport
