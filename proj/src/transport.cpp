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

#include "protoforge/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <thread>

#include "protoforge/envelope.hpp"
#include "protoforge/error.hpp"

namespace protoforge::transport {

class InProcNetwork::Endpoint : public Transport {
 public:
  Endpoint(InProcNetwork& net, std::string self) : net_(net), self_(std::move(self)) {}

  void send(std::string_view peer, ByteView message) override {
    {
      std::lock_guard lock(net_.mutex_);
      if (net_.closed_) throw Error(Errc::TransportClosed, "network is shut down");
      net_.queues_[{self_, std::string(peer)}].emplace_back(message.begin(), message.end());
    }
    net_.cv_.notify_all();
  }

  Bytes receive(std::string_view peer, Clock::time_point deadline) override {
    std::unique_lock lock(net_.mutex_);
    auto& q = net_.queues_[{std::string(peer), self_}];
    const bool ready = net_.cv_.wait_until(lock, deadline, [&] { return !q.empty() || net_.closed_; });
    if (!q.empty()) {
      auto out = std::move(q.front());
      q.pop_front();
      return out;
    }
    if (!ready) throw Error(Errc::Timeout, "no message from '" + std::string(peer) + "' before the deadline");
    throw Error(Errc::TransportClosed, "network is shut down");
  }

 private:
  InProcNetwork& net_;
  std::string self_;
};

std::unique_ptr<Transport> InProcNetwork::endpoint(std::string self) {
  return std::make_unique<Endpoint>(*this, std::move(self));
}

void InProcNetwork::shutdown() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(Errc::InvalidEndpoint, "'" + std::string(text) + "' is not host:port");
  }
  auto host = text.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  } else if (host.find_first_of("[]:") != std::string_view::npos) {
    // Bare IPv6 literals are ambiguous; brackets must balance.
    throw Error(Errc::InvalidEndpoint, "'" + std::string(text) + "' is not host:port");
  }
  const auto portText = text.substr(colon + 1);
  unsigned port = 0;
  const auto [ptr, ec] = std::from_chars(portText.data(), portText.data() + portText.size(), port);
  if (portText.empty() || ec != std::errc() || ptr != portText.data() + portText.size() || port > 65535 ||
      host.empty()) {
    throw Error(Errc::InvalidEndpoint, "'" + std::string(text) + "' is not host:port");
  }
  return {std::string(host), static_cast<std::uint16_t>(port)};
}

namespace {

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left <= 0 ? 0 : static_cast<int>(std::min<long long>(left, 60'000));
}

struct AddrInfo {
  addrinfo* list = nullptr;
  ~AddrInfo() {
    if (list != nullptr) freeaddrinfo(list);
  }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const auto port = std::to_string(ep.port);
  const int rc = getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &out.list);
  if (rc != 0) throw Error(Errc::InvalidEndpoint, "cannot resolve '" + ep.host + "': " + gai_strerror(rc));
}

class TcpTransport : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpTransport() override { close(); }

  void send(std::string_view, ByteView message) override {
    if (fd_ < 0) throw Error(Errc::TransportClosed, "connection closed");
    const auto framed = envelope::frame(message);
    std::size_t off = 0;
    while (off < framed.size()) {
      const auto n = ::send(fd_, framed.data() + off, framed.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::TransportClosed, std::string("send failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  Bytes receive(std::string_view, Clock::time_point deadline) override {
    while (true) {
      if (auto msg = envelope::unframe(buffer_)) return std::move(*msg);
      if (fd_ < 0) throw Error(Errc::TransportClosed, "connection closed");
      pollfd p{fd_, POLLIN, 0};
      const int rc = ::poll(&p, 1, remaining_ms(deadline));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::TransportClosed, std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) throw Error(Errc::Timeout, "no message before the deadline");
      std::uint8_t chunk[8192];
      const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::TransportClosed, std::string("recv failed: ") + std::strerror(errno));
      }
      if (n == 0) throw Error(Errc::TransportClosed, "peer closed the connection");
      buffer_.insert(buffer_.end(), chunk, chunk + n);
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
  Bytes buffer_;
};

}  // namespace

TcpListener::TcpListener(const Endpoint& bindTo) {
  AddrInfo ai;
  resolve(bindTo, true, ai);
  for (auto* a = ai.list; a != nullptr; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 4) == 0) {
      sockaddr_storage ss{};
      socklen_t len = sizeof ss;
      getsockname(fd, reinterpret_cast<sockaddr*>(&ss), &len);
      port_ = ss.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port)
                                       : ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
      fd_ = fd;
      return;
    }
    ::close(fd);
  }
  throw Error(Errc::IoError, "cannot listen on " + bindTo.host + ":" + std::to_string(bindTo.port));
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept(Clock::time_point deadline) {
  while (true) {
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) throw Error(Errc::Timeout, "no peer connected before the deadline");
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpTransport>(fd);
    if (errno != EINTR && errno != EAGAIN && errno != ECONNABORTED) {
      throw Error(Errc::IoError, std::string("accept failed: ") + std::strerror(errno));
    }
  }
}

std::unique_ptr<Transport> tcp_connect(const Endpoint& peer, Clock::time_point deadline, bool retry) {
  AddrInfo ai;
  resolve(peer, false, ai);
  while (true) {
    for (auto* a = ai.list; a != nullptr; a = a->ai_next) {
      const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) return std::make_unique<TcpTransport>(fd);
      ::close(fd);
    }
    if (!retry) throw Error(Errc::ConnectionRefused, "cannot connect to " + peer.host + ":" + std::to_string(peer.port));
    if (Clock::now() >= deadline) {
      throw Error(Errc::Timeout, "no peer listening on " + peer.host + ":" + std::to_string(peer.port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
}

void InterceptingTransport::send(std::string_view peer, ByteView message) {
  Bytes copy(message.begin(), message.end());
  if (onSend_) onSend_(peer, copy);
  inner_->send(peer, copy);
}

}  // namespace protoforge::transport
