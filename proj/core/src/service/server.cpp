#include "liftsim/service/server.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <variant>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

namespace liftsim::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

using ConnId = std::uint64_t;

struct Inbound {
  enum class Kind { Open, Message, Close } kind;
  ConnId id;
  std::string text;
};

class Inbox {
 public:
  void push(Inbound item) {
    {
      std::lock_guard lock(mutex_);
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  std::deque<Inbound> take() {
    std::lock_guard lock(mutex_);
    return std::exchange(items_, {});
  }

  template <class Clock, class Duration>
  void wait_until(const std::chrono::time_point<Clock, Duration>& deadline,
                  const std::atomic<bool>& stop) {
    std::unique_lock lock(mutex_);
    cv_.wait_until(lock, deadline, [&] { return !items_.empty() || stop.load(); });
  }

  void wake() { cv_.notify_all(); }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Inbound> items_;
};

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, ConnId id, Inbox& inbox)
      : ws_(std::move(socket)), id_(id), inbox_(inbox) {}

  ConnId id() const { return id_; }

  void accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->inbox_.push({Inbound::Kind::Open, self->id_, {}});
      self->read();
    });
  }

  // Thread-safe: hops onto the connection's strand, numbers and queues.
  void send(std::shared_ptr<const ServerPayload> payload) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), payload = std::move(payload)] {
      if (self->closed_) return;
      self->queue_.push_back(encode(ServerMessage{++self->out_seq_, *payload}));
      if (self->queue_.size() == 1) self->write();
    });
  }

  void close() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_) return;
      self->ws_.async_close(websocket::close_code::going_away, [self](beast::error_code) {});
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->inbox_.push({Inbound::Kind::Close, self->id_, {}});
        return;
      }
      self->inbox_.push({Inbound::Kind::Message, self->id_, beast::buffers_to_string(self->buffer_.data())});
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        self->queue_.clear();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::uint64_t out_seq_ = 0;
  bool closed_ = false;
  ConnId id_;
  Inbox& inbox_;
};

}  // namespace

struct Server::Impl {
  Impl(harness::Scenario scenario, ServerConfig cfg)
      : config(std::move(cfg)), session(std::move(scenario), config.session) {
    checksum = schedule_checksum(session.simulation().schedule());
  }

  ServerConfig config;
  Session session;  // loop thread only after start()
  asio::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::thread net_thread;
  std::thread loop_thread;
  std::atomic<bool> stopping{false};
  std::atomic<std::uint64_t> checksum{0};
  std::atomic<double> sim_time{0.0};
  std::atomic<int> clients{0};
  Inbox inbox;
  std::atomic<ConnId> next_id{1};

  std::mutex conn_mutex;
  std::map<ConnId, std::weak_ptr<WsConnection>> connections;

  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopped = false;

  // -- network side -------------------------------------------------------

  void do_accept() {
    acceptor->async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      handle_http(std::move(socket));
      do_accept();
    });
  }

  void handle_http(tcp::socket socket) {
    struct HttpState {
      beast::tcp_stream stream;
      beast::flat_buffer buffer;
      http::request<http::string_body> req;
      http::response<http::string_body> res;
      explicit HttpState(tcp::socket s) : stream(std::move(s)) {}
    };
    auto st = std::make_shared<HttpState>(std::move(socket));
    st->stream.expires_after(std::chrono::seconds(30));
    http::async_read(st->stream, st->buffer, st->req, [this, st](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (websocket::is_upgrade(st->req)) {
        if (st->req.target() != "/session") {
          respond(st, http::status::not_found, json{{"error", "unknown endpoint"}});
          return;
        }
        st->stream.expires_never();
        const ConnId id = next_id++;
        auto conn = std::make_shared<WsConnection>(st->stream.release_socket(), id, inbox);
        {
          std::lock_guard lock(conn_mutex);
          connections[id] = conn;
        }
        conn->accept(std::move(st->req));
        return;
      }
      if (st->req.method() != http::verb::get) {
        respond(st, http::status::method_not_allowed, json{{"error", "GET only"}});
      } else if (st->req.target() == "/health") {
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(checksum.load()));
        respond(st, http::status::ok,
                json{{"status", "ok"},
                     {"build", config.build},
                     {"schedule_checksum", hex},
                     {"time", sim_time.load()},
                     {"clients", clients.load()}});
      } else if (st->req.target() == "/scenarios") {
        respond(st, http::status::ok, json{{"scenarios", list_scenarios()}});
      } else {
        respond(st, http::status::not_found, json{{"error", "unknown endpoint"}});
      }
    });
  }

  template <class State>
  void respond(const std::shared_ptr<State>& st, http::status status, const json& body) {
    st->res = http::response<http::string_body>(status, st->req.version());
    st->res.set(http::field::content_type, "application/json");
    st->res.keep_alive(false);
    st->res.body() = body.dump();
    st->res.prepare_payload();
    http::async_write(st->stream, st->res, [st](beast::error_code, std::size_t) {
      beast::error_code ignored;
      st->stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  std::vector<std::string> list_scenarios() const {
    std::vector<std::string> names;
    std::error_code ec;
    const auto& dir = config.session.scenario_dir;
    if (dir.empty() || !std::filesystem::is_directory(dir, ec)) return names;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
      if (entry.path().extension() == ".yaml") names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
  }

  // -- loop side ------------------------------------------------------------

  std::shared_ptr<WsConnection> connection(ConnId id) {
    std::lock_guard lock(conn_mutex);
    const auto it = connections.find(id);
    return it == connections.end() ? nullptr : it->second.lock();
  }

  void route(std::vector<Outgoing>& out, ConnId sender) {
    for (Outgoing& o : out) {
      auto payload = std::make_shared<const ServerPayload>(std::move(o.payload));
      if (o.broadcast) {
        std::vector<std::shared_ptr<WsConnection>> all;
        {
          std::lock_guard lock(conn_mutex);
          for (auto& [id, weak] : connections) {
            if (auto c = weak.lock()) all.push_back(std::move(c));
          }
        }
        for (auto& c : all) c->send(payload);
      } else if (auto c = connection(sender)) {
        c->send(payload);
      }
    }
  }

  void reply_error(ConnId id, std::string field, std::string message,
                   std::optional<std::uint64_t> ref) {
    std::vector<Outgoing> out{{ErrorNotice{std::move(message), std::move(field), ref}, false}};
    route(out, id);
  }

  void loop() {
    std::map<ConnId, SeqTracker> seqs;
    std::vector<ConnId> order;  // connection order; front is the pilot
    const double dt = session.scenario().sim.dt;
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(dt));
    auto next = std::chrono::steady_clock::now() + period;

    while (!stopping.load()) {
      for (Inbound& in : inbox.take()) {
        if (in.kind == Inbound::Kind::Open) {
          order.push_back(in.id);
          seqs[in.id];
        } else if (in.kind == Inbound::Kind::Close) {
          order.erase(std::remove(order.begin(), order.end(), in.id), order.end());
          seqs.erase(in.id);
          std::lock_guard lock(conn_mutex);
          connections.erase(in.id);
        } else {
          handle_message(in, seqs, order);
        }
        session.set_client_count(static_cast<int>(order.size()));
        clients = static_cast<int>(order.size());
      }

      if (!session.config().lockstep) {
        const auto now = std::chrono::steady_clock::now();
        int budget = 50;  // catch-up limit before resynchronising to the clock
        while (now >= next && budget-- > 0) {
          auto out = session.tick();
          route(out, 0);
          next += period;
        }
        if (budget <= 0) next = now + period;
        sim_time = session.time();
        inbox.wait_until(next, stopping);
      } else {
        sim_time = session.time();
        inbox.wait_until(std::chrono::steady_clock::now() + std::chrono::milliseconds(100), stopping);
      }
    }
  }

  void handle_message(const Inbound& in, std::map<ConnId, SeqTracker>& seqs,
                      const std::vector<ConnId>& order) {
    ClientMessage msg;
    try {
      msg = decode_client(in.text);
    } catch (const WireError& e) {
      reply_error(in.id, e.field(), e.what(), peek_seq(in.text));
      return;
    }
    if (!seqs[in.id].accept(msg.seq)) {
      reply_error(in.id, "seq", "sequence number must increase", msg.seq);
      return;
    }
    if (order.empty() || order.front() != in.id) {
      reply_error(in.id, "", "observer connections are read-only", msg.seq);
      return;
    }
    auto out = session.handle(msg);
    checksum = schedule_checksum(session.simulation().schedule());
    route(out, in.id);
  }
};

Server::Server(harness::Scenario scenario, ServerConfig config)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(config))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  Impl& s = *impl_;
  const auto address = asio::ip::make_address(s.config.address);
  s.acceptor.emplace(s.ioc);
  const tcp::endpoint endpoint(address, s.config.port);
  s.acceptor->open(endpoint.protocol());
  s.acceptor->set_option(asio::socket_base::reuse_address(true));
  s.acceptor->bind(endpoint);
  s.acceptor->listen();
  const unsigned short port = s.acceptor->local_endpoint().port();
  s.do_accept();
  s.net_thread = std::thread([&s] { s.ioc.run(); });
  s.loop_thread = std::thread([&s] { s.loop(); });
  return port;
}

void Server::stop() {
  Impl& s = *impl_;
  if (s.stopping.exchange(true)) return;
  s.inbox.wake();
  if (s.loop_thread.joinable()) s.loop_thread.join();
  {
    std::lock_guard lock(s.conn_mutex);
    for (auto& [id, weak] : s.connections) {
      if (auto c = weak.lock()) c->close();
    }
  }
  if (s.acceptor) {
    asio::post(s.ioc, [&s] {
      beast::error_code ec;
      s.acceptor->close(ec);
    });
  }
  // Give close frames a moment, then tear the loop down.
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  s.ioc.stop();
  if (s.net_thread.joinable()) s.net_thread.join();
  {
    std::lock_guard lock(s.stop_mutex);
    s.stopped = true;
  }
  s.stop_cv.notify_all();
}

void Server::wait() {
  Impl& s = *impl_;
  std::unique_lock lock(s.stop_mutex);
  s.stop_cv.wait(lock, [&] { return s.stopped; });
}

}  // namespace liftsim::service
