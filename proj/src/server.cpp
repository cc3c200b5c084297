#include "hblocks/server.h"

#include <httplib.h>

#include <cstdlib>

namespace hblocks {

namespace {

std::string target_of(const httplib::Request& req) {
  std::string target = req.path;
  bool first = true;
  for (const auto& [k, v] : req.params) {
    target += first ? '?' : '&';
    target += k + "=" + v;
    first = false;
  }
  return target;
}

}  // namespace

HttpServer::HttpServer(Engine& engine) : engine_(engine), server_(std::make_unique<httplib::Server>()) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = engine_.handle(req.method, target_of(req), req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };

  server_->Get(R"(/sessions/([A-Za-z0-9_-]+)/stream)", [this](const httplib::Request& req,
                                                               httplib::Response& res) {
    const std::string id = req.matches[1];
    std::uint64_t since = 0;
    if (req.has_param("since")) since = std::strtoull(req.get_param_value("since").c_str(), nullptr, 10);
    try {
      engine_.events_since(id, since);  // 404 before any bytes are sent
    } catch (const Error& e) {
      res.status = http_status_for(e.code());
      res.set_content(error_body(e).dump(), "application/json");
      return;
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, id, since](size_t, httplib::DataSink& sink) mutable {
          if (engine_.is_shut_down()) {
            sink.done();
            return false;
          }
          for (const auto& e : engine_.events_since(id, since, std::chrono::milliseconds(250))) {
            const std::string frame =
                "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + event_to_json(e).dump() + "\n\n";
            if (!sink.write(frame.data(), frame.size())) return false;
            since = e.seq;
          }
          return true;
        });
  });

  server_->Get(".*", forward);
  server_->Post(".*", forward);
  server_->Put(".*", forward);
  server_->Delete(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

bool HttpServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

void HttpServer::stop() {
  engine_.shutdown();
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace hblocks
