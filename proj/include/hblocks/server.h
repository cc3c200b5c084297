#pragma once

#include <memory>
#include <string>
#include <thread>

#include "hblocks/engine.h"

namespace httplib {
class Server;
}

namespace hblocks {

// HTTP front end over an Engine. Plain routes go through Engine::handle;
// GET /sessions/{id}/stream?since=N is a server-sent event stream.
class HttpServer {
 public:
  explicit HttpServer(Engine& engine);
  ~HttpServer();

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  Engine& engine_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace hblocks
