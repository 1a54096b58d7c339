#pragma once

#include <memory>
#include <string>
#include <thread>

#include "skyfed/error.hpp"

namespace httplib {
class Server;
}

namespace skyfed {
class NodeService;
namespace portal {
class Portal;
}
}  // namespace skyfed

namespace skyfed::http {

/// HTTP status for an error code: 400 client errors, 408 timeout, 413 caps,
/// 502 upstream node failures, 500 anything else.
int status_for(const std::string& code);

/// A bound HTTP server running on a background thread; stops on destruction.
class Server {
public:
    Server();
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    httplib::Server& raw() noexcept { return *server_; }

    /// Binds (port 0 picks a free port) and starts serving in the background.
    void start(const std::string& host, int port);
    int port() const noexcept { return port_; }
    void stop();
    /// Blocks until stop() is called from elsewhere.
    void wait();

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

std::unique_ptr<Server> make_node_server(std::shared_ptr<const NodeService> node, int timeout_ms);
std::unique_ptr<Server> make_portal_server(std::shared_ptr<portal::Portal> portal);

}  // namespace skyfed::http
