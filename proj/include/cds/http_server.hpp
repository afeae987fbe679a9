#pragma once

#include "cds/error.hpp"
#include "cds/service.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace cds {

/// JSON-over-HTTP binding of AuthService:
///
///   POST /api/enroll            {user, image_ids[]}
///   POST /api/challenge         {user}
///   GET  /api/challenge/{nonce}/image/{cell}
///   GET  /api/catalog           ids + thumbnail urls
///   GET  /api/catalog/{id}      full-quality PNG
///   POST /api/verify            {user, nonce, polyline: [[x, y(, t_ms)], ...]}
///
/// Errors come back as {"error": "<Errc name>"} with a 4xx status.
class HttpServer {
public:
    explicit HttpServer(AuthService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void run();
    void stop();
    bool running() const;

private:
    void install_routes();

    AuthService& service_;
    std::unique_ptr<httplib::Server> server_;
};

/// HTTP status for a service error code.
int http_status_for(Errc code) noexcept;

}  // namespace cds
