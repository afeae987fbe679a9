#include "cds/http_server.hpp"

#include "cds/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace cds {

using nlohmann::json;

int http_status_for(Errc code) noexcept {
    switch (code) {
        case Errc::UnknownUser:
        case Errc::UnknownNonce:
        case Errc::UnknownImageId:
            return 404;
        case Errc::DuplicateUser:
        case Errc::ConsumedNonce:
            return 409;
        case Errc::ExpiredNonce:
            return 410;
        case Errc::IoError:
            return 500;
        default:
            return 400;
    }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, Errc code) {
    send_json(res, http_status_for(code), {{"error", to_string(code)}});
}

json parse_body(const httplib::Request& req) {
    try {
        json body = json::parse(req.body);
        if (!body.is_object()) {
            throw Error(Errc::BadRequest, "body must be a JSON object");
        }
        return body;
    } catch (const json::exception&) {
        throw Error(Errc::BadRequest, "malformed JSON");
    }
}

template <typename T>
T field(const json& body, const char* name) {
    auto it = body.find(name);
    if (it == body.end()) {
        throw Error(Errc::BadRequest, std::string("missing field ") + name);
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::BadRequest, std::string("bad field ") + name);
    }
}

Polyline parse_polyline(const json& body) {
    const auto it = body.find("polyline");
    if (it == body.end() || !it->is_array()) {
        throw Error(Errc::BadRequest, "polyline must be an array");
    }
    Polyline polyline;
    for (const auto& p : *it) {
        if (!p.is_array() || p.size() < 2 || p.size() > 3 ||
            !std::all_of(p.begin(), p.end(), [](const json& v) { return v.is_number(); })) {
            throw Error(Errc::BadRequest, "polyline points are [x, y] or [x, y, t_ms]");
        }
        Point point{p[0].get<double>(), p[1].get<double>(), std::nullopt};
        if (p.size() == 3) {
            point.t_ms = p[2].get<double>();
        }
        polyline.points.push_back(point);
    }
    return polyline;
}

/// Runs `fn`, mapping library errors to JSON error responses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        send_error(res, e.code());
    } catch (const std::exception&) {
        send_json(res, 500, {{"error", "Internal"}});
    }
}

}  // namespace

HttpServer::HttpServer(AuthService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

HttpServer::~HttpServer() {
    stop();
}

void HttpServer::install_routes() {
    auto& srv = *server_;

    srv.Post("/api/enroll", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            const auto result = service_.enroll(field<std::string>(body, "user"),
                                                field<std::vector<std::string>>(body, "image_ids"));
            send_json(res, 201,
                      {{"user", result.record.user},
                       {"state", to_string(result.record.state)},
                       {"challenge", result.confirmation.to_json()}});
        });
    });

    srv.Post("/api/challenge", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            send_json(res, 200, service_.issue_challenge(field<std::string>(body, "user")).to_json());
        });
    });

    srv.Get(R"(/api/challenge/([0-9a-f]+)/image/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Cell cell = 0;
            try {
                cell = static_cast<Cell>(std::stoull(req.matches[2].str()));
            } catch (const std::exception&) {
                throw Error(Errc::CellOutOfRange, "bad cell index");
            }
            const auto png = service_.challenge_image(req.matches[1].str(), cell);
            res.set_content(std::string(png.begin(), png.end()), "image/png");
            res.set_header("Cache-Control", "no-store");
        });
    });

    srv.Get("/api/catalog", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            json images = json::array();
            for (const auto& key : service_.catalog_keys()) {
                images.push_back({{"id", key}, {"url", "/api/catalog/" + key}});
            }
            const auto& cfg = service_.config();
            send_json(res, 200,
                      {{"images", images},
                       {"grid", {{"cols", cfg.grid.cols()}, {"rows", cfg.grid.rows()}}},
                       {"password_length", cfg.password_length}});
        });
    });

    srv.Get(R"(/api/catalog/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto png = service_.catalog_image(req.matches[1].str());
            res.set_content(std::string(png.begin(), png.end()), "image/png");
        });
    });

    srv.Post("/api/verify", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = parse_body(req);
            const Decision d = service_.verify_submission(field<std::string>(body, "user"),
                                                          field<std::string>(body, "nonce"), parse_polyline(body));
            json out{{"result", d.accepted ? "accept" : "reject"}};
            if (!d.accepted && service_.config().debug_reasons) {
                out["reason"] = to_string(d.reason);
            }
            send_json(res, 200, out);
        });
    });

    if (!service_.config().static_dir.empty()) {
        srv.set_mount_point("/", service_.config().static_dir.string());
    }
}

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) {
            throw Error(Errc::IoError, "cannot bind " + host);
        }
        return bound;
    }
    if (!server_->bind_to_port(host, port)) {
        throw Error(Errc::IoError, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::run() {
    server_->listen_after_bind();
}

void HttpServer::stop() {
    if (server_) {
        server_->stop();
    }
}

bool HttpServer::running() const {
    return server_->is_running();
}

}  // namespace cds
