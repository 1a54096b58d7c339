#include "skyfed/http.hpp"

#include <chrono>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"
#include "skyfed/node.hpp"
#include "skyfed/portal/federation.hpp"
#include "skyfed/wire.hpp"

namespace skyfed::http {

using nlohmann::json;

int status_for(const std::string& code) {
    static const std::set<std::string> bad_request{
        "parse_error",   "lex_error",          "plan_error",     "invalid_json",     "bad_request",
        "invalid_request", "invalid_cone",     "invalid_coordinate", "unknown_survey", "validation_error",
        "radius_too_large", "type_error",      "unknown_column", "invalid_radius",   "missing_column",
        "csv_error",       "invalid_zero_point"};
    if (bad_request.count(code)) return 400;
    if (code == "timeout") return 408;
    if (code == "row_cap_exceeded" || code == "query_too_large") return 413;
    if (code == "node_unreachable" || code == "node_error" || code == "invalid_response") return 502;
    return 500;
}

Server::Server() : server_(std::make_unique<httplib::Server>()) {}

Server::~Server() { stop(); }

void Server::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
    } else {
        port_ = server_->bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) throw Error("io_error", "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void Server::stop() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

void Server::wait() {
    if (thread_.joinable()) thread_.join();
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
    send_json(res, status_for(e.code()), wire::error_envelope(e));
}

// Runs a handler, mapping library errors onto the envelope and recording
// elapsed time in a header so bodies stay deterministic.
template <typename F>
void guarded(const httplib::Request& req, httplib::Response& res, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
        body();
    } catch (const Error& e) {
        send_error(res, e);
    } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_json(res, 500, wire::error_envelope("internal_error", e.what()));
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    res.set_header("X-Elapsed-Ms", format_double(ms));
    spdlog::debug("{} {} -> {} ({} ms)", req.method, req.path, res.status, ms);
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error("invalid_json", std::string("request body is not valid JSON: ") + e.what());
    }
}

std::string query_text(const httplib::Request& req) {
    if (req.method == "GET") {
        if (!req.has_param("q")) throw Error("bad_request", "missing parameter q");
        return req.get_param_value("q");
    }
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("q") || !body["q"].is_string())
        throw Error("bad_request", "body must be an object with string field q");
    return body["q"].get<std::string>();
}

double number_param(const httplib::Request& req, const std::string& name) {
    if (!req.has_param(name)) throw Error("bad_request", "missing parameter " + name);
    const std::string text = req.get_param_value(name);
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error("bad_request", "parameter " + name + " is not a number: " + text);
    }
}

void install_error_handlers(httplib::Server& s) {
    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const std::string code = res.status == 404 ? "not_found" : "http_error";
        res.set_content(wire::error_envelope(code, "HTTP " + std::to_string(res.status)).dump(), "application/json");
    });
}

const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>skyfed portal</title></head>"
    "<body><h1>skyfed portal</h1><p>No console bundle is installed. The JSON API is available at "
    "<code>GET /v1/surveys</code> and <code>POST /v1/fedquery</code>.</p></body></html>";

}  // namespace

std::unique_ptr<Server> make_node_server(std::shared_ptr<const NodeService> node, int timeout_ms) {
    auto server = std::make_unique<Server>();
    auto& s = server->raw();
    const auto seconds = std::max(1, timeout_ms / 1000);
    s.set_read_timeout(seconds, 0);
    s.set_write_timeout(seconds, 0);
    install_error_handlers(s);

    s.Get("/v1/metadata", [node](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [&] { send_json(res, 200, node->metadata()); });
    });
    s.Post("/v1/query", [node](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [&] { send_json(res, 200, wire::table_to_json(node->query(query_text(req)))); });
    });
    s.Get("/v1/cone", [node](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [&] {
            const double ra = number_param(req, "ra");
            const double dec = number_param(req, "dec");
            const double r = number_param(req, "r_deg");
            send_json(res, 200, wire::table_to_json(node->cone(ra, dec, r)));
        });
    });
    s.Post("/v1/xmatch", [node](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [&] {
            const XMatchRequest request = wire::request_from_json(parse_body(req));
            send_json(res, 200, wire::response_to_json(node->xmatch(request)));
        });
    });
    return server;
}

std::unique_ptr<Server> make_portal_server(std::shared_ptr<portal::Portal> portal) {
    auto server = std::make_unique<Server>();
    auto& s = server->raw();
    const auto seconds = std::max(1, portal->config().request_timeout_ms / 1000);
    s.set_read_timeout(seconds, 0);
    s.set_write_timeout(seconds, 0);
    install_error_handlers(s);

    s.Get("/v1/surveys", [portal](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [&] { send_json(res, 200, portal->surveys()); });
    });
    auto fedquery = [portal](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [&] { send_json(res, 200, wire::table_to_json(portal->fedquery(query_text(req)))); });
    };
    s.Get("/v1/fedquery", fedquery);
    s.Post("/v1/fedquery", fedquery);

    const auto& console = portal->config().console_dir;
    if (console && std::filesystem::is_directory(*console)) {
        s.set_mount_point("/", console->string());
    } else {
        s.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html");
        });
    }
    return server;
}

}  // namespace skyfed::http
