#include "skyfed/portal/client.hpp"

#include "httplib.h"
#include "skyfed/http.hpp"
#include "skyfed/node.hpp"

namespace skyfed::portal {

using nlohmann::json;

std::pair<int, json> http_json(const std::string& base_url, const std::string& method, const std::string& path,
                               const std::string& body, std::chrono::milliseconds timeout) {
    httplib::Client cli(base_url);
    if (!cli.is_valid()) throw Error("bad_request", "invalid URL " + base_url);
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Result res = method == "POST" ? cli.Post(path, body, "application/json") : cli.Get(path);
    if (!res) throw Error("node_unreachable", base_url + " unreachable: " + httplib::to_string(res.error()));
    json parsed;
    try {
        parsed = json::parse(res->body);
    } catch (const json::parse_error&) {
        parsed = json{{"raw", res->body}};
    }
    return {res->status, std::move(parsed)};
}

HttpNodeClient::HttpNodeClient(std::string survey, std::string base_url, std::chrono::milliseconds timeout)
    : survey_(std::move(survey)), base_url_(std::move(base_url)), timeout_(timeout) {}

json HttpNodeClient::call(const std::string& method, const std::string& path, const std::string& body) {
    std::pair<int, json> res;
    try {
        res = http_json(base_url_, method, path, body, timeout_);
    } catch (const Error& e) {
        throw Error("node_unreachable", "node " + survey_ + " unreachable (" + base_url_ + "): " + e.what());
    }
    auto& [status, j] = res;
    if (status == 200) return std::move(j);
    std::string code = "node_error", message = "HTTP " + std::to_string(status);
    if (j.contains("error") && j["error"].is_object()) {
        code = j["error"].value("code", code);
        message = j["error"].value("message", message);
    }
    if (status >= 500) code = "node_error";
    throw Error(code, "node " + survey_ + ": " + message);
}

json HttpNodeClient::metadata() { return call("GET", "/v1/metadata", {}); }

ResultTable HttpNodeClient::query(const std::string& text) {
    return wire::table_from_json(call("POST", "/v1/query", json{{"q", text}}.dump()));
}

wire::XMatchResponse HttpNodeClient::xmatch(const XMatchRequest& request) {
    return wire::response_from_json(call("POST", "/v1/xmatch", wire::request_to_json(request).dump()));
}

json LocalNodeClient::metadata() { return node_->metadata(); }
ResultTable LocalNodeClient::query(const std::string& text) { return node_->query(text); }
wire::XMatchResponse LocalNodeClient::xmatch(const XMatchRequest& request) { return node_->xmatch(request); }

}  // namespace skyfed::portal
