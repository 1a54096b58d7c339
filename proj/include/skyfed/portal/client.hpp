#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "json.hpp"
#include "skyfed/result_table.hpp"
#include "skyfed/wire.hpp"
#include "skyfed/xmatch.hpp"

namespace skyfed {
class NodeService;
}

namespace skyfed::portal {

/// The portal's view of one SkyNode.
class NodeClient {
public:
    virtual ~NodeClient() = default;
    virtual nlohmann::json metadata() = 0;
    virtual ResultTable query(const std::string& text) = 0;
    virtual wire::XMatchResponse xmatch(const XMatchRequest& request) = 0;
};

/// Talks to a node over HTTP. Connection failures raise
/// Error("node_unreachable"); error envelopes are re-raised with the node's
/// code and the survey name prefixed to the message.
class HttpNodeClient : public NodeClient {
public:
    HttpNodeClient(std::string survey, std::string base_url, std::chrono::milliseconds timeout);
    nlohmann::json metadata() override;
    ResultTable query(const std::string& text) override;
    wire::XMatchResponse xmatch(const XMatchRequest& request) override;

private:
    nlohmann::json call(const std::string& method, const std::string& path, const std::string& body);

    std::string survey_;
    std::string base_url_;
    std::chrono::milliseconds timeout_;
};

/// Calls a NodeService in-process.
class LocalNodeClient : public NodeClient {
public:
    explicit LocalNodeClient(std::shared_ptr<const NodeService> node) : node_(std::move(node)) {}
    nlohmann::json metadata() override;
    ResultTable query(const std::string& text) override;
    wire::XMatchResponse xmatch(const XMatchRequest& request) override;

private:
    std::shared_ptr<const NodeService> node_;
};

/// Performs one JSON request against an arbitrary base URL. Returns
/// (status, parsed body); throws Error("node_unreachable") when the
/// connection fails.
std::pair<int, nlohmann::json> http_json(const std::string& base_url, const std::string& method,
                                         const std::string& path, const std::string& body,
                                         std::chrono::milliseconds timeout);

}  // namespace skyfed::portal
