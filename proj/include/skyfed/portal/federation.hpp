#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skyfed/portal/client.hpp"
#include "skyfed/query/ast.hpp"
#include "skyfed/query/executor.hpp"
#include "skyfed/query/plan.hpp"
#include "skyfed/result_table.hpp"

namespace skyfed::portal {

struct NodeEntry {
    std::string survey;
    std::string url;
};

struct FederationConfig {
    std::string host = "127.0.0.1";
    int port = 8100;
    std::vector<NodeEntry> nodes;
    std::size_t concurrency = 4;   // in-flight xmatch requests per node
    std::size_t batch_size = 1000; // probes per xmatch request
    double k = 3.0;
    double max_radius_arcsec = 30.0;
    int request_timeout_ms = 30000;
    std::size_t row_cap = query::kDefaultRowCap;
    std::optional<std::filesystem::path> console_dir;

    void validate() const;
    static FederationConfig from_json(std::string_view text, const std::filesystem::path& base_dir = {});
};

/// What the portal knows about a node's catalog.
struct NodeMetadata {
    std::string survey;
    std::vector<std::string> bands;
    std::vector<ColumnSpec> columns;
    std::size_t object_count = 0;
    std::optional<double> epoch_mjd;

    static NodeMetadata from_json(const nlohmann::json& j);
};

/// A parsed portal query with its WHERE conjuncts attributed to surveys.
struct FederatedQuery {
    query::Query ast;
    std::vector<std::string> surveys;  // XMATCH order
    /// Conjuncts that touch exactly one survey and can run on its node.
    std::map<std::string, std::vector<query::Expr>> pushdown;
    /// Everything else: multi-survey, separation-based or constant conjuncts.
    std::vector<query::Expr> residual;
    query::RowLayout layout;  // tuple layout: per survey its columns + separation_arcsec
    std::vector<std::size_t> survey_offsets;  // first slot of each survey in layout
};

/// Parses the portal dialect. A plain `FROM survey` is read as XMATCH(survey).
/// CONE(...) refers to the first survey listed.
FederatedQuery parse_federated(std::string_view text, const std::map<std::string, NodeMetadata>& metadata);

struct XMatchPlan {
    std::string anchor_survey;
    std::optional<query::Expr> anchor_filter;  // node dialect
    std::vector<std::string> chain;
    double k = 3.0;
    double max_radius_arcsec = 30.0;
    query::MatchMode mode = query::MatchMode::All;
    std::vector<std::string> projection;
    std::map<std::string, std::size_t> estimates;  // filtered COUNT(*) per survey

    FederatedQuery federated;
    query::Plan tuple_plan;  // post-match filter, projection, order and limit over tuples

    /// SELECT * FROM <anchor> WHERE <anchor_filter>
    std::string anchor_query() const;
};

struct ExecutionStats {
    std::size_t anchor_rows = 0;
    std::map<std::string, std::size_t> probes_sent;
    std::map<std::string, std::size_t> requests_sent;
};

using ClientFactory = std::function<std::unique_ptr<NodeClient>(const NodeEntry&)>;

/// Builds HttpNodeClient instances with the configured timeout.
ClientFactory http_client_factory(std::chrono::milliseconds timeout);

/// The mediator. Holds only immutable configuration; each query fetches the
/// metadata it needs, so a stopped node surfaces as node_unreachable.
class Portal {
public:
    Portal(FederationConfig config, ClientFactory factory);

    const FederationConfig& config() const noexcept { return config_; }

    nlohmann::json surveys() const;
    std::map<std::string, NodeMetadata> fetch_metadata(const std::vector<std::string>& surveys) const;

    XMatchPlan plan(std::string_view text) const;
    /// Plans with an explicit anchor and chain order instead of the estimate rule.
    XMatchPlan plan_with_order(std::string_view text, const std::string& anchor,
                               const std::vector<std::string>& chain) const;
    ResultTable execute(const XMatchPlan& plan, ExecutionStats* stats = nullptr) const;
    ResultTable fedquery(std::string_view text) const;

private:
    const NodeEntry& entry(const std::string& survey) const;
    XMatchPlan plan_impl(std::string_view text, const std::optional<std::pair<std::string, std::vector<std::string>>>&
                                                    order) const;

    FederationConfig config_;
    ClientFactory factory_;
};

}  // namespace skyfed::portal
