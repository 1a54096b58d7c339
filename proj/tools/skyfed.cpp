#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "skyfed/csv.hpp"
#include "skyfed/error.hpp"
#include "skyfed/fixture.hpp"
#include "skyfed/http.hpp"
#include "skyfed/ingest.hpp"
#include "skyfed/mining.hpp"
#include "skyfed/node.hpp"
#include "skyfed/portal/client.hpp"
#include "skyfed/portal/federation.hpp"
#include "skyfed/query/parser.hpp"
#include "skyfed/wire.hpp"
#include "skyfed/xmatch.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace skyfed;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUpstream = 3;

// Raised for failures that already carry their user-facing text.
struct Failure {
    int exit_code;
    std::string message;
};

void configure_logging() {
    auto logger = spdlog::stderr_logger_mt("skyfed");
    logger->set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SKYFED_LOG")) {
        const std::string level = env;
        if (level == "error") spdlog::set_level(spdlog::level::err);
        else if (level == "warn") spdlog::set_level(spdlog::level::warn);
        else if (level == "info") spdlog::set_level(spdlog::level::info);
        else if (level == "debug") spdlog::set_level(spdlog::level::debug);
        else spdlog::warn("ignoring SKYFED_LOG={} (expected error, warn, info or debug)", level);
    }
}

int exit_code_for(const std::string& code) {
    static const std::set<std::string> upstream{"io_error",         "node_unreachable", "node_error", "invalid_response",
                                                "snapshot_error",   "corrupt_store",    "timeout",    "internal_error",
                                                "http_error"};
    return upstream.count(code) ? kExitUpstream : kExitDomain;
}

void print_table(const ResultTable& t, const std::string& format) {
    if (format == "json") {
        std::cout << wire::table_to_json(t).dump() << "\n";
        return;
    }
    std::vector<std::string> fields;
    for (const auto& c : t.columns()) fields.push_back(c.name);
    csv::write_row(std::cout, fields);
    for (const auto& row : t.rows()) {
        fields.clear();
        for (const auto& v : row) fields.push_back(to_display(v));
        csv::write_row(std::cout, fields);
    }
}

// Runs `body` and maps errors to the exit-code contract. Query text, when
// given, is used to draw a caret under the failing offset.
template <typename F>
int run(F&& body, const std::string* query_text = nullptr) {
    try {
        body();
        std::cout.flush();
        return kExitOk;
    } catch (const Failure& f) {
        std::cerr << f.message << "\n";
        return f.exit_code;
    } catch (const Error& e) {
        if (query_text && e.offset())
            std::cerr << query::annotate_error(*query_text, e) << "\n";
        else
            std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUpstream;
    }
}

// Blocks SIGINT/SIGTERM in every thread, then waits for one of them.
class SignalWait {
public:
    SignalWait() {
        sigemptyset(&set_);
        sigaddset(&set_, SIGINT);
        sigaddset(&set_, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    }
    void wait() {
        int sig = 0;
        sigwait(&set_, &sig);
        spdlog::info("received signal {}, shutting down", sig);
    }

private:
    sigset_t set_;
};

XMatchRequest read_probes(const fs::path& path, std::optional<double> k, std::optional<double> max_radius) {
    XMatchRequest req;
    const std::string text = read_file(path);
    if (path.extension() == ".json") {
        try {
            req = wire::request_from_json(json::parse(text));
        } catch (const json::parse_error& e) {
            throw Error("invalid_json", path.string() + ": " + e.what());
        }
    } else {
        std::istringstream in(text);
        csv::Reader reader(in);
        auto header = reader.next();
        const std::vector<std::string> expected{"probe_id", "ra", "dec", "sigma_arcsec"};
        if (!header || header->fields != expected)
            throw Error("invalid_request", path.string() + ": header must be probe_id,ra,dec,sigma_arcsec");
        while (auto rec = reader.next()) {
            if (rec->fields.size() == 1 && rec->fields[0].empty()) continue;
            if (rec->fields.size() != 4)
                throw Error("invalid_request", path.string() + ":" + std::to_string(rec->line) + ": expected 4 fields");
            try {
                req.positions.push_back({std::stoll(rec->fields[0]), std::stod(rec->fields[1]),
                                         std::stod(rec->fields[2]), std::stod(rec->fields[3])});
            } catch (const std::exception&) {
                throw Error("invalid_request", path.string() + ":" + std::to_string(rec->line) + ": bad number");
            }
        }
    }
    if (k) req.k = *k;
    if (max_radius) req.max_radius_arcsec = *max_radius;
    req.validate();
    return req;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Federated sky-catalog toolkit: ingest, serve, query, cross-match and mine catalogs."};
    app.require_subcommand(1);
    std::string format = "csv";
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    };

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Convert a foreign CSV into a domestic store");
    fs::path in_path, schema_path, out_dir;
    double zone_height = ZoneIndex::kDefaultZoneHeightDeg;
    ingest->add_option("--input", in_path, "Foreign catalog CSV")->required();
    ingest->add_option("--schema", schema_path, "Schema descriptor JSON")->required();
    ingest->add_option("--out", out_dir, "Store directory to write")->required();
    ingest->add_option("--zone-height", zone_height, "Zone height of the stored index (deg)");

    // export
    auto* exp = app.add_subcommand("export", "Write a store's domestic catalog and schema to another directory");
    fs::path store_dir;
    exp->add_option("--store", store_dir, "Store directory")->required();
    exp->add_option("--out", out_dir, "Destination directory")->required();

    // node / portal
    auto* node = app.add_subcommand("node", "Serve one catalog over HTTP");
    fs::path config_path;
    std::optional<int> port_override;
    node->add_option("--config", config_path, "Node config JSON")->required();
    node->add_option("--port", port_override, "Override the configured port (0 picks a free port)");
    auto* portal_cmd = app.add_subcommand("portal", "Serve the federation portal over HTTP");
    portal_cmd->add_option("--config", config_path, "Federation config JSON")->required();
    portal_cmd->add_option("--port", port_override, "Override the configured port (0 picks a free port)");

    // query / fedquery / cone / xmatch
    std::string query_text;
    std::optional<std::size_t> row_cap;
    auto* query_cmd = app.add_subcommand("query", "Run a query against a local store");
    query_cmd->add_option("--store", store_dir, "Store directory")->required();
    query_cmd->add_option("query", query_text, "Query text")->required();
    query_cmd->add_option("--row-cap", row_cap, "Maximum result rows");
    add_format(query_cmd);

    std::string portal_url;
    int timeout_ms = 30000;
    auto* fedquery = app.add_subcommand("fedquery", "Run a federated query through a portal");
    fedquery->add_option("--portal", portal_url, "Portal base URL, e.g. http://127.0.0.1:8100")->required();
    fedquery->add_option("query", query_text, "Query text")->required();
    fedquery->add_option("--timeout-ms", timeout_ms, "Request timeout");
    add_format(fedquery);

    double ra = 0, dec = 0, radius = 0;
    auto* cone = app.add_subcommand("cone", "Cone search a local store");
    cone->add_option("--store", store_dir, "Store directory")->required();
    cone->add_option("--ra", ra, "Centre right ascension (deg)")->required();
    cone->add_option("--dec", dec, "Centre declination (deg)")->required();
    cone->add_option("--radius", radius, "Radius (deg)")->required();
    add_format(cone);

    fs::path probes_path;
    std::optional<double> k, max_radius;
    auto* xmatch_cmd = app.add_subcommand("xmatch", "Match probe positions against a local store");
    xmatch_cmd->add_option("--store", store_dir, "Store directory")->required();
    xmatch_cmd->add_option("--probes", probes_path, "Probe CSV (probe_id,ra,dec,sigma_arcsec) or request JSON")
        ->required();
    xmatch_cmd->add_option("--k", k, "Sigma multiplier");
    xmatch_cmd->add_option("--max-radius", max_radius, "Match radius cap (arcsec)");
    add_format(xmatch_cmd);

    // mine
    auto* mine = app.add_subcommand("mine", "Mining operations over local stores");
    mine->require_subcommand(1);
    double cell = 0, link = 0, min_sep = 0, max_sep = 0;
    std::string cut;
    std::size_t max_neighbors = 0;
    fs::path store_b;
    auto* grid = mine->add_subcommand("grid", "Grided count of objects passing a cut");
    grid->add_option("--store", store_dir, "Store directory")->required();
    grid->add_option("--cell", cell, "Cell size (deg)")->required();
    grid->add_option("--cut", cut, "Boolean filter expression");
    add_format(grid);
    auto* fof = mine->add_subcommand("fof", "Friends-of-friends cluster labels");
    fof->add_option("--store", store_dir, "Store directory")->required();
    fof->add_option("--radius", link, "Linking radius (arcsec)")->required();
    add_format(fof);
    auto* isolated = mine->add_subcommand("isolated", "Objects with few neighbours");
    isolated->add_option("--store", store_dir, "Store directory")->required();
    isolated->add_option("--radius", link, "Neighbourhood radius (arcsec)")->required();
    isolated->add_option("--max-neighbors", max_neighbors, "Largest neighbour count still called isolated");
    add_format(isolated);
    auto* movers = mine->add_subcommand("movers", "Detections displaced between two epochs");
    movers->add_option("--store-a", store_dir, "First-epoch store")->required();
    movers->add_option("--store-b", store_b, "Second-epoch store")->required();
    movers->add_option("--min-sep", min_sep, "Smallest displacement (arcsec)")->required();
    movers->add_option("--max-sep", max_sep, "Largest displacement (arcsec)")->required();
    add_format(movers);

    // gen-fixture
    auto* gen = app.add_subcommand("gen-fixture", "Write deterministic synthetic catalogs with planted truth");
    fixture::Options fx;
    gen->add_option("--objects", fx.objects, "Uniform background objects per survey")->required();
    gen->add_option("--seed", fx.seed, "Random seed");
    gen->add_option("--movers", fx.movers, "Planted movers");
    gen->add_option("--clusters", fx.clusters, "Planted clusters");
    gen->add_option("--cluster-size", fx.cluster_size, "Members per cluster");
    gen->add_option("--coincidences", fx.coincidences, "Positions shared by sdss, first and twomass");
    gen->add_option("--density", fx.density_per_deg2, "Fill a cap at this density (per deg^2) instead of the sphere");
    gen->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (ingest->parsed()) {
        return run([&] {
            const auto schema = parse_schema(read_file(schema_path));
            auto result = ingest_csv(in_path, schema);
            std::cerr << result.report.to_json_lines();
            fs::create_directories(out_dir);
            {
                std::ofstream report(out_dir / "report.jsonl", std::ios::binary);
                report << result.report.to_json_lines();
            }
            if (result.report.rows_read > 0 && result.report.rows_accepted == 0)
                throw Failure{kExitDomain, "no rows accepted from " + in_path.string()};
            export_domestic(result.catalog, out_dir);
            const ZoneIndex index(result.catalog.objects, zone_height);
            std::ofstream snap(out_dir / "index.bin", std::ios::binary);
            index.save(snap);
            spdlog::info("ingested {} of {} rows into {}", result.report.rows_accepted, result.report.rows_read,
                         out_dir.string());
        });
    }
    if (exp->parsed()) {
        return run([&] { export_domestic(load_store(store_dir), out_dir); });
    }
    if (node->parsed()) {
        return run([&] {
            auto cfg = NodeConfig::from_json(read_file(config_path), config_path.parent_path());
            if (port_override) cfg.port = *port_override;
            SignalWait signals;
            auto service = NodeService::from_config(cfg);
            auto server = http::make_node_server(service, cfg.request_timeout_ms);
            server->start(cfg.host, cfg.port);
            std::cerr << "node " << service->catalog().schema.survey_name << " listening on http://" << cfg.host << ":"
                      << server->port() << std::endl;
            signals.wait();
            server->stop();
        });
    }
    if (portal_cmd->parsed()) {
        return run([&] {
            auto cfg = portal::FederationConfig::from_json(read_file(config_path), config_path.parent_path());
            if (port_override) cfg.port = *port_override;
            SignalWait signals;
            auto p = std::make_shared<portal::Portal>(
                cfg, portal::http_client_factory(std::chrono::milliseconds(cfg.request_timeout_ms)));
            auto server = http::make_portal_server(p);
            server->start(cfg.host, cfg.port);
            std::cerr << "portal listening on http://" << cfg.host << ":" << server->port() << std::endl;
            signals.wait();
            server->stop();
        });
    }
    if (query_cmd->parsed()) {
        return run(
            [&] {
                const Catalog catalog = load_store(store_dir);
                const NodeService service(catalog, ZoneIndex::kDefaultZoneHeightDeg,
                                          row_cap.value_or(query::kDefaultRowCap));
                print_table(service.query(query_text), format);
            },
            &query_text);
    }
    if (fedquery->parsed()) {
        return run(
            [&] {
                const json body{{"q", query_text}};
                auto [status, reply] = portal::http_json(portal_url, "POST", "/v1/fedquery", body.dump(),
                                                         std::chrono::milliseconds(timeout_ms));
                if (status == 200) {
                    print_table(wire::table_from_json(reply), format);
                    return;
                }
                const auto& err = reply.at("error");
                std::optional<std::size_t> offset;
                if (err.contains("offset")) offset = err["offset"].get<std::size_t>();
                const Error e(err.at("code").get<std::string>(), err.at("message").get<std::string>(), offset);
                if (status >= 500) throw Failure{kExitUpstream, "error [" + e.code() + "]: " + e.what()};
                throw e;
            },
            &query_text);
    }
    if (cone->parsed()) {
        return run([&] {
            const NodeService service(load_store(store_dir));
            print_table(service.cone(ra, dec, radius), format);
        });
    }
    if (xmatch_cmd->parsed()) {
        return run([&] {
            const auto req = read_probes(probes_path, k, max_radius);
            const NodeService service(load_store(store_dir));
            const auto resp = service.xmatch(req);
            if (format == "json") {
                std::cout << wire::response_to_json(resp).dump() << "\n";
                return;
            }
            std::vector<std::string> fields{"probe_id", "separation_arcsec"};
            for (const auto& c : resp.columns) fields.push_back(c.name);
            csv::write_row(std::cout, fields);
            for (const auto& pm : resp.matches) {
                for (const auto& m : pm.objects) {
                    fields = {std::to_string(pm.probe_id), format_double(m.separation_arcsec)};
                    for (const auto& v : m.row) fields.push_back(to_display(v));
                    csv::write_row(std::cout, fields);
                }
            }
        });
    }
    if (grid->parsed()) {
        return run(
            [&] {
                const auto counts = grided_count(load_store(store_dir), GridSpec(cell), cut);
                if (format == "json") {
                    json cells = json::array();
                    for (const auto& [key, n] : counts)
                        cells.push_back({{"ra_cell", key.first}, {"dec_cell", key.second}, {"count", n}});
                    std::cout << json{{"cell_deg", cell}, {"cells", cells}}.dump() << "\n";
                    return;
                }
                csv::write_row(std::cout, {"ra_cell", "dec_cell", "count"});
                for (const auto& [key, n] : counts)
                    csv::write_row(std::cout, {std::to_string(key.first), std::to_string(key.second), std::to_string(n)});
            },
            &cut);
    }
    if (fof->parsed() || isolated->parsed()) {
        return run([&] {
            const Catalog catalog = load_store(store_dir);
            const ZoneIndex index(catalog.objects);
            if (fof->parsed()) {
                const auto labels = friends_of_friends(catalog, index, link);
                if (format == "json") {
                    json rows = json::array();
                    for (const auto& [id, c] : labels.cluster_of) rows.push_back({{"object_id", id}, {"cluster_id", c}});
                    std::cout << json{{"cluster_count", labels.cluster_count}, {"labels", rows}}.dump() << "\n";
                    return;
                }
                csv::write_row(std::cout, {"object_id", "cluster_id"});
                for (const auto& [id, c] : labels.cluster_of)
                    csv::write_row(std::cout, {std::to_string(id), std::to_string(c)});
                return;
            }
            const auto ids = isolated_points(catalog, index, link, max_neighbors);
            if (format == "json") {
                std::cout << json{{"object_ids", ids}}.dump() << "\n";
                return;
            }
            csv::write_row(std::cout, {"object_id"});
            for (auto id : ids) csv::write_row(std::cout, {std::to_string(id)});
        });
    }
    if (movers->parsed()) {
        return run([&] {
            const auto found = moving_candidates(load_store(store_dir), load_store(store_b), min_sep, max_sep);
            auto motion = [](const MovingCandidate& c) {
                return c.motion_arcsec_per_day ? format_double(*c.motion_arcsec_per_day) : std::string();
            };
            if (format == "json") {
                json rows = json::array();
                for (const auto& c : found)
                    rows.push_back({{"id_a", c.id_a},
                                    {"id_b", c.id_b},
                                    {"separation_arcsec", c.separation_arcsec},
                                    {"motion_arcsec_per_day",
                                     c.motion_arcsec_per_day ? json(*c.motion_arcsec_per_day) : json(nullptr)}});
                std::cout << json{{"candidates", rows}}.dump() << "\n";
                return;
            }
            csv::write_row(std::cout, {"id_a", "id_b", "separation_arcsec", "motion_arcsec_per_day"});
            for (const auto& c : found)
                csv::write_row(std::cout, {std::to_string(c.id_a), std::to_string(c.id_b),
                                           format_double(c.separation_arcsec), motion(c)});
        });
    }
    if (gen->parsed()) {
        return run([&] {
            const auto manifest = fixture::generate(fx, out_dir);
            spdlog::info("wrote fixture to {}", out_dir.string());
            std::cerr << "fixture written to " << out_dir.string() << ": " << manifest["counts"].dump() << "\n";
        });
    }
    return kExitUsage;
}
