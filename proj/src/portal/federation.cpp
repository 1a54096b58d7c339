#include "skyfed/portal/federation.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <set>

#include "skyfed/error.hpp"
#include "skyfed/query/executor.hpp"
#include "skyfed/query/parser.hpp"

namespace skyfed::portal {

using nlohmann::json;
using query::Expr;
using query::ExprKind;

namespace {

[[noreturn]] void plan_error(const std::string& message, std::size_t offset = 0) {
    throw Error("plan_error", message, offset);
}

std::vector<std::string> surveys_of(const query::Query& q) {
    if (q.from.kind == query::Source::Kind::Table) return {q.from.table};
    return q.from.surveys;
}

void referenced_slots(const Expr& e, const query::RowLayout& layout, std::set<std::size_t>& slots, bool& cone) {
    if (e.kind == ExprKind::Column) slots.insert(layout.resolve(e.name, e.qualifier, e.offset));
    if (e.kind == ExprKind::Call && e.name == "CONE") cone = true;
    for (const auto& a : e.args) referenced_slots(a, layout, slots, cone);
}

std::size_t column_of(const std::vector<ColumnSpec>& cols, const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i].name == name) return i;
    throw Error("invalid_response", "node result lacks column " + name);
}

}  // namespace

void FederationConfig::validate() const {
    std::vector<std::string> problems;
    if (nodes.empty()) problems.push_back("federation needs at least one node");
    std::set<std::string> names;
    for (const auto& n : nodes) {
        if (!names.insert(n.survey).second) problems.push_back("duplicate survey " + n.survey);
        if (n.url.empty()) problems.push_back("node " + n.survey + " has no url");
    }
    if (concurrency == 0) problems.push_back("concurrency must be positive");
    if (batch_size == 0) problems.push_back("batch_size must be positive");
    if (!(k > 0.0)) problems.push_back("k must be positive");
    if (!(max_radius_arcsec > 0.0)) problems.push_back("max_radius_arcsec must be positive");
    if (request_timeout_ms <= 0) problems.push_back("request_timeout_ms must be positive");
    if (!problems.empty()) throw ValidationError(problems);
}

FederationConfig FederationConfig::from_json(std::string_view text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("invalid_json", std::string("federation config is not valid JSON: ") + e.what());
    }
    FederationConfig c;
    try {
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        c.concurrency = j.value("concurrency", c.concurrency);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.k = j.value("k", c.k);
        c.max_radius_arcsec = j.value("max_radius_arcsec", c.max_radius_arcsec);
        c.request_timeout_ms = j.value("request_timeout_ms", c.request_timeout_ms);
        c.row_cap = j.value("row_cap", c.row_cap);
        if (j.contains("console_dir") && j["console_dir"].is_string()) {
            std::filesystem::path p = j["console_dir"].get<std::string>();
            c.console_dir = p.is_relative() ? base_dir / p : p;
        }
        for (const auto& n : j.at("nodes")) c.nodes.push_back({n.at("survey").get<std::string>(), n.at("url").get<std::string>()});
    } catch (const json::exception& e) {
        throw ValidationError({std::string("bad federation config: ") + e.what()});
    }
    c.validate();
    return c;
}

NodeMetadata NodeMetadata::from_json(const json& j) {
    try {
        NodeMetadata m;
        m.survey = j.at("survey").get<std::string>();
        m.bands = j.at("bands").get<std::vector<std::string>>();
        m.columns = wire::columns_from_json(j.at("columns"));
        m.object_count = j.at("object_count").get<std::size_t>();
        if (j.contains("epoch_mjd") && j["epoch_mjd"].is_number()) m.epoch_mjd = j["epoch_mjd"].get<double>();
        return m;
    } catch (const json::exception& e) {
        throw Error("invalid_response", std::string("malformed node metadata: ") + e.what());
    }
}

FederatedQuery parse_federated(std::string_view text, const std::map<std::string, NodeMetadata>& metadata) {
    FederatedQuery fq;
    fq.ast = query::parse_query(text);
    fq.surveys = surveys_of(fq.ast);
    std::set<std::string> seen;
    for (const auto& s : fq.surveys) {
        if (!metadata.count(s)) throw Error("unknown_survey", "unknown survey: " + s, fq.ast.from.offset);
        if (!seen.insert(s).second) plan_error("survey " + s + " listed twice in XMATCH", fq.ast.from.offset);
    }

    auto& layout = fq.layout;
    layout.qualify_output_names = true;
    for (const auto& s : fq.surveys) {
        fq.survey_offsets.push_back(layout.columns.size());
        for (const auto& c : metadata.at(s).columns) layout.columns.push_back({c.name, s, c.kind});
        layout.columns.push_back({"separation_arcsec", s, ValueKind::Float});
    }
    const auto& first = fq.surveys.front();
    layout.ra_slot = layout.resolve("ra", first, 0);
    layout.dec_slot = layout.resolve("dec", first, 0);
    for (const auto& s : fq.surveys) layout.tiebreak_slots.push_back(layout.resolve("object_id", s, 0));

    auto survey_of_slot = [&](std::size_t slot) { return layout.columns[slot].qualifier; };
    if (fq.ast.where) {
        for (auto& c : query::conjuncts(*fq.ast.where)) {
            std::set<std::size_t> slots;
            bool cone = false;
            referenced_slots(c, layout, slots, cone);
            std::set<std::string> touched;
            bool separation = false;
            for (auto s : slots) {
                touched.insert(survey_of_slot(s));
                separation = separation || layout.columns[s].name == "separation_arcsec";
            }
            if (cone) touched.insert(first);
            if (touched.size() == 1 && !separation && !query::contains_aggregate(c))
                fq.pushdown[*touched.begin()].push_back(std::move(c));
            else
                fq.residual.push_back(std::move(c));
        }
    }
    return fq;
}

std::string XMatchPlan::anchor_query() const {
    std::string q = "SELECT * FROM " + anchor_survey;
    if (anchor_filter) q += " WHERE " + query::to_text(*anchor_filter);
    return q;
}

ClientFactory http_client_factory(std::chrono::milliseconds timeout) {
    return [timeout](const NodeEntry& e) -> std::unique_ptr<NodeClient> {
        return std::make_unique<HttpNodeClient>(e.survey, e.url, timeout);
    };
}

Portal::Portal(FederationConfig config, ClientFactory factory)
    : config_(std::move(config)), factory_(std::move(factory)) {
    config_.validate();
}

const NodeEntry& Portal::entry(const std::string& survey) const {
    for (const auto& n : config_.nodes)
        if (n.survey == survey) return n;
    throw Error("unknown_survey", "unknown survey: " + survey);
}

json Portal::surveys() const {
    json list = json::array();
    for (const auto& n : config_.nodes) {
        json item{{"survey", n.survey}, {"url", n.url}};
        try {
            json meta = factory_(n)->metadata();
            item["status"] = "ok";
            item["metadata"] = std::move(meta);
        } catch (const Error& e) {
            item["status"] = "unreachable";
            item["error"] = e.what();
        }
        list.push_back(std::move(item));
    }
    return {{"surveys", std::move(list)},
            {"defaults", {{"k", config_.k}, {"max_radius_arcsec", config_.max_radius_arcsec}, {"mode", "all"}}}};
}

std::map<std::string, NodeMetadata> Portal::fetch_metadata(const std::vector<std::string>& surveys) const {
    std::vector<std::future<NodeMetadata>> pending;
    for (const auto& s : surveys) {
        const NodeEntry& e = entry(s);
        pending.push_back(std::async(std::launch::async, [this, &e] {
            auto meta = NodeMetadata::from_json(factory_(e)->metadata());
            if (meta.survey != e.survey)
                throw Error("node_error", "node at " + e.url + " serves survey " + meta.survey + ", expected " + e.survey);
            return meta;
        }));
    }
    std::map<std::string, NodeMetadata> out;
    for (std::size_t i = 0; i < surveys.size(); ++i) out.emplace(surveys[i], pending[i].get());
    return out;
}

XMatchPlan Portal::plan(std::string_view text) const { return plan_impl(text, std::nullopt); }

XMatchPlan Portal::plan_with_order(std::string_view text, const std::string& anchor,
                                   const std::vector<std::string>& chain) const {
    return plan_impl(text, std::make_pair(anchor, chain));
}

XMatchPlan Portal::plan_impl(std::string_view text,
                             const std::optional<std::pair<std::string, std::vector<std::string>>>& order) const {
    const auto parsed = query::parse_query(text);
    const auto surveys = surveys_of(parsed);
    for (const auto& s : surveys) {
        const bool known = std::any_of(config_.nodes.begin(), config_.nodes.end(),
                                       [&](const NodeEntry& n) { return n.survey == s; });
        if (!known) throw Error("unknown_survey", "unknown survey: " + s, parsed.from.offset);
    }
    const auto metadata = fetch_metadata(surveys);

    XMatchPlan plan;
    plan.federated = parse_federated(text, metadata);
    const auto& fq = plan.federated;
    const auto& src = fq.ast.from;
    plan.k = src.k.value_or(config_.k);
    plan.max_radius_arcsec = src.max_radius_arcsec.value_or(config_.max_radius_arcsec);
    plan.mode = src.mode.value_or(query::MatchMode::All);
    if (!(plan.k > 0.0)) plan_error("k must be positive", src.offset);
    if (!(plan.max_radius_arcsec > 0.0)) plan_error("max_radius must be positive", src.offset);

    auto node_filter = [&](const std::string& s) -> std::optional<Expr> {
        auto it = fq.pushdown.find(s);
        if (it == fq.pushdown.end()) return std::nullopt;
        std::vector<Expr> parts;
        for (const auto& c : it->second) parts.push_back(query::strip_qualifiers(c));
        return query::conjoin(std::move(parts));
    };

    if (order) {
        plan.anchor_survey = order->first;
        plan.chain = order->second;
        std::vector<std::string> all{plan.anchor_survey};
        all.insert(all.end(), plan.chain.begin(), plan.chain.end());
        auto sorted_all = all, sorted_surveys = fq.surveys;
        std::sort(sorted_all.begin(), sorted_all.end());
        std::sort(sorted_surveys.begin(), sorted_surveys.end());
        if (sorted_all != sorted_surveys) plan_error("explicit order must list every survey exactly once");
    } else if (fq.surveys.size() == 1) {
        plan.anchor_survey = fq.surveys.front();
    } else {
        std::vector<std::future<std::size_t>> counts;
        for (const auto& s : fq.surveys) {
            std::string q = "SELECT COUNT(*) FROM " + s;
            if (auto f = node_filter(s)) q += " WHERE " + query::to_text(*f);
            counts.push_back(std::async(std::launch::async, [this, s, q] {
                const ResultTable t = factory_(entry(s))->query(q);
                return static_cast<std::size_t>(std::get<std::int64_t>(t.rows().at(0).at(0)));
            }));
        }
        for (std::size_t i = 0; i < fq.surveys.size(); ++i) plan.estimates[fq.surveys[i]] = counts[i].get();
        // Smallest filtered cardinality anchors; ties keep XMATCH order.
        plan.anchor_survey = fq.surveys.front();
        for (const auto& s : fq.surveys)
            if (plan.estimates[s] < plan.estimates[plan.anchor_survey]) plan.anchor_survey = s;
        for (const auto& s : fq.surveys)
            if (s != plan.anchor_survey) plan.chain.push_back(s);
        std::stable_sort(plan.chain.begin(), plan.chain.end(), [&](const std::string& a, const std::string& b) {
            return metadata.at(a).object_count < metadata.at(b).object_count;
        });
    }
    plan.anchor_filter = node_filter(plan.anchor_survey);

    std::vector<Expr> post = fq.residual;
    for (const auto& s : plan.chain)
        if (auto it = fq.pushdown.find(s); it != fq.pushdown.end()) post.insert(post.end(), it->second.begin(), it->second.end());
    query::Query tuple_query = fq.ast;
    tuple_query.where = query::conjoin(std::move(post));
    plan.tuple_plan = query::plan_over_layout(tuple_query, fq.layout);
    for (const auto& c : plan.tuple_plan.columns) plan.projection.push_back(c.name);
    return plan;
}

ResultTable Portal::execute(const XMatchPlan& plan, ExecutionStats* stats) const {
    const auto start = std::chrono::steady_clock::now();
    const auto& fq = plan.federated;
    auto survey_index = [&](const std::string& s) {
        return static_cast<std::size_t>(std::find(fq.surveys.begin(), fq.surveys.end(), s) - fq.surveys.begin());
    };
    auto survey_columns = [&](std::size_t si) {
        const std::size_t begin = fq.survey_offsets[si];
        const std::size_t end = si + 1 < fq.survey_offsets.size() ? fq.survey_offsets[si + 1] : fq.layout.columns.size();
        return end - begin - 1;  // minus separation_arcsec
    };

    const ResultTable anchor = factory_(entry(plan.anchor_survey))->query(plan.anchor_query());
    const std::size_t anchor_si = survey_index(plan.anchor_survey);
    if (anchor.columns().size() != survey_columns(anchor_si))
        throw Error("invalid_response", "node " + plan.anchor_survey + " returned an unexpected column set");
    const std::size_t ra_col = column_of(anchor.columns(), "ra");
    const std::size_t dec_col = column_of(anchor.columns(), "dec");
    const std::size_t sigma_col = column_of(anchor.columns(), "sigma_pos");
    const auto& anchor_rows = anchor.rows();
    if (stats) stats->anchor_rows = anchor_rows.size();

    std::vector<std::size_t> alive(anchor_rows.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    std::map<std::string, std::vector<std::vector<wire::MatchedRow>>> matches;

    for (const auto& s : plan.chain) {
        auto& per_anchor = matches[s];
        per_anchor.assign(anchor_rows.size(), {});
        std::vector<XMatchRequest> batches;
        for (std::size_t b = 0; b < alive.size(); b += config_.batch_size) {
            XMatchRequest req;
            req.k = plan.k;
            req.max_radius_arcsec = plan.max_radius_arcsec;
            for (std::size_t i = b; i < std::min(alive.size(), b + config_.batch_size); ++i) {
                const auto& row = anchor_rows[alive[i]];
                req.positions.push_back({static_cast<std::int64_t>(alive[i]), as_double(row[ra_col]),
                                         as_double(row[dec_col]), as_double(row[sigma_col])});
            }
            batches.push_back(std::move(req));
        }
        if (stats) {
            stats->probes_sent[s] = alive.size();
            stats->requests_sent[s] = batches.size();
        }
        const std::size_t expected_cols = survey_columns(survey_index(s));
        std::atomic<std::size_t> next{0};
        auto worker = [&, s] {
            auto client = factory_(entry(s));
            for (std::size_t b; (b = next.fetch_add(1)) < batches.size();) {
                auto resp = client->xmatch(batches[b]);
                if (resp.columns.size() != expected_cols || resp.matches.size() != batches[b].positions.size())
                    throw Error("invalid_response", "node " + s + " returned a malformed xmatch response");
                for (auto& pm : resp.matches) {
                    const auto idx = static_cast<std::size_t>(pm.probe_id);
                    if (idx >= per_anchor.size()) throw Error("invalid_response", "node " + s + " returned an unknown probe id");
                    per_anchor[idx] = std::move(pm.objects);
                }
            }
        };
        std::vector<std::future<void>> workers;
        const std::size_t n_workers = std::min(config_.concurrency, batches.size());
        for (std::size_t w = 0; w < n_workers; ++w) workers.push_back(std::async(std::launch::async, worker));
        std::exception_ptr failure;
        for (auto& f : workers) {
            try {
                f.get();
            } catch (...) {
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        std::erase_if(alive, [&](std::size_t i) { return per_anchor[i].empty(); });
    }

    // Inner match: every surviving anchor has at least one partner per chain survey.
    std::vector<std::vector<Value>> tuples;
    const std::size_t width = fq.layout.columns.size();
    for (std::size_t a : alive) {
        std::vector<const std::vector<wire::MatchedRow>*> lists;
        std::vector<std::size_t> sizes;
        for (const auto& s : plan.chain) {
            const auto& l = matches.at(s)[a];
            lists.push_back(&l);
            sizes.push_back(plan.mode == query::MatchMode::Best ? 1 : l.size());
        }
        std::vector<std::size_t> pick(plan.chain.size(), 0);
        for (;;) {
            std::vector<Value> row(width);
            const std::size_t a_off = fq.survey_offsets[anchor_si];
            const auto& arow = anchor_rows[a];
            std::copy(arow.begin(), arow.end(), row.begin() + static_cast<std::ptrdiff_t>(a_off));
            row[a_off + arow.size()] = 0.0;
            for (std::size_t c = 0; c < plan.chain.size(); ++c) {
                const auto& m = (*lists[c])[pick[c]];
                const std::size_t off = fq.survey_offsets[survey_index(plan.chain[c])];
                std::copy(m.row.begin(), m.row.end(), row.begin() + static_cast<std::ptrdiff_t>(off));
                row[off + m.row.size()] = m.separation_arcsec;
            }
            tuples.push_back(std::move(row));
            std::size_t c = 0;
            while (c < pick.size() && ++pick[c] == sizes[c]) pick[c++] = 0;
            if (c == pick.size()) break;
        }
    }

    ResultTable result = query::execute_rows(plan.tuple_plan, tuples, {config_.row_cap, std::nullopt});
    result.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ResultTable Portal::fedquery(std::string_view text) const { return execute(plan(text)); }

}  // namespace skyfed::portal
