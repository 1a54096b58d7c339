#include "skyfed/query/executor.hpp"

#include <algorithm>
#include <map>

#include "skyfed/error.hpp"

namespace skyfed::query {

namespace {

struct KeyLess {
    bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const noexcept {
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
            if (int c = compare_values(a[i], b[i])) return c < 0;
        return a.size() < b.size();
    }
};

struct Accumulator {
    std::size_t count = 0;
    std::int64_t int_sum = 0;
    double float_sum = 0.0;
    Value min, max;
};

class Runner {
public:
    Runner(const Plan& plan, const ExecOptions& options) : plan_(plan), options_(options) {}

    void consume(std::span<const Value> row) {
        if ((++seen_ & 1023U) == 0 && options_.deadline && std::chrono::steady_clock::now() > *options_.deadline)
            throw Error("timeout", "query exceeded the request timeout");
        if (plan_.filter) {
            Value keep = evaluate(*plan_.filter, row, stats_);
            if (keep != Value(true)) return;
        }
        if (plan_.aggregate) {
            std::vector<Value> key;
            key.reserve(plan_.group_keys.size());
            for (const auto& k : plan_.group_keys) key.push_back(evaluate(k, row, stats_));
            auto [it, inserted] = groups_.try_emplace(std::move(key));
            if (inserted) it->second.resize(plan_.aggregates.size());
            for (std::size_t i = 0; i < plan_.aggregates.size(); ++i) accumulate(plan_.aggregates[i], it->second[i], row);
            return;
        }
        Pending p;
        p.sort_key.reserve(plan_.order.size());
        for (const auto& k : plan_.order) p.sort_key.push_back(evaluate(k.expr, row, stats_));
        p.values.reserve(plan_.outputs.size());
        for (const auto& o : plan_.outputs) p.values.push_back(evaluate(o, row, stats_));
        pending_.push_back(std::move(p));
    }

    ResultTable finish() {
        if (plan_.aggregate) {
            if (groups_.empty() && plan_.group_keys.empty())
                groups_.try_emplace(std::vector<Value>{}).first->second.resize(plan_.aggregates.size());
            for (const auto& [key, accs] : groups_) {
                std::vector<Value> post = key;
                for (std::size_t i = 0; i < accs.size(); ++i) post.push_back(result(plan_.aggregates[i], accs[i]));
                Pending p;
                for (const auto& k : plan_.order) p.sort_key.push_back(evaluate(k.expr, post, stats_));
                for (const auto& o : plan_.outputs) p.values.push_back(evaluate(o, post, stats_));
                pending_.push_back(std::move(p));
            }
        }
        std::stable_sort(pending_.begin(), pending_.end(), [this](const Pending& a, const Pending& b) {
            for (std::size_t i = 0; i < plan_.order.size(); ++i) {
                int c = compare_values(a.sort_key[i], b.sort_key[i]);
                if (c != 0) return plan_.order[i].descending ? c > 0 : c < 0;
            }
            return false;
        });
        std::size_t n = pending_.size();
        if (plan_.limit) n = std::min<std::size_t>(n, static_cast<std::size_t>(*plan_.limit));
        if (n > options_.row_cap)
            throw Error("row_cap_exceeded", "result has " + std::to_string(n) + " rows, over the cap of " +
                                                std::to_string(options_.row_cap));
        ResultTable table(plan_.columns);
        for (std::size_t i = 0; i < n; ++i) table.add_row(std::move(pending_[i].values));
        table.stats.row_count = n;
        table.stats.division_by_zero = stats_.division_by_zero;
        return table;
    }

private:
    struct Pending {
        std::vector<Value> sort_key;
        std::vector<Value> values;
    };

    void accumulate(const AggregateSpec& spec, Accumulator& acc, std::span<const Value> row) {
        if (spec.star) {
            ++acc.count;
            return;
        }
        Value v = evaluate(*spec.arg, row, stats_);
        if (is_null(v)) return;
        ++acc.count;
        if (auto i = std::get_if<std::int64_t>(&v)) {
            acc.int_sum = static_cast<std::int64_t>(static_cast<std::uint64_t>(acc.int_sum) +
                                                    static_cast<std::uint64_t>(*i));
            acc.float_sum += static_cast<double>(*i);
        } else if (auto d = std::get_if<double>(&v)) {
            acc.float_sum += *d;
        }
        if (is_null(acc.min) || compare_values(v, acc.min) < 0) acc.min = v;
        if (is_null(acc.max) || compare_values(v, acc.max) > 0) acc.max = v;
    }

    static Value result(const AggregateSpec& spec, const Accumulator& acc) {
        if (spec.function == "COUNT") return static_cast<std::int64_t>(acc.count);
        if (acc.count == 0) return std::monostate{};
        if (spec.function == "SUM") {
            if (spec.type == ValueKind::Int) return acc.int_sum;
            return acc.float_sum;
        }
        if (spec.function == "AVG") return acc.float_sum / static_cast<double>(acc.count);
        if (spec.function == "MIN") return acc.min;
        return acc.max;
    }

    const Plan& plan_;
    const ExecOptions& options_;
    EvalStats stats_;
    std::size_t seen_ = 0;
    std::map<std::vector<Value>, std::vector<Accumulator>, KeyLess> groups_;
    std::vector<Pending> pending_;
};

}  // namespace

void materialize_row(const SkyObject& o, const CatalogSchema& schema, std::vector<Value>& out) {
    out.resize(6 + schema.bands.size());
    out[0] = static_cast<std::int64_t>(o.object_id);
    out[1] = o.pos.ra_deg();
    out[2] = o.pos.dec_deg();
    out[3] = o.sigma_pos_arcsec;
    out[4] = std::string(to_string(o.object_class));
    out[5] = o.extent_arcsec ? Value(*o.extent_arcsec) : Value(std::monostate{});
    for (std::size_t b = 0; b < schema.bands.size(); ++b) {
        auto it = o.mags.find(schema.bands[b]);
        out[6 + b] = it == o.mags.end() ? Value(std::monostate{}) : Value(it->second);
    }
}

ResultTable execute(const Plan& plan, const Catalog& catalog, const ZoneIndex& index, const ExecOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Runner runner(plan, options);
    std::vector<Value> row;
    if (plan.cone) {
        const ConeQuery q(EquatorialPosition(plan.cone->ra_deg, plan.cone->dec_deg), plan.cone->radius_deg);
        for (std::size_t ref : index.cone_search(q)) {
            materialize_row(catalog.objects.at(ref), catalog.schema, row);
            runner.consume(row);
        }
    } else {
        for (const auto& o : catalog.objects) {
            materialize_row(o, catalog.schema, row);
            runner.consume(row);
        }
    }
    ResultTable table = runner.finish();
    table.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return table;
}

ResultTable execute_rows(const Plan& plan, std::span<const std::vector<Value>> rows, const ExecOptions& options) {
    if (plan.cone) throw Error("internal_error", "cone scans need a zone index");
    const auto start = std::chrono::steady_clock::now();
    Runner runner(plan, options);
    for (const auto& r : rows) runner.consume(r);
    ResultTable table = runner.finish();
    table.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return table;
}

}  // namespace skyfed::query
