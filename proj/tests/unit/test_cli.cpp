#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "harness.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int exit = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Outcome run(const harness::TempDir& scratch, const std::vector<std::string>& args) {
    std::string cmd = quote(SKYFED_CLI_PATH);
    for (const auto& a : args) cmd += " " + quote(a);
    const fs::path out = scratch.path() / "stdout.txt";
    const fs::path err = scratch.path() / "stderr.txt";
    cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
}

}  // namespace

TEST_CASE("command line round trip over a generated fixture") {
    harness::TempDir d("cli");
    const auto p = d.path();
    const std::string fx = (p / "fx").string();
    REQUIRE(run(d, {"gen-fixture", "--objects", "400", "--seed", "3", "--movers", "4", "--out", fx}).exit == 0);
    REQUIRE(fs::exists(p / "fx" / "manifest.json"));

    for (const char* s : {"sdss", "epoch2"}) {
        const auto r = run(d, {"ingest", "--input", fx + "/" + s + "/catalog.csv", "--schema",
                               fx + "/" + s + "/schema.json", "--out", (p / "store" / s).string()});
        CAPTURE(r.err);
        CHECK(r.exit == 0);
        CHECK(fs::exists(p / "store" / s / "catalog.csv"));
        CHECK(fs::exists(p / "store" / s / "index.bin"));
        CHECK(fs::exists(p / "store" / s / "report.jsonl"));
    }
    const std::string store = (p / "store" / "sdss").string();

    const auto q1 = run(d, {"query", "--store", store, "SELECT class, COUNT(*) AS n FROM sdss GROUP BY class"});
    CHECK(q1.exit == 0);
    CHECK(q1.out.rfind("class,n\n", 0) == 0);
    const auto q2 = run(d, {"query", "--store", store, "SELECT class, COUNT(*) AS n FROM sdss GROUP BY class"});
    CHECK(q2.out == q1.out);
    const auto js = run(d, {"query", "--store", store, "--format", "json", "SELECT COUNT(*) AS n FROM sdss"});
    CHECK(js.exit == 0);
    CHECK(nlohmann::json::parse(js.out)["rows"][0][0] == 404);

    CHECK(run(d, {"cone", "--store", store, "--ra", "180", "--dec", "0", "--radius", "20"}).exit == 0);
    CHECK(run(d, {"mine", "grid", "--store", store, "--cell", "30"}).exit == 0);
    CHECK(run(d, {"mine", "fof", "--store", store, "--radius", "30"}).exit == 0);
    CHECK(run(d, {"mine", "isolated", "--store", store, "--radius", "200"}).exit == 0);
    CHECK(run(d, {"mine", "isolated", "--store", store, "--radius", "600"}).exit == 1);
    const auto mv = run(d, {"mine", "movers", "--store-a", store, "--store-b", (p / "store" / "epoch2").string(),
                            "--min-sep", "2", "--max-sep", "60"});
    CHECK(mv.exit == 0);
    CHECK(std::count(mv.out.begin(), mv.out.end(), '\n') == 5);

    const auto ex = run(d, {"export", "--store", store, "--out", (p / "exported").string()});
    CHECK(ex.exit == 0);
    CHECK(slurp(p / "exported" / "catalog.csv") == slurp(p / "store" / "sdss" / "catalog.csv"));

    {
        std::ofstream(p / "probes.csv") << "probe_id,ra,dec,sigma_arcsec\n1,10,10,1\n2,200,-40,1\n";
    }
    const auto xm = run(d, {"xmatch", "--store", store, "--probes", (p / "probes.csv").string()});
    CHECK(xm.exit == 0);
}

TEST_CASE("exit codes separate usage, domain and upstream failures") {
    harness::TempDir d("cli-errors");
    const auto p = d.path();
    const std::string fx = (p / "fx").string();
    REQUIRE(run(d, {"gen-fixture", "--objects", "50", "--out", fx}).exit == 0);
    REQUIRE(run(d, {"ingest", "--input", fx + "/sdss/catalog.csv", "--schema", fx + "/sdss/schema.json", "--out",
                    (p / "s").string()})
                .exit == 0);
    const std::string store = (p / "s").string();

    CHECK(run(d, {}).exit == 2);
    CHECK(run(d, {"frobnicate"}).exit == 2);
    CHECK(run(d, {"query", "--store", store}).exit == 2);
    CHECK(run(d, {"query", "--store", store, "--format", "xml", "SELECT 1 FROM sdss"}).exit == 2);

    const auto bad = run(d, {"query", "--store", store, "SELECT ra FROM sdss WHERE ra >> 3"});
    CHECK(bad.exit == 1);
    CHECK(bad.err.find("parse_error") != std::string::npos);
    const auto caret_line = bad.err.substr(bad.err.find('\n', bad.err.find('\n') + 1) + 1);
    CHECK(caret_line.find('^') == 2 + std::string("SELECT ra FROM sdss WHERE ra >").size());

    CHECK(run(d, {"query", "--store", store, "SELECT mag_q FROM sdss"}).exit == 1);
    CHECK(run(d, {"cone", "--store", store, "--ra", "0", "--dec", "100", "--radius", "1"}).exit == 1);
    CHECK(run(d, {"mine", "grid", "--store", store, "--cell", "0"}).exit == 1);

    CHECK(run(d, {"query", "--store", (p / "missing").string(), "SELECT ra FROM sdss"}).exit == 3);
    CHECK(run(d, {"fedquery", "--portal", "http://127.0.0.1:1", "--timeout-ms", "500",
                  "SELECT sdss.ra FROM XMATCH(sdss)"})
              .exit == 3);

    {
        std::ofstream(p / "bad.csv") << "ra,dec\n1,100\n2,100\n";
        std::ofstream(p / "bad.json") << R"({"survey": "b", "sigma_default_arcsec": 0.1, "columns": [
            {"source": "ra", "target": "ra"}, {"source": "dec", "target": "dec"}]})";
    }
    const auto rejected = run(d, {"ingest", "--input", (p / "bad.csv").string(), "--schema",
                                  (p / "bad.json").string(), "--out", (p / "b").string()});
    CHECK(rejected.exit == 1);
    const std::string report = slurp(p / "b" / "report.jsonl");
    CHECK(std::count(report.begin(), report.end(), '\n') == 3);
    CHECK(report.find("\"line\":2") != std::string::npos);
    CHECK(report.find("\"line\":3") != std::string::npos);
    CHECK(rejected.err.find("dec_out_of_range") != std::string::npos);

    const auto no_schema = run(d, {"ingest", "--input", (p / "bad.csv").string(), "--out", (p / "c").string()});
    CHECK(no_schema.exit == 2);
    CHECK(no_schema.err.find("--schema") != std::string::npos);
}

TEST_CASE("federated queries through a live portal") {
    skyfed::fixture::Options o;
    o.objects = 200;
    o.coincidences = 5;
    const auto f = harness::make_fixture(o);
    harness::Cluster c({&f["sdss"], &f["first"]});
    harness::TempDir d("cli-fed");
    const std::string q = "SELECT sdss.object_id, first.object_id FROM XMATCH(sdss, first) WITH k = 3";
    const auto a = run(d, {"fedquery", "--portal", c.portal_url(), q});
    CHECK(a.exit == 0);
    CHECK(a.out.rfind("sdss.object_id,first.object_id\n", 0) == 0);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') >= 6);
    CHECK(run(d, {"fedquery", "--portal", c.portal_url(), q}).out == a.out);
    const auto unknown = run(d, {"fedquery", "--portal", c.portal_url(), "SELECT x.ra FROM XMATCH(x)"});
    CHECK(unknown.exit == 1);
    CHECK(unknown.err.find('^') != std::string::npos);
}
