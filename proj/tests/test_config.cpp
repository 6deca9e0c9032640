#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace s2;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::internal;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("sigma2_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config keys have unique names and valid defaults") {
    std::vector<std::string> names;
    for (const auto& k : config_keys()) {
        CAPTURE(k.key);
        CHECK(std::find(names.begin(), names.end(), k.key) == names.end());
        names.push_back(k.key);
        CHECK(!k.doc.empty());
        RunConfig c = default_config();
        CHECK_NOTHROW(c.set(k.key, k.dflt));
    }
    RunConfig d = default_config();
    CHECK(d.real("kappa") == 4);
    CHECK(d.u64("seed") == 1);
    CHECK(d.integer("profile.n") == 96);
    CHECK(d.str("map") == "identity(1)");
}

TEST_CASE("config parsing") {
    SUBCASE("comments, blank lines and whitespace") {
        RunConfig c = parse_config("# header\n\n  map =  hedgehog(pi_minus_r)  # trailing\nkappa=2.5\nseed = 18446744073709551615\n");
        CHECK(c.str("map") == "hedgehog(pi_minus_r)");
        CHECK(c.real("kappa") == 2.5);
        CHECK(c.u64("seed") == 18446744073709551615ull);
        CHECK(c.given == std::vector<std::string>{"map", "kappa", "seed"});
    }
    SUBCASE("errors carry origin and line") {
        std::string e = error_of([] { parse_config("kappa = 1\nbogus = 3\n", "run.cfg"); });
        CHECK(e.find("run.cfg:2") != std::string::npos);
        CHECK(e.find("unknown key 'bogus'") != std::string::npos);
        e = error_of([] { parse_config("kappa = 1\n\nkappa = 2\n", "a.cfg"); });
        CHECK(e.find("a.cfg:3") != std::string::npos);
        CHECK(e.find("duplicate") != std::string::npos);
        e = error_of([] { parse_config("profile.n = 9.5\n", "b.cfg"); });
        CHECK(e.find("b.cfg:1") != std::string::npos);
        CHECK(e.find("integer") != std::string::npos);
        CHECK(!error_of([] { parse_config("kappa = four\n"); }).empty());
        CHECK(!error_of([] { parse_config("seed = -1\n"); }).empty());
        CHECK(!error_of([] { parse_config("map\n"); }).empty());
        CHECK(!error_of([] { parse_config(" = 3\n"); }).empty());
        CHECK(!error_of([] { parse_config("map =\n"); }).empty());
        CHECK(code_of([] { parse_config("x = 1\n"); }) == Errc::config);
    }
    SUBCASE("echo round trip") {
        RunConfig c = parse_config("map = alpha_join(arccos_cos2,2,1)\nkappa = 0.25\nstability.fields = killing,conformal\n");
        RunConfig back = parse_config(c.echo());
        CHECK(back.values == c.values);
        CHECK(c.echo().find("kappa = 0.25\n") != std::string::npos);
        CHECK(parse_config("").echo() == default_config().echo());
    }
}

TEST_CASE("executing commands") {
    SUBCASE("energy of a constant map is zero") {
        RunConfig c = parse_config("map = constant(s3)\n");
        RunResult r = execute("energy", c);
        CHECK(r.exit_code == 0);
        const json& res = r.report["result"];
        CHECK(res["e_sigma1"].get<double>() == 0);
        CHECK(res["e_sigma2"].get<double>() == 0);
        CHECK(res.contains("note"));
        CHECK(r.report["command"] == "energy");
        CHECK(r.report["config"]["map"] == "constant(s3)");
    }
    SUBCASE("unknown command and bad map") {
        CHECK_THROWS_AS(execute("fly", default_config()), Error);
        CHECK_THROWS_AS(execute("energy", parse_config("map = teapot(3)\n")), Error);
    }
    SUBCASE("reports are reproducible byte for byte") {
        RunConfig c = parse_config("stability.n_random = 3\nseed = 9\n");
        std::string a = execute("stability", c).report.dump(2), b = execute("stability", c).report.dump(2);
        CHECK(a == b);
        RunConfig d = parse_config("stability.n_random = 3\nseed = 10\n");
        CHECK(execute("stability", d).report.dump(2) != a);
    }
    SUBCASE("unknown reproduce case") {
        CHECK_THROWS_AS(reproduce_case("not-a-case", default_config()), Error);
        CHECK(reproduce_case_names().size() >= 11);
    }
}

TEST_CASE("output files") {
    auto dir = scratch_dir("outputs");
    RunConfig c = parse_config("map = identity(1)\nkappa = 1\n");
    RunResult r = execute("energy", c);
    write_outputs(dir.string(), c, r);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(slurp(dir / "effective_config.txt") == c.echo());
    json back = json::parse(slurp(dir / "report.json"));
    CHECK(back == r.report);
    CHECK(std::filesystem::exists(dir / "tables" / "energy.csv"));
    CHECK(std::filesystem::exists(dir / "plotdata" / "energy_vs_radius.csv"));
    std::filesystem::remove_all(dir);

    auto blocker = scratch_dir("blocked");
    std::ofstream(blocker.string()) << "file";
    CHECK(code_of([&] { write_outputs((blocker / "sub").string(), c, r); }) == Errc::io);
    std::filesystem::remove_all(blocker);
}

TEST_CASE("report formatting") {
    CHECK(fmt(std::nan("")) == "nan");
    CHECK(fmt(-INFINITY) == "-inf");
    CHECK(fmt(0.1) == "0.10000000000000001");
    CHECK(std::stod(fmt(1.0 / 3)) == 1.0 / 3);
    Table t;
    t.header = {"a", "b"};
    t.add({"1,2", "say \"hi\""});
    t.add({"plain", "x"});
    CHECK(t.csv() == "a,b\n\"1,2\",\"say \"\"hi\"\"\"\nplain,x\n");
    Charge q;
    q.raw = std::nan("");
    json j = to_json(q);
    CHECK(j["raw"] == "nan");
    Check ck;
    ck.name = "x";
    ck.value = INFINITY;
    CHECK(to_json(ck)["value"] == "inf");
}
