#include "reebflow/casimirs.hpp"
#include "reebflow/io.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace reebflow;
using namespace reebflow::testing;

namespace {

namespace fs = std::filesystem;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch()
{
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("reeb_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_tmp(const std::string& name, const std::string& text)
{
    auto p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

Run run(const std::string& args, const std::string& env = "")
{
    static int counter = 0;
    auto out = scratch() / ("out" + std::to_string(counter) + ".txt");
    auto err = scratch() / ("err" + std::to_string(counter++) + ".txt");
    std::string cmd = env + " \"" + std::string(REEB_STEADY_BIN) + "\" " + args + " >\"" + out.string() + "\" 2>\""
                      + err.string() + "\"";
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string data(const std::string& name)
{
    return "\"" + data_path(name) + "\"";
}

std::set<std::vector<std::string>> vertex_set(const Json& v)
{
    std::set<std::vector<std::string>> s;
    for (const auto& p : v)
        s.insert(p.get<std::vector<std::string>>());
    return s;
}

}  // namespace

TEST(Cli, TorusInterval)
{
    auto r = run("check-steady " + data("torus.json") + " --a \"-3,-1,2,2\"");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.json();
    EXPECT_EQ(j["status"], "admits steady flow");
    EXPECT_EQ(j["interval"], Json::parse(R"(["-1", "0"])"));
    EXPECT_EQ(j["interval_open"], true);
    EXPECT_EQ(j["feasibility"]["interior_point"], Json::parse(R"(["-1/2"])"));
}

TEST(Cli, TorusEmpty)
{
    auto r = run("check-steady " + data("torus.json") + " --a \"-1,-4,2,3\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.json()["status"], "empty polytope");
}

TEST(Cli, PretzelVertices)
{
    auto r = run("polytope " + data("pretzel.json") + " --vertices");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.json();
    EXPECT_EQ(vertex_set(j["V"]["vertices"]),
              (std::set<std::vector<std::string>>{{"-2", "0"}, {"-1", "0"}, {"0", "-1"}, {"0", "-2"}}));
    EXPECT_TRUE(j["V"]["rays"].empty());
    EXPECT_EQ(j["bounded"], true);
    EXPECT_EQ(j["status"], "feasible");
}

TEST(Cli, BorderedGraphs)
{
    auto r = run("check-steady " + data("positive_disk.json"));
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.json()["status"], "no balanced region");
    EXPECT_EQ(run("polytope " + data("positive_disk.json")).code, 3);
}

TEST(Cli, UsageAndInputErrors)
{
    EXPECT_EQ(run("bogus").code, 64);
    EXPECT_EQ(run("").code, 64);
    EXPECT_EQ(run("verify-triple --chart toroidal").code, 64);
    auto missing = run("validate \"" + (scratch() / "nope.json").string() + "\"");
    EXPECT_EQ(missing.code, 3);
    auto bad = write_tmp("bad.json", "{\"vertices\": 1}");
    EXPECT_EQ(run("validate \"" + bad.string() + "\"").code, 3);
    auto broken = write_tmp("broken.json", "{ not json");
    EXPECT_EQ(run("check-steady \"" + broken.string() + "\"").code, 3);
}

TEST(Cli, InvalidGraphReported)
{
    // a flat edge
    auto g = write_tmp("flat.json", R"({
      "vertices": [{"id": "a", "role": "min", "f": "1"}, {"id": "b", "role": "max", "f": "1"}],
      "edges": [{"id": "e1", "tail": "a", "head": "b", "measure": {"kind": "poly_log", "poly": ["1"]}}]
    })");
    auto r = run("validate \"" + g.string() + "\"");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE((r.out + r.err).find("non-monotone edge"), std::string::npos);
}

TEST(Cli, ExactOutputIsByteIdentical)
{
    std::vector<std::string> cmds{
        "check-steady " + data("torus.json"),
        "polytope " + data("pretzel.json") + " --vertices",
        "circulation-space " + data("pretzel.json"),
        "casimirs " + data("split.json") + " --order 6",
        "certificate " + data("witness.json") + " " + data("witness_circulation.json") + " --force",
        "generate --family bordered --genus 1 --boundary 2 --seed 9",
        "reeb-extract " + data("torus_small.off"),
    };
    for (const auto& c : cmds) {
        auto a = run(c), b = run(c);
        EXPECT_EQ(a.code, b.code) << c;
        EXPECT_FALSE(a.out.empty()) << c;
        EXPECT_EQ(a.out, b.out) << c;
    }
    // thread count does not leak into the output
    auto one = run("reeb-extract " + data("torus_small.off"), "REEB_STEADY_THREADS=1");
    auto four = run("reeb-extract " + data("torus_small.off"), "REEB_STEADY_THREADS=4");
    EXPECT_EQ(one.out, four.out);
}

TEST(Cli, GraphRoundTrip)
{
    auto gen = run("generate --family closed --genus 2 --seed 3");
    ASSERT_EQ(gen.code, 0) << gen.err;
    auto g = graph_from_json(gen.json());
    EXPECT_EQ(dump(to_json(g)), gen.out);
    auto file = write_tmp("gen.json", gen.out);
    EXPECT_EQ(run("validate \"" + file.string() + "\"").code, 0);

    auto ex = run("reeb-extract " + data("torus_small.off"));
    ASSERT_EQ(ex.code, 0) << ex.err;
    EXPECT_EQ(dump(to_json(graph_from_json(ex.json()))), ex.out);
    auto exfile = write_tmp("extracted.json", ex.out);
    EXPECT_EQ(run("validate \"" + exfile.string() + "\"").code, 0);
}

TEST(Cli, CirculationRoundTrip)
{
    auto pt = run("circulation-space " + data("torus.json") + " --point=-1/2");
    ASSERT_EQ(pt.code, 0) << pt.err;
    auto g = load_graph(data_path("torus.json"));
    auto c = circulation_from_json(g, pt.json());
    EXPECT_EQ(dump(to_json(c)), pt.out);
    EXPECT_TRUE(is_balanced(c).holds());

    auto cfile = write_tmp("torus_c.json", pt.out);
    auto cert = run("certificate " + data("torus.json") + " \"" + cfile.string() + "\"");
    EXPECT_EQ(cert.code, 0) << cert.out;
    EXPECT_EQ(cert.json()["ok"], true);

    auto same = run("orbit-equiv " + data("torus.json") + " " + data("torus.json") + " --c1 \"" + cfile.string()
                    + "\" --c2 \"" + cfile.string() + "\"");
    EXPECT_EQ(same.code, 0) << same.out;
    auto other = run("circulation-space " + data("torus.json") + " --point=-3/10");
    auto ofile = write_tmp("torus_c2.json", other.out);
    auto diff = run("orbit-equiv " + data("torus.json") + " " + data("torus.json") + " --c1 \"" + cfile.string()
                    + "\" --c2 \"" + ofile.string() + "\"");
    EXPECT_EQ(diff.code, 2);
    EXPECT_EQ(diff.json()["invariant"], "circulation");
    EXPECT_EQ(run("orbit-equiv " + data("torus.json") + " " + data("torus.json")).code, 3);
}

TEST(Cli, PolytopeRoundTrip)
{
    auto r = run("polytope " + data("pretzel.json"));
    ASSERT_EQ(r.code, 0);
    auto j = r.json();
    auto h = hrep_from_json(j);
    EXPECT_EQ(h.dim, 2);
    EXPECT_EQ(to_json(h), j["H"]);
    EXPECT_EQ(Json(h.labels), j["coordinates"]);
}

TEST(Cli, CasimirsCsvMatchesLibrary)
{
    auto csv = scratch() / "split.csv";
    auto r = run("casimirs " + data("split.json") + " --order 4 --csv \"" + csv.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    auto g = load_graph(data_path("split.json"));
    EXPECT_EQ(slurp(csv), moment_table_csv(moment_table(g, 4)));
    EXPECT_EQ(r.json()["order"], 4);
}

TEST(Cli, CertificateWitness)
{
    auto plain = run("certificate " + data("witness.json") + " " + data("witness_circulation.json"));
    EXPECT_EQ(plain.code, 2);
    EXPECT_EQ(plain.json()["balanced"]["status"], "fails");
    auto forced = run("certificate " + data("witness.json") + " " + data("witness_circulation.json") + " --force");
    EXPECT_EQ(forced.code, 2);
    EXPECT_EQ(forced.json()["cycle"], Json::parse(R"(["e2", "e3"])"));
}

TEST(Cli, VerifyTriple)
{
    auto r = run("verify-triple --chart hyperbolic --zeta \"1+s\" --eps -1 --c -2 --grid 60");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(run("verify-triple --chart hyperbolic --zeta \"s\" --eps 1 --c -1").code, 3);
}

TEST(Cli, ExtractDiagnosticsAndOut)
{
    auto diag = scratch() / "diag.json";
    auto out = scratch() / "graph.json";
    auto r = run("reeb-extract " + data("torus_small.off") + " --diagnostics \"" + diag.string() + "\" --out \""
                 + out.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    auto d = Json::parse(slurp(diag));
    EXPECT_EQ(d["saddles"].size(), 2u);
    EXPECT_FALSE(d["compatibility"].empty());
    auto g = graph_from_json(Json::parse(slurp(out)));
    EXPECT_EQ(homology_dimensions(g).b1, 1);
}
