#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "phifun/mmio.hpp"
#include "phifun/phieval.hpp"
#include "phifun/rng.hpp"

using namespace phifun;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "phifun_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PHI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("cli") {

    TEST_CASE("run: zero matrix produces scaled identities, exit 0") {
        const auto dir = work_dir();
        write_matrix_market((dir / "zero.mtx").string(), RealMatrix(3));
        const auto out = dir / "zero_out";
        REQUIRE(run_cli("run -i " + (dir / "zero.mtx").string() + " -p 3 -o " + out.string()) ==
                0);
        for (int j = 0; j <= 3; ++j) {
            const auto m = std::get<RealMatrix>(
                read_matrix_market((out / ("phi" + std::to_string(j) + ".mtx")).string()));
            RealMatrix expect(3);
            add_scaled_identity(expect, inv_factorial(j));
            CHECK(m == expect);
        }
        CHECK(fs::exists(out / "diagnostics.json"));
    }

    TEST_CASE("run: outputs agree with the library path, diagnostics emitted") {
        const auto dir = work_dir();
        RealMatrix a(3);
        a(0, 0) = -0.4;
        a(0, 1) = 1.2;
        a(1, 1) = 0.3;
        a(1, 2) = -2.0;
        a(2, 2) = 0.9;
        write_matrix_market((dir / "tri.mtx").string(), a);
        const auto out = dir / "tri_out";
        REQUIRE(run_cli("run -i " + (dir / "tri.mtx").string() + " -p 2 -o " + out.string() +
                        " --seed 42") == 0);
        EvalContext ctx;
        const auto expect = phi_funm(a, 2, ctx);
        for (int j = 0; j <= 2; ++j) {
            const auto m = std::get<RealMatrix>(
                read_matrix_market((out / ("phi" + std::to_string(j) + ".mtx")).string()));
            CHECK(m == expect.phis[j]);
        }
        const std::string diag = slurp(out / "diagnostics.json");
        CHECK(diag.find("\"schema\": 1") != std::string::npos);
        CHECK(diag.find("\"structure\": \"upper-triangular\"") != std::string::npos);
    }

    TEST_CASE("run: forced degree/scaling pair") {
        const auto dir = work_dir();
        RealMatrix a(2);
        a(0, 0) = 0.2;
        a(1, 1) = -0.1;
        write_matrix_market((dir / "diag.mtx").string(), a);
        const auto out = dir / "forced_out";
        REQUIRE(run_cli("run -i " + (dir / "diag.mtx").string() + " -p 1 -o " + out.string() +
                        " --force-m 6 --force-s 2") == 0);
        const std::string diag = slurp(out / "diagnostics.json");
        CHECK(diag.find("\"m\": 6") != std::string::npos);
        CHECK(diag.find("\"s\": 2") != std::string::npos);
        // force-s without force-m is an input error
        CHECK(run_cli("run -i " + (dir / "diag.mtx").string() + " -p 1 -o " + out.string() +
                      " --force-s 1") == 2);
    }

    TEST_CASE("run: identity input recovers the scalar closed forms") {
        const auto dir = work_dir();
        write_matrix_market((dir / "eye2.mtx").string(), RealMatrix::identity(2));
        const auto out = dir / "eye2_out";
        REQUIRE(run_cli("run -i " + (dir / "eye2.mtx").string() + " -p 1 -o " + out.string()) ==
                0);
        const auto phi0 =
            std::get<RealMatrix>(read_matrix_market((out / "phi0.mtx").string()));
        const auto phi1 =
            std::get<RealMatrix>(read_matrix_market((out / "phi1.mtx").string()));
        const double e = std::exp(1.0);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(std::abs(phi0(i, i) - e) <= 4 * kUnitRoundoff * e);
            CHECK(std::abs(phi1(i, i) - (e - 1.0)) <= 100 * kUnitRoundoff * (e - 1.0));
            CHECK(phi0(i, 1 - i) == 0.0);
            CHECK(phi1(i, 1 - i) == 0.0);
        }
    }

    TEST_CASE("run: csv output format") {
        const auto dir = work_dir();
        write_matrix_market((dir / "eye.mtx").string(), RealMatrix::identity(2));
        const auto out = dir / "csv_out";
        REQUIRE(run_cli("run -i " + (dir / "eye.mtx").string() + " -p 1 -o " + out.string() +
                        " --format csv") == 0);
        CHECK(fs::exists(out / "phi0.csv"));
        CHECK(fs::exists(out / "phi1.csv"));
    }

    TEST_CASE("run: non-square and malformed inputs exit 2") {
        const auto dir = work_dir();
        {
            std::ofstream f(dir / "rect.mtx");
            f << "%%MatrixMarket matrix array real general\n2 3\n1\n1\n1\n1\n1\n1\n";
        }
        CHECK(run_cli("run -i " + (dir / "rect.mtx").string() + " -p 1") == 2);
        {
            std::ofstream f(dir / "junk.mtx");
            f << "garbage\n";
        }
        CHECK(run_cli("run -i " + (dir / "junk.mtx").string() + " -p 1") == 2);
        CHECK(run_cli("run -i " + (dir / "does_not_exist.mtx").string() + " -p 1") == 2);
    }

    TEST_CASE("corpus: repeated generation is byte identical") {
        const auto dir = work_dir();
        const auto c1 = dir / "corpus1";
        const auto c2 = dir / "corpus2";
        REQUIRE(run_cli("corpus --seed 0 -o " + c1.string()) == 0);
        REQUIRE(run_cli("corpus --seed 0 -o " + c2.string()) == 0);
        std::vector<fs::path> files1;
        for (const auto& e : fs::directory_iterator(c1)) files1.push_back(e.path());
        CHECK(files1.size() >= 21); // >= 20 matrices plus the manifest
        for (const auto& f : files1) CHECK(slurp(f) == slurp(c2 / f.filename()));
    }

    TEST_CASE("verify: identity passes a tight tolerance") {
        const auto dir = work_dir();
        write_matrix_market((dir / "eye4.mtx").string(), RealMatrix::identity(4));
        CHECK(run_cli("verify -i " + (dir / "eye4.mtx").string() + " -p 2 --digits 48 --tol 1e-13") ==
              0);
    }

    TEST_CASE("run: complex input produces complex outputs") {
        const auto dir = work_dir();
        ComplexMatrix a(2);
        a(0, 0) = {0.1, 0.4};
        a(0, 1) = {-0.3, 0.2};
        a(1, 0) = {0.2, -0.1};
        a(1, 1) = {0.0, -0.5};
        write_matrix_market((dir / "cplx.mtx").string(), a);
        const auto out = dir / "cplx_out";
        REQUIRE(run_cli("run -i " + (dir / "cplx.mtx").string() + " -p 2 -o " + out.string()) ==
                0);
        EvalContext ctx;
        const auto expect = phi_funm(a, 2, ctx);
        for (int j = 0; j <= 2; ++j) {
            const auto m = std::get<ComplexMatrix>(
                read_matrix_market((out / ("phi" + std::to_string(j) + ".mtx")).string()));
            CHECK(m == expect.phis[j]);
        }
    }

    TEST_CASE("run: deterministic outputs for equal input and seed") {
        const auto dir = work_dir();
        RealMatrix a(4);
        Rng rng(55);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) a(i, j) = 2.0 * rng.symmetric();
        write_matrix_market((dir / "det.mtx").string(), a);
        const auto o1 = dir / "det1";
        const auto o2 = dir / "det2";
        const std::string args = " -p 2 --seed 7 -o ";
        REQUIRE(run_cli("run -i " + (dir / "det.mtx").string() + args + o1.string()) == 0);
        REQUIRE(run_cli("run -i " + (dir / "det.mtx").string() + args + o2.string()) == 0);
        for (int j = 0; j <= 2; ++j) {
            const auto f = "phi" + std::to_string(j) + ".mtx";
            CHECK(slurp(o1 / f) == slurp(o2 / f));
        }
    }

    TEST_CASE("bench: failed members carry an explicit tag") {
        const auto dir = work_dir();
        const auto corpus = dir / "bad_corpus";
        fs::create_directories(corpus);
        write_matrix_market((corpus / "00_good.mtx").string(), RealMatrix::identity(2));
        {
            std::ofstream f(corpus / "01_broken.mtx");
            f << "%%MatrixMarket matrix array real general\n1 1\nnot-a-number\n";
        }
        {
            std::ofstream f(corpus / "manifest.json");
            f << "{\"schema\":1,\"seed\":0,\"entries\":["
                 "{\"file\":\"00_good.mtx\",\"name\":\"good\",\"n\":2,"
                 "\"kappa_proxy\":4.0,\"well_conditioned\":true},"
                 "{\"file\":\"01_broken.mtx\",\"name\":\"broken\",\"n\":1,"
                 "\"kappa_proxy\":1.0,\"well_conditioned\":true}]}";
        }
        const auto report = dir / "bad_report.csv";
        CHECK(run_cli("bench --corpus " + corpus.string() + " -p 1 --digits 40 -o " +
                      report.string()) == 1);
        const std::string text = slurp(report);
        CHECK(text.find("failed:") != std::string::npos);
        CHECK(text.find("good,2,0,") != std::string::npos);
    }

    TEST_CASE("bench: row shape and exact predicted costs") {
        const auto dir = work_dir();
        const auto corpus = dir / "bench_corpus";
        REQUIRE(run_cli("corpus --seed 0 -o " + corpus.string()) == 0);
        const auto report = dir / "report.csv";
        const int p = 2;
        REQUIRE(run_cli("bench --corpus " + corpus.string() + " -p " + std::to_string(p) +
                        " --digits 40 -o " + report.string()) == 0);
        std::ifstream in(report);
        std::string header;
        std::getline(in, header);
        CHECK(header.find("rel_error") != std::string::npos);
        std::size_t rows = 0, corpus_size = 0;
        for (const auto& e : fs::directory_iterator(corpus))
            corpus_size += e.path().extension() == ".mtx" ? 1 : 0;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ++rows;
            // measured and predicted cost columns agree on every row
            std::vector<std::string> cols;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cols.push_back(cell);
            REQUIRE(cols.size() >= 13);
            CHECK(cols[4] == "ok");
            CHECK(cols[5] == cols[6]);
        }
        CHECK(rows == corpus_size * (p + 1));
    }
}
