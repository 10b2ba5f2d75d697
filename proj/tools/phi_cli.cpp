#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "phifun/corpus.hpp"
#include "phifun/mmio.hpp"
#include "phifun/oracle.hpp"
#include "phifun/phieval.hpp"
#include "phifun/thetagen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phifun;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitInput = 2;

void emit_error(const std::string& kind, const std::string& message, std::size_t line = 0,
                std::size_t column = 0) {
    json j{{"schema", 1}, {"status", "error"}, {"kind", kind}, {"message", message}};
    if (line) j["line"] = line;
    if (column) j["column"] = column;
    std::cout << j.dump() << "\n";
}

struct RunConfig {
    std::string input;
    int p = 1;
    std::string outdir = ".";
    std::string format = "matrix-market";
    int force_m = 0;
    int force_s = -1;
    bool exact_alpha = false;
    std::uint64_t seed = 42;
    bool emit_diagnostics = true;
};

json selection_to_json(const SelectionResult& sel, const SelectionDetail& detail,
                       StructureKind structure, const CostRational& count, std::size_t n, int p,
                       double wall_ms) {
    json alpha = json::array();
    for (double v : detail.alphas.values) alpha.push_back(v);
    const int t = sel.i < static_cast<int>(detail.costs.t_per_degree.size())
                      ? detail.costs.t_per_degree[sel.i]
                      : 0;
    return json{{"schema", 1},
                {"n", n},
                {"p", p},
                {"m", sel.m},
                {"i", sel.i},
                {"s", sel.s},
                {"r", sel.r},
                {"tau", sel.tau},
                {"p_hat", sel.p_hat},
                {"delta", sel.delta},
                {"t", t},
                {"alpha", alpha},
                {"estimator_columns", kEstimatorColumns},
                {"estimator_max_iter", kEstimatorMaxIter},
                {"matmul_count", std::to_string(count.numerator()) + "/" +
                                     std::to_string(count.denominator())},
                {"matmul_count_num", count.numerator()},
                {"matmul_count_den", count.denominator()},
                {"structure", to_string(structure)},
                {"wall_time_ms", wall_ms}};
}

// Cost-search restricted to one degree row (forced m, free s).
template <class T>
SelectionResult select_with_degree(const Matrix<T>& a, int p, int forced_m, EvalContext& ctx,
                                   SelectionDetail& detail) {
    const int i = degree_index(forced_m);
    const int ph_global = p_hat(theta(kMaxDegreeIndex, p), p);
    const int rmax = r_max_for(kMaxDegree, ph_global);
    detail.alphas = alpha_seq(a, rmax, ctx);
    detail.costs = build_cost_matrix(a, p, detail.alphas);
    const CostCell* best = nullptr;
    int br = -1;
    for (int r = 2; r <= detail.costs.r_max; ++r) {
        const CostCell& c = detail.costs.cell(i, r);
        if (!c.feasible) continue;
        if (!best || c.cost < best->cost) {
            best = &c;
            br = r;
        }
    }
    if (!best) throw std::invalid_argument("forced degree admits no feasible gauge index");
    SelectionResult sel;
    sel.m = forced_m;
    sel.i = i;
    sel.tau = tau_star(forced_m, i);
    sel.r = br;
    sel.s = best->s;
    sel.p_hat = detail.costs.p_hat_per_degree[i];
    sel.delta = detail.costs.delta_per_degree[i];
    sel.predicted_cost = best->cost;
    return sel;
}

template <class T>
int run_typed(const Matrix<T>& a, const RunConfig& cfg) {
    EvalContext ctx;
    ctx.seed = cfg.seed;
    ctx.exact_alpha = cfg.exact_alpha;
    SelectionDetail detail;

    const auto t0 = std::chrono::steady_clock::now();
    PhiResult<T> result;
    if (cfg.force_m > 0 && cfg.force_s >= 0) {
        result = phi_funm_forced(a, cfg.p, cfg.force_m, cfg.force_s, ctx);
    } else if (cfg.force_m > 0) {
        result.structure = detect_structure(a);
        result.selection = select_with_degree(a, cfg.p, cfg.force_m, ctx, detail);
        result = phi_funm_forced(a, cfg.p, result.selection.m, result.selection.s, ctx);
    } else {
        result = phi_funm(a, cfg.p, ctx, &detail);
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(cfg.outdir);
    for (int j = 0; j <= cfg.p; ++j) {
        const std::string stem = cfg.outdir + "/phi" + std::to_string(j);
        if (cfg.format == "csv")
            write_csv(stem + ".csv", result.phis[j]);
        else
            write_matrix_market(stem + ".mtx", result.phis[j]);
    }
    if (cfg.emit_diagnostics) {
        json j = selection_to_json(result.selection, detail, result.structure,
                                   result.matmul_count, a.dim(), cfg.p, wall_ms);
        std::ofstream out(cfg.outdir + "/diagnostics.json");
        out << j.dump(2) << "\n";
    }
    std::cout << json{{"schema", 1},
                      {"status", "ok"},
                      {"outputs", cfg.p + 1},
                      {"outdir", cfg.outdir},
                      {"matmul_count", std::to_string(result.matmul_count.numerator()) + "/" +
                                           std::to_string(result.matmul_count.denominator())}}
                     .dump()
              << "\n";
    return kExitOk;
}

int cmd_run(const RunConfig& cfg) {
    AnyMatrix any = read_matrix_market(cfg.input);
    return std::visit([&cfg](const auto& a) { return run_typed(a, cfg); }, any);
}

int cmd_corpus(std::uint64_t seed, const std::string& outdir) {
    fs::create_directories(outdir);
    const auto entries = gen_corpus(seed);
    json manifest{{"schema", 1}, {"seed", seed}, {"entries", json::array()}};
    int index = 0;
    for (const auto& e : entries) {
        char prefix[16];
        std::snprintf(prefix, sizeof prefix, "%02d_", index++);
        const std::string file = prefix + e.name + ".mtx";
        write_matrix_market(outdir + "/" + file, e.a);
        manifest["entries"].push_back(json{{"file", file},
                                           {"name", e.name},
                                           {"n", e.a.dim()},
                                           {"kappa_proxy", e.kappa_proxy},
                                           {"well_conditioned", e.well_conditioned}});
    }
    std::ofstream out(outdir + "/manifest.json");
    out << manifest.dump(2) << "\n";
    std::cout << "wrote " << entries.size() << " matrices to " << outdir << "\n";
    return kExitOk;
}

int cmd_bench(const std::string& corpus_dir, int p, int digits, const std::string& out_csv,
              const std::string& summary_path, std::uint64_t seed) {
    std::ifstream mf(corpus_dir + "/manifest.json");
    if (!mf) {
        emit_error("input", "missing manifest.json in " + corpus_dir);
        return kExitInput;
    }
    json manifest = json::parse(mf);

    std::ofstream csv(out_csv);
    if (!csv) {
        emit_error("input", "cannot open " + out_csv + " for writing");
        return kExitInput;
    }
    csv << "name,n,j,rel_error,status,matmul_count,predicted_cost,m,i,s,r,tau,"
           "well_conditioned\n";

    std::vector<std::vector<double>> errors_by_j(p + 1);
    CostRational total_cost{0};
    int failures = 0;

    for (const auto& entry : manifest["entries"]) {
        const std::string name = entry["name"];
        const std::string file = corpus_dir + "/" + std::string(entry["file"]);
        const bool well = entry["well_conditioned"];
        try {
            const auto any = read_matrix_market(file);
            const auto& a = std::get<RealMatrix>(any);
            EvalContext ctx;
            ctx.seed = seed;
            const auto result = phi_funm(a, p, ctx);
            const auto refs = oracle::phi_reference(a, p, digits);
            total_cost += result.matmul_count;
            const std::string cost_str = std::to_string(result.matmul_count.numerator()) + "/" +
                                         std::to_string(result.matmul_count.denominator());
            const std::string pred_str =
                std::to_string(result.selection.predicted_cost.numerator()) + "/" +
                std::to_string(result.selection.predicted_cost.denominator());
            for (int j = 0; j <= p; ++j) {
                const double err = oracle::rel_error_1norm(result.phis[j], refs[j]);
                errors_by_j[j].push_back(err);
                char errbuf[32];
                std::snprintf(errbuf, sizeof errbuf, "%.3e", err);
                csv << name << "," << a.dim() << "," << j << "," << errbuf << ",ok," << cost_str
                    << "," << pred_str << "," << result.selection.m << "," << result.selection.i
                    << "," << result.selection.s << "," << result.selection.r << ","
                    << result.selection.tau << "," << (well ? 1 : 0) << "\n";
            }
        } catch (const std::exception& ex) {
            ++failures;
            for (int j = 0; j <= p; ++j)
                csv << name << ",,," << "," << "failed:" << ex.what() << ",,,,,,,," << "\n";
        }
    }

    std::ostringstream summary;
    summary << "bench summary (p = " << p << ")\n";
    for (int j = 0; j <= p; ++j) {
        auto v = errors_by_j[j];
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const double median =
            v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        char line[128];
        std::snprintf(line, sizeof line, "  j=%-2d  max err %.3e   median err %.3e\n", j, v.back(),
                      median);
        summary << line;
    }
    summary << "  total cost " << total_cost.numerator() << "/" << total_cost.denominator()
            << " matmuls, failures " << failures << "\n";
    std::cout << summary.str();
    if (!summary_path.empty()) {
        std::ofstream sf(summary_path);
        sf << summary.str();
    }
    return failures == 0 ? kExitOk : kExitNumerical;
}

template <class T>
int verify_typed(const Matrix<T>& a, int p, int digits, double tol, std::uint64_t seed) {
    EvalContext ctx;
    ctx.seed = seed;
    const auto result = phi_funm(a, p, ctx);
    const auto refs = oracle::phi_reference(a, p, digits);
    double worst = 0.0;
    for (int j = 0; j <= p; ++j) {
        const double err = oracle::rel_error_1norm(result.phis[j], refs[j]);
        worst = std::max(worst, err);
        std::printf("phi_%-2d  rel 1-norm error %.3e\n", j, err);
    }
    std::printf("worst %.3e\n", worst);
    if (tol > 0 && !(worst <= tol)) {
        emit_error("numerical", "verification exceeded tolerance");
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_theta(int margin, bool check) {
    int mismatches = 0;
    std::printf("%4s", "p");
    for (int i = 0; i <= kMaxDegreeIndex; ++i) std::printf("  m=%-8d", optimal_degree(i));
    std::printf("\n");
    for (int p = 1; p <= 10; ++p) {
        std::printf("%4d", p);
        for (int i = 0; i <= kMaxDegreeIndex; ++i) {
            const int m = optimal_degree(i);
            const double got = regenerate_theta(m, p, 2 * m + p + margin);
            const double want = theta_table(i, p);
            const bool ok = std::abs(got - want) <= 5e-3 * want;
            if (!ok) ++mismatches;
            std::printf("  %.3e%s", got, ok ? " " : "!");
        }
        std::printf("\n");
    }
    std::printf("embedded table %s\n", mismatches ? "MISMATCH" : "reproduced");
    return (check && mismatches) ? kExitNumerical : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simultaneous matrix phi-function evaluation"};
    app.require_subcommand(1);

    RunConfig run_cfg;
    auto* run = app.add_subcommand("run", "evaluate phi_0..phi_p for a matrix file");
    run->add_option("--input,-i", run_cfg.input, "Matrix Market input file")->required();
    run->add_option("--p,-p", run_cfg.p, "largest phi index")->required()->check(CLI::Range(1, 1 << 20));
    run->add_option("--out,-o", run_cfg.outdir, "output directory");
    run->add_option("--format", run_cfg.format, "output format")
        ->check(CLI::IsMember({"matrix-market", "csv"}));
    run->add_option("--force-m", run_cfg.force_m, "force the approximant degree")
        ->check(CLI::IsMember({1, 2, 3, 4, 6, 8, 10, 12}));
    run->add_option("--force-s", run_cfg.force_s, "force the scaling parameter (needs --force-m)");
    run->add_flag("--exact-alpha", run_cfg.exact_alpha, "gauge from explicit powers (n <= 64)");
    run->add_option("--seed", run_cfg.seed, "estimator seed");
    bool no_diag = false;
    run->add_flag("--no-diagnostics", no_diag, "skip diagnostics.json");

    std::uint64_t corpus_seed = 0;
    std::string corpus_dir = "corpus";
    auto* corpus = app.add_subcommand("corpus", "generate the synthetic matrix corpus");
    corpus->add_option("--seed", corpus_seed, "generator seed");
    corpus->add_option("--outdir,-o", corpus_dir, "output directory")->required();

    std::string bench_corpus = "corpus", bench_out = "report.csv", bench_summary;
    int bench_p = 10, bench_digits = 64;
    std::uint64_t bench_seed = 42;
    auto* bench = app.add_subcommand("bench", "error/cost report over a corpus");
    bench->add_option("--corpus", bench_corpus, "corpus directory (with manifest.json)")->required();
    bench->add_option("--p,-p", bench_p, "largest phi index");
    bench->add_option("--digits", bench_digits, "reference digits");
    bench->add_option("--out,-o", bench_out, "CSV report path");
    bench->add_option("--summary", bench_summary, "also write the summary here");
    bench->add_option("--seed", bench_seed, "estimator seed");

    std::string verify_input;
    int verify_p = 1, verify_digits = 64;
    double verify_tol = 0.0;
    std::uint64_t verify_seed = 42;
    auto* verify = app.add_subcommand("verify", "cross-check one matrix against the reference");
    verify->add_option("--input,-i", verify_input, "Matrix Market input file")->required();
    verify->add_option("--p,-p", verify_p, "largest phi index")->required();
    verify->add_option("--digits", verify_digits, "reference digits");
    verify->add_option("--tol", verify_tol, "fail if worst error exceeds this");
    verify->add_option("--seed", verify_seed, "estimator seed");

    int theta_margin = kThetaSeriesMargin;
    bool theta_check = false;
    auto* theta_cmd = app.add_subcommand("theta", "regenerate the gauge threshold table");
    theta_cmd->add_option("--margin", theta_margin, "series truncation margin");
    theta_cmd->add_flag("--check", theta_check, "exit nonzero on table mismatch");

    CLI11_PARSE(app, argc, argv);
    run_cfg.emit_diagnostics = !no_diag;

    try {
        if (run->parsed()) {
            if (run_cfg.force_s >= 0 && run_cfg.force_m == 0) {
                emit_error("input", "--force-s requires --force-m");
                return kExitInput;
            }
            return cmd_run(run_cfg);
        }
        if (corpus->parsed()) return cmd_corpus(corpus_seed, corpus_dir);
        if (bench->parsed())
            return cmd_bench(bench_corpus, bench_p, bench_digits, bench_out, bench_summary,
                             bench_seed);
        if (verify->parsed()) {
            const auto any = read_matrix_market(verify_input);
            return std::visit(
                [&](const auto& a) {
                    return verify_typed(a, verify_p, verify_digits, verify_tol, verify_seed);
                },
                any);
        }
        if (theta_cmd->parsed()) return cmd_theta(theta_margin, theta_check);
    } catch (const mm_parse_error& ex) {
        emit_error("parse", ex.what(), ex.line(), ex.column());
        return kExitInput;
    } catch (const std::invalid_argument& ex) {
        emit_error("input", ex.what());
        return kExitInput;
    } catch (const singular_pivot_error& ex) {
        emit_error("numerical", ex.what());
        return kExitNumerical;
    } catch (const std::exception& ex) {
        emit_error("numerical", ex.what());
        return kExitNumerical;
    }
    return kExitOk;
}
