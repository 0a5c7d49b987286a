#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <string>

#include "noether/errors.hpp"
#include "noether/pipeline.hpp"

using namespace noether;

namespace {

int run(const std::string& path, PipelineStage stage, const ZeroTestOptions& zt,
        const std::string& format, bool expect_strict, bool timing) {
    auto start = std::chrono::steady_clock::now();
    ProblemFile p = parse_problem_file(path);
    PipelineOptions opts;
    opts.zt = zt;
    opts.stage = stage;
    opts.expect_strict = expect_strict;
    ResultDocument doc = run_pipeline(p, opts);
    auto end = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(end - start).count();
    if (format == "json") {
        std::cout << doc.to_json();
    } else {
        std::cout << doc.to_text();
        if (timing) std::cout << "elapsed: " << ms << " ms\n";
    }
    return doc.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noether-II variational symmetry engine"};
    app.require_subcommand(1);

    std::string file;
    ZeroTestOptions zt;
    std::string format = "text";
    bool expect_strict = false;
    bool timing = false;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int trials = 200;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", file, "problem file (.n2)")->required();
        sub->add_option("--trials", trials, "random trials for the zero test");
        sub->add_option("--tol", tol, "relative tolerance for the float path");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--format", format, "output format: text or json")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_flag("--expect-strict", expect_strict,
                      "require an expect block for every computed artifact");
        sub->add_flag("--timing", timing, "print elapsed time (text format only)");
    };

    CLI::App* el = app.add_subcommand("el", "Euler-Lagrange expressions only");
    CLI::App* rel = app.add_subcommand("relation", "relations / constrained residuals");
    CLI::App* claw = app.add_subcommand("claw", "conservation-law construction");
    CLI::App* verify = app.add_subcommand("verify", "full pipeline with all checks");
    for (CLI::App* sub : {el, rel, claw, verify}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    PipelineStage stage = PipelineStage::Verify;
    if (el->parsed()) stage = PipelineStage::Euler;
    if (rel->parsed()) stage = PipelineStage::Relations;
    if (claw->parsed()) stage = PipelineStage::Claw;

    zt.trials = trials;
    zt.tol = static_cast<long double>(tol);
    zt.seed = seed;

    try {
        return run(file, stage, zt, format, expect_strict, timing);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UndeclaredIdentifier& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
