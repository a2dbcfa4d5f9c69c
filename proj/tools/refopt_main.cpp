// Command-line front end: runs the experiment grid, recomputes indicators
// from persisted frontiers, prints the solution-space size, and lints model
// documents. Exit codes: 0 ok, 1 partial failure, 2 usage error.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include <refopt/harness.hpp>

namespace {

using namespace refopt;

int cmdRun(const std::string& caseStudy, const std::string& brf,
           std::optional<double> fuzziness, std::optional<int> evolutions, int runs,
           uint64_t seed, int jobs, const std::string& outDir) {
    GaConfig ga;
    ga.independentRuns = runs;

    std::vector<ProblemConfig> configs;
    for (ProblemConfig& c : fullGrid(caseStudy, ga)) {
        if (brf == "on" && !c.brfEnabled) continue;
        if (brf == "off" && c.brfEnabled) continue;
        if (fuzziness && std::abs(c.fuzziness - *fuzziness) > 1e-12) continue;
        if (evolutions && c.maxEvolutions != *evolutions) continue;
        c.outputDir = outDir;
        configs.push_back(std::move(c));
    }
    if (configs.empty()) {
        std::cerr << "refopt: nothing to run (flags exclude every configuration)\n";
        return 2;
    }
    std::cerr << "refopt: case " << caseStudy << ": " << configs.size()
              << " configuration(s) x " << runs << " run(s), seed " << seed << ", jobs "
              << jobs << "\n";
    ExperimentResult result = runGrid(configs, seed, jobs);
    for (const auto& cr : result.configs) {
        if (cr.failed)
            std::cerr << "  FAILED " << cr.config.id() << ": " << cr.error << "\n";
        else
            std::cerr << "  done " << cr.config.id() << " (front "
                      << cr.merged.individuals.size() << ")\n";
    }
    std::cerr << "refopt: reference front " << result.reference.individuals.size()
              << " solutions, " << result.wallSeconds << "s\n";
    return result.anyFailure ? 1 : 0;
}

int cmdIndicators(const std::string& caseStudy, const std::string& outDir) {
    ExperimentResult result = recomputeFromDisk(outDir, caseStudy);
    namespace fs = std::filesystem;
    const fs::path caseDir = fs::path(outDir) / caseStudy;
    {
        std::ofstream out(caseDir / "indicators.csv", std::ios::binary);
        out << indicatorCsv(result.indicators);
    }
    {
        std::ofstream out(caseDir / "shares.csv", std::ios::binary);
        out << shareCsv(result.shares);
    }
    std::cout << indicatorCsv(result.indicators);
    return 0;
}

int cmdSpace(const std::string& caseStudy, int length) {
    const ArchModel model = loadCaseStudy(caseStudy);
    const SolutionSpace space = solutionSpaceSize(model, length);
    std::printf("%-6s %10s %s\n", "action", "targets", "combinations");
    for (size_t i = 0; i < kAllActionKinds.size(); ++i)
        std::printf("%-6s %10zu %s\n", toString(kAllActionKinds[i]), space.domainSizes[i],
                    space.combinations[i].str().c_str());
    std::printf("omega  %s (%.3g)\n", space.omega.str().c_str(),
                space.omega.convert_to<double>());
    if (space.empty)
        std::printf("note: some action kind has fewer targets than the sequence length; "
                    "omega is zero\n");
    return 0;
}

int cmdValidate(const std::string& caseStudy) {
    try {
        const ArchModel model = loadCaseStudy(caseStudy);
        std::printf("ok: %zu components, %zu nodes, %zu links, %zu scenarios\n",
                    model.components.size(), model.nodes.size(), model.links.size(),
                    model.scenarios.size());
        return 0;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"many-objective architecture refactoring optimizer"};
    app.require_subcommand(1);

    std::string caseStudy, brf = "both", outDir = "out";
    double fuzziness = -1.0;
    int evolutions = 0, runs = 3, jobs = 1, length = 4;
    uint64_t seed = 1;

    auto* runCmd = app.add_subcommand("run", "run the configuration grid (or one slice)");
    runCmd->add_option("--case", caseStudy, "ttbs, cocome, or a model document path")
        ->required();
    runCmd->add_option("--brf", brf, "baseline refactoring factor: on, off, or both")
        ->check(CLI::IsMember({"on", "off", "both"}));
    runCmd->add_option("--fuzziness", fuzziness,
                       "antipattern fuzziness (0, 0.55, 0.8, 0.95); omit for all");
    runCmd->add_option("--evolutions", evolutions, "genetic evolutions; omit for all");
    runCmd->add_option("--runs", runs, "independent runs per configuration");
    runCmd->add_option("--seed", seed, "master seed");
    runCmd->add_option("--jobs", jobs, "parallel (configuration, run) workers");
    runCmd->add_option("--out", outDir, "output directory");

    auto* indCmd =
        app.add_subcommand("indicators", "recompute tables from persisted frontiers");
    indCmd->add_option("--case", caseStudy, "case study name")->required();
    indCmd->add_option("--out", outDir, "output directory");

    auto* spaceCmd = app.add_subcommand("space", "print the solution-space size");
    spaceCmd->add_option("--case", caseStudy, "ttbs, cocome, or a model document path")
        ->required();
    spaceCmd->add_option("--length", length, "chromosome length");

    auto* validateCmd = app.add_subcommand("validate", "lint a model document");
    validateCmd->add_option("--case", caseStudy, "ttbs, cocome, or a model document path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (runCmd->parsed())
            return cmdRun(caseStudy, brf,
                          fuzziness >= 0.0 ? std::optional<double>(fuzziness) : std::nullopt,
                          evolutions > 0 ? std::optional<int>(evolutions) : std::nullopt,
                          runs, seed, jobs, outDir);
        if (indCmd->parsed()) return cmdIndicators(caseStudy, outDir);
        if (spaceCmd->parsed()) return cmdSpace(caseStudy, length);
        if (validateCmd->parsed()) return cmdValidate(caseStudy);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "refopt: %s\n", e.what());
        return 1;
    }
    return 2;
}
