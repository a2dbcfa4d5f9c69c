// Experiment orchestration: the configuration grid, per-run frontier
// persistence, reference-frontier construction, indicator and share tables,
// and the solution-space size. Output layout per case study:
//
//   <out>/<case>/<config-id>/run-<k>/front.csv
//   <out>/<case>/<config-id>/run-<k>/progress.log
//   <out>/<case>/<config-id>/merged_front.csv
//   <out>/<case>/reference_front.csv
//   <out>/<case>/indicators.csv
//   <out>/<case>/shares.csv
//   <out>/<case>/meta.json          (wall-clock; excluded from determinism)
//
// Frontier CSVs are byte-reproducible for a fixed master seed.
#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include <refopt/fixtures.hpp>
#include <refopt/indicators.hpp>
#include <refopt/nsga2.hpp>

namespace refopt {

using BigInt = boost::multiprecision::cpp_int;

// --- configuration ---------------------------------------------------------------

inline const std::vector<double> kFuzzinessGrid = {0.0, 0.55, 0.8, 0.95};
inline const std::vector<int> kEvolutionsGrid = {72, 82, 102};

struct ProblemConfig {
    std::string caseStudy;   // "ttbs", "cocome", or a model document path
    bool brfEnabled = true;
    double fuzziness = 0.95;  // 0 disables antipattern detection
    int maxEvolutions = 72;
    GaConfig gaConfig;
    std::string outputDir;

    std::string id() const {
        std::ostringstream out;
        out << "brf-" << (brfEnabled ? "on" : "off") << "_pas-" << fuzziness << "_ev-"
            << maxEvolutions;
        return out.str();
    }
};

inline ArchModel loadCaseStudy(const std::string& caseStudy) {
    if (caseStudy == "ttbs") return ttbsFixture();
    if (caseStudy == "cocome") return cocomeFixture();
    std::ifstream in(caseStudy);
    if (!in.good())
        throw std::invalid_argument("unknown case study or unreadable model: " + caseStudy);
    std::ostringstream text;
    text << in.rdbuf();
    return loadModel(text.str());
}

// The study grid for one case: brf on/off x fuzziness (incl. disabled) x
// evolution counts = 24 configurations.
inline std::vector<ProblemConfig> fullGrid(const std::string& caseStudy,
                                           const GaConfig& ga = {}) {
    std::vector<ProblemConfig> configs;
    for (bool brf : {false, true})
        for (double fuzz : kFuzzinessGrid)
            for (int evolutions : kEvolutionsGrid) {
                ProblemConfig c;
                c.caseStudy = caseStudy;
                c.brfEnabled = brf;
                c.fuzziness = fuzz;
                c.maxEvolutions = evolutions;
                c.gaConfig = ga;
                configs.push_back(std::move(c));
            }
    return configs;
}

// Per-run seed derived from (master seed, config id, run index); FNV mix
// with a splitmix finalizer.
inline uint64_t deriveSeed(uint64_t masterSeed, const std::string& configId, int runIndex) {
    uint64_t h = 1469598103934665603ULL ^ masterSeed;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    for (char c : configId) mix(static_cast<uint8_t>(c));
    mix(static_cast<uint64_t>(runIndex) + 0x9e3779b97f4a7c15ULL);
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h == 0 ? 1 : h;
}

// --- CSV plumbing ------------------------------------------------------------------

namespace csv {

inline std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// splits one RFC-4180 record; the input must contain a full record
inline std::vector<std::string> splitRecord(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace csv

// --- frontier persistence ------------------------------------------------------------

inline std::string frontierCsv(const ParetoFront& front) {
    std::string out = "perfQ,reliability,pas,changes,sequence\n";
    for (const auto& ind : front.individuals) {
        out += csv::number(ind.objectives.perfQ) + ",";
        out += csv::number(ind.objectives.reliability) + ",";
        out += csv::number(ind.objectives.pas) + ",";
        out += csv::number(ind.objectives.changes) + ",";
        out += csv::quote(toJson(ind.genotype.actions).dump()) + "\n";
    }
    return out;
}

inline ParetoFront parseFrontierCsv(const std::string& text) {
    ParetoFront front;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = csv::splitRecord(line);
        if (fields.size() != 5)
            throw ParseError("frontier CSV: expected 5 fields, got " +
                             std::to_string(fields.size()));
        Individual ind;
        ind.objectives.perfQ = std::stod(fields[0]);
        ind.objectives.reliability = std::stod(fields[1]);
        ind.objectives.pas = std::stod(fields[2]);
        ind.objectives.changes = std::stod(fields[3]);
        ind.genotype.actions = actionsFromJson(Json::parse(fields[4]));
        front.individuals.push_back(std::move(ind));
    }
    return front;
}

// --- indicator and share tables --------------------------------------------------------

struct IndicatorRow {
    std::string brf;  // "yes"/"no"
    int maxeval = 0;
    double probpas = 0.0;
    std::string indicator;  // HV, IGD+, EP, GSPREAD
    double value = 0.0;
};

struct ShareRow {
    std::string label;  // config id or "Total"
    std::string brf;
    int maxeval = 0;
    double probpas = 0.0;
    std::array<double, 4> percent{};  // Clon, MO2N, MO2C, ReDe
};

struct ConfigResult {
    ProblemConfig config;
    std::vector<ParetoFront> runs;
    ParetoFront merged;
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    std::string caseStudy;
    std::vector<ConfigResult> configs;
    ParetoFront reference;
    std::vector<IndicatorRow> indicators;
    std::vector<ShareRow> shares;
    double wallSeconds = 0.0;
    bool anyFailure = false;
};

inline constexpr double kHvReferenceCoordinate = 1.1;  // normalized worst + 10%

// Indicator rows for every configuration against the case's reference
// frontier, sorted best-first inside each indicator block.
inline std::vector<IndicatorRow> indicatorTable(const std::vector<ConfigResult>& configs,
                                                const ParetoFront& reference) {
    std::vector<IndicatorRow> rows;
    if (reference.individuals.empty()) return rows;
    const auto refPoints = canonicalPoints(reference);
    const Normalization norm = Normalization::fromFront(refPoints);
    const auto refNorm = norm.applyAll(refPoints);
    const Point refPoint(4, kHvReferenceCoordinate);

    struct Block {
        const char* name;
        bool ascending;
    };
    const Block blocks[] = {{"HV", false}, {"IGD+", true}, {"EP", true}, {"GSPREAD", true}};

    for (const auto& block : blocks) {
        std::vector<IndicatorRow> group;
        for (const auto& cr : configs) {
            if (cr.failed || cr.merged.individuals.empty()) continue;
            const auto frontNorm = norm.applyAll(canonicalPoints(cr.merged));
            double value = 0.0;
            if (std::string(block.name) == "HV") {
                // only points inside the reference box count toward the volume
                std::vector<Point> inBox;
                for (const auto& p : frontNorm) {
                    bool ok = true;
                    for (size_t k = 0; k < p.size(); ++k)
                        if (p[k] > refPoint[k]) ok = false;
                    if (ok) inBox.push_back(p);
                }
                value = hypervolume(inBox, refPoint);
            } else if (std::string(block.name) == "IGD+") {
                value = igdPlus(frontNorm, refNorm);
            } else if (std::string(block.name) == "EP") {
                value = epsilon(frontNorm, refNorm);
            } else {
                value = gspread(frontNorm, refNorm);
            }
            group.push_back({cr.config.brfEnabled ? "yes" : "no", cr.config.maxEvolutions,
                             cr.config.fuzziness, block.name, value});
        }
        std::stable_sort(group.begin(), group.end(),
                         [&block](const IndicatorRow& a, const IndicatorRow& b) {
                             return block.ascending ? a.value < b.value : a.value > b.value;
                         });
        rows.insert(rows.end(), group.begin(), group.end());
    }
    return rows;
}

inline std::string indicatorCsv(const std::vector<IndicatorRow>& rows) {
    std::string out = "brf,maxeval,probpas,q_indicator,value\n";
    for (const auto& r : rows) {
        out += r.brf + "," + std::to_string(r.maxeval) + "," + csv::number(r.probpas) + "," +
               r.indicator + "," + csv::number(r.value) + "\n";
    }
    return out;
}

// Percentage of each action kind among the genes of Pareto-optimal
// individuals, per configuration plus a Total row.
inline std::vector<ShareRow> refactoringShareTable(const std::vector<ConfigResult>& configs) {
    std::vector<ShareRow> rows;
    std::array<long long, 4> grand{};
    auto tally = [](const ParetoFront& front) {
        std::array<long long, 4> counts{};
        for (const auto& ind : front.individuals)
            for (const auto& action : ind.genotype.actions)
                ++counts[static_cast<size_t>(action.kind)];
        return counts;
    };
    auto toPercent = [](const std::array<long long, 4>& counts) {
        std::array<double, 4> percent{};
        long long total = 0;
        for (long long c : counts) total += c;
        if (total > 0)
            for (size_t k = 0; k < 4; ++k)
                percent[k] = 100.0 * static_cast<double>(counts[k]) / total;
        return percent;
    };
    for (const auto& cr : configs) {
        if (cr.failed) continue;
        const auto counts = tally(cr.merged);
        for (size_t k = 0; k < 4; ++k) grand[k] += counts[k];
        rows.push_back({cr.config.id(), cr.config.brfEnabled ? "yes" : "no",
                        cr.config.maxEvolutions, cr.config.fuzziness, toPercent(counts)});
    }
    rows.push_back({"Total", "", 0, 0.0, toPercent(grand)});
    return rows;
}

inline std::string shareCsv(const std::vector<ShareRow>& rows) {
    std::string out = "config,brf,maxeval,probpas,Clon,MO2N,MO2C,ReDe\n";
    for (const auto& r : rows) {
        out += csv::quote(r.label) + "," + r.brf + ",";
        out += r.label == "Total" ? std::string(",,")
                                  : std::to_string(r.maxeval) + "," +
                                        csv::number(r.probpas) + ",";
        // enum order is Clon, MO2N, MO2C, ReDe
        out += csv::number(r.percent[0]) + "," + csv::number(r.percent[1]) + "," +
               csv::number(r.percent[2]) + "," + csv::number(r.percent[3]) + "\n";
    }
    return out;
}

// --- solution-space size ---------------------------------------------------------------

struct SolutionSpace {
    std::array<size_t, 4> domainSizes{};   // per kind, kAllActionKinds order
    std::array<BigInt, 4> combinations{};  // C(n_kind, k)
    BigInt omega;                          // product of the combinations
    bool empty = false;                    // some kind has fewer targets than k
};

inline BigInt binomial(size_t n, size_t k) {
    if (k > n) return 0;
    BigInt result = 1;
    for (size_t i = 0; i < k; ++i) {
        result *= static_cast<unsigned long long>(n - i);
        result /= static_cast<unsigned long long>(i + 1);
    }
    return result;
}

// Omega: the Cartesian product over action kinds of C(n_kind, L), where
// n_kind counts that kind's valid targets on the initial model.
inline SolutionSpace solutionSpaceSize(const ArchModel& model, int chromosomeLength) {
    if (chromosomeLength < 1)
        throw std::invalid_argument("solutionSpaceSize: chromosome length must be >= 1");
    SolutionSpace space;
    space.omega = 1;
    for (size_t i = 0; i < kAllActionKinds.size(); ++i) {
        space.domainSizes[i] = targetDomainSize(model, kAllActionKinds[i]);
        space.combinations[i] =
            binomial(space.domainSizes[i], static_cast<size_t>(chromosomeLength));
        if (space.combinations[i] == 0) space.empty = true;
        space.omega *= space.combinations[i];
    }
    return space;
}

// --- grid execution ----------------------------------------------------------------------

// Runs every configuration (independentRuns each, seeds derived from the
// master seed), merges runs per config, builds the per-case reference
// frontier, and writes every CSV artifact. Failed runs are recorded and the
// grid continues.
inline ExperimentResult runGrid(const std::vector<ProblemConfig>& configs,
                                uint64_t masterSeed, int parallelism) {
    if (configs.empty()) throw std::invalid_argument("runGrid: nothing to run");
    const auto started = std::chrono::steady_clock::now();

    ExperimentResult result;
    result.caseStudy = configs.front().caseStudy;
    for (const auto& c : configs)
        if (c.caseStudy != result.caseStudy)
            throw std::invalid_argument("runGrid: configurations span case studies");

    const ArchModel model = loadCaseStudy(result.caseStudy);
    const PerformanceIndices baseIndices = solveModel(model);

    namespace fs = std::filesystem;
    const fs::path caseDir = fs::path(configs.front().outputDir) / result.caseStudy;

    struct Task {
        size_t configIdx;
        int runIdx;
    };
    std::vector<Task> tasks;
    result.configs.resize(configs.size());
    for (size_t ci = 0; ci < configs.size(); ++ci) {
        result.configs[ci].config = configs[ci];
        result.configs[ci].runs.resize(
            std::max(1, configs[ci].gaConfig.independentRuns));
        for (int r = 0; r < std::max(1, configs[ci].gaConfig.independentRuns); ++r)
            tasks.push_back({ci, r});
    }

    std::vector<std::string> taskErrors(tasks.size());
    std::atomic<size_t> nextTask{0};
    auto worker = [&]() {
        while (true) {
            const size_t t = nextTask.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            const ProblemConfig& cfg = configs[task.configIdx];
            const fs::path runDir =
                caseDir / cfg.id() / ("run-" + std::to_string(task.runIdx));
            try {
                fs::create_directories(runDir);
                Problem problem;
                problem.model = model;
                problem.baseIndices = baseIndices;
                problem.eval.brfEnabled = cfg.brfEnabled;
                problem.eval.fuzziness = cfg.fuzziness;

                GaConfig ga = cfg.gaConfig;
                ga.maxEvolutions = cfg.maxEvolutions;
                ga.seed = deriveSeed(masterSeed, cfg.id(), task.runIdx);

                std::ofstream progress(runDir / "progress.log");
                std::mt19937_64 rng(ga.seed);
                ParetoFront front =
                    run(problem, ga, rng,
                        [&progress](int gen, const std::vector<Individual>& pop) {
                            progress << progressLine(gen, pop) << "\n";
                        });
                std::ofstream out(runDir / "front.csv", std::ios::binary);
                out << frontierCsv(front);
                result.configs[task.configIdx].runs[task.runIdx] = std::move(front);
            } catch (const std::exception& e) {
                taskErrors[t] = std::string(e.what());
            }
        }
    };
    const int threads = std::max(1, parallelism);
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    for (size_t t = 0; t < tasks.size(); ++t) {
        if (taskErrors[t].empty()) continue;
        auto& cr = result.configs[tasks[t].configIdx];
        cr.failed = true;
        cr.error += "run-" + std::to_string(tasks[t].runIdx) + ": " + taskErrors[t] + "; ";
        result.anyFailure = true;
    }

    // merge runs per configuration, then the per-case reference frontier
    std::vector<ParetoFront> mergedFronts;
    for (auto& cr : result.configs) {
        if (cr.failed) continue;
        cr.merged = buildReferenceFront(cr.runs);
        std::ofstream out(caseDir / cr.config.id() / "merged_front.csv", std::ios::binary);
        out << frontierCsv(cr.merged);
        mergedFronts.push_back(cr.merged);
    }
    result.reference = buildReferenceFront(mergedFronts);
    {
        std::ofstream out(caseDir / "reference_front.csv", std::ios::binary);
        out << frontierCsv(result.reference);
    }

    result.indicators = indicatorTable(result.configs, result.reference);
    {
        std::ofstream out(caseDir / "indicators.csv", std::ios::binary);
        out << indicatorCsv(result.indicators);
    }
    result.shares = refactoringShareTable(result.configs);
    {
        std::ofstream out(caseDir / "shares.csv", std::ios::binary);
        out << shareCsv(result.shares);
    }

    result.wallSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    {
        Json meta;
        meta["case"] = result.caseStudy;
        meta["configs"] = configs.size();
        meta["master_seed"] = masterSeed;
        meta["wall_seconds"] = result.wallSeconds;
        meta["failures"] = result.anyFailure;
        std::ofstream out(caseDir / "meta.json", std::ios::binary);
        out << meta.dump(2) << "\n";
    }
    return result;
}

// Recomputes indicator and share tables from the frontier CSVs persisted by
// a previous `runGrid` under <out>/<case>; reproduces the tables bit-exactly.
inline ExperimentResult recomputeFromDisk(const std::string& outDir,
                                          const std::string& caseStudy) {
    namespace fs = std::filesystem;
    const fs::path caseDir = fs::path(outDir) / caseStudy;
    if (!fs::is_directory(caseDir))
        throw std::invalid_argument("no persisted results under " + caseDir.string());

    ExperimentResult result;
    result.caseStudy = caseStudy;
    std::vector<fs::path> configDirs;
    for (const auto& entry : fs::directory_iterator(caseDir))
        if (entry.is_directory()) configDirs.push_back(entry.path());
    std::sort(configDirs.begin(), configDirs.end());

    for (const auto& dir : configDirs) {
        const fs::path mergedPath = dir / "merged_front.csv";
        if (!fs::exists(mergedPath)) continue;
        ConfigResult cr;
        const std::string id = dir.filename().string();
        // parse "brf-on_pas-0.95_ev-72"
        cr.config.caseStudy = caseStudy;
        cr.config.outputDir = outDir;
        if (id.rfind("brf-on", 0) == 0)
            cr.config.brfEnabled = true;
        else if (id.rfind("brf-off", 0) == 0)
            cr.config.brfEnabled = false;
        else
            continue;
        const size_t pas = id.find("_pas-");
        const size_t ev = id.find("_ev-");
        if (pas == std::string::npos || ev == std::string::npos) continue;
        cr.config.fuzziness = std::stod(id.substr(pas + 5, ev - pas - 5));
        cr.config.maxEvolutions = std::stoi(id.substr(ev + 4));

        std::ifstream in(mergedPath);
        std::ostringstream text;
        text << in.rdbuf();
        cr.merged = parseFrontierCsv(text.str());
        result.configs.push_back(std::move(cr));
    }
    if (result.configs.empty())
        throw std::invalid_argument("no merged frontiers under " + caseDir.string());

    std::vector<ParetoFront> mergedFronts;
    for (const auto& cr : result.configs) mergedFronts.push_back(cr.merged);
    result.reference = buildReferenceFront(mergedFronts);
    result.indicators = indicatorTable(result.configs, result.reference);
    result.shares = refactoringShareTable(result.configs);
    return result;
}

}  // namespace refopt
