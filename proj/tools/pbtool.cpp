#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pb/bribery.hpp"
#include "pb/pabulib.hpp"
#include "pb/robustness.hpp"
#include "pb/rules.hpp"
#include "pb/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace pb;

namespace {

struct RuleFlags {
    std::string rule = "greedy-av";
    std::string tiebreak = "order";
    std::string completion = "none";
    std::string ratio_ties = "order";

    RuleSpec to_spec() const {
        std::string text = rule;
        if (completion != "none") text += ":" + completion;
        if (tiebreak == "cheaper") text += "/cheaper";
        if (ratio_ties == "cheaper") text += "/ratio-cheaper";
        return parse_rule_spec(text);
    }
};

void add_rule_flags(CLI::App* cmd, RuleFlags& flags) {
    cmd->add_option("--rule", flags.rule, "budgeting rule")
        ->check(CLI::IsMember({"greedy-av", "greedy-cost", "phragmen", "mes-apr", "mes-cost"}));
    cmd->add_option("--tiebreak", flags.tiebreak, "GreedyAV tie-breaking")
        ->check(CLI::IsMember({"order", "cheaper"}));
    cmd->add_option("--completion", flags.completion, "MES completion method")
        ->check(CLI::IsMember({"none", "add1", "add1-greedyav", "epsilon", "greedyav"}));
    cmd->add_option("--ratio-ties", flags.ratio_ties, "GreedyCost equal-ratio ties")
        ->check(CLI::IsMember({"order", "cheaper"}));
}

std::vector<Rat> parse_phi_grid(const std::string& text) {
    std::vector<Rat> grid;
    if (text.find(':') != std::string::npos) {
        // start:step:end, inclusive, exact rational stepping
        const auto first = text.find(':');
        const auto second = text.find(':', first + 1);
        if (second == std::string::npos)
            throw std::invalid_argument("phi grid range must be start:step:end");
        const Rat start = parse_decimal(text.substr(0, first));
        const Rat step = parse_decimal(text.substr(first + 1, second - first - 1));
        const Rat end = parse_decimal(text.substr(second + 1));
        if (step <= 0) throw std::invalid_argument("phi grid step must be positive");
        for (Rat x = start; x <= end; x += step) grid.push_back(x);
    } else {
        std::string item;
        for (char ch : text + ",") {
            if (ch == ',') {
                if (!item.empty()) grid.push_back(parse_decimal(item));
                item.clear();
            } else {
                item.push_back(ch);
            }
        }
    }
    return grid;
}

std::string threshold_text(const RobustnessReport& report) {
    return report.threshold_above_grid ? "above-grid" : format_decimal(report.threshold);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

ordered_json noise_json(const NoiseConfig& cfg, bool serial) {
    ordered_json j;
    std::vector<std::string> grid;
    for (const Rat& phi : cfg.phi_grid) grid.push_back(format_decimal(phi));
    j["phi_grid"] = grid;
    j["samples_per_phi"] = cfg.samples_per_phi;
    j["master_seed"] = cfg.master_seed;
    j["resample_convention"] = cfg.convention == ResampleConvention::ExpectationPreserving
                                   ? "expectation-preserving"
                                   : "literal-inverse";
    j["execution"] = serial ? "serial" : "parallel";
    return j;
}


ordered_json outcome_json(const Instance& inst, const RuleSpec& spec, const Outcome& outcome,
                          const std::string& input) {
    ordered_json doc;
    doc["version"] = kVersion;
    doc["input"] = input;
    doc["rule"] = spec.to_string();
    doc["budget"] = inst.budget.get_str();
    doc["total_cost"] = outcome.total_cost.get_str();
    std::vector<std::string> ids;
    for (int c : outcome.selected) ids.push_back(inst.projects[c].id);
    doc["selected"] = ids;
    ordered_json steps = ordered_json::array();
    for (const auto& step : outcome.trace) {
        ordered_json s;
        s["project_id"] = inst.projects[step.project].id;
        s["phase"] = step.phase;
        s["price"] = pb::to_string(step.price);
        if (!step.payments.empty()) {
            ordered_json pays = ordered_json::array();
            for (const auto& [voter, amount] : step.payments) {
                ordered_json p;
                p["voter_id"] = inst.voters[voter];
                p["amount"] = pb::to_string(amount);
                pays.push_back(std::move(p));
            }
            s["payments"] = std::move(pays);
        }
        steps.push_back(std::move(s));
    }
    doc["trace"] = std::move(steps);
    if (outcome.completion.used) {
        ordered_json comp;
        comp["method"] = outcome.completion.method;
        if (outcome.completion.method.rfind("add1", 0) == 0) {
            comp["add1_steps"] = outcome.completion.add1_steps;
            comp["cap_hit"] = outcome.completion.cap_hit;
        }
        if (outcome.completion.method == "epsilon")
            comp["epsilon"] = pb::to_string(outcome.completion.epsilon);
        doc["completion"] = std::move(comp);
    }
    return doc;
}

// ----- outcome -----

struct OutcomeArgs {
    std::string file;
    RuleFlags rule;
    std::string json_path;
};

int cmd_outcome(const OutcomeArgs& args) {
    const PabulibFile file = load_pabulib_file(args.file);
    const RuleSpec spec = args.rule.to_spec();
    const Outcome outcome = run_rule(file.instance, spec);

    std::cout << "rule: " << spec.to_string() << "\n";
    std::cout << "selected " << outcome.selected.size() << " of "
              << file.instance.num_projects() << " projects, total cost "
              << outcome.total_cost.get_str() << " of budget " << file.instance.budget.get_str()
              << "\n";
    for (const auto& step : outcome.trace) {
        std::cout << "  " << (step.step_index + 1) << ". "
                  << file.instance.projects[step.project].id
                  << "  cost=" << file.instance.projects[step.project].cost.get_str()
                  << "  phase=" << step.phase << "  price=" << pb::to_string(step.price) << "\n";
    }
    if (outcome.completion.used) {
        std::cout << "completion: " << outcome.completion.method;
        if (outcome.completion.method.rfind("add1", 0) == 0) {
            std::cout << " (" << outcome.completion.add1_steps << " budget increments";
            if (outcome.completion.cap_hit)
                std::cout << ", stopped at the " << add1_iteration_cap() << "-increment cap";
            std::cout << ")";
        }
        if (outcome.completion.method == "epsilon")
            std::cout << " (epsilon = " << pb::to_string(outcome.completion.epsilon) << ")";
        std::cout << "\n";
    }
    if (!args.json_path.empty())
        write_file(args.json_path,
                   outcome_json(file.instance, spec, outcome, args.file).dump(2) + "\n");
    return 0;
}

// ----- robust -----

struct RobustArgs {
    std::string file;
    RuleFlags rule;
    std::string phi_grid;
    int samples = 0;  // 0 = default of the selected grid
    uint64_t seed = 0;
    bool high_res = false;
    bool serial = false;
    std::string convention = "expectation";
    std::string out_dir;
    std::string name;
};

NoiseConfig robust_config(const RobustArgs& args) {
    NoiseConfig cfg = args.high_res ? NoiseConfig::high_res_grid(args.seed)
                                    : NoiseConfig::default_grid(args.seed);
    if (!args.phi_grid.empty()) cfg.phi_grid = parse_phi_grid(args.phi_grid);
    if (args.samples > 0) cfg.samples_per_phi = args.samples;
    cfg.convention = args.convention == "literal" ? ResampleConvention::LiteralInverse
                                                  : ResampleConvention::ExpectationPreserving;
    cfg.validate();
    return cfg;
}

int cmd_robust(const RobustArgs& args) {
    const PabulibFile file = load_pabulib_file(args.file);
    const RuleSpec spec = args.rule.to_spec();
    const NoiseConfig cfg = robust_config(args);
    const std::string name =
        args.name.empty() ? fs::path(args.file).stem().string() : args.name;

    const RobustnessReport report =
        run_experiment(file.instance, spec, cfg,
                       args.serial ? ExecutionMode::Serial : ExecutionMode::Parallel, name);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    write_file(out / "curves.csv", curves_csv(file.instance, report));
    write_file(out / "aggregates.csv", aggregates_csv(report));
    write_file(out / "report.json", report_json(file.instance, report));

    ordered_json manifest;
    manifest["command"] = "robust";
    manifest["version"] = kVersion;
    manifest["input"] = args.file;
    manifest["instance"] = name;
    manifest["rule"] = spec.to_string();
    manifest["noise"] = noise_json(cfg, args.serial);
    manifest["outputs"] = {"curves.csv", "aggregates.csv", "report.json"};
    write_file(out / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "50%-winner threshold: " << threshold_text(report) << "\n";
    return 0;
}

// ----- bribery -----

struct BriberyArgs {
    std::string file;
    RuleFlags rule;
    std::string target;
    int64_t radius = 0;
    std::string mode = "count";
    std::string solver = "auto";
    bool at_most = false;
    uint64_t cap = 20'000'000;
    uint64_t sig_cap = 1u << 24;
    int max_perm_projects = 8;
};

int cmd_bribery(const BriberyArgs& args) {
    const PabulibFile file = load_pabulib_file(args.file);
    const Instance& inst = file.instance;
    const RuleSpec spec = args.rule.to_spec();
    const int target = inst.project_index(args.target);

    BriberyGuards guards;
    guards.enumeration_cap = args.cap;
    guards.signature_entries_cap = args.sig_cap;
    guards.ordering_max_projects = args.max_perm_projects;

    const bool unit_costs = std::all_of(inst.projects.begin(), inst.projects.end(),
                                        [](const Project& p) { return p.cost == 1; });
    const bool greedy_av_rule =
        spec.rule == Rule::GreedyAV && spec.completion == Completion::None;

    auto count_with = [&](const std::string& solver, int64_t radius) -> Int {
        const BriberyQuery q{target, radius, FlipSemantics::ExactlyR};
        if (solver == "brute") return count_bruteforce(inst, spec, q, guards);
        if (!greedy_av_rule)
            throw std::invalid_argument("solver '" + solver + "' applies to plain greedy-av only");
        if (solver == "sig-dp") return count_greedyav_signature_dp(inst, q, spec.tiebreak, guards);
        if (solver == "order-dp") return count_greedyav_ordering_dp(inst, q, spec.tiebreak, guards);
        if (solver == "unit-dp") return count_greedyav_unit_cost(inst, q, spec.tiebreak);
        throw std::invalid_argument("solver '" + solver + "' cannot count");
    };

    auto auto_count_solver = [&]() -> std::string {
        if (!greedy_av_rule) return "brute";
        if (unit_costs) return "unit-dp";
        // estimate the signature table before committing to it
        unsigned __int128 entries = 1;
        for (int i = 0; i < inst.num_projects() && entries <= guards.signature_entries_cap; ++i)
            entries *= 3;
        entries *= static_cast<uint64_t>(inst.num_projects());
        entries *= static_cast<uint64_t>(inst.num_voters() + 1);
        entries *= static_cast<uint64_t>(args.radius + 1);
        if (entries <= guards.signature_entries_cap) return "sig-dp";
        return "brute";
    };

    if (args.mode == "decide") {
        std::string solver = args.solver;
        if (solver == "auto")
            solver = (greedy_av_rule && spec.tiebreak == TieBreak::CheaperFirst) ? "xp" : "brute";
        bool answer;
        const BriberyQuery q{target, args.radius, FlipSemantics::AtMostR};
        if (solver == "xp") {
            if (!greedy_av_rule || spec.tiebreak != TieBreak::CheaperFirst)
                throw std::invalid_argument(
                    "the xp solver requires greedy-av with cheaper-first tie-breaking");
            answer = decide_greedyav_cheaper_first(inst, q, guards);
        } else if (solver == "brute") {
            answer = decide_bruteforce(inst, spec, q, guards);
        } else {
            // counting solvers decide by summing exact counts over radii
            answer = false;
            for (int64_t rr = 0; rr <= args.radius && !answer; ++rr)
                answer = count_with(solver, rr) > 0;
        }
        std::cout << "solver: " << solver << "\n";
        std::cout << "decision: " << (answer ? "true" : "false") << "\n";
        return 0;
    }

    std::string solver = args.solver == "auto" ? auto_count_solver() : args.solver;
    if (solver == "xp")
        throw std::invalid_argument("the xp solver only decides; use --mode decide");
    Int count;
    if (args.at_most) {
        count = 0;  // distinct flip-set sizes give distinct instances
        for (int64_t rr = 0; rr <= args.radius; ++rr) count += count_with(solver, rr);
    } else {
        count = count_with(solver, args.radius);
    }
    std::cout << "solver: " << solver << "\n";
    std::cout << "count: " << count.get_str() << "\n";
    if (args.mode == "prob" || args.mode == "count") {
        const int64_t pairs = static_cast<int64_t>(inst.num_projects()) * inst.num_voters();
        Int total = 0;
        if (args.at_most) {
            for (int64_t rr = 0; rr <= std::min(args.radius, pairs); ++rr)
                total += binomial(static_cast<unsigned long>(pairs),
                                  static_cast<unsigned long>(rr));
        } else {
            total = binomial(static_cast<unsigned long>(pairs),
                             static_cast<unsigned long>(args.radius));
        }
        if (total > 0) {
            const Rat probability = make_rat(count, total);
            std::cout << "probability: " << to_string(probability) << " ("
                      << format_decimal(probability, 6) << ")\n";
        }
    }
    return 0;
}

// ----- batch -----

struct BatchArgs {
    std::string dir;
    std::string rules = "greedy-av,greedy-cost,phragmen,mes-cost:add1-greedyav";
    std::string out_dir;
    std::string phi_grid;
    int samples = 100;
    uint64_t seed = 0;
    bool serial = false;
    double time_cap = 120.0;
};

struct BatchCell {
    std::string instance_name;
    std::string rule;
    bool above_grid = true;
    Rat threshold;
};

int cmd_batch(const BatchArgs& args) {
    std::vector<std::string> rule_texts;
    {
        std::string item;
        for (char ch : args.rules + ",") {
            if (ch == ',') {
                if (!item.empty()) rule_texts.push_back(item);
                item.clear();
            } else {
                item.push_back(ch);
            }
        }
    }
    std::vector<RuleSpec> specs;
    for (const auto& text : rule_texts) specs.push_back(parse_rule_spec(text));

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pb")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .pb files in " + args.dir);

    NoiseConfig base_cfg = NoiseConfig::default_grid(args.seed);
    if (!args.phi_grid.empty()) base_cfg.phi_grid = parse_phi_grid(args.phi_grid);
    base_cfg.samples_per_phi = args.samples;
    base_cfg.validate();
    const ExecutionMode mode = args.serial ? ExecutionMode::Serial : ExecutionMode::Parallel;

    const fs::path out(args.out_dir);
    fs::create_directories(out);

    std::vector<BatchCell> cells;
    std::vector<Instance> instances;            // parsed instances, index per file
    std::vector<int> instance_of_report;
    std::vector<RobustnessReport> reports;
    std::ostringstream skips, errors;
    skips << "instance,rule,seconds\n";
    errors << "instance,error\n";

    for (const auto& path : files) {
        const std::string name = path.stem().string();
        PabulibFile file;
        try {
            file = load_pabulib_file(path.string());
        } catch (const std::exception& e) {
            errors << name << ",\"" << e.what() << "\"\n";
            continue;
        }
        instances.push_back(file.instance);
        const int instance_idx = static_cast<int>(instances.size()) - 1;

        for (const auto& spec : specs) {
            // drop (instance, rule) pairs whose initial outcome takes too
            // long to compute
            const auto t0 = std::chrono::steady_clock::now();
            try {
                (void)run_rule(instances[instance_idx], spec);
            } catch (const std::exception& e) {
                errors << name << ",\"" << spec.to_string() << ": " << e.what() << "\"\n";
                continue;
            }
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (args.time_cap > 0 && seconds > args.time_cap) {
                skips << name << ',' << spec.to_string() << ',' << seconds << "\n";
                continue;
            }
            RobustnessReport report =
                run_experiment(instances[instance_idx], spec, base_cfg, mode, name);
            BatchCell cell;
            cell.instance_name = name;
            cell.rule = spec.to_string();
            cell.above_grid = report.threshold_above_grid;
            cell.threshold = report.threshold;
            cells.push_back(cell);
            instance_of_report.push_back(instance_idx);
            reports.push_back(std::move(report));
        }
    }

    // thresholds.csv: one row per (instance, rule)
    {
        std::ostringstream csv;
        csv << "instance,rule,threshold\n";
        for (const auto& cell : cells)
            csv << cell.instance_name << ',' << cell.rule << ','
                << (cell.above_grid ? "above-grid" : format_decimal(cell.threshold)) << "\n";
        write_file(out / "thresholds.csv", csv.str());
    }

    // summary.csv: counts at <=25%/10%/5% plus mean and median of the
    // thresholds within the grid
    {
        std::ostringstream csv;
        csv << "rule,instances,le_25,le_10,le_5,mean_le_25,median_le_25\n";
        for (const auto& spec : specs) {
            const std::string rule = spec.to_string();
            std::vector<Rat> values;
            int total = 0;
            for (const auto& cell : cells) {
                if (cell.rule != rule) continue;
                ++total;
                if (!cell.above_grid && cell.threshold <= make_rat(1, 4))
                    values.push_back(cell.threshold);
            }
            std::sort(values.begin(), values.end());
            const auto le = [&](const Rat& bound) {
                return std::count_if(values.begin(), values.end(),
                                     [&](const Rat& v) { return v <= bound; });
            };
            csv << rule << ',' << total << ',' << values.size() << ',' << le(make_rat(1, 10))
                << ',' << le(make_rat(1, 20)) << ',';
            if (!values.empty()) {
                Rat sum(0);
                for (const Rat& v : values) sum += v;
                const Rat mean = sum / Rat(static_cast<long>(values.size()));
                const Rat median =
                    values.size() % 2 == 1
                        ? values[values.size() / 2]
                        : (values[values.size() / 2 - 1] + values[values.size() / 2]) / 2;
                csv << format_decimal(mean, 6) << ',' << format_decimal(median, 6);
            } else {
                csv << ',';
            }
            csv << "\n";
        }
        write_file(out / "summary.csv", csv.str());
    }

    // feature tables
    {
        std::vector<const Instance*> inst_ptrs;
        std::vector<const RobustnessReport*> report_ptrs;
        for (size_t i = 0; i < reports.size(); ++i) {
            inst_ptrs.push_back(&instances[instance_of_report[i]]);
            report_ptrs.push_back(&reports[i]);
        }
        const FeatureTable table = feature_table(inst_ptrs, report_ptrs);
        std::ostringstream fi;
        fi << "instance,rule,voters,projects,budget,mean_vote_length,voter_project_ratio,"
              "threshold\n";
        for (const auto& row : table.instances)
            fi << row.instance_name << ',' << row.rule << ',' << row.voters << ','
               << row.projects << ',' << row.budget.get_str() << ','
               << format_decimal(row.mean_vote_length, 6) << ','
               << format_decimal(row.voter_project_ratio, 6) << ','
               << (row.threshold_above_grid ? "above-grid" : format_decimal(row.threshold))
               << "\n";
        write_file(out / "features_instances.csv", fi.str());

        std::ostringstream fp;
        fp << "instance,rule,feature,extreme,project_id,phi,funding_probability\n";
        for (const auto& row : table.projects)
            for (size_t ip = 0; ip < base_cfg.phi_grid.size(); ++ip)
                fp << row.instance_name << ',' << row.rule << ',' << row.feature << ','
                   << row.extreme << ',' << row.project_id << ','
                   << format_decimal(base_cfg.phi_grid[ip]) << ','
                   << format_decimal(row.probabilities[ip]) << "\n";
        write_file(out / "features_projects.csv", fp.str());
    }

    // pairwise rule-threshold scatter data
    {
        std::map<std::pair<std::string, std::string>, std::string> value_of;
        for (const auto& cell : cells)
            value_of[{cell.instance_name, cell.rule}] =
                cell.above_grid ? "above-grid" : format_decimal(cell.threshold);
        std::ostringstream csv;
        csv << "rule_x,rule_y,instance,threshold_x,threshold_y\n";
        for (size_t a = 0; a < rule_texts.size(); ++a) {
            for (size_t b = a + 1; b < rule_texts.size(); ++b) {
                const std::string rx = specs[a].to_string();
                const std::string ry = specs[b].to_string();
                for (const auto& path : files) {
                    const std::string name = path.stem().string();
                    const auto x = value_of.find({name, rx});
                    const auto y = value_of.find({name, ry});
                    if (x == value_of.end() || y == value_of.end()) continue;
                    csv << rx << ',' << ry << ',' << name << ',' << x->second << ','
                        << y->second << "\n";
                }
            }
        }
        write_file(out / "scatter.csv", csv.str());
    }

    write_file(out / "skips.csv", skips.str());
    write_file(out / "errors.csv", errors.str());

    ordered_json manifest;
    manifest["command"] = "batch";
    manifest["version"] = kVersion;
    manifest["input_dir"] = args.dir;
    manifest["rules"] = rule_texts;
    manifest["noise"] = noise_json(base_cfg, args.serial);
    manifest["time_cap_seconds"] = args.time_cap;
    manifest["files"] = files.size();
    write_file(out / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "processed " << files.size() << " files, " << cells.size()
              << " (instance, rule) cells\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("PB_THREADS")) {
#ifdef _OPENMP
        const int n = std::atoi(threads);
        if (n > 0) omp_set_num_threads(n);
#else
        (void)threads;
#endif
    }

    CLI::App app{"participatory budgeting rules, flip-bribery solvers and robustness sampling"};
    app.require_subcommand(1);

    OutcomeArgs outcome_args;
    auto* outcome_cmd = app.add_subcommand("outcome", "compute one rule outcome");
    outcome_cmd->add_option("file", outcome_args.file, "Pabulib .pb file")->required();
    add_rule_flags(outcome_cmd, outcome_args.rule);
    outcome_cmd->add_option("--json", outcome_args.json_path, "write the outcome as JSON");

    RobustArgs robust_args;
    auto* robust_cmd = app.add_subcommand("robust", "Monte-Carlo robustness report");
    robust_cmd->add_option("file", robust_args.file, "Pabulib .pb file")->required();
    add_rule_flags(robust_cmd, robust_args.rule);
    robust_cmd->add_option("--phi-grid", robust_args.phi_grid,
                           "comma list or start:step:end (default 0:0.01:0.25)");
    robust_cmd->add_option("--samples", robust_args.samples,
                           "samples per phi (default 100; 1000 with --high-res)");
    robust_cmd->add_option("--seed", robust_args.seed, "master seed");
    robust_cmd->add_flag("--high-res", robust_args.high_res,
                         "0.0001-step grid with 1000 samples per phi");
    robust_cmd->add_flag("--serial", robust_args.serial, "single-threaded reference kernel");
    robust_cmd->add_option("--convention", robust_args.convention, "resampling probability p_i")
        ->check(CLI::IsMember({"expectation", "literal"}));
    robust_cmd->add_option("--out", robust_args.out_dir, "output directory")->required();
    robust_cmd->add_option("--name", robust_args.name, "instance name in reports");

    BriberyArgs bribery_args;
    auto* bribery_cmd = app.add_subcommand("bribery", "exact flip-bribery counting/decision");
    bribery_cmd->add_option("file", bribery_args.file, "Pabulib .pb file")->required();
    add_rule_flags(bribery_cmd, bribery_args.rule);
    bribery_cmd->add_option("--target", bribery_args.target, "preferred project id")->required();
    bribery_cmd->add_option("--radius", bribery_args.radius, "number of approval flips")
        ->required();
    bribery_cmd->add_option("--mode", bribery_args.mode, "count | decide | prob")
        ->check(CLI::IsMember({"count", "decide", "prob"}));
    bribery_cmd->add_option("--solver", bribery_args.solver, "solver selection")
        ->check(CLI::IsMember({"auto", "brute", "sig-dp", "order-dp", "unit-dp", "xp"}));
    bribery_cmd->add_flag("--at-most", bribery_args.at_most,
                          "count flip sets of size at most the radius");
    bribery_cmd->add_option("--cap", bribery_args.cap, "brute-force enumeration cap");
    bribery_cmd->add_option("--sig-cap", bribery_args.sig_cap, "signature DP entry cap");
    bribery_cmd->add_option("--max-perm-projects", bribery_args.max_perm_projects,
                            "orderings DP project guard");

    BatchArgs batch_args;
    auto* batch_cmd = app.add_subcommand("batch", "robustness over a directory of .pb files");
    batch_cmd->add_option("dir", batch_args.dir, "directory of .pb files")->required();
    batch_cmd->add_option("--rules", batch_args.rules, "comma list of rule specs");
    batch_cmd->add_option("--out", batch_args.out_dir, "output directory")->required();
    batch_cmd->add_option("--phi-grid", batch_args.phi_grid, "comma list or start:step:end");
    batch_cmd->add_option("--samples", batch_args.samples, "samples per phi");
    batch_cmd->add_option("--seed", batch_args.seed, "master seed");
    batch_cmd->add_flag("--serial", batch_args.serial, "single-threaded kernels");
    batch_cmd->add_option("--time-cap", batch_args.time_cap,
                          "per-(instance, rule) cutoff in seconds for the initial outcome; "
                          "0 disables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (outcome_cmd->parsed()) return cmd_outcome(outcome_args);
        if (robust_cmd->parsed()) return cmd_robust(robust_args);
        if (bribery_cmd->parsed()) return cmd_bribery(bribery_args);
        if (batch_cmd->parsed()) return cmd_batch(batch_args);
    } catch (const pb::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const GuardError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
