// Command-line entry point: team selection, protocol runs, evaluation,
// simulation, corpus preparation, and prompt-template goldens.
//
// Exit codes: 0 clean, 1 usage error, 2 data/config error, 3 backend failures
// occurred during sessions.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "council/config.hpp"
#include "council/harness.hpp"
#include "council/longvr.hpp"
#include "council/orchestrator.hpp"
#include "council/selection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace council;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            if (!current.empty()) out.push_back(current);
            current.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            current += c;
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

RunConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return load_run_config(path);
}

// Team members in the requested order, with selection accuracies applied when
// the team file carries them.
std::vector<AgentRuntime> resolve_team(AgentLibrary& library, const std::string& team_file,
                                       const std::string& team_ids_csv) {
    std::vector<std::string> ids;
    std::map<std::string, double> accuracies;
    if (!team_file.empty()) {
        json report = json::parse(read_file(team_file), nullptr, false);
        if (report.is_discarded() || !report.contains("team")) {
            throw DataError(team_file + ": not a team file (missing 'team')");
        }
        for (const auto& id : report["team"]) ids.push_back(id.get<std::string>());
        if (report.contains("accuracies")) {
            for (auto it = report["accuracies"].begin(); it != report["accuracies"].end(); ++it) {
                accuracies[it.key()] = it.value().get<double>();
            }
        }
    } else {
        ids = split_csv(team_ids_csv);
    }
    if (ids.empty()) throw DataError("no team given (use --team or --team-ids)");

    std::vector<AgentRuntime> team;
    for (const auto& id : ids) {
        const AgentProfile* profile = library.find(id);
        if (!profile) throw DataError("agent '" + id + "' is not in the agent library");
        AgentRuntime runtime;
        runtime.profile = *profile;
        auto acc = accuracies.find(id);
        if (acc != accuracies.end()) runtime.profile.selection_accuracy = acc->second;
        runtime.backend = library.backend_for(runtime.profile);
        if (!runtime.backend) throw DataError("no backend for agent '" + id + "'");
        team.push_back(std::move(runtime));
    }
    return label_team(std::move(team));
}

bool team_has_remote(const std::vector<AgentRuntime>& team) {
    for (const auto& a : team) {
        if (a.profile.backend_kind == BackendKind::remote) return true;
    }
    return false;
}

void apply_determinism_mode(RunConfig& config, const std::string& mode,
                            const std::vector<AgentRuntime>& team) {
    if (mode == "on") {
        config.deterministic = true;
    } else if (mode == "off") {
        config.deterministic = false;
    } else {
        config.deterministic = !team_has_remote(team);
    }
}

SessionObserver transcript_writer(const std::string& dir) {
    if (dir.empty()) return {};
    fs::create_directories(dir);
    return [dir](const QaTask& task, const SessionResult& session) {
        write_file((fs::path(dir) / ("session-" + task.task_id + ".jsonl")).string(),
                   transcript_to_jsonl(session.events));
    };
}

json selection_report_json(const SelectionReport& report) {
    json labels = json::object();
    for (const auto& [task_id, label] : report.pseudo_labels) {
        labels[task_id] = {{"label", option_string(label.label)}, {"tie", label.tie}};
    }
    return json{
        {"subset",
         {{"task_ids", report.subset.task_ids},
          {"seed", report.subset.seed},
          {"requested_size", report.subset.requested_size},
          {"clamped", report.subset.clamped}}},
        {"accuracies", report.accuracies},
        {"pseudo_labels", labels},
        {"team", report.team},
    };
}

int cmd_select(const std::string& manifest_path, const std::string& agents_path,
               const std::string& config_path, int subset_size, std::uint64_t seed, int team_size,
               const std::string& out_path, int parallel_agents) {
    RunConfig config = load_config_or_default(config_path);
    if (parallel_agents > 0) config.parallel_agents = parallel_agents;

    std::vector<QaTask> tasks = load_manifest(manifest_path);
    std::vector<std::string> ids;
    for (const auto& t : tasks) ids.push_back(t.task_id);
    SelectionSubset subset = sample_subset(ids, subset_size, seed);
    if (subset.clamped) {
        std::cerr << "note: subset size " << subset_size << " exceeds dataset size " << ids.size()
                  << "; using the whole dataset\n";
    }

    std::vector<QaTask> subset_tasks;
    for (const auto& t : tasks) {
        if (std::find(subset.task_ids.begin(), subset.task_ids.end(), t.task_id) !=
            subset.task_ids.end()) {
            subset_tasks.push_back(t);
        }
    }

    AgentLibrary library = AgentLibrary::load(agents_path);
    library.apply_retry_defaults(config.retry_attempts, config.retry_backoff_ms);
    std::vector<SelectionAgent> agents;
    for (const auto& profile : library.profiles()) {
        agents.push_back({profile, library.backend_for(profile)});
    }

    auto scorer = make_scorer(config.scorer);
    AnswerTable table = gather_selection_answers(agents, subset_tasks, *scorer, config.perception,
                                                 config.subtitles, config.seed,
                                                 config.parallel_agents);
    SelectionReport report = rank_agents(table, subset, team_size);

    if (!out_path.empty()) write_file(out_path, selection_report_json(report).dump(2) + "\n");
    std::cout << "team:";
    for (const auto& id : report.team) std::cout << " " << id;
    std::cout << "\n";
    for (const auto& [id, acc] : report.accuracies) {
        std::cout << "  " << id << ": " << acc << "\n";
    }
    for (const auto& [id, failures] : table.backend_failures) {
        std::cerr << "warning: agent " << id << " failed on " << failures << " of "
                  << subset_tasks.size() << " subset calls\n";
    }
    return table.backend_failures.empty() ? kExitClean : kExitBackend;
}

int cmd_eval(const std::string& manifest_path, const std::string& agents_path,
             const std::string& team_file, const std::string& team_ids,
             const std::string& config_path, const std::string& transcripts_dir,
             const std::string& out_path, const std::string& subtitles_mode,
             const std::string& deterministic_mode, int parallel_sessions, int parallel_agents,
             const std::vector<std::string>& only_tasks, bool print_finals) {
    RunConfig config = load_config_or_default(config_path);
    if (subtitles_mode == "off") config.subtitles = false;
    if (subtitles_mode == "on") config.subtitles = true;
    if (parallel_sessions > 0) config.parallel_sessions = parallel_sessions;
    if (parallel_agents > 0) config.parallel_agents = parallel_agents;

    std::vector<QaTask> tasks = load_manifest(manifest_path);
    if (!only_tasks.empty()) {
        std::vector<QaTask> filtered;
        for (const auto& t : tasks) {
            if (std::find(only_tasks.begin(), only_tasks.end(), t.task_id) != only_tasks.end()) {
                filtered.push_back(t);
            }
        }
        if (filtered.empty()) throw DataError("no manifest task matches --task");
        tasks = std::move(filtered);
    }

    AgentLibrary library = AgentLibrary::load(agents_path);
    library.apply_retry_defaults(config.retry_attempts, config.retry_backoff_ms);
    std::vector<AgentRuntime> team = resolve_team(library, team_file, team_ids);
    apply_determinism_mode(config, deterministic_mode, team);

    auto scorer = make_scorer(config.scorer);
    EvalReport report = evaluate(tasks, team, *scorer, config, transcript_writer(transcripts_dir));

    if (!out_path.empty()) write_file(out_path, report.to_json().dump(2) + "\n");
    if (print_finals) {
        for (const auto& t : report.tasks) {
            std::cout << t.task_id << ": "
                      << (t.final ? option_string(t.final->answer) : std::string("<error>"));
            if (t.final) {
                std::cout << " (" << decided_by_name(t.final->decided_by) << ", round "
                          << t.final->round_decided << ")";
            }
            std::cout << "\n";
        }
    }
    std::cout << report.human_table();
    return report.sessions_with_failures > 0 ? kExitBackend : kExitClean;
}

int cmd_simulate(const std::string& accuracies_csv, int trials, std::uint64_t seed,
                 const std::string& judge, int max_rounds, const std::string& policy,
                 double watch_prob, const std::string& out_path, int parallel_sessions) {
    SimSpec spec;
    for (const auto& p : split_csv(accuracies_csv)) {
        try {
            spec.accuracies.push_back(std::stod(p));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--agents", "'" + p + "' is not a probability");
        }
    }
    spec.trials = trials;
    spec.seed = seed;
    spec.watch_whole_prob = watch_prob;
    if (judge == "oracle") {
        spec.judge_mode = JudgeMode::oracle;
    } else if (judge == "noisy") {
        spec.judge_mode = JudgeMode::banded;
    } else {
        throw CLI::ValidationError("--judge", "must be 'oracle' or 'noisy'");
    }
    if (max_rounds > 0) spec.config.max_rounds = max_rounds;
    if (!policy.empty()) {
        auto parsed = terminal_policy_from_string(policy);
        if (!parsed) throw CLI::ValidationError("--policy", "unknown policy '" + policy + "'");
        spec.config.terminal_policy = *parsed;
    }
    if (parallel_sessions > 0) spec.config.parallel_sessions = parallel_sessions;
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw CLI::ValidationError("simulate", e.what());
    }

    SimReport report = simulate(spec);
    if (!out_path.empty()) write_file(out_path, report.to_json().dump(2) + "\n");
    std::cout << report.human_table();
    return kExitClean;
}

int cmd_longvr(const std::vector<std::string>& inputs, const std::string& out_corpus,
               const std::string& out_stats, int min_tokens, double min_duration,
               double max_duration, const std::string& rewriter_kind,
               const std::string& rewriter_fixtures, const std::string& exclude_path) {
    std::vector<ClipRecord> clips;
    for (const auto& spec : inputs) {
        auto eq = spec.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--input", "expected <source>=<path>, got '" + spec + "'");
        }
        auto loaded = load_clip_listing(spec.substr(eq + 1), spec.substr(0, eq));
        clips.insert(clips.end(), loaded.begin(), loaded.end());
    }

    if (!exclude_path.empty()) {
        std::set<std::string> excluded;
        std::istringstream in(read_file(exclude_path));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) excluded.insert(line);
        }
        int n = apply_exclusions(clips, excluded);
        std::cout << "excluded " << n << " manually screened clip(s)\n";
    }

    std::unique_ptr<CaptionRewriter> rewriter;
    if (rewriter_kind == "identity") {
        rewriter = std::make_unique<IdentityRewriter>();
    } else if (rewriter_kind == "scripted") {
        if (rewriter_fixtures.empty()) {
            throw CLI::ValidationError("--rewriter-fixtures", "required for the scripted rewriter");
        }
        auto scripted = std::make_unique<ScriptedRewriter>();
        std::istringstream in(read_file(rewriter_fixtures));
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json record = json::parse(line, nullptr, false);
            if (record.is_discarded() || !record.contains("clip_id") ||
                !record.contains("caption")) {
                throw DataError(rewriter_fixtures + ":" + std::to_string(line_no) +
                                ": expected {\"clip_id\":..,\"caption\":..}");
            }
            scripted->set(record["clip_id"].get<std::string>(),
                          record["caption"].get<std::string>());
        }
        rewriter = std::move(scripted);
    } else {
        throw CLI::ValidationError("--rewriter", "must be 'identity' or 'scripted'");
    }

    process_corpus(clips, *rewriter, min_tokens, DurationBounds{min_duration, max_duration});
    CorpusStats stats = corpus_stats(clips);

    if (!out_corpus.empty()) write_file(out_corpus, clips_to_jsonl(clips, true));
    if (!out_stats.empty()) write_file(out_stats, stats_to_json(stats) + "\n");
    std::cout << stats_to_json(stats) << "\n";
    return kExitClean;
}

int cmd_render_prompts(const std::string& golden_dir, bool quiet) {
    bool all_match = true;
    for (PromptKind kind : all_prompt_kinds()) {
        std::string name(prompt_kind_name(kind));
        std::string text(template_text(kind));
        if (!quiet) {
            std::cout << "===== " << name << " =====\n" << text << "\n";
        }
        fs::path golden = fs::path(golden_dir) / (name + ".txt");
        std::string status;
        if (!fs::exists(golden)) {
            status = "MISSING GOLDEN";
            all_match = false;
        } else if (read_file(golden.string()) != text) {
            status = "MISMATCH";
            all_match = false;
        } else {
            status = "OK";
        }
        std::cout << "[" << status << "] " << name << " (" << golden.string() << ")\n";
    }
    return all_match ? kExitClean : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-round committee protocol over pluggable vision-language agents"};
    app.require_subcommand(1);

    // --- select
    auto* select = app.add_subcommand("select", "Rank library agents by pseudo-label voting");
    std::string sel_manifest, sel_agents, sel_config, sel_out;
    int sel_subset = 150, sel_team = 3, sel_parallel = 0;
    std::uint64_t sel_seed = 0;
    select->add_option("--manifest", sel_manifest, "Task manifest (JSONL)")->required();
    select->add_option("--agents", sel_agents, "Agent library config (JSON)")->required();
    select->add_option("--config", sel_config, "Run config (JSON)");
    select->add_option("--subset-size", sel_subset, "Unlabeled subset size")->capture_default_str();
    select->add_option("--seed", sel_seed, "Subset sampling seed")->capture_default_str();
    select->add_option("--team-size", sel_team, "Team size k")->capture_default_str();
    select->add_option("--out", sel_out, "Where to write the selection report");
    select->add_option("--parallel-agents", sel_parallel, "Concurrent backend calls");

    // --- eval / run
    std::string ev_manifest, ev_agents, ev_team, ev_team_ids, ev_config, ev_transcripts, ev_out;
    std::string ev_subtitles = "on", ev_deterministic = "auto";
    int ev_parallel_sessions = 0, ev_parallel_agents = 0;
    std::vector<std::string> run_tasks;

    auto add_eval_options = [&](CLI::App* cmd) {
        cmd->add_option("--manifest", ev_manifest, "Task manifest (JSONL)")->required();
        cmd->add_option("--agents", ev_agents, "Agent library config (JSON)")->required();
        cmd->add_option("--team", ev_team, "Team file from select");
        cmd->add_option("--team-ids", ev_team_ids, "Comma-separated agent ids");
        cmd->add_option("--config", ev_config, "Run config (JSON)");
        cmd->add_option("--transcripts-dir", ev_transcripts,
                        "Directory for per-session transcripts");
        cmd->add_option("--out", ev_out, "Where to write the evaluation report");
        cmd->add_option("--subtitles", ev_subtitles, "on|off")->capture_default_str();
        cmd->add_option("--deterministic", ev_deterministic, "auto|on|off")->capture_default_str();
        cmd->add_option("--parallel-sessions", ev_parallel_sessions, "Concurrent sessions");
        cmd->add_option("--parallel-agents", ev_parallel_agents,
                        "Concurrent per-round agent calls");
    };
    auto* eval = app.add_subcommand("eval", "Run the protocol over a manifest and grade it");
    add_eval_options(eval);

    auto* run = app.add_subcommand("run", "Run sessions and print per-task final answers");
    add_eval_options(run);
    run->add_option("--task", run_tasks, "Restrict to specific task id(s)");

    // --- simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo protocol simulation");
    std::string sim_agents = "0.7,0.7,0.7", sim_judge = "noisy", sim_policy, sim_out;
    int sim_trials = 10000, sim_rounds = 0, sim_parallel = 0;
    std::uint64_t sim_seed = 0;
    double sim_watch = 0.2;
    simulate_cmd->add_option("--agents", sim_agents, "Per-agent accuracies, e.g. 0.7,0.7,0.7")
        ->capture_default_str();
    simulate_cmd->add_option("--trials", sim_trials, "Number of synthetic questions")
        ->capture_default_str();
    simulate_cmd->add_option("--seed", sim_seed, "Simulation seed")->capture_default_str();
    simulate_cmd->add_option("--judge", sim_judge, "oracle|noisy")->capture_default_str();
    simulate_cmd->add_option("--max-rounds", sim_rounds, "Round cap override");
    simulate_cmd->add_option("--policy", sim_policy, "dynamic|best_score|decide_by_agent");
    simulate_cmd->add_option("--watch-prob", sim_watch, "P(agent watches the whole video)")
        ->capture_default_str();
    simulate_cmd->add_option("--out", sim_out, "Where to write the simulation report");
    simulate_cmd->add_option("--parallel-sessions", sim_parallel, "Concurrent sessions");

    // --- longvr-prep
    auto* longvr = app.add_subcommand("longvr-prep", "Prepare the retrieval fine-tuning corpus");
    std::vector<std::string> lv_inputs;
    std::string lv_corpus, lv_stats, lv_rewriter = "identity", lv_rewriter_fixtures, lv_exclude;
    int lv_min_tokens = 20;
    double lv_min_dur = 5.0, lv_max_dur = 720.0;
    longvr->add_option("--input", lv_inputs, "Clip listing as <source>=<path> (repeatable)")
        ->required();
    longvr->add_option("--out-corpus", lv_corpus, "Kept-corpus output (JSONL)");
    longvr->add_option("--out-stats", lv_stats, "Stats output (JSON)");
    longvr->add_option("--min-tokens", lv_min_tokens, "Minimum caption tokens")
        ->capture_default_str();
    longvr->add_option("--min-duration", lv_min_dur, "Minimum clip seconds")->capture_default_str();
    longvr->add_option("--max-duration", lv_max_dur, "Maximum clip seconds")->capture_default_str();
    longvr->add_option("--rewriter", lv_rewriter, "identity|scripted")->capture_default_str();
    longvr->add_option("--rewriter-fixtures", lv_rewriter_fixtures,
                       "Scripted rewriter fixture file (JSONL)");
    longvr->add_option("--exclude", lv_exclude, "Manually screened clip ids, one per line");

    // --- render-prompts
    auto* render = app.add_subcommand("render-prompts",
                                      "Emit every prompt template and check the goldens");
    std::string rp_golden = "templates";
    bool rp_quiet = false;
    render->add_option("--golden-dir", rp_golden, "Directory with golden template files")
        ->capture_default_str();
    render->add_flag("--quiet", rp_quiet, "Only print the per-template status lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitClean : kExitUsage;
    }

    try {
        if (select->parsed()) {
            return cmd_select(sel_manifest, sel_agents, sel_config, sel_subset, sel_seed, sel_team,
                              sel_out, sel_parallel);
        }
        if (eval->parsed() || run->parsed()) {
            return cmd_eval(ev_manifest, ev_agents, ev_team, ev_team_ids, ev_config, ev_transcripts,
                            ev_out, ev_subtitles, ev_deterministic, ev_parallel_sessions,
                            ev_parallel_agents, run_tasks, run->parsed());
        }
        if (simulate_cmd->parsed()) {
            return cmd_simulate(sim_agents, sim_trials, sim_seed, sim_judge, sim_rounds, sim_policy,
                                sim_watch, sim_out, sim_parallel);
        }
        if (longvr->parsed()) {
            return cmd_longvr(lv_inputs, lv_corpus, lv_stats, lv_min_tokens, lv_min_dur, lv_max_dur,
                              lv_rewriter, lv_rewriter_fixtures, lv_exclude);
        }
        if (render->parsed()) {
            return cmd_render_prompts(rp_golden, rp_quiet);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ManifestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const FixtureMissError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
