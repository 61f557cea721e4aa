#include "council/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "council/parallel.hpp"
#include "council/rng.hpp"
#include "council/stochastic_backend.hpp"

namespace council {

using nlohmann::json;

std::vector<QaTask> load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot open manifest: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest_text(buf.str(), path);
}

std::vector<QaTask> parse_manifest_text(const std::string& text, const std::string& origin) {
    std::vector<QaTask> tasks;
    std::vector<std::string> errors;
    std::set<std::string> seen_ids;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty()) continue;

        auto fail = [&](const std::string& message) {
            errors.push_back(origin + ":" + std::to_string(line_no) + ": " + message);
        };

        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            fail("malformed line (not a JSON object)");
            continue;
        }
        bool missing = false;
        for (const char* field : {"task_id", "video_id", "frame_count", "duration_s", "question",
                                  "options"}) {
            if (!record.contains(field)) {
                fail(std::string("missing field '") + field + "'");
                missing = true;
            }
        }
        if (missing) continue;

        QaTask task;
        try {
            task.task_id = record["task_id"].get<std::string>();
            task.video.video_id = record["video_id"].get<std::string>();
            task.video.frame_count = record["frame_count"].get<int>();
            task.video.duration_s = record["duration_s"].get<double>();
            task.video.frame_locator =
                record.value("frame_locator", std::string("frames/{video_id}/{index}.jpg"));
            task.question = record["question"].get<std::string>();
            if (!record["options"].is_object()) {
                fail("'options' must be an object keyed by option letters");
                continue;
            }
            for (auto it = record["options"].begin(); it != record["options"].end(); ++it) {
                if (it.key().size() != 1) {
                    fail("option key '" + it.key() + "' is not a single letter");
                    continue;
                }
                task.options.push_back({it.key()[0], it.value().get<std::string>()});
            }
            if (record.contains("subtitles")) {
                task.subtitles = record["subtitles"].get<std::string>();
            }
            if (record.contains("answer")) {
                std::string gold = record["answer"].get<std::string>();
                auto letter = gold.size() == 1 ? option_from_char(gold[0]) : std::nullopt;
                if (!letter) {
                    fail("answer '" + gold + "' is not one of A-D");
                    continue;
                }
                task.gold_answer = letter;
            }
        } catch (const json::exception& e) {
            fail(std::string("bad field type: ") + e.what());
            continue;
        }

        for (const auto& violation : validate_task(task)) fail(violation);
        if (!seen_ids.insert(task.task_id).second) fail("duplicate task_id '" + task.task_id + "'");
        tasks.push_back(std::move(task));
    }

    if (!errors.empty()) {
        std::string summary = origin + ": " + std::to_string(errors.size()) + " manifest error(s)";
        for (const auto& e : errors) summary += "\n  " + e;
        throw ManifestError(summary, errors);
    }
    return tasks;
}

json EvalReport::to_json() const {
    json out;
    json task_list = json::array();
    for (const auto& t : tasks) {
        json item = {
            {"task_id", t.task_id},
            {"session_error", t.session_error},
            {"backend_failures", t.backend_failures},
            {"frames", t.frames},
        };
        if (t.final) {
            item["answer"] = option_string(t.final->answer);
            item["decided_by"] = std::string(decided_by_name(t.final->decided_by));
            item["round"] = t.final->round_decided;
        }
        if (t.correct) item["correct"] = *t.correct;
        task_list.push_back(std::move(item));
    }
    out["tasks"] = std::move(task_list);
    if (accuracy) out["accuracy"] = *accuracy;
    out["graded"] = graded;
    out["correct"] = correct;
    out["round_histogram"] = round_histogram;
    out["session_errors"] = session_errors;
    out["sessions_with_failures"] = sessions_with_failures;
    out["avg_frames_per_session"] = avg_frames_per_session;
    out["avg_wall_ms_per_session"] = avg_wall_ms_per_session;
    return out;
}

std::string EvalReport::human_table() const {
    std::ostringstream out;
    out << "tasks: " << tasks.size() << "\n";
    if (accuracy) {
        out << "accuracy: " << correct << "/" << graded << " = " << *accuracy << "\n";
    } else {
        out << "accuracy: n/a (no gold answers)\n";
    }
    out << "decided at round:";
    for (std::size_t r = 0; r < round_histogram.size(); ++r) {
        out << "  r" << (r + 1) << "=" << round_histogram[r];
    }
    out << "\n";
    out << "avg frames/session: " << avg_frames_per_session << "\n";
    out << "sessions with failures: " << sessions_with_failures
        << ", session errors: " << session_errors << "\n";
    return out.str();
}

EvalReport evaluate(const std::vector<QaTask>& tasks, const std::vector<AgentRuntime>& team,
                    SimilarityScorer& scorer, const RunConfig& config,
                    const SessionObserver& observer) {
    if (tasks.empty()) throw std::invalid_argument("evaluate: no tasks");

    EvalReport report;
    report.tasks.resize(tasks.size());
    report.round_histogram.assign(static_cast<std::size_t>(config.max_rounds), 0);
    std::vector<SessionResult> results(tasks.size());

    parallel_for_indexed(tasks.size(), config.parallel_sessions, [&](std::size_t i) {
        auto start = std::chrono::steady_clock::now();
        results[i] = run_question(tasks[i], team, scorer, config, true);
        if (!config.deterministic) {
            auto elapsed = std::chrono::steady_clock::now() - start;
            report.tasks[i].wall_ms =
                std::chrono::duration<double, std::milli>(elapsed).count();
        }
    });

    long frame_total = 0;
    double wall_total = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const SessionResult& session = results[i];
        TaskOutcome& outcome = report.tasks[i];
        outcome.task_id = tasks[i].task_id;
        outcome.final = session.final;
        outcome.session_error = session.session_error;
        outcome.backend_failures = session.backend_failures;
        outcome.frames = session.total_sampled_frames;
        frame_total += session.total_sampled_frames;
        wall_total += outcome.wall_ms;

        if (tasks[i].gold_answer) {
            ++report.graded;
            bool ok = session.final && session.final->answer == *tasks[i].gold_answer;
            outcome.correct = ok;
            if (ok) ++report.correct;
        }
        if (session.final) {
            auto r = static_cast<std::size_t>(session.final->round_decided - 1);
            if (r < report.round_histogram.size()) ++report.round_histogram[r];
        }
        if (session.session_error) ++report.session_errors;
        if (session.backend_failures || session.session_error) ++report.sessions_with_failures;

        if (observer) observer(tasks[i], session);
    }
    if (report.graded > 0) {
        report.accuracy = static_cast<double>(report.correct) / report.graded;
    }
    report.avg_frames_per_session = static_cast<double>(frame_total) / tasks.size();
    report.avg_wall_ms_per_session = wall_total / static_cast<double>(tasks.size());
    return report;
}

void SimSpec::validate() const {
    if (accuracies.empty()) throw ConfigError("simulation needs at least one agent accuracy");
    for (double p : accuracies) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("agent accuracy " + std::to_string(p) + " is not in [0,1]");
        }
    }
    if (option_count != 4) throw ConfigError("the data model fixes option_count at 4");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (!(watch_whole_prob >= 0.0 && watch_whole_prob <= 1.0)) {
        throw ConfigError("watch_whole_prob must be in [0,1]");
    }
}

json SimReport::to_json() const {
    return json{
        {"trials", trials},
        {"round1_consensus_rate", round1_consensus_rate},
        {"round1_consensus_correct_rate", round1_consensus_correct_rate},
        {"round1_wrong_consensus_rate", round1_wrong_consensus_rate},
        {"final_accuracy", final_accuracy},
        {"eliminations", eliminations},
        {"eliminations_with_wrong_present", eliminations_with_wrong_present},
        {"eliminations_removed_wrong", eliminations_removed_wrong},
        {"elimination_correctness", elimination_correctness},
        {"stop_round_histogram", stop_round_histogram},
        {"session_errors", session_errors},
    };
}

std::string SimReport::human_table() const {
    std::ostringstream out;
    out << "trials: " << trials << "\n";
    out << "round-1 consensus rate: " << round1_consensus_rate
        << " (correct " << round1_consensus_correct_rate
        << ", wrong " << round1_wrong_consensus_rate << ")\n";
    out << "final accuracy: " << final_accuracy << "\n";
    out << "eliminations: " << eliminations << " (removed a wrong-answering agent in "
        << eliminations_removed_wrong << ", correctness " << elimination_correctness << ")\n";
    out << "stopped at round:";
    for (std::size_t r = 0; r < stop_round_histogram.size(); ++r) {
        out << "  r" << (r + 1) << "=" << stop_round_histogram[r];
    }
    out << "\n";
    return out.str();
}

QaTask make_synthetic_task(std::uint64_t seed, int index) {
    QaTask task;
    char id[32];
    std::snprintf(id, sizeof(id), "sim-%06d", index);
    task.task_id = id;
    task.video.video_id = task.task_id;
    task.video.frame_count = 480;
    task.video.duration_s = 480.0;
    task.video.frame_locator = "mem://{video_id}/{index}";
    task.question = "What happens in synthetic clip " + std::to_string(index) + "?";
    for (Option o : kAllOptions) {
        task.options.push_back({option_char(o), "Synthetic outcome " + option_string(o)});
    }
    SplitMix64 rng(derive_seed(seed, {"gold", task.task_id}));
    task.gold_answer = kAllOptions[rng.next_below(4)];
    return task;
}

SimReport simulate(const SimSpec& spec, const SessionObserver& observer) {
    spec.validate();

    StochasticParams params;
    params.watch_whole_prob = spec.watch_whole_prob;
    params.judge_mode = spec.judge_mode;
    StochasticBackend backend(params);

    std::vector<AgentRuntime> team;
    for (std::size_t i = 0; i < spec.accuracies.size(); ++i) {
        AgentProfile profile;
        profile.agent_id = "sim-a" + std::to_string(i + 1);
        profile.backend_kind = BackendKind::stochastic;
        profile.selection_accuracy = spec.accuracies[i];
        backend.set_accuracy(profile.agent_id, spec.accuracies[i]);
        team.push_back({std::move(profile), &backend, ""});
    }
    team = label_team(std::move(team));

    RunConfig config = spec.config;
    config.seed = spec.seed;
    config.deterministic = true;
    HashMockScorer scorer(derive_seed(spec.seed, {"sim-scorer"}));
    const bool collect_events = static_cast<bool>(observer);

    SimReport report;
    report.trials = spec.trials;
    report.stop_round_histogram.assign(static_cast<std::size_t>(config.max_rounds), 0);

    struct TrialStats {
        bool consensus_r1 = false;
        bool consensus_r1_correct = false;
        bool correct = false;
        int stop_round = 0;
        bool error = false;
        long eliminations = 0;
        long eliminations_with_wrong = 0;
        long eliminations_removed_wrong = 0;
    };
    std::vector<TrialStats> stats(static_cast<std::size_t>(spec.trials));
    std::mutex observer_mutex;

    parallel_for_indexed(static_cast<std::size_t>(spec.trials), config.parallel_sessions,
                         [&](std::size_t i) {
        QaTask task = make_synthetic_task(spec.seed, static_cast<int>(i));
        SessionResult session = run_question(task, team, scorer, config, collect_events);
        TrialStats& t = stats[i];
        const Option gold = *task.gold_answer;

        if (session.session_error || !session.final) {
            t.error = true;
        } else {
            t.correct = session.final->answer == gold;
            t.stop_round = session.final->round_decided;
            t.consensus_r1 = session.final->decided_by == FinalAnswer::DecidedBy::consensus &&
                             session.final->round_decided == 1;
            t.consensus_r1_correct = t.consensus_r1 && t.correct;
        }
        for (const auto& round : session.rounds) {
            if (!round.removed_agent_id) continue;
            ++t.eliminations;
            bool removed_wrong = false;
            bool wrong_present = false;
            for (const auto& reply : round.replies) {
                bool wrong = !reply.answer || *reply.answer != gold;
                if (wrong) wrong_present = true;
                if (wrong && reply.agent_id == *round.removed_agent_id) removed_wrong = true;
            }
            if (wrong_present) ++t.eliminations_with_wrong;
            if (removed_wrong) ++t.eliminations_removed_wrong;
        }
        if (observer) {
            std::lock_guard<std::mutex> lock(observer_mutex);
            observer(task, session);
        }
    });

    long consensus_r1 = 0, consensus_r1_correct = 0, correct = 0;
    for (const auto& t : stats) {
        if (t.error) {
            ++report.session_errors;
            continue;
        }
        if (t.consensus_r1) ++consensus_r1;
        if (t.consensus_r1_correct) ++consensus_r1_correct;
        if (t.correct) ++correct;
        auto r = static_cast<std::size_t>(t.stop_round - 1);
        if (r < report.stop_round_histogram.size()) ++report.stop_round_histogram[r];
        report.eliminations += t.eliminations;
        report.eliminations_with_wrong_present += t.eliminations_with_wrong;
        report.eliminations_removed_wrong += t.eliminations_removed_wrong;
    }
    auto n = static_cast<double>(spec.trials);
    report.round1_consensus_rate = static_cast<double>(consensus_r1) / n;
    report.round1_consensus_correct_rate = static_cast<double>(consensus_r1_correct) / n;
    report.round1_wrong_consensus_rate =
        static_cast<double>(consensus_r1 - consensus_r1_correct) / n;
    report.final_accuracy = static_cast<double>(correct) / n;
    report.elimination_correctness =
        report.eliminations == 0
            ? 0.0
            : static_cast<double>(report.eliminations_removed_wrong) /
                  static_cast<double>(report.eliminations);
    return report;
}

}  // namespace council
