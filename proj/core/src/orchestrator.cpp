#include "council/orchestrator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "council/parallel.hpp"

namespace council {

using nlohmann::json;

std::string_view decided_by_name(FinalAnswer::DecidedBy d) {
    return d == FinalAnswer::DecidedBy::consensus ? "consensus" : "terminal_policy";
}

std::string TraceEvent::to_line() const {
    json line = {
        {"timestamp", timestamp},
        {"session", session_id},
        {"kind", kind},
        {"payload", payload},
    };
    return line.dump();
}

std::string transcript_to_jsonl(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const auto& ev : events) {
        out += ev.to_line();
        out += '\n';
    }
    return out;
}

std::vector<AgentRuntime> label_team(std::vector<AgentRuntime> team) {
    for (std::size_t i = 0; i < team.size(); ++i) {
        team[i].label = "Agent " + std::to_string(i + 1);
    }
    return team;
}

namespace {

struct Session {
    const QaTask& task;
    const RunConfig& config;
    SimilarityScorer& scorer;
    bool collect_events;

    SessionResult result;
    std::vector<AgentRuntime> team;    // full team, session labels assigned
    std::vector<AgentRuntime> active;  // shrinks through elimination and transport death
    std::set<std::string> transport_dead;
    std::map<std::string, int> cumulative_totals;           // over all judged rounds
    std::map<std::string, Option> latest_valid_answer;      // most recent parseable answer
    std::vector<std::string> history_rendered;              // one digest per completed reflection

    void emit(const char* kind, json payload) {
        if (!collect_events) return;
        TraceEvent ev;
        ev.timestamp = static_cast<int>(result.events.size());
        ev.session_id = task.task_id;
        ev.kind = kind;
        ev.payload = std::move(payload);
        result.events.push_back(std::move(ev));
    }

    std::optional<double> accuracy_of(const std::string& agent_id) const {
        for (const auto& a : team) {
            if (a.profile.agent_id == agent_id) return a.profile.selection_accuracy;
        }
        return std::nullopt;
    }

    void drop_agent(const std::string& agent_id) {
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](const AgentRuntime& a) {
                                        return a.profile.agent_id == agent_id;
                                    }),
                     active.end());
    }

    void fail_session(const std::string& message) {
        result.session_error = true;
        result.error = message;
        emit("error", {{"fatal", true}, {"message", message}});
    }

    // Ranks candidate ids for a terminal pick: highest cumulative judge total,
    // then higher selection accuracy, then agent id.
    std::vector<std::string> rank_candidates(const std::vector<AgentRuntime>& candidates) const {
        std::vector<std::string> ids;
        for (const auto& a : candidates) ids.push_back(a.profile.agent_id);
        std::sort(ids.begin(), ids.end(), [&](const std::string& x, const std::string& y) {
            int tx = cumulative_totals.count(x) ? cumulative_totals.at(x) : 0;
            int ty = cumulative_totals.count(y) ? cumulative_totals.at(y) : 0;
            if (tx != ty) return tx > ty;
            double ax = accuracy_of(x).value_or(0.0);
            double ay = accuracy_of(y).value_or(0.0);
            if (ax != ay) return ax > ay;
            return x < y;
        });
        return ids;
    }

    std::string joined_history() const {
        std::string out;
        for (const auto& h : history_rendered) {
            if (!out.empty()) out += '\n';
            out += h;
        }
        return out;
    }
};

json frames_payload(const PerceptionOutcome& outcome) {
    json p = {
        {"mode", outcome.mode == PerceptionOutcome::Mode::whole_video ? "whole_video" : "retrieved"},
        {"origin", frame_origin_string(outcome.frames.origin)},
        {"frame_count", outcome.frames.indices.size()},
        {"indices", outcome.frames.indices},
        {"decided_watch_whole", outcome.decided_watch_whole},
    };
    if (outcome.key_info) p["key_info"] = *outcome.key_info;
    if (outcome.selected_chunks) p["selected_chunks"] = *outcome.selected_chunks;
    if (outcome.chunk_scores) {
        json totals = json::array();
        for (const auto& s : *outcome.chunk_scores) totals.push_back(s.total);
        p["chunk_totals"] = totals;
    }
    return p;
}

}  // namespace

SessionResult run_question(const QaTask& task, const std::vector<AgentRuntime>& team_in,
                           SimilarityScorer& scorer, const RunConfig& config,
                           bool collect_events) {
    Session s{task, config, scorer, collect_events, {}, {}, {}, {}, {}, {}, {}};
    s.team = team_in;
    for (std::size_t i = 0; i < s.team.size(); ++i) {
        if (s.team[i].label.empty()) s.team[i].label = "Agent " + std::to_string(i + 1);
    }
    s.active = s.team;
    if (s.active.empty()) {
        s.fail_session("empty team");
        return std::move(s.result);
    }

    std::optional<std::string> history_text;

    auto finalize_consensus = [&](Option answer, int round) {
        FinalAnswer final;
        final.answer = answer;
        final.decided_by = FinalAnswer::DecidedBy::consensus;
        final.round_decided = round;
        s.result.final = final;
        s.emit("finalize", {{"round", round},
                            {"answer", option_string(answer)},
                            {"decided_by", "consensus"}});
    };

    auto finalize_terminal = [&](int round) {
        // Candidate pool per policy: the dynamic policy ranks the survivors;
        // the static policies rank the full team (they never eliminate).
        // Agents lost to transport are out either way.
        std::vector<AgentRuntime> candidates;
        const auto& pool =
            config.terminal_policy == TerminalPolicy::dynamic ? s.active : s.team;
        for (const auto& a : pool) {
            if (s.transport_dead.count(a.profile.agent_id) == 0) candidates.push_back(a);
        }
        if (candidates.empty()) {
            s.fail_session("no live agents at terminal decision");
            return;
        }

        std::string chosen_agent;
        std::optional<Option> answer;
        std::string basis;

        if (config.terminal_policy == TerminalPolicy::decide_by_agent) {
            // The agent that did best in selection referees with everything on
            // the table: its frames, the question, and the full history.
            const AgentRuntime* referee = nullptr;
            for (const auto& a : candidates) {
                if (!referee ||
                    a.profile.selection_accuracy.value_or(0.0) >
                        referee->profile.selection_accuracy.value_or(0.0)) {
                    referee = &a;
                }
            }
            try {
                AgentRequest req;
                req.kind = RequestKind::final_answer;
                req.task = &task;
                FrameSet frames = global_sample(task.video, config.perception.global_sample_size);
                req.frames = frames;
                req.bindings = standard_bindings(task, frames, config.subtitles);
                req.bindings["History"] = s.joined_history();
                req.round = config.max_rounds + 1;
                req.seed = request_seed(config.seed, task.task_id, referee->profile.agent_id,
                                        RequestKind::final_answer, req.round);
                std::string raw = referee->backend->invoke(referee->profile, req);
                answer = parse_answer_letter(raw);
                chosen_agent = referee->profile.agent_id;
                basis = "referee";
            } catch (const FixtureMissError&) {
                throw;
            } catch (const BackendError& e) {
                s.result.backend_failures = true;
                s.emit("error", {{"agent", referee->profile.agent_id},
                                 {"message", std::string(e.what())}});
            }
        }

        if (!answer) {
            // Highest cumulative judge total wins; fall through ranked
            // candidates until one has a parseable answer on record.
            for (const auto& id : s.rank_candidates(candidates)) {
                auto it = s.latest_valid_answer.find(id);
                if (it != s.latest_valid_answer.end()) {
                    chosen_agent = id;
                    answer = it->second;
                    basis = basis == "referee" ? "referee_fallback" : "best_total";
                    break;
                }
            }
        }
        if (!answer) {
            s.fail_session("no agent produced a parseable answer");
            return;
        }

        FinalAnswer final;
        final.answer = *answer;
        final.decided_by = FinalAnswer::DecidedBy::terminal_policy;
        final.round_decided = round;
        s.result.final = final;
        s.emit("finalize", {{"round", round},
                            {"answer", option_string(*answer)},
                            {"decided_by", "terminal_policy"},
                            {"policy", std::string(terminal_policy_name(config.terminal_policy))},
                            {"basis", basis},
                            {"agent", chosen_agent}});
    };

    for (int round = 1; round <= config.max_rounds; ++round) {
        s.result.rounds_run = round;

        // --- Perception: fan out per agent, synchronize, log in agent order.
        std::vector<std::optional<PerceptionOutcome>> outcomes(s.active.size());
        std::vector<std::string> perceive_errors(s.active.size());
        std::vector<bool> perceive_dead(s.active.size(), false);
        parallel_for_indexed(s.active.size(), config.parallel_agents, [&](std::size_t i) {
            try {
                outcomes[i] = perceive(s.active[i].profile, *s.active[i].backend, task, round,
                                       history_text, scorer, config.perception, config.subtitles,
                                       config.seed);
            } catch (const FixtureMissError&) {
                throw;
            } catch (const TransportExhausted& e) {
                perceive_errors[i] = e.what();
                perceive_dead[i] = true;
            } catch (const std::exception& e) {
                perceive_errors[i] = e.what();
            }
        });

        std::vector<AgentRuntime> live;
        std::vector<std::optional<PerceptionOutcome>> live_outcomes;
        for (std::size_t i = 0; i < s.active.size(); ++i) {
            const auto& agent = s.active[i];
            if (outcomes[i]) {
                s.result.total_sampled_frames +=
                    static_cast<long>(outcomes[i]->frames.indices.size());
                json p = frames_payload(*outcomes[i]);
                p["agent"] = agent.profile.agent_id;
                p["label"] = agent.label;
                p["round"] = round;
                s.emit("perceive", std::move(p));
            } else {
                s.result.backend_failures = true;
                s.emit("error", {{"agent", agent.profile.agent_id},
                                 {"round", round},
                                 {"message", perceive_errors[i]},
                                 {"dropped", perceive_dead[i]}});
            }
            if (perceive_dead[i]) {
                s.transport_dead.insert(agent.profile.agent_id);
            } else {
                live.push_back(agent);
                live_outcomes.push_back(std::move(outcomes[i]));
            }
        }
        s.active = std::move(live);
        if (s.active.empty()) {
            s.fail_session("every agent failed during perception");
            return std::move(s.result);
        }

        // --- Action: answers and reasons, then the consensus check.
        std::vector<std::string> dead_in_answers;
        AnswerSet answers = collect_answers(s.active, live_outcomes, task, round, config.subtitles,
                                            config.seed, config.parallel_agents, &dead_in_answers);
        RoundRecord record;
        record.round = round;
        record.replies = answers.replies;
        for (std::size_t i = 0; i < s.active.size(); ++i) {
            const AgentReply& reply = answers.replies[i];
            if (reply.backend_failed) s.result.backend_failures = true;
            if (reply.answer) s.latest_valid_answer[reply.agent_id] = *reply.answer;
            json p = {
                {"agent", reply.agent_id},
                {"label", s.active[i].label},
                {"round", round},
                {"answer", answer_string(reply.answer)},
                {"reason", reply.reason},
                {"raw", reply.raw_text},
            };
            if (reply.backend_failed) p["failure"] = reply.failure_note;
            s.emit("answer", std::move(p));
        }

        // Agents whose transport budget ran out leave the committee now; their
        // invalid replies stay on record for this round.
        if (!dead_in_answers.empty()) {
            std::vector<AgentRuntime> survivors;
            std::vector<AgentReply> surviving_replies;
            for (std::size_t i = 0; i < s.active.size(); ++i) {
                if (std::find(dead_in_answers.begin(), dead_in_answers.end(),
                              s.active[i].profile.agent_id) != dead_in_answers.end()) {
                    s.transport_dead.insert(s.active[i].profile.agent_id);
                } else {
                    survivors.push_back(s.active[i]);
                    surviving_replies.push_back(answers.replies[i]);
                }
            }
            s.active = std::move(survivors);
            answers.replies = std::move(surviving_replies);
        }
        if (s.active.empty()) {
            s.result.rounds.push_back(std::move(record));
            s.fail_session("every agent failed while answering");
            return std::move(s.result);
        }

        if (s.active.size() == 1) {
            // A committee of one cannot hold a vote; the terminal policy
            // settles it at this round.
            s.result.rounds.push_back(std::move(record));
            finalize_terminal(round);
            return std::move(s.result);
        }

        std::optional<Option> consensus = check_consensus(answers);
        {
            json votes = json::object();
            for (const auto& reply : answers.replies) {
                std::string k = answer_string(reply.answer);
                votes[k] = votes.value(k, 0) + 1;
            }
            s.emit("consensus", {{"round", round},
                                 {"votes", votes},
                                 {"result", consensus ? json(option_string(*consensus)) : json()}});
        }
        if (consensus) {
            s.result.rounds.push_back(std::move(record));
            finalize_consensus(*consensus, round);
            return std::move(s.result);
        }
        if (round == config.max_rounds) {
            s.result.rounds.push_back(std::move(record));
            finalize_terminal(round);
            return std::move(s.result);
        }

        // --- Reflection: every agent judges every answer; the lowest total
        // leaves (under the dynamic policy) and the round is digested.
        std::vector<std::string> dead_in_judging;
        ScoreMatrix matrix = judge_round(s.active, task, answers, round, config.seed,
                                         config.parallel_agents, &dead_in_judging);
        for (std::size_t j = 0; j < matrix.failed_row.size(); ++j) {
            if (matrix.failed_row[j]) s.result.backend_failures = true;
        }

        std::vector<std::optional<double>> accuracies;
        for (const auto& a : s.active) accuracies.push_back(a.profile.selection_accuracy);
        EliminationResult elimination = eliminate_lowest(matrix, accuracies);
        for (std::size_t i = 0; i < matrix.agent_ids.size(); ++i) {
            s.cumulative_totals[matrix.agent_ids[i]] += elimination.totals[i];
        }

        std::optional<std::size_t> eliminated_index;
        if (policy_eliminates(config.terminal_policy)) {
            eliminated_index = elimination.eliminated_index;
        }
        HistoryDigest digest =
            summarize_history(round, s.active, answers, elimination.totals, eliminated_index);

        s.emit("judge", {{"round", round},
                         {"agents", matrix.agent_ids},
                         {"labels", matrix.labels},
                         {"rows", matrix.rows},
                         {"neutral_rows", matrix.neutral_row},
                         {"totals", elimination.totals},
                         {"digest", digest.rendered}});

        record.totals = elimination.totals;
        if (eliminated_index) {
            const std::string removed_id = matrix.agent_ids[*eliminated_index];
            record.removed_agent_id = removed_id;
            s.emit("eliminate", {{"round", round},
                                 {"agent", removed_id},
                                 {"label", matrix.labels[*eliminated_index]},
                                 {"totals", elimination.totals}});
            s.drop_agent(removed_id);
        }
        s.result.rounds.push_back(std::move(record));

        for (const auto& id : dead_in_judging) {
            s.transport_dead.insert(id);
            s.drop_agent(id);
        }
        if (s.active.empty()) {
            s.fail_session("every agent failed while judging");
            return std::move(s.result);
        }
        history_text = digest.rendered;
        s.history_rendered.push_back(digest.rendered);
    }

    // Unreachable: the final round always finalizes above.
    s.fail_session("round loop ended without a decision");
    return std::move(s.result);
}

}  // namespace council
