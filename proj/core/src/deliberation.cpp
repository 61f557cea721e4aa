#include "council/deliberation.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include "council/parallel.hpp"

namespace council {

AnswerSet collect_answers(const std::vector<AgentRuntime>& active,
                          const std::vector<std::optional<PerceptionOutcome>>& outcomes,
                          const QaTask& task, int round, bool subtitles_on,
                          std::uint64_t master_seed, int parallel_agents,
                          std::vector<std::string>* transport_dead) {
    if (outcomes.size() != active.size()) {
        throw std::invalid_argument("collect_answers: one perception outcome per active agent");
    }
    AnswerSet out;
    out.replies.resize(active.size());
    std::mutex dead_mutex;

    parallel_for_indexed(active.size(), parallel_agents, [&](std::size_t i) {
        const AgentRuntime& agent = active[i];
        AgentReply reply;
        reply.agent_id = agent.profile.agent_id;
        if (!outcomes[i]) {
            reply.answer = std::nullopt;
            reply.backend_failed = true;
            reply.failure_note = "no perception outcome";
            out.replies[i] = std::move(reply);
            return;
        }
        try {
            AgentRequest ans;
            ans.kind = RequestKind::answer;
            ans.task = &task;
            ans.frames = outcomes[i]->frames;
            ans.bindings = standard_bindings(task, outcomes[i]->frames, subtitles_on);
            ans.round = round;
            ans.seed = request_seed(master_seed, task.task_id, agent.profile.agent_id,
                                    RequestKind::answer, round);
            reply.raw_text = agent.backend->invoke(agent.profile, ans);
            reply.answer = parse_answer_letter(reply.raw_text);

            AgentRequest why;
            why.kind = RequestKind::reason;
            why.task = &task;
            why.bindings = standard_bindings(task, std::nullopt, subtitles_on);
            why.bindings["Predict answer"] = answer_string(reply.answer);
            why.round = round;
            why.seed = request_seed(master_seed, task.task_id, agent.profile.agent_id,
                                    RequestKind::reason, round);
            reply.reason = agent.backend->invoke(agent.profile, why);
        } catch (const FixtureMissError&) {
            throw;
        } catch (const TransportExhausted& e) {
            reply.answer = std::nullopt;
            reply.backend_failed = true;
            reply.failure_note = e.what();
            if (transport_dead) {
                std::lock_guard<std::mutex> lock(dead_mutex);
                transport_dead->push_back(agent.profile.agent_id);
            }
        } catch (const BackendError& e) {
            reply.answer = std::nullopt;
            reply.backend_failed = true;
            reply.failure_note = e.what();
        }
        out.replies[i] = std::move(reply);
    });
    return out;
}

std::optional<Option> check_consensus(const AnswerSet& answers) {
    if (answers.replies.empty()) throw std::invalid_argument("check_consensus: no active agents");
    int counts[4] = {0, 0, 0, 0};
    for (const auto& reply : answers.replies) {
        if (reply.answer) ++counts[option_char(*reply.answer) - 'A'];
    }
    auto active = static_cast<int>(answers.replies.size());
    for (int i = 0; i < 4; ++i) {
        if (2 * counts[i] > active) return static_cast<Option>('A' + i);
    }
    return std::nullopt;
}

namespace {

std::vector<JudgeSubject> judge_subjects_for(const std::vector<AgentRuntime>& active,
                                             const AnswerSet& answers) {
    std::vector<JudgeSubject> subjects;
    subjects.reserve(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
        const AgentReply& reply = answers.replies[i];
        JudgeSubject s;
        s.label = active[i].label;
        s.answer = reply.answer;
        // Judges see the raw reply when no letter could be parsed from it.
        s.shown_answer = reply.answer ? option_string(*reply.answer) : reply.raw_text;
        s.reason = reply.reason;
        subjects.push_back(std::move(s));
    }
    return subjects;
}

}  // namespace

ScoreMatrix judge_round(const std::vector<AgentRuntime>& active, const QaTask& task,
                        const AnswerSet& answers, int round, std::uint64_t master_seed,
                        int parallel_agents, std::vector<std::string>* transport_dead) {
    if (active.size() < 2) throw std::invalid_argument("judge_round: needs at least two active agents");
    if (answers.replies.size() != active.size()) {
        throw std::invalid_argument("judge_round: one reply per active agent");
    }

    ScoreMatrix matrix;
    for (const auto& agent : active) {
        matrix.agent_ids.push_back(agent.profile.agent_id);
        matrix.labels.push_back(agent.label);
    }
    matrix.rows.assign(active.size(), std::vector<int>(active.size(), kNeutralJudgeScore));
    matrix.neutral_row.assign(active.size(), false);
    matrix.failed_row.assign(active.size(), false);

    const std::vector<JudgeSubject> subjects = judge_subjects_for(active, answers);
    std::mutex dead_mutex;

    parallel_for_indexed(active.size(), parallel_agents, [&](std::size_t j) {
        const AgentRuntime& judge = active[j];
        try {
            AgentRequest req;
            req.kind = RequestKind::judge;
            req.task = &task;
            req.bindings = {{"Question", task.question}, {"Reason", ""}};
            req.judge_subjects = subjects;
            req.round = round;
            req.seed = request_seed(master_seed, task.task_id, judge.profile.agent_id,
                                    RequestKind::judge, round);
            std::string raw = judge.backend->invoke(judge.profile, req);
            auto parsed = parse_judge_scores(raw, matrix.labels);
            if (parsed) {
                matrix.rows[j] = parsed->scores;
            } else {
                matrix.neutral_row[j] = true;
            }
        } catch (const FixtureMissError&) {
            throw;
        } catch (const TransportExhausted&) {
            matrix.neutral_row[j] = true;
            matrix.failed_row[j] = true;
            if (transport_dead) {
                std::lock_guard<std::mutex> lock(dead_mutex);
                transport_dead->push_back(judge.profile.agent_id);
            }
        } catch (const BackendError&) {
            matrix.neutral_row[j] = true;
            matrix.failed_row[j] = true;
        }
    });
    return matrix;
}

EliminationResult eliminate_lowest(const ScoreMatrix& matrix,
                                   const std::vector<std::optional<double>>& selection_accuracies) {
    std::size_t n = matrix.agent_ids.size();
    if (n < 2) throw std::invalid_argument("eliminate_lowest: needs at least two agents");
    if (selection_accuracies.size() != n) {
        throw std::invalid_argument("eliminate_lowest: one accuracy slot per agent");
    }

    EliminationResult result;
    result.totals.assign(n, 0);
    for (const auto& row : matrix.rows) {
        for (std::size_t i = 0; i < n; ++i) result.totals[i] += row[i];
    }

    auto accuracy = [&](std::size_t i) { return selection_accuracies[i].value_or(0.0); };
    std::size_t worst = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (result.totals[i] < result.totals[worst]) {
            worst = i;
        } else if (result.totals[i] == result.totals[worst]) {
            if (accuracy(i) < accuracy(worst) ||
                (accuracy(i) == accuracy(worst) && matrix.agent_ids[i] < matrix.agent_ids[worst])) {
                worst = i;
            }
        }
    }
    result.eliminated_index = worst;
    return result;
}

HistoryDigest summarize_history(int round, const std::vector<AgentRuntime>& active,
                                const AnswerSet& answers, const std::vector<int>& totals,
                                std::optional<std::size_t> eliminated_index) {
    HistoryDigest digest;
    digest.round = round;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (eliminated_index && *eliminated_index == i) continue;
        HistoryEntry entry;
        entry.label = active[i].label;
        entry.answer = answer_string(answers.replies[i].answer);
        entry.reason = answers.replies[i].reason;
        entry.score = totals[i];
        digest.survivors.push_back(std::move(entry));
    }
    if (eliminated_index) {
        const std::size_t i = *eliminated_index;
        RemovedEntry removed;
        removed.label = active[i].label;
        removed.answer = answer_string(answers.replies[i].answer);
        removed.reason = answers.replies[i].reason;
        digest.removed = std::move(removed);
    }
    digest.rendered = build_history_text(digest.survivors, digest.removed);
    return digest;
}

}  // namespace council
