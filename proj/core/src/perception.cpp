#include "council/perception.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json.hpp"

#include "council/remote_backend.hpp"
#include "council/rng.hpp"

namespace council {

using nlohmann::json;

namespace {

std::set<std::string> distinct_words(std::string_view text) {
    std::set<std::string> words;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            words.insert(current);
            current.clear();
        }
    }
    if (!current.empty()) words.insert(current);
    return words;
}

}  // namespace

double HashMockScorer::score(const FrameSet& frames, std::string_view text) {
    int chunk_index = frames.origin.kind == FrameOriginKind::chunk ? frames.origin.chunk_index : -1;
    std::uint64_t h = derive_seed(seed_, {frames.video_id, std::to_string(chunk_index), text});
    return SplitMix64(h).next_double();
}

void KeywordMockScorer::set_chunk_text(const std::string& video_id, int chunk_index,
                                       std::string text) {
    chunk_texts_[video_id + '\x1f' + std::to_string(chunk_index)] = std::move(text);
}

double KeywordMockScorer::score(const FrameSet& frames, std::string_view text) {
    int chunk_index = frames.origin.kind == FrameOriginKind::chunk ? frames.origin.chunk_index : -1;
    auto it = chunk_texts_.find(frames.video_id + '\x1f' + std::to_string(chunk_index));
    if (it == chunk_texts_.end()) return 0.0;
    auto chunk_words = distinct_words(it->second);
    auto query_words = distinct_words(text);
    if (query_words.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& w : query_words) {
        if (chunk_words.count(w) != 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(query_words.size());
}

RemoteScorer::RemoteScorer(std::string base_url, std::unique_ptr<HttpTransport> transport)
    : base_url_(std::move(base_url)),
      transport_(transport ? std::move(transport) : make_httplib_transport()) {}

RemoteScorer::~RemoteScorer() = default;

double RemoteScorer::score(const FrameSet& frames, std::string_view text) {
    json body = {
        {"video_id", frames.video_id},
        {"frame_indices", frames.indices},
        {"text", std::string(text)},
    };
    HttpResponse res = transport_->post(base_url_, "/score", body.dump(), {});
    if (res.status != 200) {
        throw std::runtime_error("scoring service returned " + std::to_string(res.status));
    }
    json parsed = json::parse(res.body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("score") || !parsed["score"].is_number()) {
        throw std::runtime_error("malformed scoring response: " + res.body.substr(0, 200));
    }
    return parsed["score"].get<double>();
}

FrameSet rough_sample(const VideoRef& video, int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    FrameSet out{video.video_id, sample_distinct_sorted(video.frame_count, n, rng),
                 FrameOrigin::rough()};
    return out;
}

FrameSet global_sample(const VideoRef& video, int n) {
    FrameSet out{video.video_id, {}, FrameOrigin::global()};
    if (video.frame_count <= n) {
        out.indices.resize(static_cast<std::size_t>(video.frame_count));
        for (int i = 0; i < video.frame_count; ++i) out.indices[static_cast<std::size_t>(i)] = i;
        return out;
    }
    std::vector<bool> taken(static_cast<std::size_t>(video.frame_count), false);
    for (int j = 0; j < n; ++j) {
        auto idx = static_cast<int>((static_cast<long long>(j) * video.frame_count) / n);
        if (!taken[static_cast<std::size_t>(idx)]) {
            taken[static_cast<std::size_t>(idx)] = true;
            out.indices.push_back(idx);
        }
    }
    // Pad from remaining indices if floor() ever collided (cannot happen when
    // frame_count > n, but keep the contract airtight).
    for (int idx = 0; static_cast<int>(out.indices.size()) < n && idx < video.frame_count; ++idx) {
        if (!taken[static_cast<std::size_t>(idx)]) {
            taken[static_cast<std::size_t>(idx)] = true;
            out.indices.push_back(idx);
        }
    }
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

std::vector<Chunk> make_chunks(const VideoRef& video, int chunk_count, int sample_size,
                               std::uint64_t seed) {
    std::vector<Chunk> chunks;
    if (chunk_count < 1) return chunks;
    chunks.reserve(static_cast<std::size_t>(chunk_count));
    int base = video.frame_count / chunk_count;
    int remainder = video.frame_count % chunk_count;
    int begin = 0;
    for (int i = 0; i < chunk_count; ++i) {
        int size = base + (i < remainder ? 1 : 0);
        Chunk chunk;
        chunk.index = i;
        chunk.begin = begin;
        chunk.end = begin + size;
        SplitMix64 rng(derive_seed(seed, {video.video_id, "chunk", std::to_string(i)}));
        chunk.sampled.video_id = video.video_id;
        chunk.sampled.origin = FrameOrigin::chunk(i);
        for (int local : sample_distinct_sorted(size, sample_size, rng)) {
            chunk.sampled.indices.push_back(begin + local);
        }
        chunks.push_back(std::move(chunk));
        begin += size;
    }
    return chunks;
}

std::vector<ChunkScore> score_chunks(const std::vector<Chunk>& chunks, const std::string& key_info,
                                     const std::string& question, SimilarityScorer& scorer) {
    std::vector<ChunkScore> scores;
    scores.reserve(chunks.size());
    for (const auto& chunk : chunks) {
        try {
            ChunkScore s;
            s.chunk_index = chunk.index;
            s.key_sim = scorer.score(chunk.sampled, key_info);
            s.question_sim = scorer.score(chunk.sampled, question);
            s.total = s.key_sim + s.question_sim;
            scores.push_back(s);
        } catch (const std::exception& e) {
            throw ScorerError(chunk.index, e.what());
        }
    }
    return scores;
}

std::vector<int> select_chunks(const std::vector<ChunkScore>& scores, double threshold) {
    if (scores.empty()) throw std::invalid_argument("select_chunks: no scores");
    std::vector<int> selected;
    for (const auto& s : scores) {
        if (s.total > threshold) selected.push_back(s.chunk_index);
    }
    if (selected.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < scores.size(); ++i) {
            if (scores[i].total > scores[best].total) best = i;
        }
        selected.push_back(scores[best].chunk_index);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

FrameSet assemble_frames(const std::vector<Chunk>& chunks, const std::vector<ChunkScore>& scores,
                         std::vector<int>& selected, int frame_cap) {
    auto total_of = [&scores](int chunk_index) {
        for (const auto& s : scores) {
            if (s.chunk_index == chunk_index) return s.total;
        }
        return 0.0;
    };
    auto sample_of = [&chunks](int chunk_index) -> const FrameSet& {
        return chunks[static_cast<std::size_t>(chunk_index)].sampled;
    };

    std::sort(selected.begin(), selected.end());
    auto frame_total = [&]() {
        std::size_t n = 0;
        for (int c : selected) n += sample_of(c).indices.size();
        return n;
    };
    // Trim whole lowest-scoring chunks while over the cap; among equal scores
    // the later chunk goes first.
    while (selected.size() > 1 && frame_total() > static_cast<std::size_t>(frame_cap)) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < selected.size(); ++i) {
            if (total_of(selected[i]) <= total_of(selected[worst])) worst = i;
        }
        selected.erase(selected.begin() + static_cast<std::ptrdiff_t>(worst));
    }

    FrameSet out;
    out.origin = FrameOrigin::assembled();
    for (int c : selected) {
        const FrameSet& s = sample_of(c);
        out.video_id = s.video_id;
        out.indices.insert(out.indices.end(), s.indices.begin(), s.indices.end());
    }
    if (static_cast<int>(out.indices.size()) > frame_cap) {
        out.indices.resize(static_cast<std::size_t>(frame_cap));
    }
    return out;
}

PerceptionOutcome perceive(const AgentProfile& profile, AgentBackend& backend, const QaTask& task,
                           int round, const std::optional<std::string>& history_text,
                           SimilarityScorer& scorer, const PerceptionParams& params,
                           bool subtitles_on, std::uint64_t master_seed) {
    PerceptionOutcome outcome;
    outcome.agent_id = profile.agent_id;

    std::string key_info;
    if (round <= 1) {
        // Rough glance and chunk layout are properties of the video within a
        // session: shared across agents, not per-agent randomness.
        FrameSet rough = rough_sample(task.video, params.rough_sample_size,
                                      derive_seed(master_seed, {task.task_id, "rough"}));

        AgentRequest decide;
        decide.kind = RequestKind::decide_watch;
        decide.task = &task;
        decide.frames = rough;
        decide.bindings = standard_bindings(task, rough, subtitles_on);
        decide.round = round;
        decide.seed = request_seed(master_seed, task.task_id, profile.agent_id,
                                   RequestKind::decide_watch, round);
        bool watch_whole = parse_watch_decision(backend.invoke(profile, decide));
        outcome.decided_watch_whole = watch_whole;

        if (watch_whole) {
            outcome.mode = PerceptionOutcome::Mode::whole_video;
            outcome.frames = global_sample(task.video, params.global_sample_size);
            return outcome;
        }

        AgentRequest key;
        key.kind = RequestKind::key_info;
        key.task = &task;
        key.frames = rough;
        key.bindings = standard_bindings(task, rough, subtitles_on);
        key.round = round;
        key.seed = request_seed(master_seed, task.task_id, profile.agent_id,
                                RequestKind::key_info, round);
        key_info = backend.invoke(profile, key);
    } else {
        AgentRequest key;
        key.kind = RequestKind::summarize;
        key.task = &task;
        key.bindings = standard_bindings(task, std::nullopt, subtitles_on);
        key.bindings["History"] = history_text.value_or("");
        key.round = round;
        key.seed = request_seed(master_seed, task.task_id, profile.agent_id,
                                RequestKind::summarize, round);
        key_info = backend.invoke(profile, key);
    }

    outcome.key_info = key_info;
    std::vector<Chunk> chunks = make_chunks(task.video, params.chunk_count,
                                            params.chunk_sample_size,
                                            derive_seed(master_seed, {task.task_id, "chunks"}));
    std::vector<ChunkScore> scores = score_chunks(chunks, key_info, task.question, scorer);
    std::vector<int> selected = select_chunks(scores, params.threshold);
    outcome.frames = assemble_frames(chunks, scores, selected, params.frame_cap);
    outcome.mode = PerceptionOutcome::Mode::retrieved;
    outcome.chunk_scores = std::move(scores);
    outcome.selected_chunks = std::move(selected);
    return outcome;
}

}  // namespace council
