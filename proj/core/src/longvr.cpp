#include "council/longvr.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "council/rng.hpp"

namespace council {

using nlohmann::json;

std::string_view clip_status_name(ClipStatus status) {
    switch (status) {
        case ClipStatus::kept:             return "kept";
        case ClipStatus::dropped_duration: return "dropped_duration";
        case ClipStatus::dropped_caption:  return "dropped_caption";
        case ClipStatus::rewritten:        return "rewritten";
    }
    return "unknown";
}

std::optional<ClipStatus> clip_status_from_string(std::string_view name) {
    if (name == "kept") return ClipStatus::kept;
    if (name == "dropped_duration") return ClipStatus::dropped_duration;
    if (name == "dropped_caption") return ClipStatus::dropped_caption;
    if (name == "rewritten") return ClipStatus::rewritten;
    return std::nullopt;
}

int count_tokens(std::string_view caption) {
    int tokens = 0;
    bool in_token = false;
    for (char c : caption) {
        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_token) ++tokens;
        in_token = !space;
    }
    return tokens;
}

std::optional<std::string> ScriptedRewriter::rewrite(const ClipRecord& clip) {
    auto it = rewrites_.find(clip.clip_id);
    if (it == rewrites_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> BackendRewriter::rewrite(const ClipRecord& clip) {
    AgentRequest request;
    request.kind = RequestKind::rewrite;
    request.bindings = {
        {"Caption", clip.caption},
        {"Limit", std::to_string(word_limit_)},
    };
    request.round = 1;
    request.seed = derive_seed(seed_, {"rewrite", clip.source, clip.clip_id});
    try {
        return backend_.invoke(profile_, request);
    } catch (const BackendError&) {
        return std::nullopt;
    }
}

std::vector<ClipRecord> load_clip_listing(const std::string& path, const std::string& source) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open clip listing: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_clip_listing(buf.str(), source, path);
}

std::vector<ClipRecord> parse_clip_listing(const std::string& text, const std::string& source,
                                           const std::string& origin) {
    std::vector<ClipRecord> clips;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty()) continue;

        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": malformed line");
        }
        for (const char* field : {"clip_id", "start_s", "end_s", "caption"}) {
            if (!record.contains(field)) {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": missing field '" + field + "'");
            }
        }
        ClipRecord clip;
        clip.source = source;
        clip.clip_id = record["clip_id"].get<std::string>();
        double start = record["start_s"].get<double>();
        double end = record["end_s"].get<double>();
        if (!(end > start)) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": end_s must exceed start_s");
        }
        clip.duration_s = end - start;
        clip.caption = record["caption"].get<std::string>();
        clip.caption_tokens = count_tokens(clip.caption);
        clip.status = ClipStatus::kept;
        clips.push_back(std::move(clip));
    }
    return clips;
}

int apply_exclusions(std::vector<ClipRecord>& clips, const std::set<std::string>& excluded_ids) {
    auto before = clips.size();
    clips.erase(std::remove_if(clips.begin(), clips.end(),
                               [&](const ClipRecord& c) {
                                   return excluded_ids.count(c.clip_id) != 0;
                               }),
                clips.end());
    return static_cast<int>(before - clips.size());
}

void filter_duration(std::vector<ClipRecord>& clips, DurationBounds bounds) {
    for (auto& clip : clips) {
        if (!clip.is_kept()) continue;
        if (clip.duration_s < bounds.min_s || clip.duration_s > bounds.max_s) {
            clip.status = ClipStatus::dropped_duration;
        }
    }
}

ClipRecord rewrite_caption(ClipRecord clip, CaptionRewriter& rewriter) {
    if (!clip.is_kept()) return clip;
    auto rewritten = rewriter.rewrite(clip);
    if (!rewritten) {
        clip.rewrite_failed = true;
        return clip;
    }
    clip.caption = std::move(*rewritten);
    clip.caption_tokens = count_tokens(clip.caption);
    clip.status = ClipStatus::rewritten;
    clip.rewrite_failed = false;
    return clip;
}

void rewrite_captions(std::vector<ClipRecord>& clips, CaptionRewriter& rewriter) {
    for (auto& clip : clips) clip = rewrite_caption(std::move(clip), rewriter);
}

void filter_caption(std::vector<ClipRecord>& clips, int min_tokens) {
    for (auto& clip : clips) {
        if (!clip.is_kept()) continue;
        if (clip.caption_tokens < min_tokens) clip.status = ClipStatus::dropped_caption;
    }
}

CorpusStats corpus_stats(const std::vector<ClipRecord>& clips) {
    CorpusStats stats;
    double duration_sum = 0.0;
    long token_sum = 0;
    for (const auto& clip : clips) {
        if (!clip.is_kept()) continue;
        ++stats.total_kept;
        duration_sum += clip.duration_s;
        token_sum += clip.caption_tokens;
        ++stats.per_source_kept[clip.source];
    }
    if (stats.total_kept > 0) {
        stats.mean_duration_s = duration_sum / stats.total_kept;
        stats.mean_caption_tokens = static_cast<double>(token_sum) / stats.total_kept;
    }
    return stats;
}

void process_corpus(std::vector<ClipRecord>& clips, CaptionRewriter& rewriter, int min_tokens,
                    DurationBounds bounds) {
    std::sort(clips.begin(), clips.end(), [](const ClipRecord& a, const ClipRecord& b) {
        if (a.source != b.source) return a.source < b.source;
        return a.clip_id < b.clip_id;
    });
    filter_duration(clips, bounds);
    rewrite_captions(clips, rewriter);
    filter_caption(clips, min_tokens);
}

std::string clips_to_jsonl(const std::vector<ClipRecord>& clips, bool kept_only) {
    std::string out;
    for (const auto& clip : clips) {
        if (kept_only && !clip.is_kept()) continue;
        json line = {
            {"source", clip.source},
            {"clip_id", clip.clip_id},
            {"duration_s", clip.duration_s},
            {"caption", clip.caption},
            {"caption_tokens", clip.caption_tokens},
            {"status", std::string(clip_status_name(clip.status))},
        };
        if (clip.rewrite_failed) line["rewrite_failed"] = true;
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::string stats_to_json(const CorpusStats& stats) {
    json out = {
        {"total_kept", stats.total_kept},
        {"per_source_kept", stats.per_source_kept},
    };
    if (stats.mean_duration_s) {
        out["mean_duration_s"] = *stats.mean_duration_s;
        out["mean_caption_tokens"] = *stats.mean_caption_tokens;
    } else {
        out["means_undefined"] = true;
    }
    return out.dump(2);
}

}  // namespace council
