#pragma once
// Shared helpers for the test suites: fixture paths, file IO, throwaway
// directories, and small backend doubles.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "council/agents.hpp"
#include "council/domain.hpp"

#ifndef COUNCIL_REPO_DIR
#error "COUNCIL_REPO_DIR must be defined by the build"
#endif
#ifndef COUNCIL_FIXTURE_DIR
#error "COUNCIL_FIXTURE_DIR must be defined by the build"
#endif

namespace test_support {

inline std::string repo_path(const std::string& rel) {
    return (std::filesystem::path(COUNCIL_REPO_DIR) / rel).string();
}

inline std::string fixture_path(const std::string& rel) {
    return (std::filesystem::path(COUNCIL_FIXTURE_DIR) / rel).string();
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// A fresh directory under the build tree, cleared on construction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() / "council-tests" / name;
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path.string() : (path / rel).string();
    }
};

inline council::QaTask make_task(const std::string& task_id = "t-unit", int frame_count = 600,
                                 std::optional<council::Option> gold = council::Option::B) {
    council::QaTask task;
    task.task_id = task_id;
    task.video.video_id = "v-" + task_id;
    task.video.frame_count = frame_count;
    task.video.duration_s = 480.0;
    task.video.frame_locator = "frames/{video_id}/{index}.jpg";
    task.question = "What happens in the clip?";
    for (council::Option o : council::kAllOptions) {
        task.options.push_back({council::option_char(o), "Outcome " + council::option_string(o)});
    }
    task.subtitles = "Someone narrates the scene.";
    task.gold_answer = gold;
    return task;
}

// Backend returning a fixed reply for every request; optionally fails first.
class CannedBackend : public council::AgentBackend {
  public:
    explicit CannedBackend(std::string reply) : reply_(std::move(reply)) {}
    std::string invoke(const council::AgentProfile&, const council::AgentRequest&) override {
        ++calls;
        return reply_;
    }
    int calls = 0;

  private:
    std::string reply_;
};

}  // namespace test_support
