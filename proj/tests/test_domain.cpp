#include "doctest.h"

#include "council/domain.hpp"
#include "council/rng.hpp"
#include "test_support.hpp"

using namespace council;

TEST_SUITE_BEGIN("domain");

TEST_CASE("parse_answer_letter finds the first standalone option letter") {
    CHECK(parse_answer_letter("The best answer is: B") == Option::B);
    CHECK(parse_answer_letter("(C) is right because of the last scene") == Option::C);
    CHECK(parse_answer_letter("no idea") == std::nullopt);
    CHECK(parse_answer_letter("") == std::nullopt);
    CHECK(parse_answer_letter("d.") == Option::D);       // case-insensitive
    CHECK(parse_answer_letter("Answer: A.") == Option::A);
    CHECK(parse_answer_letter("Banana") == std::nullopt);  // letters inside words never match
    CHECK(parse_answer_letter("A, B, C, or D") == Option::A);
}

TEST_CASE("parse_answer_letter is idempotent on its own rendering") {
    for (Option o : kAllOptions) {
        CHECK(parse_answer_letter(option_string(o)) == o);
    }
    SplitMix64 rng(20240811);
    const std::string junk[] = {"the", "video", "shows", "nothing", "relevant", "here"};
    for (int trial = 0; trial < 500; ++trial) {
        Option expected = kAllOptions[rng.next_below(4)];
        int words = 1 + rng.next_int(0, 6);
        int slot = rng.next_int(0, words - 1);
        std::string text;
        for (int w = 0; w < words; ++w) {
            if (!text.empty()) text += ' ';
            if (w == slot) {
                text += option_string(expected);
            } else {
                text += junk[rng.next_below(6)];
            }
        }
        auto parsed = parse_answer_letter(text);
        REQUIRE(parsed.has_value());
        // the only standalone option letter in the text must be returned
        CHECK(*parsed == expected);
        CHECK(parse_answer_letter(option_string(*parsed)) == *parsed);
    }
}

TEST_CASE("validate_task accepts a well-formed task") {
    CHECK(validate_task(test_support::make_task()).empty());
}

TEST_CASE("validate_task reports every violation") {
    QaTask task = test_support::make_task();
    task.options.pop_back();
    auto violations = validate_task(task);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("options != 4") != std::string::npos);

    task = test_support::make_task();
    task.options[2].key = 'B';  // duplicate B, missing C
    violations = validate_task(task);
    bool saw_duplicate = false;
    for (const auto& v : violations) {
        if (v.find("duplicate option key B") != std::string::npos) saw_duplicate = true;
    }
    CHECK(saw_duplicate);

    task = test_support::make_task();
    task.question.clear();
    task.video.frame_count = 0;
    task.video.duration_s = -1.0;
    violations = validate_task(task);
    CHECK(violations.size() == 3);
}

TEST_CASE("frame locator resolves video id and index") {
    VideoRef video{"vid7", 100, 60.0, "frames/{video_id}/{index}.jpg"};
    CHECK(resolve_frame_path(video, 42) == "frames/vid7/42.jpg");
}

TEST_SUITE_END();
