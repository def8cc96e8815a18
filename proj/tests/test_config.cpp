#include <gtest/gtest.h>

#include "qdiv/config.hpp"

using namespace qdiv;

TEST(DecoderSpecJson, PresetsRoundTrip) {
    for (const char* name : {"tree_v1", "cascade_v1", "bp_osd_v1", "float64", "q[6,2]"}) {
        const auto spec = decoder_spec_from_json(json(name));
        const auto j = to_json(spec);
        EXPECT_EQ(to_json(decoder_spec_from_json(j)), j) << name;
        EXPECT_EQ(describe(decoder_spec_from_json(j)), describe(spec)) << name;
    }
}

TEST(DecoderSpecJson, DefaultsFillIn) {
    const auto spec = decoder_spec_from_json(json::parse(R"({"kind": "bp_osd", "bp": {"rule": "sum-product", "max_iters": 30}})"));
    const auto& s = std::get<BpOsdSpec>(spec);
    EXPECT_EQ(s.bp.rule, UpdateRule::sum_product);
    EXPECT_EQ(s.bp.max_iters, 30);
    EXPECT_EQ(s.osd, OsdConfig{});
}

TEST(DecoderSpecJson, Rejections) {
    const char* bad[] = {
        R"({"kind": "single", "bp": {"alpha": 1.5}})",
        R"({"kind": "single", "bp": {"max_iters": 0}})",
        R"({"kind": "single", "bp": {"colour": 1}})",
        R"({"kind": "single", "bp": {}, "extra": 1})",
        R"({"kind": "cascade", "members": ["float64"]})",
        R"({"kind": "cascade", "members": []})",
        R"({"kind": "cascade", "members": [3]})",
        R"({"kind": "bp_osd", "bp": {}, "osd": {"lambda": 0}})",
        R"({"kind": "bp_osd", "bp": {}, "osd": {"ordering": "random"}})",
        R"({"kind": "tree", "stages": []})",
        R"({"kind": "tree", "stages": [{"decoders": [{"bp": {}}]}, {"feedback_source": 3, "decoders": [{"bp": {}}]}]})",
        R"({"kind": "nope"})",
        R"({"bp": {}})",
        R"(42)",
        R"("no_such_preset")",
    };
    for (const char* b : bad) EXPECT_THROW(decoder_spec_from_json(json::parse(b)), ConfigError) << b;
}

TEST(ExperimentJson, RoundTrip) {
    ExperimentConfig c;
    c.code = "bb_72_12_6";
    c.p = 0.03;
    c.max_frames = parse_u128("100000000000000000000000");
    c.seed = 99;
    c.capture_failures = true;
    const auto j = to_json(c);
    EXPECT_EQ(j["max_frames"], "100000000000000000000000");
    EXPECT_EQ(j["decoder"], "tree_v1");
    EXPECT_EQ(j["decoder_resolved"]["kind"], "tree");
    const auto back = experiment_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_TRUE(back.max_frames == c.max_frames);
}

TEST(ExperimentJson, Rejections) {
    EXPECT_THROW(experiment_from_json(json::parse(R"({"code": "x", "frobnicate": 1})")), ConfigError);
    EXPECT_THROW(experiment_from_json(json::parse(R"({"format_version": 2})")), ConfigError);
    EXPECT_THROW(experiment_from_json(json::parse(R"({"p": "high"})")), ConfigError);
    EXPECT_THROW(experiment_from_json(json::parse(R"({"max_frames": "-1"})")), ConfigError);
    EXPECT_THROW(experiment_from_json(json::parse("[]")), ConfigError);
}

TEST(ExperimentJson, Validate) {
    ExperimentConfig c;
    EXPECT_THROW(validate(c), ConfigError);
    c.code = "bb_72_12_6";
    EXPECT_NO_THROW(validate(c));
    c.dem = "x.dem";
    EXPECT_THROW(validate(c), ConfigError);
    c.dem.clear();
    c.p = 0.7;
    EXPECT_THROW(validate(c), ConfigError);
    c.p = 0.01;
    c.target_errors = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c.target_errors = 70000;
    EXPECT_THROW(validate(c), ConfigError);
    c.target_errors = 10;
    c.stop_on = "both";
    EXPECT_THROW(validate(c), ConfigError);
    c.stop_on = "physical";
    c.noise = "depolarizing";
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Results, DocumentIsDeterministic) {
    ExperimentConfig c;
    c.code = "bb_72_12_6";
    c.p = 0.05;
    c.target_errors = 0;
    c.max_frames = 500;
    c.seed = 4;
    const auto pb = build_problem(c);
    const auto a = results_document(c, pb, run(pb, run_config(c, 1))).dump();
    const auto b = results_document(c, pb, run(pb, run_config(c, 4))).dump();
    EXPECT_EQ(a, b);
    const auto doc = json::parse(a);
    EXPECT_EQ(doc["stats"]["frames"], "500");
    EXPECT_EQ(doc["problem"]["columns"], 72);
    EXPECT_FALSE(doc.contains("metadata"));
    EXPECT_TRUE(results_document(c, pb, RunStats{}, json{{"workers", 4}}).contains("metadata"));
}

TEST(Results, FailureRecordRoundTrip) {
    ExperimentConfig c;
    c.code = "bb_72_12_6";
    c.p = 0.06;
    c.target_errors = 5;
    c.capture_failures = true;
    const auto pb = build_problem(c);
    const auto st = run(pb, run_config(c));
    ASSERT_EQ(st.failures.size(), 5u);
    for (const auto& f : st.failures) EXPECT_EQ(failure_from_json(json::parse(to_json(f).dump())), f);
    EXPECT_THROW(failure_from_json(json::parse(R"({"trial": 1})")), ConfigError);
}
