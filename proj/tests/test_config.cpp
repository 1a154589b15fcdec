#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "avalanche/config.hpp"

using namespace avalanche;
namespace cfg = avalanche::config;

namespace {

ErrorKind kind_of(const std::string& text) {
    try {
        cfg::parse(text);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ErrorKind::ValidationError;
}

std::string message_of(const std::string& text) {
    try {
        cfg::parse(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, EmptyObjectGivesDefaults) {
    const auto c = cfg::parse("{}");
    EXPECT_EQ(c, cfg::RunConfig{});
    EXPECT_EQ(c.system.ladder_size, 10);
    EXPECT_EQ(c.spectrum.trajectories, 100u);
    EXPECT_EQ(c.detector.runs, 500u);
}

TEST(Config, RoundTripThroughJson) {
    auto c = cfg::parse(R"({"experiment": "beta-scan", "seed": 17,
        "system": {"N": 4, "gain": 2.5, "pump": "pure_gain", "cavity_loss": 3, "last_loss": 1.5},
        "ensemble": {"initial_ladder": [1, 0, 2, 0], "event_log": true},
        "circuit": {"theta": {"sin": 0.6, "cos": 0.8}}})");
    EXPECT_EQ(c.experiment, cfg::Experiment::BetaScan);
    EXPECT_EQ(c.system.pump.preset, "pure_gain");
    EXPECT_EQ(c.ensemble.initial_ladder.size(), 4u);
    const auto again = cfg::parse(cfg::dump(c));
    EXPECT_EQ(again, c);
    EXPECT_EQ(cfg::dump(again), cfg::dump(c));
    EXPECT_EQ(cfg::config_hash(again), cfg::config_hash(c));
}

TEST(Config, UnknownKeysAreRejectedWithTheirPath) {
    EXPECT_EQ(kind_of(R"({"sytem": {}})"), ErrorKind::ParseError);
    const auto msg = message_of(R"({"system": {"N": 3, "gamma": 1}})");
    EXPECT_NE(msg.find("system.gamma"), std::string::npos) << msg;
}

TEST(Config, SyntaxErrorsReportLineAndColumn) {
    const auto msg = message_of("{\n  \"seed\": 1,\n  \"system\": {,}\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Config, ValidationErrors) {
    EXPECT_EQ(kind_of(R"({"system": {"cavity_loss": -1}})"), ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(R"({"system": {"N": 1}})"), ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(R"({"system": {"pump": "laser"}})"), ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(R"({"experiment": "nope"})"), ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(R"({"seed": "x"})"), ErrorKind::ParseError);
}

TEST(Config, HashIgnoresOutputDirectoryOnly) {
    cfg::RunConfig a;
    cfg::RunConfig b = a;
    b.output = "elsewhere";
    EXPECT_EQ(cfg::config_hash(a), cfg::config_hash(b));
    b.seed = 1;
    EXPECT_NE(cfg::config_hash(a), cfg::config_hash(b));
    EXPECT_EQ(cfg::config_hash(a).size(), 16u);
}

TEST(Config, Fnv1aReferenceValues) {
    EXPECT_EQ(cfg::fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(cfg::fnv1a64("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(cfg::fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Config, SaveAndLoad) {
    const auto dir = std::filesystem::temp_directory_path() / "avalanche_config_test";
    std::filesystem::create_directories(dir);
    cfg::RunConfig c;
    c.seed = 99;
    c.grid.gains = {1, 2, 3};
    cfg::save(c, (dir / "c.json").string());
    EXPECT_EQ(cfg::load((dir / "c.json").string()), c);
    EXPECT_THROW(cfg::load((dir / "missing.json").string()), Error);
}

TEST(Config, ExampleConfigsParse) {
    const std::filesystem::path root = AVALANCHE_SOURCE_DIR;
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(root / "configs")) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(cfg::load(entry.path().string())) << entry.path();
        ++n;
    }
    EXPECT_GE(n, 8u);
}
