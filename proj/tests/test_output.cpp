#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "avalanche/output.hpp"

using namespace avalanche;
namespace out = avalanche::output;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch() {
    const auto dir = std::filesystem::temp_directory_path() / "avalanche_output_test";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Output, ShortestRoundTripFormatting) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) EXPECT_EQ(std::stod(out::fmt(v)), v);
    EXPECT_EQ(out::fmt(0.5), "0.5");
    EXPECT_EQ(out::fmt(std::size_t{42}), "42");
    EXPECT_EQ(out::fmt(-7), "-7");
}

TEST(Output, CsvStartsWithHashAndSchema) {
    const auto path = scratch() / "t.csv";
    {
        out::CsvWriter w(path, "avalanche.test/1", "0123456789abcdef", {"a", "b"});
        w.row(1, 0.25);
        w.row_strings({"x,y", "q\"z"});
        EXPECT_THROW(w.row(1), Error);
    }
    EXPECT_EQ(slurp(path), "# config_hash=0123456789abcdef\n# schema=avalanche.test/1\na,b\n1,0.25\n\"x,y\",\"q\"\"z\"\n");
}

TEST(Output, EventLogRoundTrip) {
    std::vector<stochastic::TimedEvent> ev{{0.125, {JumpKind::Hop, 3}},
                                           {0.5, {JumpKind::LossCavity, 0}},
                                           {1e-9, {JumpKind::Loss0, 65535}}};
    const auto bytes = out::encode_event_log(ev);
    EXPECT_EQ(bytes.size(), 16u + 11u * ev.size());
    EXPECT_EQ(bytes.substr(0, 8), "AVEVLOG1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3u); // little-endian count
    const auto back = out::decode_event_log(bytes);
    ASSERT_EQ(back.size(), ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        EXPECT_EQ(back[i].time, ev[i].time);
        EXPECT_EQ(back[i].event, ev[i].event);
    }
    const auto path = scratch() / "ev.bin";
    out::write_event_log(path, ev);
    EXPECT_EQ(out::read_event_log(path).size(), ev.size());
    EXPECT_THROW(out::decode_event_log(bytes.substr(0, 20)), Error);
    EXPECT_THROW(out::decode_event_log("NOTALOG!" + bytes.substr(8)), Error);
}

TEST(Output, SvgIsWellFormedEnough) {
    out::PlotSpec spec;
    spec.title = "a < b";
    out::Series s;
    s.label = "curve";
    s.x = {1, 2, 3};
    s.y = {1, 4, 9};
    const auto svg = out::line_plot_svg(spec, {s});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
