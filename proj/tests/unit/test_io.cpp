#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "mfg/field.hpp"
#include "mfg/grid.hpp"
#include "mfg/io.hpp"

using namespace mfg;

namespace {

std::filesystem::path temp_dir() {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("mfg_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("formatted doubles parse back to the same bits") {
    const double values[] = {3.141592653589793, 0.1,     1.0 / 3.0, 1e300,  1e-300,
                             -0.0,              2.0,     -17.25,    1e-17,  0.30000000000000004,
                             6.02214076e23,     -1e-308, 123456789.123456789};
    for (const double v : values) {
        const std::string s = format_double(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
    }
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-0.0) == "-0");
}

TEST_CASE("field csv is long-format with time ascending") {
    const SpaceGrid grid = make_space_grid(4, 0.0, 4.0);
    const TimeGrid times = make_time_grid(2, 1.0);
    Field f(FieldKind::density, times.levels.size(), grid.num_nodes(), 0.0);
    // Level index k holds time levels[k]; levels run horizon -> 0.
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 5; ++i) f(k, i) = 10.0 * static_cast<double>(k) + static_cast<double>(i);

    const auto dir = temp_dir();
    write_field_csv(dir / "m.csv", f, times, grid, "m");
    const auto lines = lines_of(slurp(dir / "m.csv"));

    REQUIRE(lines.size() == 1 + 3 * 5);
    CHECK(lines[0] == "t,E,m");
    // First data row is the earliest time (t = 0), i.e. the last stored level.
    CHECK(lines[1] == "0,0,20");
    CHECK(lines[2] == "0,1,21");
    // Last row is the horizon.
    CHECK(lines.back() == "1,4,4");
    // Middle block sits at t = 0.5.
    CHECK(lines[1 + 5] == "0.5,0,10");
}

TEST_CASE("trace csv carries one row per iteration") {
    const auto dir = temp_dir();
    write_trace_csv(dir / "trace.csv", {0.5, 0.125, 3e-7});
    const auto lines = lines_of(slurp(dir / "trace.csv"));
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "iteration,epsilon");
    CHECK(lines[1] == "1,0.5");
    CHECK(lines[2] == "2,0.125");
    CHECK(lines[3] == "3,2.9999999999999999e-07");
}

TEST_CASE("convergence csv lists exponent, mesh width, and error") {
    const auto dir = temp_dir();
    ConvergenceReport report;
    report.levels.push_back({3, 8, 0.5, 0.25, true});
    report.levels.push_back({4, 16, 0.25, 0.0625, true});
    write_convergence_csv(dir / "convergence.csv", report);
    const auto lines = lines_of(slurp(dir / "convergence.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "n,h,error");
    CHECK(lines[1] == "3,0.5,0.25");
    CHECK(lines[2] == "4,0.25,0.0625");
}

TEST_CASE("generic csv writes rows verbatim and rejects ragged data") {
    const auto dir = temp_dir();
    write_csv(dir / "table.csv", {"a", "b"}, {{1.0, 2.0}, {3.0, 0.25}});
    const auto lines = lines_of(slurp(dir / "table.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "a,b");
    CHECK(lines[1] == "1,2");
    CHECK(lines[2] == "3,0.25");

    CHECK_THROWS_AS(write_csv(dir / "bad.csv", {"a", "b"}, {{1.0}, {1.0, 2.0}}),
                    std::invalid_argument);
}

TEST_CASE("writers create missing parent directories") {
    const auto dir = temp_dir();
    const auto nested = dir / "deep" / "down" / "trace.csv";
    write_trace_csv(nested, {1.0});
    CHECK(std::filesystem::exists(nested));
}
