#include <catch_amalgamated.hpp>

#include <sstream>

#include "xol/error.hpp"
#include "xol/loss_csv.hpp"

using namespace xol;

namespace {

std::vector<double> parse(const std::string& text) {
    std::istringstream in(text);
    return read_losses(in);
}

std::size_t failing_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    FAIL("expected ParseError");
    return 0;
}

} // namespace

TEST_CASE("reads a loss column by header name", "[loss_csv]") {
    CHECK(parse("id,Loss,year\n1,2.5,1990\n2,0,1991\n") == std::vector<double>{2.5, 0.0});
}

TEST_CASE("headerless single column and blank lines", "[loss_csv]") {
    CHECK(parse("1.5\n\n2\r\n  3e1 \n") == std::vector<double>{1.5, 2.0, 30.0});
    CHECK(parse("\xEF\xBB\xBFloss\n4\n") == std::vector<double>{4.0});
}

TEST_CASE("malformed input reports the offending line", "[loss_csv]") {
    CHECK(failing_line("loss\n1\n-2\n") == 3);
    CHECK(failing_line("loss\n1\nabc\n") == 3);
    CHECK(failing_line("id,loss\n1,2\n3\n") == 3);
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("loss\n"), ParseError);
    CHECK_THROWS_AS(parse("id,amount\n1,2\n"), ParseError);
}

TEST_CASE("missing file is a parse error", "[loss_csv]") {
    CHECK_THROWS_AS(read_losses_file("/nonexistent/losses.csv"), ParseError);
}
