#include <doctest.h>

#include <sstream>

#include "fairbench/csv.hpp"
#include "fairbench/error.hpp"

using namespace fairbench;

TEST_CASE("parse_csv reads header and rows") {
    const RawTable table = parse_csv("a,b,c\n1,2,3\n4,5,6\n");
    CHECK(table.columns == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(table.rows[1] == std::vector<std::string>{"4", "5", "6"});
}

TEST_CASE("parse_csv trims unquoted fields but keeps quoted ones verbatim") {
    const RawTable table = parse_csv("a,b\n >50K ,\" padded \"\n");
    CHECK(table.rows[0][0] == ">50K");
    CHECK(table.rows[0][1] == " padded ");
}

TEST_CASE("parse_csv handles quoted separators, embedded quotes and CRLF") {
    const RawTable table = parse_csv("a,b\r\n\"x,y\",\"he said \"\"hi\"\"\"\r\n");
    CHECK(table.rows[0][0] == "x,y");
    CHECK(table.rows[0][1] == "he said \"hi\"");
}

TEST_CASE("parse_csv rejects ragged rows naming the record") {
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1\n"), doctest::Contains("record 2"), Error);
}

TEST_CASE("parse_csv requires a header") {
    CHECK_THROWS_AS(parse_csv(""), Error);
}

TEST_CASE("write_csv round-trips quoting") {
    RawTable table;
    table.columns = {"a", "b"};
    table.rows = {{"x,y", "plain"}, {"with \"quote\"", " spaced "}};
    std::ostringstream out;
    write_csv(out, table);
    const RawTable reread = parse_csv(out.str());
    CHECK(reread.columns == table.columns);
    CHECK(reread.rows == table.rows);
}

TEST_CASE("column_index names the missing column") {
    RawTable table;
    table.columns = {"a"};
    CHECK(table.column_index("a") == 0);
    CHECK_THROWS_WITH_AS(table.column_index("zz"), doctest::Contains("zz"), Error);
}
