#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>

#include "fieldsum/serialize.hpp"

using namespace fieldsum;

TEST_CASE("double formatting round-trips bitwise") {
    for (const double x : {0.1, 1.0 / 3.0, 1e-17, 12345.6789, 0x1p-52, -2.5e300, 0.0}) {
        REQUIRE(parse_double(format_double(x)) == x);
    }
    REQUIRE_THROWS_AS(parse_double("12x"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_int("1.5"), std::invalid_argument);
}

TEST_CASE("region grammar round-trips") {
    const Region quadrant = regions::quadrant({0.5, 1.0});
    REQUIRE(region_to_string(quadrant) == "quadrant:0.5,1");
    const Region q2 = parse_region(region_to_string(quadrant));
    REQUIRE(q2.kind == ShapeKind::quadrant);
    REQUIRE(q2.upper == quadrant.upper);

    const Region cells = parse_region("cells:m=16:[(1,2),(3,3)]");
    REQUIRE(cells.kind == ShapeKind::cell_union);
    REQUIRE(cells.dim == 2);
    REQUIRE(cells.resolution == 16);
    REQUIRE(cells.cells == std::vector<std::int64_t>{1, 34});  // (1,2) -> 1, (3,3) -> 34
    REQUIRE(parse_region(region_to_string(cells)).cells == cells.cells);

    const Region box = parse_region("box:0.2,0.2:0.7,0.9");
    REQUIRE(box.kind == ShapeKind::box);
    REQUIRE(lebesgue(box) == Approx(0.35).epsilon(1e-15));
    REQUIRE(parse_region(region_to_string(box)).upper == box.upper);

    const Region empty = parse_region("empty:d=3");
    REQUIRE(empty.kind == ShapeKind::empty);
    REQUIRE(empty.dim == 3);

    REQUIRE_THROWS_AS(parse_region("sphere:0.5"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_region("cells:m=4:[]"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_region("quadrant:1.5"), std::invalid_argument);
}

TEST_CASE("law grammar round-trips") {
    for (const std::string text :
         {"gaussian:1", "rademacher", "pareto_tail:2", "counterexample:1",
          "md:rademacher:a=0.5:w=1", "md:gaussian:1:a=0.25:w=2"}) {
        const Law law = parse_law(text);
        const Law again = parse_law(law_to_string(law));
        REQUIRE(law.kind == again.kind);
        REQUIRE(law_to_string(law) == law_to_string(again));
    }
    const Law md = parse_law("md:gaussian:1:a=0.25:w=2");
    REQUIRE(md.kind == LawKind::md_bounded);
    REQUIRE(md.md_base->kind == LawKind::gaussian);
    REQUIRE(md.md_amplitude == 0.25);
    REQUIRE(md.md_window == 2);

    REQUIRE_THROWS_AS(parse_law("weibull:2"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_law("gaussian"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_law("md:pareto_tail:2:a=0.5:w=1"), std::invalid_argument);
}

TEST_CASE("fnv1a matches the published test vectors") {
    REQUIRE(fnv1a("") == 0xcbf29ce484222325ULL);
    REQUIRE(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    REQUIRE(hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("csv writer emits exact bytes") {
    const std::string path = "test_csv_writer.tmp.csv";
    {
        CsvWriter csv(path);
        csv.header({"a", "b"});
        csv.row({std::int64_t{1}, 0.5});
        csv.row({std::string("x"), 0.1});
    }
    REQUIRE(read_file_bytes(path) == "a,b\n1,0.5\nx,0.1\n");
    std::remove(path.c_str());
}
