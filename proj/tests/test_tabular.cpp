#include "csonbr/rng.hpp"
#include "csonbr/tabular.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace csonbr;

TEST_CASE("csv: numeric header and rows") {
    const Dataset ds = parse_csv("x,y\n1,2\n3,4\n", std::string("y"));
    CHECK(ds.rows() == 2);
    CHECK(ds.cols() == 2);
    CHECK(ds.schema()[0].kind == AttributeKind::Numeric);
    CHECK(ds.schema()[1].kind == AttributeKind::Numeric);
    CHECK(ds.target() == 1);
    CHECK(ds.at(1, 0) == 3.0);
    CHECK(ds.at(0, 1) == 2.0);
}

TEST_CASE("csv: non-numeric column becomes categorical in order of appearance") {
    const Dataset ds = parse_csv("c,y\nb,1\na,2\nb,3\n", std::string("y"));
    REQUIRE(ds.schema()[0].categorical());
    CHECK(ds.schema()[0].categories == std::vector<std::string>{"b", "a"});
    CHECK(ds.at(0, 0) == 0.0);
    CHECK(ds.at(1, 0) == 1.0);
}

TEST_CASE("csv: empty and '?' cells are missing") {
    const Dataset ds = parse_csv("a,y\n,1\n?,2\n3,3\n", std::string("y"));
    CHECK(ds.missing(0, 0));
    CHECK(ds.missing(1, 0));
    CHECK_FALSE(ds.missing(2, 0));
    CHECK(ds.schema()[0].kind == AttributeKind::Numeric);
}

TEST_CASE("csv: target by index, empty name picks last column") {
    CHECK(parse_csv("x,y\n1,2\n", std::size_t{0}).target() == 0);
    CHECK(parse_csv("x,y\n1,2\n", std::string("0")).target() == 0);
    CHECK(parse_csv("x,y\n1,2\n", std::string()).target() == 1);
}

TEST_CASE("csv: errors") {
    CHECK_THROWS_AS(parse_csv("x,y\n1,2\n", std::string("z")), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv("x,y\n1,a\n", std::string("y")), std::invalid_argument);
    try {
        parse_csv("x,y\n1,2\n3\n", std::string("y"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("arff: nominal attribute, quoted names, comments and missing") {
    const char* text =
        "% comment\n"
        "@RELATION test\n"
        "@attribute 'first attr' numeric\n"
        "@attribute class {a,b}\n"
        "@attribute target REAL\n"
        "@data\n"
        "1.5,a,10\n"
        "?,b,20\n"
        "% trailing comment\n"
        "2,?,30\n";
    const Dataset ds = parse_arff(text, std::string("target"));
    REQUIRE(ds.rows() == 3);
    CHECK(ds.schema()[0].name == "first attr");
    REQUIRE(ds.schema()[1].categorical());
    CHECK(ds.schema()[1].categories == std::vector<std::string>{"a", "b"});
    CHECK(ds.at(1, 1) == 1.0);
    CHECK(ds.missing(1, 0));
    CHECK(ds.missing(2, 1));
    CHECK(ds.schema()[2].is_target);
}

TEST_CASE("arff: unsupported types and bad values report the line") {
    CHECK_THROWS_AS(parse_arff("@relation r\n@attribute s string\n@attribute y numeric\n@data\n", std::string("y")),
                    ParseError);
    try {
        parse_arff("@relation r\n@attribute c {a,b}\n@attribute y numeric\n@data\nc,1\n", std::string("y"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
    CHECK_THROWS_AS(parse_arff("@relation r\n@attribute c {a,b}\n@data\na\n", std::string("c")), std::invalid_argument);
}

TEST_CASE("csv round trip through write_csv and load_dataset") {
    const Dataset ds = parse_csv("c,x,y\nred,0.1,1e-7\nblue,-2.5,3\nred,,4\n", std::string("y"));
    const auto path = std::filesystem::temp_directory_path() / "csonbr_tabular_roundtrip.csv";
    write_csv(ds, path);
    const Dataset back = load_dataset(path, FileFormat::Csv, std::string("y"));
    std::filesystem::remove(path);
    CHECK(back == ds);
}

TEST_CASE("impute: mean and mode") {
    const Dataset ds = parse_csv("x,c,y\n1,a,1\n,a,2\n3,,3\n5,b,4\n", std::string("y"));
    const Dataset im = impute(ds);
    CHECK(im.at(1, 0) == doctest::Approx(3.0));  // mean of 1, 3, 5
    CHECK(im.at(2, 1) == 0.0);                    // mode a
    for (std::size_t r = 0; r < im.rows(); ++r)
        for (std::size_t c = 0; c < im.cols(); ++c) CHECK_FALSE(im.missing(r, c));
}

TEST_CASE("impute: column [1, missing, 3] becomes [1, 2, 3]") {
    const Dataset im = impute(parse_csv("x,y\n1,0\n,0\n3,0\n", std::string("y")));
    CHECK(im.column(0) == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("impute: rows with missing target dropped, all-missing column rejected, idempotent") {
    const Dataset ds = parse_csv("x,y\n1,\n2,5\n4,6\n", std::string("y"));
    const Dataset im = impute(ds);
    CHECK(im.rows() == 2);
    CHECK(impute(im) == im);
    try {
        impute(parse_csv("x,z,y\n1,,1\n2,,2\n", std::string("y")));
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("z") != std::string::npos);
    }
}

TEST_CASE("split: sizes, determinism, order preservation, partition") {
    std::string csv = "x,y\n";
    for (int i = 0; i < 100; ++i) csv += std::to_string(i) + "," + std::to_string(i * 2) + "\n";
    const Dataset ds = parse_csv(csv, std::string("y"));

    const auto [train, test] = split(ds, 0.66, 7, true);
    CHECK(train.rows() == 66);
    CHECK(test.rows() == 34);

    const auto again = split(ds, 0.66, 7, true);
    CHECK(again.first == train);
    CHECK(again.second == test);

    std::vector<double> all = train.column(0);
    const auto tc = test.column(0);
    all.insert(all.end(), tc.begin(), tc.end());
    std::sort(all.begin(), all.end());
    CHECK(all == ds.column(0));

    const Dataset three = parse_csv("x,y\n0,0\n1,1\n2,2\n", std::string("y"));
    const auto [idx_train, idx_test] = split_indices(three.rows(), 0.66, 0, false);
    CHECK(idx_train == std::vector<std::size_t>{0, 1});
    CHECK(idx_test == std::vector<std::size_t>{2});

    CHECK_THROWS_AS(split(three, 0.0, 0, true), std::invalid_argument);
    CHECK_THROWS_AS(split(three, 0.99, 0, true), std::invalid_argument);
}

TEST_CASE("stats: numeric and categorical columns") {
    const Dataset ds = parse_csv("x,k,c,y\n1,5,a,0\n3,5,a,0\n2,5,b,0\n", std::string("y"));
    const auto st = stats(ds);
    CHECK(st[0].min == 1.0);
    CHECK(st[0].max == 3.0);
    CHECK(st[0].mean == doctest::Approx(2.0));
    CHECK(st[0].stddev == doctest::Approx(1.0));
    CHECK(st[1].stddev == 0.0);
    CHECK(st[2].counts == std::vector<std::size_t>{2, 1});
    CHECK(st[2].mode == 0);

    const auto two = stats(parse_csv("x,y\n1,0\n3,0\n", std::string("y")));
    CHECK(two[0].stddev == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("stats: counts sum to present cells, min <= max on random data") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::string csv = "x,c,y\n";
        for (int i = 0; i < 30; ++i) {
            csv += (rng.uniform() < 0.2 ? std::string() : std::to_string(rng.uniform(-5, 5))) + ",";
            csv += (rng.uniform() < 0.2 ? std::string() : std::string(1, static_cast<char>('a' + rng.below(4)))) + ",";
            csv += std::to_string(i) + "\n";
        }
        const Dataset ds = parse_csv(csv, std::string("y"));
        const auto st = stats(ds);
        CHECK(st[0].min <= st[0].max);
        std::size_t total = 0;
        for (auto c : st[1].counts) total += c;
        CHECK(total == st[1].present);
    }
}
