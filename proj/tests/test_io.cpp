#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>

#include "fca/error.hpp"
#include "fca/io.hpp"
#include "support.hpp"

using namespace fca;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round-trip bit for bit") {
    Rng rng(51);
    std::vector<double> values{0.0, -0.0, 1.0, -1.5, 0.1, 1e-310, 5e-324,
                               std::numeric_limits<double>::max(),
                               std::numeric_limits<double>::min(), 2.0 / 3.0};
    for (int i = 0; i < 2000; ++i) {
        values.push_back(rng.uniform(-1.0, 1.0) * std::ldexp(1.0, static_cast<int>(rng.index(600)) - 300));
    }
    for (double v : values) {
        CAPTURE(v);
        CHECK(same_bits(io::parse_double(io::format_double(v), "t"), v));
    }
    CHECK(io::parse_double("+2.5", "t") == 2.5);
    CHECK_THROWS_AS(io::parse_double("1.5x", "t"), IoError);
    CHECK_THROWS_AS(io::parse_double("", "t"), IoError);
}

TEST_CASE("Matrix Market round trip in both layouts") {
    Rng rng(52);
    Matrix a = rng.matrix(5, 7);
    a(1, 2) = 0.0;
    a(4, 6) = -0.0;
    for (auto fmt : {io::MatrixFormat::array, io::MatrixFormat::coordinate}) {
        std::stringstream ss;
        io::write_matrix_market(ss, a, fmt);
        const Matrix back = io::parse_matrix_market(ss, "mem");
        REQUIRE(back.rows() == 5);
        REQUIRE(back.cols() == 7);
        for (std::size_t i = 0; i < 35; ++i) {
            // Coordinate format drops zeros, so -0 comes back as +0.
            CHECK(back.values()[i] == a.values()[i]);
            if (a.values()[i] != 0.0) CHECK(same_bits(back.values()[i], a.values()[i]));
        }
    }
    const auto dir = test::scratch_dir("io_mm");
    io::write_matrix_market(dir / "a.mtx", a);
    CHECK(io::read_matrix_market(dir / "a.mtx") == a);
}

TEST_CASE("Matrix Market parsing details and errors") {
    std::istringstream coord(
        "%%MatrixMarket matrix coordinate integer general\n% comment\n\n2 3 2\n1 1 4\n2 3 -1\n");
    const Matrix c = io::parse_matrix_market(coord, "c");
    CHECK(c == Matrix::from_rows({{4, 0, 0}, {0, 0, -1}}));

    std::istringstream arr("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
    CHECK(io::parse_matrix_market(arr, "a") == Matrix::from_rows({{1, 3}, {2, 4}}));

    auto err = [](const std::string& text) {
        return message_of([&] {
            std::istringstream in(text);
            io::parse_matrix_market(in, "bad.mtx");
        });
    };
    CHECK(err("hello\n").find("bad.mtx:1") != std::string::npos);
    CHECK(err("%%MatrixMarket matrix array complex general\n").find("complex") != std::string::npos);
    CHECK(err("%%MatrixMarket matrix array real symmetric\n").find("symmetric") != std::string::npos);
    CHECK(err("%%MatrixMarket matrix array real general\n2 2\n1\n2\nx\n4\n").find("bad.mtx:5") !=
          std::string::npos);
    CHECK(err("%%MatrixMarket matrix array real general\n2 2\n1\n2\n").find("expected 4") !=
          std::string::npos);
    CHECK(err("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n").find("out of range") !=
          std::string::npos);
    CHECK(err("%%MatrixMarket matrix array real general\n1 1\n1\n2\n").find("trailing") !=
          std::string::npos);
    CHECK_THROWS_AS(io::read_matrix_market("/nonexistent/file.mtx"), IoError);
}

TEST_CASE("vectors round trip and report bad lines") {
    Rng rng(53);
    const Vector x = rng.vector(50, -1e6, 1e6);
    std::stringstream ss;
    io::write_vector(ss, x);
    CHECK(io::parse_vector(ss, "v") == x);

    std::istringstream with_blank("# header\n1\n\n2.5\n");
    CHECK(io::parse_vector(with_blank, "v") == Vector{1.0, 2.5});

    const std::string msg = message_of([] {
        std::istringstream in("1\n2\nthree\n");
        io::parse_vector(in, "v.txt");
    });
    CHECK(msg.find("v.txt:3") != std::string::npos);
    std::istringstream empty("");
    CHECK_THROWS_AS(io::parse_vector(empty, "e"), IoError);
}

TEST_CASE("box schedule JSON") {
    const Box unit = Box::uniform(2, 0.0, 1.0);
    const Box inner(Vector{0.1, 0.2}, Vector{0.9, 0.8});
    const BoxSchedule s({unit, unit, unit, inner}, Box::uniform(2, 0.25, 0.75));
    const std::string text = io::box_schedule_json(s);
    CHECK(text.find("\"repeat\": 3") != std::string::npos);
    const BoxSchedule back = io::parse_box_schedule(text, "s");
    REQUIRE(back.prefix_size() == 4);
    for (std::size_t k = 0; k < 6; ++k) CHECK(back.at(k) == s.at(k));

    CHECK_THROWS_AS(io::parse_box_schedule("{", "s"), IoError);
    CHECK_THROWS_AS(io::parse_box_schedule(R"({"dimension": 2})", "s"), IoError);
    CHECK_THROWS_AS(
        io::parse_box_schedule(R"({"dimension": 2, "terminal": {"lower": [0], "upper": 1}})", "s"),
        IoError);
    CHECK_THROWS_AS(
        io::parse_box_schedule(R"({"dimension": 1, "terminal": {"lower": 1, "upper": 0}})", "s"),
        IoError);
}

TEST_CASE("trace CSV leaves inactive monitors empty") {
    RunTrace tr;
    TraceRow r0;
    r0.k = 0;
    r0.residual = 1.5;
    TraceRow r1;
    r1.k = 1;
    r1.residual = 0.25;
    r1.step_norm = 0.125;
    r1.box_index = 1;
    tr.rows = {r0, r1};
    CHECK(io::trace_csv(tr) ==
          "k,residual,step_norm,fejer_distance,condition1_defect,box_index\n"
          "0,1.5,,,,\n"
          "1,0.25,0.125,,,1\n");
}

}  // TEST_SUITE
