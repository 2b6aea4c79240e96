#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "mfit/errors.hpp"
#include "mfit/trace.hpp"

using namespace mfit;

TEST_CASE("trace CSV round trip is exact") {
    TemperatureTrace a;
    a.times = {0.0, 0.01, 0.02};
    a.node_ids = {"l/_default/0_0", "l/_default/1_0"};
    a.values.resize(3, 2);
    a.values << 25.0, 25.0, 31.234567890123456, 26.5, 40.0, 27.125;
    const std::string path = "roundtrip_trace.csv";
    save_trace_csv(a, path);
    const TemperatureTrace b = load_trace_csv(path);
    std::remove(path.c_str());
    CHECK(b.node_ids == a.node_ids);
    CHECK(b.times == a.times);
    CHECK((b.values.array() == a.values.array()).all()); // bitwise via %.17g
}

TEST_CASE("trace CSV parse errors carry line numbers") {
    SUBCASE("ragged row") {
        std::ofstream("tbad1.csv") << "time_s,a\n0,1\n0.5,1,2\n";
        CHECK_THROWS_WITH_AS(load_trace_csv("tbad1.csv"), doctest::Contains("tbad1.csv:3"),
                             DomainError);
        std::remove("tbad1.csv");
    }
    SUBCASE("bad number") {
        std::ofstream("tbad2.csv") << "time_s,a\n0,warm\n";
        CHECK_THROWS_WITH_AS(load_trace_csv("tbad2.csv"), doctest::Contains("warm"), DomainError);
        std::remove("tbad2.csv");
    }
    SUBCASE("non-increasing times") {
        std::ofstream("tbad3.csv") << "time_s,a\n0,1\n0,2\n";
        CHECK_THROWS_WITH_AS(load_trace_csv("tbad3.csv"), doctest::Contains("tbad3.csv:3"),
                             DomainError);
        std::remove("tbad3.csv");
    }
    SUBCASE("wrong header") {
        std::ofstream("tbad4.csv") << "t,a\n0,1\n";
        CHECK_THROWS_WITH_AS(load_trace_csv("tbad4.csv"), doctest::Contains("time_s"),
                             DomainError);
        std::remove("tbad4.csv");
    }
}
