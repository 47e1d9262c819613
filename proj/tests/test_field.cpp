#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "advectflow/field.hpp"
#include "advectflow/field_io.hpp"

using namespace advectflow;

namespace {

std::filesystem::path temp_file(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / "advectflow_test_field";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("layout law matches nested-loop enumeration") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 32; ++trial) {
        Extents e;
        e.nx = 1 + static_cast<int>(rng() % 7);
        e.ny = 1 + static_cast<int>(rng() % 7);
        e.nz = 2 + static_cast<int>(rng() % 7);
        std::int64_t m = 0;
        for (int i = -1; i <= e.nx; ++i) {
            for (int j = -1; j <= e.ny; ++j) {
                for (int k = 0; k < e.nz; ++k) {
                    CHECK(linear_index(e, i, j, k) == m);
                    ++m;
                }
            }
        }
        CHECK(m == e.padded_cells());
    }
}

TEST_CASE("constant generator fills every cell including halos") {
    const Field3D f = make_field({4, 4, 4}, GeneratorSpec::constant(0.0));
    CHECK(f.data().size() == (4 + 2) * (4 + 2) * 4);
    for (double v : f.data()) CHECK(v == 0.0);

    const Field3D g = make_field({4, 4, 4}, GeneratorSpec::constant(2.5));
    CHECK(g.at(-1, -1, 0) == 2.5);
    CHECK(g.at(4, 4, 3) == 2.5);
}

TEST_CASE("ramp generator is the global linear index") {
    const Field3D f = make_field({2, 2, 2}, GeneratorSpec::ramp());
    REQUIRE(f.data().size() == 32);
    for (std::size_t m = 0; m < f.data().size(); ++m) {
        CHECK(f.data()[m] == static_cast<double>(m));
    }
}

TEST_CASE("seeded generator is deterministic and in range") {
    const auto spec = GeneratorSpec::seeded(42, -1.0, 1.0);
    const Field3D a = make_field({8, 8, 8}, spec);
    const Field3D b = make_field({8, 8, 8}, spec);
    CHECK(std::memcmp(a.data().data(), b.data().data(),
                      a.data().size() * sizeof(double)) == 0);
    for (double v : a.data()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    // different seed, different bits
    const Field3D c = make_field({8, 8, 8}, GeneratorSpec::seeded(43, -1.0, 1.0));
    CHECK(std::memcmp(a.data().data(), c.data().data(),
                      a.data().size() * sizeof(double)) != 0);
}

TEST_CASE("invalid extents and generator specs are rejected") {
    CHECK_THROWS_AS(make_field({0, 4, 4}, GeneratorSpec::ramp()), std::invalid_argument);
    CHECK_THROWS_AS(make_field({4, 4, 1}, GeneratorSpec::ramp()), std::invalid_argument);
    CHECK_THROWS_AS(make_field({4, 4, 4}, GeneratorSpec::seeded(1, 2.0, -2.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(GeneratorSpec::parse("gibberish"), std::invalid_argument);
    CHECK_THROWS_AS(GeneratorSpec::parse("seeded:1"), std::invalid_argument);
    CHECK(GeneratorSpec::parse("constant:3.5").value == 3.5);
    CHECK(GeneratorSpec::parse("seeded:9:-2:2").seed == 9);
}

TEST_CASE("field data length is validated") {
    std::vector<double> short_data(10, 0.0);
    CHECK_THROWS_AS(Field3D({4, 4, 4}, std::move(short_data)), std::invalid_argument);
}

TEST_CASE("PWAF round trip is bit-exact") {
    const auto path = temp_file("roundtrip.pwaf");
    const Field3D f = make_field({5, 3, 4}, GeneratorSpec::seeded(99, -10.0, 10.0));
    write_field(f, path.string());
    const Field3D g = read_field(path.string());
    CHECK(g.extents() == f.extents());
    CHECK(std::memcmp(f.data().data(), g.data().data(),
                      f.data().size() * sizeof(double)) == 0);
}

TEST_CASE("PWAF file size is header plus packed payload") {
    const auto path = temp_file("sized.pwaf");
    const Field3D f = make_field({4, 4, 4}, GeneratorSpec::ramp());
    write_field(f, path.string());
    CHECK(std::filesystem::file_size(path) ==
          kPwafHeaderBytes + (4 + 2) * (4 + 2) * 4 * 8);
}

TEST_CASE("bad magic is rejected") {
    const auto path = temp_file("badmagic.pwaf");
    const Field3D f = make_field({4, 4, 4}, GeneratorSpec::ramp());
    write_field(f, path.string());
    {
        std::fstream fs(path, std::ios::binary | std::ios::in | std::ios::out);
        fs.write("XXXX", 4);
    }
    CHECK_THROWS_AS(read_field(path.string()), FieldIoError);
}

TEST_CASE("truncated payload is rejected") {
    const auto path = temp_file("truncated.pwaf");
    const Field3D f = make_field({4, 4, 4}, GeneratorSpec::ramp());
    write_field(f, path.string());
    std::filesystem::resize_file(path, kPwafHeaderBytes + 100 * 8);
    CHECK_THROWS_AS(read_field(path.string()), FieldIoError);
}

TEST_CASE("non-finite payload values are rejected on read") {
    const auto path = temp_file("nonfinite.pwaf");
    Extents e{2, 2, 2};
    std::vector<double> data(static_cast<std::size_t>(e.padded_cells()), 1.0);
    data[5] = std::numeric_limits<double>::quiet_NaN();
    write_field(Field3D(e, std::move(data)), path.string());
    CHECK_THROWS_AS(read_field(path.string()), FieldIoError);
}

TEST_CASE("missing file is an error") {
    CHECK_THROWS_AS(read_field("/nonexistent/nowhere.pwaf"), FieldIoError);
}
