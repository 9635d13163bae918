#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "edgereg/image.hpp"
#include "edgereg/io.hpp"
#include "support/oracles.hpp"

using namespace edgereg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("edgereg_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("load_pgm parses ASCII P2 headers and payload") {
    TempDir dir;
    const std::string path = dir.file("a.pgm");
    write_bytes(path, "P2\n# comment\n3 3\n255\n0 1 2 3 4 5 6 7 8\n");
    const Image2D img = load_pgm(path);
    CHECK(img.width == 3);
    CHECK(img.height == 3);
    CHECK(img.data[4] == doctest::Approx(4.0 / 255.0).epsilon(1e-12));
    CHECK(img.data[8] == doctest::Approx(8.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("save_pgm quantizes by round(v * maxval)") {
    TempDir dir;
    Image2D img(4, 2, 0.5);
    const std::string path = dir.file("half.pgm");
    save_pgm(img, path, 255);
    std::ifstream in(path, std::ios::binary);
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string payload = contents.substr(contents.size() - 8);
    for (char c : payload) CHECK(static_cast<unsigned char>(c) == 128);

    img.data.assign(img.size(), 1.0);
    save_pgm(img, dir.file("one.pgm"), 255);
    std::ifstream in2(dir.file("one.pgm"), std::ios::binary);
    std::string c2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    CHECK(static_cast<unsigned char>(c2.back()) == 255);
}

TEST_CASE("save_pgm rejects out-of-range intensities") {
    TempDir dir;
    Image2D img(2, 2, -0.1);
    CHECK_THROWS_WITH_AS(save_pgm(img, dir.file("bad.pgm"), 255),
                         doctest::Contains("intensity out of range"), data_error);
}

TEST_CASE("PGM round-trips values on the maxval grid exactly") {
    TempDir dir;
    oracles::TestRng rng(11);
    for (int maxval : {255, 65535}) {
        Image2D img(7, 5);
        for (double& v : img.data)
            v = static_cast<double>(rng.next() % (maxval + 1)) / maxval;
        const std::string path = dir.file("rt.pgm");
        save_pgm(img, path, maxval);
        const Image2D back = load_pgm(path);
        REQUIRE(back.width == img.width);
        REQUIRE(back.height == img.height);
        for (size_t i = 0; i < img.size(); ++i) CHECK(back.data[i] == img.data[i]);
    }
}

TEST_CASE("load_pgm rejects unsupported magic") {
    TempDir dir;
    const std::string path = dir.file("p7.pgm");
    write_bytes(path, "P7\n3 3\n255\n");
    CHECK_THROWS_WITH_AS(load_pgm(path), doctest::Contains("unsupported magic"), data_error);
}

TEST_CASE("load_pgm reports truncation with a byte offset") {
    TempDir dir;
    const std::string path = dir.file("trunc.pgm");
    write_bytes(path, std::string("P5\n4 4\n255\n") + "abc"); // 16 bytes promised, 3 given
    CHECK_THROWS_WITH_AS(load_pgm(path), doctest::Contains("truncated payload"), data_error);
    CHECK_THROWS_WITH_AS(load_pgm(path), doctest::Contains("byte offset"), data_error);
    CHECK_THROWS_AS(load_pgm(dir.file("missing.pgm")), data_error);
}

TEST_CASE("EDR1 field round-trip is exact after 32-bit rounding") {
    TempDir dir;
    oracles::TestRng rng(3);
    VectorField2D field = oracles::random_field(rng, 9, 4, 5.0);
    const std::string path = dir.file("f.edr1");
    write_field(field, path);
    const VectorField2D back = read_field(path);
    REQUIRE(back.width == field.width);
    REQUIRE(back.height == field.height);
    for (size_t i = 0; i < field.comp.size(); ++i)
        CHECK(back.comp[i] == static_cast<double>(static_cast<float>(field.comp[i])));
}

TEST_CASE("EDR1 layout stores interleaved (dx,dy) floats in order") {
    TempDir dir;
    VectorField2D field(2, 1);
    field.dx(0, 0) = 1.0;
    field.dy(0, 0) = 2.0;
    field.dx(1, 0) = 3.0;
    field.dy(1, 0) = 4.0;
    const std::string path = dir.file("tiny.edr1");
    write_field(field, path);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(bytes.size() == 4 + 12 + 16);
    CHECK(bytes.substr(0, 4) == "EDR1");
    const float* floats = reinterpret_cast<const float*>(bytes.data() + 16);
    CHECK(floats[0] == 1.0f);
    CHECK(floats[1] == 2.0f);
    CHECK(floats[2] == 3.0f);
    CHECK(floats[3] == 4.0f);
}

TEST_CASE("EDR1 reader rejects bad magic and truncated payloads") {
    TempDir dir;
    write_bytes(dir.file("bad.edr1"), "EDRX\x01\x00\x00\x00\x01\x00\x00\x00\x02\x00\x00\x00");
    CHECK_THROWS_WITH_AS(read_field(dir.file("bad.edr1")), doctest::Contains("bad magic"),
                         data_error);

    std::string short_payload = "EDR1";
    const uint32_t dims[3] = {2, 1, 2};
    short_payload.append(reinterpret_cast<const char*>(dims), 12);
    short_payload.append(8, '\0'); // needs 16 bytes of floats
    write_bytes(dir.file("short.edr1"), short_payload);
    CHECK_THROWS_WITH_AS(read_field(dir.file("short.edr1")), doctest::Contains("truncated field"),
                         data_error);
}

TEST_CASE("normalize_minmax maps the range onto [0,1]") {
    Image2D img(2, 1);
    img.data = {2.0, 4.0};
    const Image2D out = normalize_minmax(img);
    CHECK(out.data[0] == 0.0);
    CHECK(out.data[1] == 1.0);

    Image2D constant(3, 3, 0.7);
    const Image2D zeros = normalize_minmax(constant);
    for (double v : zeros.data) CHECK(v == 0.0);

    Image2D unit(2, 2);
    unit.data = {0.0, 0.25, 0.75, 1.0};
    const Image2D same = normalize_minmax(unit);
    for (size_t i = 0; i < unit.size(); ++i) CHECK(same.data[i] == unit.data[i]);
}

TEST_CASE("normalize_minmax is idempotent on random images") {
    oracles::TestRng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        Image2D img(8, 8);
        for (double& v : img.data) v = rng.uniform(-3.0, 7.0);
        const Image2D once = normalize_minmax(img);
        const Image2D twice = normalize_minmax(once);
        for (size_t i = 0; i < img.size(); ++i)
            CHECK(twice.data[i] == doctest::Approx(once.data[i]).epsilon(1e-15));
        for (double v : once.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}
