#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "symgeo/io_util.hpp"

using namespace symgeo::io;

TEST_CASE("fmt17 round-trips doubles exactly") {
    for (double v : {0.0, 1.0, -1.0, 3.141592653589793, 2.0 / 3.0, 1e-300, 6.283185307179586,
                     123456.789012345678, -9.8765432109876543e200}) {
        CHECK(std::stod(fmt17(v)) == v);
    }
}

TEST_CASE("fnv1a digest is stable") {
    CHECK(fnv1a_digest("") == "cbf29ce484222325");
    CHECK(fnv1a_digest("hello") == "a430d84680aabd0b");
    CHECK(fnv1a_digest("hello") == fnv1a_digest("hello"));
    CHECK(fnv1a_digest("hello") != fnv1a_digest("hellp"));
}

TEST_CASE("atomic_write leaves no temp file and is readable back") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "symgeo_io_test";
    fs::create_directories(dir);
    const std::string path = (dir / "out.txt").string();
    atomic_write(path, "line\n");
    CHECK(read_file(path) == "line\n");
    CHECK(!fs::exists(path + ".tmp"));
    atomic_write(path, "replaced\n");
    CHECK(read_file(path) == "replaced\n");
    fs::remove_all(dir);
}

TEST_CASE("load_json wraps parse errors with the file name") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "symgeo_io_test2";
    fs::create_directories(dir);
    const std::string path = (dir / "broken.json").string();
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_WITH_AS(load_json(path), doctest::Contains("broken.json"), std::invalid_argument);
    CHECK_THROWS_AS(load_json((dir / "absent.json").string()), std::invalid_argument);
    fs::remove_all(dir);
}
