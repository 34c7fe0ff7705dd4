#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rlab/errors.hpp"
#include "rlab/io.hpp"

using namespace rlab;
namespace fs = std::filesystem;

namespace {

std::string data_dir() {
    // Tests run from the build tree; the data directory is configured in.
    return RLAB_TEST_DATA;
}

}  // namespace

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("g17 formatting round-trips doubles") {
    for (double x : {1.0, M_PI, 1e-300, -2.5e17, 0.1}) {
        const std::string s = fmt_g17(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("map files") {
    SUBCASE("read a valid map") {
        const MapFile mf = read_map_file(data_dir() + "/zsqi.json");
        CHECK(mf.num.degree() == 2);
        CHECK(mf.den.degree() == 0);
        CHECK(mf.label == "z^2 + i");
        const RationalMap map(mf.num, mf.den);
        CHECK(map.degree() == 2);
    }
    SUBCASE("malformed files raise ParseError naming the field") {
        try {
            read_map_file(data_dir() + "/malformed.json");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("num") != std::string::npos);
        }
    }
    SUBCASE("round trip through write_map_file") {
        const MapFile mf = read_map_file(data_dir() + "/lattes40.json");
        const RationalMap map(mf.num, mf.den);
        const std::string tmp = (fs::temp_directory_path() / "rlab_roundtrip.json").string();
        write_map_file(tmp, map, "roundtrip");
        const MapFile back = read_map_file(tmp);
        CHECK(back.num.degree() == mf.num.degree());
        for (int k = 0; k <= mf.num.degree(); ++k)
            CHECK(back.num[static_cast<std::size_t>(k)] == mf.num[static_cast<std::size_t>(k)]);
        std::remove(tmp.c_str());
    }
}

TEST_CASE("experiment files") {
    const ExperimentFile ex = read_experiment_file(data_dir() + "/exp_decay_zsqi.json");
    CHECK(ex.experiment == "cesaro-decay");
    CHECK(ex.map_path == "zsqi.json");
    CHECK(ex.n_schedule == std::vector<int>{1, 2, 4});
    CHECK(ex.region.kind == Region::Kind::Annulus);
    CHECK(ex.region.r0 == 2.0);
    CHECK(ex.region.r1 == 4.0);
    CHECK(ex.seed == 7);
    CHECK(ex.params.at("radial_cells") == 4.0);
}

TEST_CASE("csv bodies digest deterministically") {
    const std::string tmp = (fs::temp_directory_path() / "rlab_csv_test.csv").string();
    std::string d1, d2;
    for (std::string* out : {&d1, &d2}) {
        CsvWriter csv(tmp, {"a", "b"});
        csv.number_row({1.0, 2.0 / 3.0});
        csv.number_row({-1e-17, 3.14159});
        *out = csv.save().first;
    }
    CHECK(d1 == d2);
    std::ifstream in(tmp);
    std::string header;
    std::getline(in, header);
    CHECK(header == "a,b");
    std::remove(tmp.c_str());
}

TEST_CASE("manifests record artifacts and audits") {
    RunManifest m;
    m.command = "run";
    m.experiment = "rays";
    m.started_utc = utc_timestamp();
    m.finished_utc = utc_timestamp();
    m.artifacts.push_back({"rays.csv", sha256_hex("body"), 3});
    m.audits.push_back({"check_a", true, ""});
    CHECK(m.all_audits_passed());
    m.audits.push_back({"check_b", false, "detail"});
    CHECK(!m.all_audits_passed());
    const std::string tmp = (fs::temp_directory_path() / "rlab_manifest.json").string();
    m.save(tmp);
    std::ifstream in(tmp);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("rays.csv") != std::string::npos);
    CHECK(all.find("check_b") != std::string::npos);
    std::remove(tmp.c_str());
}
