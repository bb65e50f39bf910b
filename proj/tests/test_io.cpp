#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tcast/io.hpp"

using namespace tcast;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tcast_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("event log roundtrip preserves every field") {
    TempDir tmp;
    const std::vector<EventRecord> events = {
        {"s1", "t9", 1234.5, 0.25}, {"s2", "t1", 86400.0, 17.0}, {"s1", "t1", 0.125, 3.5}};
    const auto path = tmp.path / "events.csv";
    write_events(path, events);
    const auto back = read_events(path);
    REQUIRE(back.size() == events.size());
    for (std::size_t n = 0; n < events.size(); ++n) {
        CHECK(back[n].source == events[n].source);
        CHECK(back[n].target == events[n].target);
        CHECK(back[n].timestamp == events[n].timestamp);
        CHECK(back[n].value == events[n].value);
    }
}

TEST_CASE("event log rejects malformed headers") {
    TempDir tmp;
    const auto path = tmp.path / "bad.csv";
    std::ofstream(path) << "a,b,c,d\n1,2,3,4\n";
    CHECK_THROWS_AS(read_events(path), IoError);
    CHECK_THROWS_AS(read_events(tmp.path / "missing.csv"), IoError);
}

TEST_CASE("event log supports alternate delimiters") {
    TempDir tmp;
    const std::vector<EventRecord> events = {{"a", "b", 1.0, 2.0}};
    const auto path = tmp.path / "events.tsv";
    write_events(path, events, '\t');
    const auto back = read_events(path, '\t');
    REQUIRE(back.size() == 1);
    CHECK(back[0].value == 2.0);
}

TEST_CASE("tensor container roundtrip is exact") {
    TempDir tmp;
    std::mt19937_64 rng(5);
    const Tensor3 x = oracle::random_tensor(3, 4, 2, rng);
    const auto path = tmp.path / "x.tensor";
    write_tensor(path, x);
    const Tensor3 back = read_tensor(path);
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 4);
    REQUIRE(back.depth() == 2);
    CHECK(back.data() == x.data());
}

TEST_CASE("model roundtrip is exact and validates the nonneg flag") {
    TempDir tmp;
    const auto m = oracle::planted_model(4, 5, 3, 2, 3, 7);
    const auto path = tmp.path / "model.txt";
    write_model(path, m);
    const auto back = read_model(path);
    CHECK((back.a - m.a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.h - m.h).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.b - m.b).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t k = 0; k < m.da.size(); ++k)
        CHECK((back.da[k] - m.da[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.nonnegative);

    // corrupt one entry to violate the declared non-negativity
    auto bad = m;
    bad.h(0, 0) = -1.0;
    const auto bad_path = tmp.path / "bad_model.txt";
    write_model(bad_path, bad);
    CHECK_THROWS_AS(read_model(bad_path), IoError);
}

TEST_CASE("lstm checkpoint roundtrip is exact") {
    TempDir tmp;
    const LstmParams p = init_params(3, 5, 2, 11);
    const auto path = tmp.path / "net.txt";
    write_lstm(path, p);
    const auto back = read_lstm(path);
    for (int g = 0; g < kNumGates; ++g) {
        CHECK((back.w[g] - p.w[g]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.u[g] - p.u[g]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.b[g] - p.b[g]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((back.w_y - p.w_y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.b_y - p.b_y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("series table keeps the history/forecast split") {
    TempDir tmp;
    std::mt19937_64 rng(13);
    const Matrix values = oracle::random_matrix(3, 7, rng, 0.0, 2.0);
    const auto path = tmp.path / "series.csv";
    write_series(path, values, 5, "A");
    const auto back = read_series(path);
    CHECK(back.history == 5);
    CHECK(back.side == "A");
    CHECK((back.values - values).cwiseAbs().maxCoeff() == 0.0);

    // epsilon = 0 puts the marker after the last column
    write_series(path, values, 7, "B");
    const auto hist_only = read_series(path);
    CHECK(hist_only.history == 7);
    CHECK((hist_only.values - values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("writers are byte-stable across calls") {
    TempDir tmp;
    std::mt19937_64 rng(17);
    const Tensor3 x = oracle::random_tensor(2, 3, 2, rng);
    write_tensor(tmp.path / "a.tensor", x);
    write_tensor(tmp.path / "b.tensor", x);
    CHECK(slurp(tmp.path / "a.tensor") == slurp(tmp.path / "b.tensor"));
}

TEST_CASE("score table mirrors the per-factor and average layout") {
    TempDir tmp;
    LatentScores a;
    a.per_factor = {{0.125, 0.875, 5}, {0.25, 0.75, 5}};
    a.average = {0.1875, 0.8125, 5};
    const auto path = tmp.path / "scores.csv";
    write_scores(path, a, std::nullopt);
    const std::string text = slurp(path);
    CHECK(text.find("test,DA,DB") != std::string::npos);
    CHECK(text.find("latent 00 MAE,0.125,") != std::string::npos);
    CHECK(text.find("latent 01 MDA,0.75,") != std::string::npos);
    CHECK(text.find("Average MDA,0.8125,") != std::string::npos);
}

TEST_CASE("index map table lists id,index pairs in order") {
    TempDir tmp;
    IndexMap m;
    m.ids = {"alpha", "beta"};
    m.to_index = {{"alpha", 0}, {"beta", 1}};
    const auto path = tmp.path / "map.csv";
    write_index_map(path, m);
    CHECK(slurp(path) == "id,index\nalpha,0\nbeta,1\n");
}

TEST_CASE("matrix table roundtrip") {
    TempDir tmp;
    std::mt19937_64 rng(23);
    const Matrix m = oracle::random_matrix(4, 3, rng);
    const auto path = tmp.path / "m.txt";
    write_matrix(path, m);
    CHECK((read_matrix(path) - m).cwiseAbs().maxCoeff() == 0.0);
}
