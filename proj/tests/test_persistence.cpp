#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "crc32.hpp"
#include "ops.hpp"
#include "persistence.hpp"
#include "rng.hpp"

using ts::Model;
using ts::ModelSpec;
using ts::Tensor;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ts::strformat("ts-persist-%d", static_cast<int>(getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

template <typename Fn>
ts::ErrorKind error_kind(Fn&& fn) {
    try {
        fn();
    } catch (const ts::Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ts::ErrorKind::runtime;
}

template <typename Fn>
std::string error_message(Fn&& fn) {
    try {
        fn();
    } catch (const ts::Error& e) {
        return e.what();
    }
    FAIL("expected an error");
    return "";
}

ModelSpec random_spec(ts::Rng& rng) {
    ModelSpec spec;
    spec.input_size = rng.below(2) ? 16 : 32;
    const int kernel = rng.below(2) ? 3 : 5;
    for (auto& c : spec.convs) {
        c.filters = static_cast<int>(rng.range(1, 6));
        c.kernel = kernel;
        c.stride = 1;
        c.padding = kernel / 2;
    }
    spec.dropout_rate = rng.uniform(0.0, 0.5);
    return spec;
}

Model<float> random_model(ts::Rng& rng) {
    auto model = Model<float>::initialized(random_spec(rng), rng.next_u64());
    for (auto t : model.parameters())
        for (auto& v : t.mutable_data()) v = static_cast<float>(rng.normal());
    for (auto& v : model.bn_running_mean) v = static_cast<float>(rng.normal());
    for (auto& v : model.bn_running_var) v = static_cast<float>(std::abs(rng.normal()) + 0.1);
    model.trained_epochs = static_cast<int>(rng.range(0, 40));
    model.best_val_accuracy = rng.uniform();
    return model;
}

void check_equal_models(Model<float>& a, Model<float>& b) {
    REQUIRE(a.spec.input_size == b.spec.input_size);
    for (size_t i = 0; i < a.spec.convs.size(); ++i) {
        CHECK(a.spec.convs[i].filters == b.spec.convs[i].filters);
        CHECK(a.spec.convs[i].kernel == b.spec.convs[i].kernel);
        CHECK(a.spec.convs[i].stride == b.spec.convs[i].stride);
        CHECK(a.spec.convs[i].padding == b.spec.convs[i].padding);
    }
    CHECK(a.spec.pool_window == b.spec.pool_window);
    CHECK(a.spec.pool_stride == b.spec.pool_stride);
    CHECK(a.spec.dropout_rate == b.spec.dropout_rate);
    CHECK(a.seed == b.seed);
    CHECK(a.trained_epochs == b.trained_epochs);
    CHECK(a.best_val_accuracy == b.best_val_accuracy);

    const auto pa = a.parameters(), pb = b.parameters();
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i) {
        REQUIRE(pa[i].shape() == pb[i].shape());
        const auto da = pa[i].data(), db = pb[i].data();
        for (size_t j = 0; j < da.size(); ++j) REQUIRE(da[j] == db[j]);
    }
    REQUIRE(a.bn_running_mean == b.bn_running_mean);
    REQUIRE(a.bn_running_var == b.bn_running_var);
}

void patch_crc(std::vector<uint8_t>& bytes) {
    const uint32_t crc = ts::crc32(bytes.data(), bytes.size() - 4);
    for (int i = 0; i < 4; ++i)
        bytes[bytes.size() - 4 + static_cast<size_t>(i)] = static_cast<uint8_t>((crc >> (8 * i)) & 0xFF);
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("the crc matches the published check value") {
    const char* probe = "123456789";
    CHECK(ts::crc32(reinterpret_cast<const uint8_t*>(probe), 9) == 0xCBF43926u);
    CHECK(ts::crc32(nullptr, 0) == 0u);
}

TEST_CASE("one hundred random models round-trip bit for bit and reject corruption") {
    ts::Rng rng(801);
    for (int trial = 0; trial < 100; ++trial) {
        auto model = random_model(rng);
        const auto bytes = ts::serialize_model(model);
        auto back = ts::deserialize_model(bytes, "mem");
        CHECK(ts::serialize_model(back) == bytes);
        check_equal_models(model, back);

        auto evil = bytes;
        const size_t at = rng.below(evil.size());
        evil[at] ^= static_cast<uint8_t>(1 + rng.below(255));
        CHECK_THROWS_AS(ts::deserialize_model(evil, "evil"), ts::Error);
    }
}

TEST_CASE("the header starts with the magic and version") {
    ts::Rng rng(802);
    const auto bytes = ts::serialize_model(random_model(rng));
    REQUIRE(bytes.size() > 12);
    CHECK(bytes[0] == 'T');
    CHECK(bytes[1] == 'S');
    CHECK(bytes[2] == 'C');
    CHECK(bytes[3] == 'K');
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 0);
    CHECK(bytes[7] == 0);
}

TEST_CASE("truncated or padded checkpoints are format errors") {
    ts::Rng rng(803);
    const auto bytes = ts::serialize_model(random_model(rng));

    for (size_t keep : {size_t{0}, size_t{5}, size_t{11}, bytes.size() / 2, bytes.size() - 1}) {
        const std::vector<uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<ptrdiff_t>(keep));
        CHECK(error_kind([&] { ts::deserialize_model(cut, "cut"); }) == ts::ErrorKind::format);
    }

    // an extra byte before the checksum is rejected even with a repaired crc
    auto padded = bytes;
    padded.insert(padded.end() - 4, uint8_t{0});
    patch_crc(padded);
    CHECK(error_kind([&] { ts::deserialize_model(padded, "padded"); }) == ts::ErrorKind::format);
}

TEST_CASE("wrong magic and future versions fail with clear errors") {
    ts::Rng rng(804);
    const auto bytes = ts::serialize_model(random_model(rng));

    auto bad = bytes;
    bad[0] = 'X';
    CHECK(error_message([&] { ts::deserialize_model(bad, "bad"); }).find("not a model checkpoint") !=
          std::string::npos);

    auto v2 = bytes;
    v2[4] = 2;
    CHECK(error_message([&] { ts::deserialize_model(v2, "v2"); }).find("version") != std::string::npos);

    auto flipped = bytes;
    flipped[flipped.size() / 2] ^= 0x40;
    CHECK(error_message([&] { ts::deserialize_model(flipped, "flip"); }).find("checksum") !=
          std::string::npos);
}

TEST_CASE("checkpoints survive the filesystem and reload to identical logits") {
    TempDir tmp;
    ts::Rng rng(805);
    auto model = random_model(rng);

    ts::save_model(tmp.file("a.tsck"), model);
    auto loaded = ts::load_model(tmp.file("a.tsck"));
    check_equal_models(model, loaded);
    ts::save_model(tmp.file("b.tsck"), loaded);
    CHECK(read_file(tmp.file("a.tsck")) == read_file(tmp.file("b.tsck")));

    const int s = model.spec.input_size;
    Tensor<float> batch({2, 1, s, s});
    for (auto& v : batch.mutable_data()) v = static_cast<float>(rng.uniform());
    const auto before = ts::forward<float>(nullptr, model, batch, ts::Mode::eval).logits;
    const auto after = ts::forward<float>(nullptr, loaded, batch, ts::Mode::eval).logits;
    const auto da = before.data(), db = after.data();
    REQUIRE(da.size() == db.size());
    for (size_t i = 0; i < da.size(); ++i) CHECK(da[i] == db[i]);

    CHECK(error_kind([&] { ts::load_model(tmp.file("missing.tsck")); }) == ts::ErrorKind::io);
}
