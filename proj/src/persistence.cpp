#include "persistence.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <span>
#include <type_traits>
#include <utility>

#include "crc32.hpp"

namespace ts {

namespace {

constexpr uint32_t kVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v & 0xFFFFFFFFu));
    put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_f32(std::vector<uint8_t>& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }
void put_f64(std::vector<uint8_t>& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Reader {
    const std::vector<uint8_t>& bytes;
    const std::string& origin;
    size_t at = 0;

    void need(size_t n) {
        if (at + n > bytes.size())
            fail_format(strformat("'%s': truncated checkpoint", origin.c_str()));
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[at + static_cast<size_t>(i)]) << (8 * i);
        at += 4;
        return v;
    }
    uint64_t u64() {
        const uint64_t lo = u32();
        const uint64_t hi = u32();
        return lo | (hi << 32);
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes.data() + at), n);
        at += n;
        return s;
    }
};

// The canonical blob order; save and load both walk it so the file layout
// has a single definition.
template <typename ModelT, typename Fn>
void for_each_blob(ModelT& model, Fn&& fn) {
    constexpr bool mutating = !std::is_const_v<std::remove_reference_t<ModelT>>;
    auto tensor_span = [](auto& t) {
        if constexpr (mutating)
            return t.mutable_data();
        else
            return t.data();
    };
    auto vector_span = [](auto& v) {
        if constexpr (mutating)
            return std::span<float>(v);
        else
            return std::span<const float>(v);
    };

    for (size_t i = 0; i < model.conv_w.size(); ++i)
        fn(strformat("conv%zu.w", i + 1), model.conv_w[i].shape(), tensor_span(model.conv_w[i]));
    for (size_t i = 0; i < model.conv_b.size(); ++i)
        fn(strformat("conv%zu.b", i + 1), model.conv_b[i].shape(), tensor_span(model.conv_b[i]));
    fn("bn.gamma", model.bn_gamma.shape(), tensor_span(model.bn_gamma));
    fn("bn.beta", model.bn_beta.shape(), tensor_span(model.bn_beta));
    fn("dense.w", model.dense_w.shape(), tensor_span(model.dense_w));
    fn("dense.b", model.dense_b.shape(), tensor_span(model.dense_b));
    const Shape mean_shape{static_cast<int>(model.bn_running_mean.size())};
    const Shape var_shape{static_cast<int>(model.bn_running_var.size())};
    fn("bn.running_mean", mean_shape, vector_span(model.bn_running_mean));
    fn("bn.running_var", var_shape, vector_span(model.bn_running_var));
}

}  // namespace

std::vector<uint8_t> serialize_model(const Model<float>& model) {
    model.spec.validate();

    std::vector<uint8_t> out;
    out.insert(out.end(), {'T', 'S', 'C', 'K'});
    put_u32(out, kVersion);

    const ModelSpec& spec = model.spec;
    put_u32(out, static_cast<uint32_t>(spec.input_size));
    put_u32(out, static_cast<uint32_t>(spec.convs.size()));
    for (const ConvSpec& c : spec.convs) {
        put_u32(out, static_cast<uint32_t>(c.filters));
        put_u32(out, static_cast<uint32_t>(c.kernel));
        put_u32(out, static_cast<uint32_t>(c.stride));
        put_u32(out, static_cast<uint32_t>(c.padding));
    }
    put_u32(out, static_cast<uint32_t>(spec.pool_window));
    put_u32(out, static_cast<uint32_t>(spec.pool_stride));
    put_f64(out, spec.dropout_rate);

    put_u64(out, model.seed);
    put_u32(out, static_cast<uint32_t>(model.trained_epochs));
    put_f64(out, model.best_val_accuracy);

    uint32_t count = 0;
    for_each_blob(model, [&](const std::string&, const Shape&, std::span<const float>) { ++count; });
    put_u32(out, count);
    for_each_blob(model, [&](const std::string& name, const Shape& shape, std::span<const float> data) {
        put_u32(out, static_cast<uint32_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        put_u32(out, static_cast<uint32_t>(shape.size()));
        for (int dim : shape) put_u32(out, static_cast<uint32_t>(dim));
        for (float v : data) put_f32(out, v);
    });

    put_u32(out, crc32(out.data(), out.size()));
    return out;
}

Model<float> deserialize_model(const std::vector<uint8_t>& bytes, const std::string& origin) {
    if (bytes.size() < 12) fail_format(strformat("'%s': truncated checkpoint", origin.c_str()));
    if (bytes[0] != 'T' || bytes[1] != 'S' || bytes[2] != 'C' || bytes[3] != 'K')
        fail_format(strformat("'%s': not a model checkpoint", origin.c_str()));

    Reader r{bytes, origin, 4};
    const uint32_t version = r.u32();
    if (version != kVersion)
        fail_format(strformat("'%s': unsupported checkpoint version %u", origin.c_str(), version));

    const uint32_t stored = static_cast<uint32_t>(bytes[bytes.size() - 4]) |
                            static_cast<uint32_t>(bytes[bytes.size() - 3]) << 8 |
                            static_cast<uint32_t>(bytes[bytes.size() - 2]) << 16 |
                            static_cast<uint32_t>(bytes[bytes.size() - 1]) << 24;
    if (crc32(bytes.data(), bytes.size() - 4) != stored)
        fail_format(strformat("'%s': checksum mismatch", origin.c_str()));

    ModelSpec spec;
    spec.input_size = static_cast<int>(r.u32());
    const uint32_t conv_count = r.u32();
    if (conv_count != spec.convs.size())
        fail_format(strformat("'%s': expected %zu conv stages, found %u", origin.c_str(),
                              spec.convs.size(), conv_count));
    for (ConvSpec& c : spec.convs) {
        c.filters = static_cast<int>(r.u32());
        c.kernel = static_cast<int>(r.u32());
        c.stride = static_cast<int>(r.u32());
        c.padding = static_cast<int>(r.u32());
    }
    spec.pool_window = static_cast<int>(r.u32());
    spec.pool_stride = static_cast<int>(r.u32());
    spec.dropout_rate = r.f64();
    try {
        spec.validate();
    } catch (const Error& e) {
        fail_format(strformat("'%s': bad architecture block: %s", origin.c_str(), e.what()));
    }

    const uint64_t seed = r.u64();
    const int trained_epochs = static_cast<int>(r.u32());
    const double best_val_accuracy = r.f64();

    auto model = Model<float>::initialized(spec, seed);
    model.trained_epochs = trained_epochs;
    model.best_val_accuracy = best_val_accuracy;

    uint32_t expected = 0;
    for_each_blob(std::as_const(model),
                  [&](const std::string&, const Shape&, std::span<const float>) { ++expected; });
    const uint32_t count = r.u32();
    if (count != expected)
        fail_format(strformat("'%s': expected %u tensors, found %u", origin.c_str(), expected, count));

    for_each_blob(model, [&](const std::string& name, const Shape& shape, std::span<float> data) {
        const auto found = r.str(r.u32());
        if (found != name)
            fail_format(strformat("'%s': expected tensor '%s', found '%s'", origin.c_str(),
                                  name.c_str(), found.c_str()));
        const uint32_t ndim = r.u32();
        Shape dims(ndim);
        for (auto& d : dims) d = static_cast<int>(r.u32());
        if (dims != shape)
            fail_format(strformat("'%s': tensor '%s' has the wrong shape for this architecture",
                                  origin.c_str(), name.c_str()));
        for (auto& v : data) v = r.f32();
    });

    if (r.at != bytes.size() - 4)
        fail_format(strformat("'%s': unexpected bytes after the tensor table", origin.c_str()));
    return model;
}

void save_model(const std::string& path, const Model<float>& model) {
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io(strformat("cannot open '%s' for writing", path.c_str()));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail_io(strformat("short write to '%s'", path.c_str()));
}

Model<float> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io(strformat("cannot open '%s'", path.c_str()));
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail_io(strformat("read failure on '%s'", path.c_str()));
    return deserialize_model(bytes, path);
}

}  // namespace ts
