#include "lpflow/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace lpflow {

namespace {

constexpr char kMagic[4] = {'L', 'D', 'F', 'W'};
constexpr uint32_t kFormatVersion = 1;
constexpr const char* kMetaName = "__meta__";

void write_u16(std::ostream& os, uint16_t v) {
    const uint8_t b[2] = {static_cast<uint8_t>(v & 0xff), static_cast<uint8_t>(v >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

void write_u32(std::ostream& os, uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v & 0xff), static_cast<uint8_t>((v >> 8) & 0xff),
                          static_cast<uint8_t>((v >> 16) & 0xff), static_cast<uint8_t>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void write_f32(std::ostream& os, const float* data, size_t n) {
    static_assert(sizeof(float) == 4);
    // host is little-endian; payload is already in wire order
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 4));
}

uint16_t read_u16(std::istream& is) {
    uint8_t b[2];
    is.read(reinterpret_cast<char*>(b), 2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t read_u32(std::istream& is) {
    uint8_t b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

struct RawTensor {
    std::string name;
    std::vector<uint32_t> dims;
    std::vector<float> data;
};

void write_tensor(std::ostream& os, const std::string& name,
                  const std::vector<uint32_t>& dims, const float* data) {
    if (name.size() > 0xffff) {
        throw checkpoint_error("tensor name too long: " + name);
    }
    write_u16(os, static_cast<uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    os.put(static_cast<char>(dims.size()));
    size_t n = 1;
    for (uint32_t d : dims) {
        write_u32(os, d);
        n *= d;
    }
    write_f32(os, data, n);
}

RawTensor read_tensor(std::istream& is) {
    RawTensor t;
    const uint16_t name_len = read_u16(is);
    t.name.resize(name_len);
    is.read(t.name.data(), name_len);
    const int rank = is.get();
    if (rank < 0) {
        throw checkpoint_error("truncated checkpoint while reading tensor header");
    }
    size_t n = 1;
    for (int i = 0; i < rank; ++i) {
        const uint32_t d = read_u32(is);
        t.dims.push_back(d);
        n *= d;
    }
    t.data.resize(n);
    is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(n * 4));
    if (!is) {
        throw checkpoint_error("truncated checkpoint while reading tensor " + t.name);
    }
    return t;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, ModelKind kind, const Mlp<float>& model) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw checkpoint_error("cannot open checkpoint for writing: " + path.string());
    }
    os.write(kMagic, 4);
    write_u32(os, kFormatVersion);
    os.put(static_cast<char>(kind));

    const auto& params = model.params();
    write_u32(os, static_cast<uint32_t>(params.size() + 1));

    const MlpConfig& c = model.config();
    const float meta[6] = {static_cast<float>(c.input_dim),  static_cast<float>(c.cond_dim),
                           static_cast<float>(c.output_dim), static_cast<float>(c.width),
                           static_cast<float>(c.blocks),     static_cast<float>(c.time_freqs)};
    write_tensor(os, kMetaName, {6}, meta);

    for (const auto& p : params) {
        std::vector<uint32_t> dims;
        dims.push_back(static_cast<uint32_t>(p.rows));
        if (p.cols > 0) {
            dims.push_back(static_cast<uint32_t>(p.cols));
        }
        write_tensor(os, p.name, dims, p.v.data());
    }
    os.flush();
    if (!os) {
        throw checkpoint_error("I/O error writing checkpoint: " + path.string());
    }
}

ModelKind peek_checkpoint_kind(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw checkpoint_error("cannot open checkpoint: " + path.string());
    }
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw checkpoint_error("bad magic in checkpoint: " + path.string());
    }
    const uint32_t version = read_u32(is);
    if (version != kFormatVersion) {
        throw checkpoint_error("unsupported checkpoint version " + std::to_string(version));
    }
    const int kind = is.get();
    if (kind < 1 || kind > 4) {
        throw checkpoint_error("unknown model kind tag in checkpoint: " + path.string());
    }
    return static_cast<ModelKind>(kind);
}

Mlp<float> load_checkpoint(const std::filesystem::path& path, ModelKind expected_kind) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw checkpoint_error("cannot open checkpoint: " + path.string());
    }
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw checkpoint_error("bad magic in checkpoint: " + path.string());
    }
    const uint32_t version = read_u32(is);
    if (version != kFormatVersion) {
        throw checkpoint_error("unsupported checkpoint version " + std::to_string(version));
    }
    const int kind = is.get();
    if (kind != static_cast<int>(expected_kind)) {
        throw kind_mismatch_error("checkpoint " + path.string() + " holds a " +
                                  to_string(static_cast<ModelKind>(kind)) + " model, expected " +
                                  to_string(expected_kind));
    }
    const uint32_t count = read_u32(is);
    std::vector<RawTensor> tensors;
    tensors.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        tensors.push_back(read_tensor(is));
    }

    const RawTensor* meta = nullptr;
    for (const auto& t : tensors) {
        if (t.name == kMetaName) {
            meta = &t;
            break;
        }
    }
    if (meta == nullptr || meta->data.size() != 6) {
        throw checkpoint_error("checkpoint missing model metadata: " + path.string());
    }
    MlpConfig cfg;
    cfg.input_dim = static_cast<int>(meta->data[0]);
    cfg.cond_dim = static_cast<int>(meta->data[1]);
    cfg.output_dim = static_cast<int>(meta->data[2]);
    cfg.width = static_cast<int>(meta->data[3]);
    cfg.blocks = static_cast<int>(meta->data[4]);
    cfg.time_freqs = static_cast<int>(meta->data[5]);

    Mlp<float> model(cfg, 0);
    for (auto& p : model.params()) {
        bool found = false;
        for (const auto& t : tensors) {
            if (t.name != p.name) continue;
            if (t.data.size() != p.v.size()) {
                throw checkpoint_error("tensor " + p.name + " has wrong size in " + path.string());
            }
            p.v = t.data;
            found = true;
            break;
        }
        if (!found) {
            throw checkpoint_error("checkpoint missing tensor " + p.name + ": " + path.string());
        }
    }
    return model;
}

}  // namespace lpflow
