#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "lpflow/mlp.hpp"

namespace lpflow {

// On-disk model role; validated on load so models cannot be silently swapped.
enum class ModelKind : uint8_t {
    encoder = 1,
    decoder = 2,
    flow = 3,
    latent = 4,
};

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::encoder: return "encoder";
        case ModelKind::decoder: return "decoder";
        case ModelKind::flow: return "flow";
        case ModelKind::latent: return "latent";
    }
    return "?";
}

struct checkpoint_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expected one model role, found another.
struct kind_mismatch_error : checkpoint_error {
    using checkpoint_error::checkpoint_error;
};

// Little-endian binary container: magic "LDFW", u32 format version, u8 model
// kind, u32 tensor count, then per tensor u16 name length + UTF-8 name,
// u8 rank, u32 dims, raw float32 payload. Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, ModelKind kind, const Mlp<float>& model);

Mlp<float> load_checkpoint(const std::filesystem::path& path, ModelKind expected_kind);

ModelKind peek_checkpoint_kind(const std::filesystem::path& path);

}  // namespace lpflow
