#pragma once

#include <filesystem>

#include "hcd/model.hpp"

namespace hcd {

// Model files are JSON-of-arrays with a mandatory version field; the
// schema is frozen in docs/formats.md. Doubles are emitted with
// shortest round-trip formatting, so save/load is bit-exact and the
// file bytes are deterministic.
void save_model(const ModelChain& chain, const std::filesystem::path& path);
ModelChain load_model(const std::filesystem::path& path);

}  // namespace hcd
