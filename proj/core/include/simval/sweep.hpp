#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>

#include <nlohmann/json.hpp>

#include "simval/manifold.hpp"
#include "simval/protocol.hpp"

namespace simval {

struct SweepPlan {
    std::size_t cells = 0;             // theta_W grid points
    std::size_t renders = 0;           // radiance images to render
    std::size_t evaluations = 0;       // (cell, context, s) combinations
};

SweepPlan plan_sweep(const ProtocolConfig &p);

struct SweepOptions {
    int threads = 0;  // <= 0: hardware concurrency
    /// When set, each finished cell is stored under a content hash and
    /// reused by later runs of the same protocol.
    std::filesystem::path cache_dir;
    /// Stop after computing this many new cells (simulates an interruption).
    std::size_t max_new_cells = std::numeric_limits<std::size_t>::max();
};

struct SweepResult {
    Manifold manifold;
    /// Per-cell diagnostics: skipped degenerate patches, DS threshold
    /// fractions and exclusions.
    nlohmann::json details;
    std::size_t cells_computed = 0;
    std::size_t cells_cached = 0;
    bool complete = true;
};

/// Evaluates every theta_W cell of the protocol. Missing contexts become gap
/// records; render errors propagate. Output is independent of the thread
/// count and of whether cells came from the cache.
SweepResult run_sweep(const ProtocolConfig &p, const SweepOptions &opts = {});

/// Result of one cell evaluated in isolation (same values as in a sweep).
SweepResult run_cell(const ProtocolConfig &p, std::size_t cell, int threads = 0);

}  // namespace simval
