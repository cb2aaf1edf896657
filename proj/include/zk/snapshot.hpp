#pragma once

#include <filesystem>

#include "zk/field.hpp"

namespace zk {

// ZKF1 snapshot: magic "ZKF1", then Nx, Ny, Nz as uint64 LE, then L1, L2, X as
// float64 LE, then Nx*Ny*Nz float64 collocation values in row-major order
// (x slowest, z fastest). Writes go through a .partial file and an atomic rename.
void write_snapshot(const std::filesystem::path& path, const Field& u);

// Reads and validates a snapshot; dealias on the reconstructed domain defaults true.
Field read_snapshot(const std::filesystem::path& path);

// As above, but the header must reproduce `expect` exactly (sizes and lengths).
Field read_snapshot(const std::filesystem::path& path, const DomainSpec& expect);

}  // namespace zk
