#pragma once

#include <string>

#include "zkcyl/grid.hpp"

namespace zkcyl {

// Snapshot files: one line of JSON (grid parameters, field kind, endianness,
// dtype), then raw little-endian float64 payload, row-major with x outer and
// y inner.  Spectral payloads interleave re,im per mode.
void write_snapshot(const std::string& path, const PhysicalField& f);
void write_snapshot(const std::string& path, const SpectralField& f);

PhysicalField read_physical_snapshot(const std::string& path);
SpectralField read_spectral_snapshot(const std::string& path);

// Kind string stored in the header of an existing snapshot.
std::string snapshot_kind(const std::string& path);

}  // namespace zkcyl
