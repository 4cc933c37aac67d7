#pragma once

#include <string>

#include "comblink/types.hpp"

namespace comblink {

// Binary waveform file: fixed 64-byte header (magic "CLWAVE01", u32 version,
// u32 pol count, u64 sample count, f64 sample rate, f64 t0, zero padding)
// followed by little-endian float32 interleaved I,Q per polarization,
// polarizations concatenated.
void export_waveform(const Frame& frame, const std::string& path);
Frame import_waveform(const std::string& path);

}  // namespace comblink
