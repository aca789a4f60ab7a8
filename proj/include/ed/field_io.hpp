#pragma once

#include <string>

#include "ed/fields.hpp"

namespace ed {

/// Snapshot format, plain text:
///   # grid D N1..ND L1..LD boundary
///   index value            (scalar)
///   index re im            (complex)
/// Values carry 17 significant digits so the round-trip is bit-exact.
void save_field(const ScalarField& f, const std::string& path);
void save_field(const ComplexField& f, const std::string& path);

ScalarField load_scalar_field(const std::string& path);
ComplexField load_complex_field(const std::string& path);

/// True when the file holds a complex snapshot (three columns).
bool snapshot_is_complex(const std::string& path);

}  // namespace ed
