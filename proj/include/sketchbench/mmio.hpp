#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "sketchbench/matrix.hpp"

namespace sketchbench {

using AnyMatrix = std::variant<DenseMatrix, SparseMatrixCSR>;

/// Reads a MatrixMarket `matrix` object with `real` field and `general` or
/// `symmetric` symmetry. Coordinate files become CSR (symmetric entries mirrored,
/// diagonal kept once, explicit zeros dropped); array files become dense.
/// Throws ParseError naming the line for malformed headers, bad numbers,
/// out-of-range indices, duplicate coordinates and truncated data.
AnyMatrix mm_read(std::istream& in);
AnyMatrix mm_read(const std::filesystem::path& path);

/// Writes `coordinate real general` for CSR and `array real general` for dense.
/// Values use shortest round-trip formatting so mm_read reproduces them bit-exactly.
void mm_write(const SparseMatrixCSR& a, std::ostream& out);
void mm_write(const DenseMatrix& a, std::ostream& out);
void mm_write(const AnyMatrix& a, const std::filesystem::path& path);

}  // namespace sketchbench
