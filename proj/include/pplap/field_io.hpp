#pragma once

#include "pplap/fields.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pplap {

/// Raw per-vertex table: `components` values per vertex, row-major.
struct FieldTable {
    std::size_t vertices = 0;
    std::uint32_t components = 0;
    std::vector<double> values;
};

/// CSV with header "vertex,value" (scalar) or "vertex,c0,c1,..." and one row per vertex.
void write_csv(std::ostream& out, const ScalarField& f);
void write_csv(std::ostream& out, const VectorField& X);
FieldTable read_csv(std::istream& in);

/// Binary layout, all little-endian:
///   bytes 0-3   magic "PPLF"
///   bytes 4-7   uint32 version (1)
///   bytes 8-15  uint64 vertex (location) count
///   bytes 16-19 uint32 component count
///   then count * components float64 values, row-major.
void write_binary(std::ostream& out, const FieldTable& table);
void write_binary(std::ostream& out, const ScalarField& f);
void write_binary(std::ostream& out, const VectorField& X);
FieldTable read_binary(std::istream& in);

/// Convert a single-component table to a field on `domain`.
ScalarField to_scalar_field(const FieldTable& table, DomainPtr domain);

void save_field(const std::string& path, const ScalarField& f);
ScalarField load_field(const std::string& path, DomainPtr domain);

}  // namespace pplap
