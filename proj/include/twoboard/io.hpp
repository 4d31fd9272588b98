#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "twoboard/dpp_solver.hpp"
#include "twoboard/lattice.hpp"

namespace twoboard {

/// Fixed float format of every artifact: 17 significant digits.
std::string format_double(double x);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

/// CSV: node_id, x1..xN, u, v.
void write_values_csv(const Lattice& lattice, const ValuePair& values, std::ostream& out);
/// CSV: node_id, x1..xN, u1..un.
void write_fields_csv(const Lattice& lattice, const std::vector<std::vector<double>>& fields, std::ostream& out);

/// Writes `text` to `path`, creating parent directories. Throws on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace twoboard
