#include "twoboard/io.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace twoboard {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error{"sha256_hex: digest failed"};
  }
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

namespace {

void write_coords_header(const Lattice& lattice, std::ostream& out) {
  out << "node_id";
  for (int i = 0; i < lattice.dim(); ++i) out << ",x" << (i + 1);
}

void write_coords(const Lattice& lattice, std::size_t n, std::ostream& out) {
  out << n;
  const Point x = lattice.coord(n);
  for (int i = 0; i < lattice.dim(); ++i) out << ',' << format_double(x[i]);
}

}  // namespace

void write_values_csv(const Lattice& lattice, const ValuePair& values, std::ostream& out) {
  if (values.u.size() != lattice.size() || values.v.size() != lattice.size()) {
    throw std::invalid_argument{"write_values_csv: values do not match the lattice"};
  }
  write_coords_header(lattice, out);
  out << ",u,v\n";
  for (std::size_t n = 0; n < lattice.size(); ++n) {
    write_coords(lattice, n, out);
    out << ',' << format_double(values.u[n]) << ',' << format_double(values.v[n]) << '\n';
  }
}

void write_fields_csv(const Lattice& lattice, const std::vector<std::vector<double>>& fields, std::ostream& out) {
  write_coords_header(lattice, out);
  for (std::size_t i = 0; i < fields.size(); ++i) out << ",u" << (i + 1);
  out << '\n';
  for (std::size_t n = 0; n < lattice.size(); ++n) {
    write_coords(lattice, n, out);
    for (const auto& f : fields) out << ',' << format_double(f.at(n));
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error{"cannot write '" + path.string() + "'"};
  out << text;
  if (!out) throw std::runtime_error{"write to '" + path.string() + "' failed"};
}

}  // namespace twoboard
