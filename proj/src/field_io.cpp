#include "pplap/field_io.hpp"

#include "pplap/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace pplap {

namespace {

constexpr char kMagic[4] = {'P', 'P', 'L', 'F'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary field IO assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) throw ConfigError("truncated binary field");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

void write_rows(std::ostream& out, std::size_t rows, int comps, const std::vector<double>& values) {
    out << "vertex";
    if (comps == 1) {
        out << ",value";
    } else {
        for (int c = 0; c < comps; ++c) out << ",c" << c;
    }
    out << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t r = 0; r < rows; ++r) {
        out << r;
        for (int c = 0; c < comps; ++c) out << ',' << values[r * comps + c];
        out << '\n';
    }
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_csv(std::ostream& out, const ScalarField& f) { write_rows(out, f.size(), 1, f.values()); }

void write_csv(std::ostream& out, const VectorField& X) {
    write_rows(out, X.locations(), X.components(), X.values());
}

FieldTable read_csv(std::istream& in) {
    FieldTable t;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ConfigError("empty field CSV");
    ++lineno;
    std::size_t commas = 0;
    for (char c : line) commas += c == ',';
    if (line.rfind("vertex", 0) != 0 || commas == 0) throw ConfigError("missing CSV header", lineno);
    t.components = static_cast<std::uint32_t>(commas);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        std::size_t id = 0;
        try {
            id = std::stoull(cell);
        } catch (const std::exception&) {
            throw ConfigError("bad vertex id '" + cell + "'", lineno);
        }
        if (id != t.vertices) throw ConfigError("vertex ids must be consecutive from 0", lineno);
        for (std::uint32_t c = 0; c < t.components; ++c) {
            if (!std::getline(ls, cell, ',')) throw ConfigError("missing value", lineno);
            try {
                t.values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("bad value '" + cell + "'", lineno);
            }
        }
        ++t.vertices;
    }
    return t;
}

void write_binary(std::ostream& out, const FieldTable& table) {
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put<std::uint64_t>(out, table.vertices);
    put<std::uint32_t>(out, table.components);
    for (double x : table.values) put<double>(out, x);
}

void write_binary(std::ostream& out, const ScalarField& f) { write_binary(out, FieldTable{f.size(), 1, f.values()}); }

void write_binary(std::ostream& out, const VectorField& X) {
    write_binary(out, FieldTable{X.locations(), static_cast<std::uint32_t>(X.components()), X.values()});
}

FieldTable read_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError("not a binary field file");
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw ConfigError("unsupported binary field version " + std::to_string(version));
    FieldTable t;
    t.vertices = get<std::uint64_t>(in);
    t.components = get<std::uint32_t>(in);
    t.values.resize(t.vertices * t.components);
    for (double& x : t.values) x = get<double>(in);
    return t;
}

ScalarField to_scalar_field(const FieldTable& table, DomainPtr domain) {
    if (table.components != 1) throw ConfigError("expected a scalar field");
    if (table.vertices != domain->num_vertices())
        throw ConfigError("field has " + std::to_string(table.vertices) + " vertices, domain has " +
                          std::to_string(domain->num_vertices()));
    return ScalarField(std::move(domain), table.values);
}

void save_field(const std::string& path, const ScalarField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    if (ends_with(path, ".bin")) {
        write_binary(out, f);
    } else {
        write_csv(out, f);
    }
}

ScalarField load_field(const std::string& path, DomainPtr domain) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open field file '" + path + "'");
    return to_scalar_field(ends_with(path, ".bin") ? read_binary(in) : read_csv(in), std::move(domain));
}

}  // namespace pplap
