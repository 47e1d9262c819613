#include "advectflow/field_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace advectflow {

namespace {

void put_u32le(unsigned char* p, std::uint32_t v) {
    p[0] = static_cast<unsigned char>(v & 0xff);
    p[1] = static_cast<unsigned char>((v >> 8) & 0xff);
    p[2] = static_cast<unsigned char>((v >> 16) & 0xff);
    p[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f64le(unsigned char* p, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
        p[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
    }
}

double get_f64le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    }
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
}

}  // namespace

void write_field(const Field3D& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FieldIoError("cannot open '" + path + "' for writing");
    }

    std::array<unsigned char, kPwafHeaderBytes> header{};
    header[0] = 'P';
    header[1] = 'W';
    header[2] = 'A';
    header[3] = 'F';
    put_u32le(header.data() + 4, kPwafVersion);
    const Extents& e = field.extents();
    put_u32le(header.data() + 8, static_cast<std::uint32_t>(e.nx));
    put_u32le(header.data() + 12, static_cast<std::uint32_t>(e.ny));
    put_u32le(header.data() + 16, static_cast<std::uint32_t>(e.nz));
    header[20] = Field3D::halo_x;
    header[21] = Field3D::halo_y;
    header[22] = Field3D::halo_z;
    out.write(reinterpret_cast<const char*>(header.data()), header.size());

    std::vector<unsigned char> buf(field.data().size() * 8);
    for (std::size_t m = 0; m < field.data().size(); ++m) {
        put_f64le(buf.data() + 8 * m, field.data()[m]);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw FieldIoError("short write to '" + path + "'");
    }
}

Field3D read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FieldIoError("cannot open '" + path + "' for reading");
    }

    std::array<unsigned char, kPwafHeaderBytes> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() != static_cast<std::streamsize>(header.size())) {
        throw FieldIoError("'" + path + "': truncated header");
    }
    if (header[0] != 'P' || header[1] != 'W' || header[2] != 'A' || header[3] != 'F') {
        throw FieldIoError("'" + path + "': bad magic (not a PWAF file)");
    }
    const std::uint32_t version = get_u32le(header.data() + 4);
    if (version != kPwafVersion) {
        throw FieldIoError("'" + path + "': unsupported version " + std::to_string(version));
    }
    Extents e;
    e.nx = static_cast<int>(get_u32le(header.data() + 8));
    e.ny = static_cast<int>(get_u32le(header.data() + 12));
    e.nz = static_cast<int>(get_u32le(header.data() + 16));
    if (!e.valid()) {
        throw FieldIoError("'" + path + "': invalid extents in header");
    }
    if (header[20] != Field3D::halo_x || header[21] != Field3D::halo_y ||
        header[22] != Field3D::halo_z) {
        throw FieldIoError("'" + path + "': halo widths do not match the field layout");
    }

    const std::int64_t n = e.padded_cells();
    std::vector<unsigned char> buf(static_cast<std::size_t>(n) * 8);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw FieldIoError("'" + path + "': truncated payload");
    }

    std::vector<double> data(static_cast<std::size_t>(n));
    for (std::int64_t m = 0; m < n; ++m) {
        data[static_cast<std::size_t>(m)] = get_f64le(buf.data() + 8 * m);
        if (!std::isfinite(data[static_cast<std::size_t>(m)])) {
            throw FieldIoError("'" + path + "': non-finite value in payload");
        }
    }
    return Field3D(e, std::move(data));
}

}  // namespace advectflow
