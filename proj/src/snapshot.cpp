#include "nlchns/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace nlchns {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts unsupported");

namespace {
constexpr char kMagic[8] = {'N', 'L', 'C', 'H', 'N', 'S', '0', '1'};
}

void write_snapshot(const std::string& path, const ScalarField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open snapshot file for writing: " + path);
    const uint32_t nx = static_cast<uint32_t>(f.grid.nx), ny = static_cast<uint32_t>(f.grid.ny);
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&ny), 4);
    out.write(reinterpret_cast<const char*>(&f.grid.lx), 8);
    out.write(reinterpret_cast<const char*>(&f.grid.ly), 8);
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!out) throw Error("short write on snapshot file: " + path);
}

ScalarField read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snapshot file: " + path);
    char magic[8];
    uint32_t nx = 0, ny = 0;
    double lx = 0, ly = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    in.read(reinterpret_cast<char*>(&lx), 8);
    in.read(reinterpret_cast<char*>(&ly), 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw Error("bad snapshot header in " + path);
    const Grid g = make_grid(lx, ly, static_cast<int>(nx), static_cast<int>(ny));
    ScalarField f(g);
    in.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!in) throw Error("truncated snapshot file: " + path);
    return f;
}

}  // namespace nlchns
