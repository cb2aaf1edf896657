#include "zk/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "zk/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

namespace zk {

namespace {
constexpr char kMagic[4] = {'Z', 'K', 'F', '1'};

void put_u64(std::ofstream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint64_t get_u64(std::ifstream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::ifstream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field& u) {
  if (u.rep != Rep::Physical) {
    throw UsageError("write_snapshot: field must be in physical representation");
  }
  const std::filesystem::path tmp = path.string() + ".partial";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("write_snapshot: cannot open " + tmp.string());
    os.write(kMagic, 4);
    put_u64(os, static_cast<std::uint64_t>(u.dom.Nx));
    put_u64(os, static_cast<std::uint64_t>(u.dom.Ny));
    put_u64(os, static_cast<std::uint64_t>(u.dom.Nz));
    put_f64(os, u.dom.L1);
    put_f64(os, u.dom.L2);
    put_f64(os, u.dom.X);
    os.write(reinterpret_cast<const char*>(u.phys.data()),
             static_cast<std::streamsize>(u.phys.size() * sizeof(double)));
    if (!os) throw DataError("write_snapshot: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("read_snapshot: cannot open " + path.string());
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("read_snapshot: bad magic in " + path.string());
  }
  DomainSpec dom;
  dom.Nx = static_cast<int>(get_u64(is));
  dom.Ny = static_cast<int>(get_u64(is));
  dom.Nz = static_cast<int>(get_u64(is));
  dom.L1 = get_f64(is);
  dom.L2 = get_f64(is);
  dom.X = get_f64(is);
  dom.dealias = true;
  if (!is) throw DataError("read_snapshot: truncated header in " + path.string());
  try {
    dom.validate();
  } catch (const DomainError& e) {
    throw DataError("read_snapshot: invalid header in " + path.string() + ": " + e.what());
  }
  Field u = make_physical_field(dom);
  is.read(reinterpret_cast<char*>(u.phys.data()),
          static_cast<std::streamsize>(u.phys.size() * sizeof(double)));
  if (!is || is.gcount() != static_cast<std::streamsize>(u.phys.size() * sizeof(double))) {
    throw DataError("read_snapshot: truncated data in " + path.string());
  }
  return u;
}

Field read_snapshot(const std::filesystem::path& path, const DomainSpec& expect) {
  Field u = read_snapshot(path);
  const DomainSpec& d = u.dom;
  auto fail = [&](const std::string& what) {
    throw DataError("read_snapshot: " + path.string() + " header mismatch on " + what);
  };
  if (d.Nx != expect.Nx) fail("Nx");
  if (d.Ny != expect.Ny) fail("Ny");
  if (d.Nz != expect.Nz) fail("Nz");
  if (d.L1 != expect.L1) fail("L1");
  if (d.L2 != expect.L2) fail("L2");
  if (d.X != expect.X) fail("X");
  u.dom.dealias = expect.dealias;
  return u;
}

}  // namespace zk
