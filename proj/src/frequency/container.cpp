#include "ccnls/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ccnls {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'N', 'L'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("container: truncated header");
  return v;
}

std::size_t spatial(const ContainerHeader& h) {
  std::size_t n = 1;
  for (int a = 0; a < h.d; ++a) n *= static_cast<std::size_t>(h.M);
  return n;
}

nlohmann::json header_json(const ContainerHeader& h) {
  return {{"d", h.d}, {"L", h.L}, {"M", h.M}, {"Q", h.Q}, {"dt", h.dt}, {"components", h.ncomp},
          {"layout", "t,x1..xd,component"}, {"dtype", "complex64-le"}};
}

}  // namespace

void write_container(const std::filesystem::path& path, const ContainerData& data,
                     const nlohmann::json& metadata) {
  const auto& h = data.header;
  std::size_t S = spatial(h);
  if (static_cast<int>(data.values.size()) != h.ncomp)
    throw std::logic_error("container: component count mismatch");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("container: cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, h.d);
  put<double>(os, h.L);
  put<std::int32_t>(os, h.M);
  put<std::int32_t>(os, h.Q);
  put<double>(os, h.dt);
  put<std::int32_t>(os, h.ncomp);
  std::vector<float> buf;
  buf.reserve(2 * S * h.ncomp);
  for (int q = 0; q < h.Q; ++q) {
    buf.clear();
    for (std::size_t x = 0; x < S; ++x)
      for (int c = 0; c < h.ncomp; ++c) {
        const cplx& z = data.values[c][q * S + x];
        buf.push_back(static_cast<float>(z.real()));
        buf.push_back(static_cast<float>(z.imag()));
      }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!os) throw std::runtime_error("container: write failed for " + path.string());

  nlohmann::json side = header_json(h);
  side["metadata"] = metadata;
  std::ofstream js(path.string() + ".json", std::ios::trunc);
  if (!js) throw std::runtime_error("container: cannot write sidecar for " + path.string());
  js << side.dump(2) << '\n';
}

ContainerData read_container(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("container: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("container: bad magic in " + path.string());
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("container: unsupported version");
  ContainerData out;
  auto& h = out.header;
  h.d = get<std::int32_t>(is);
  h.L = get<double>(is);
  h.M = get<std::int32_t>(is);
  h.Q = get<std::int32_t>(is);
  h.dt = get<double>(is);
  h.ncomp = get<std::int32_t>(is);
  std::size_t S = spatial(h);
  out.values.assign(h.ncomp, cvec(S * h.Q));
  std::vector<float> buf(2 * S * h.ncomp);
  for (int q = 0; q < h.Q; ++q) {
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!is) throw std::runtime_error("container: truncated payload in " + path.string());
    std::size_t k = 0;
    for (std::size_t x = 0; x < S; ++x)
      for (int c = 0; c < h.ncomp; ++c, k += 2) out.values[c][q * S + x] = cplx(buf[k], buf[k + 1]);
  }
  return out;
}

ContainerData to_container(const Field& f) {
  Field p = f.physical();
  ContainerData out;
  out.header = {p.grid.d, p.grid.L, p.grid.M, 1, 0.0, p.ncomp()};
  out.values = p.comp;
  return out;
}

ContainerData to_container(const SpaceTimeSample& s) {
  ContainerData out;
  out.header = {s.grid.d, s.grid.L, s.grid.M, s.Q, s.dt, s.ncomp()};
  out.values = s.values;
  return out;
}

ContainerData to_container(std::span<const StateBundle> frames, double dt) {
  if (frames.empty()) throw ParameterError("container: no frames");
  const Grid& g = frames.front().grid();
  std::size_t S = g.size();
  ContainerData out;
  out.header = {g.d, g.L, g.M, static_cast<int>(frames.size()), dt, 3 * g.d};
  out.values.assign(3 * g.d, cvec(S * frames.size()));
  for (std::size_t q = 0; q < frames.size(); ++q) {
    StateBundle p = frames[q].physical();
    const Field* fs[3] = {&p.u, &p.v, &p.w};
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < g.d; ++c)
        std::copy(fs[k]->comp[c].begin(), fs[k]->comp[c].end(), out.values[k * g.d + c].begin() + q * S);
  }
  return out;
}

Field field_from_container(const ContainerData& c, int q) {
  const auto& h = c.header;
  Grid g(h.d, h.L, h.M);
  std::size_t S = g.size();
  if (q < 0 || q >= h.Q) throw ParameterError("container: time index out of range");
  Field f(g, h.ncomp, Rep::Physical);
  for (int k = 0; k < h.ncomp; ++k)
    std::copy(c.values[k].begin() + q * S, c.values[k].begin() + (q + 1) * S, f.comp[k].begin());
  return f;
}

SpaceTimeSample sample_from_container(const ContainerData& c) {
  const auto& h = c.header;
  SpaceTimeSample s(Grid(h.d, h.L, h.M), 0.0, h.dt, h.Q, h.ncomp);
  s.values = c.values;
  return s;
}

std::vector<StateBundle> bundles_from_container(const ContainerData& c) {
  const auto& h = c.header;
  if (h.ncomp != 3 * h.d) throw ParameterError("container: not a state-bundle container");
  Grid g(h.d, h.L, h.M);
  std::size_t S = g.size();
  std::vector<StateBundle> out;
  for (int q = 0; q < h.Q; ++q) {
    Field fs[3] = {Field(g), Field(g), Field(g)};
    for (int k = 0; k < 3; ++k)
      for (int comp = 0; comp < h.d; ++comp)
        std::copy(c.values[k * h.d + comp].begin() + q * S, c.values[k * h.d + comp].begin() + (q + 1) * S,
                  fs[k].comp[comp].begin());
    out.emplace_back(fs[0], fs[1], fs[2], q * h.dt);
  }
  return out;
}

}  // namespace ccnls
