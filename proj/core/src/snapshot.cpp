#include "zkcyl/snapshot.hpp"

#include <bit>
#include <fstream>

#include <json.hpp>

namespace zkcyl {
namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot payloads are little-endian; byte-swapped hosts are not supported");

using ordered_json = nlohmann::ordered_json;

ordered_json header_for(const GridSpec& g, const char* kind, std::size_t count) {
    ordered_json h;
    h["kind"] = kind;
    h["Lambda"] = g.Lambda;
    h["lambda"] = g.lambda;
    h["mx"] = g.mx;
    h["my"] = g.my;
    h["dt"] = g.dt;
    h["dtype"] = "f64";
    h["endian"] = "little";
    h["count"] = count;
    return h;
}

void write_file(const std::string& path, const ordered_json& header, const double* data,
                std::size_t count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
    if (!out) throw std::runtime_error("write_snapshot: short write to " + path);
}

ordered_json read_header(std::ifstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("snapshot: missing header in " + path);
    return ordered_json::parse(line);
}

GridSpec grid_from(const ordered_json& h) {
    GridSpec g;
    g.Lambda = h.at("Lambda").get<double>();
    g.lambda = h.at("lambda").get<double>();
    g.mx = h.at("mx").get<int>();
    g.my = h.at("my").get<int>();
    g.dt = h.at("dt").get<double>();
    g.validate();
    return g;
}

void read_payload(std::ifstream& in, const std::string& path, double* data, std::size_t count) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
    if (static_cast<std::size_t>(in.gcount()) != count * 8)
        throw std::runtime_error("snapshot: truncated payload in " + path);
}

}  // namespace

void write_snapshot(const std::string& path, const PhysicalField& f) {
    write_file(path, header_for(f.grid, "physical", f.values.size()), f.values.data(),
               f.values.size());
}

void write_snapshot(const std::string& path, const SpectralField& f) {
    const std::size_t count = 2 * f.coeffs.size();
    write_file(path, header_for(f.grid, "spectral", count),
               reinterpret_cast<const double*>(f.coeffs.data()), count);
}

PhysicalField read_physical_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    const auto h = read_header(in, path);
    if (h.at("kind") != "physical") throw std::runtime_error("snapshot: kind mismatch in " + path);
    PhysicalField f(grid_from(h));
    read_payload(in, path, f.values.data(), f.values.size());
    return f;
}

SpectralField read_spectral_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    const auto h = read_header(in, path);
    if (h.at("kind") != "spectral") throw std::runtime_error("snapshot: kind mismatch in " + path);
    SpectralField f(grid_from(h));
    read_payload(in, path, reinterpret_cast<double*>(f.coeffs.data()), 2 * f.coeffs.size());
    return f;
}

std::string snapshot_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    return read_header(in, path).at("kind").get<std::string>();
}

}  // namespace zkcyl
