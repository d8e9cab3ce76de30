#include "chemotax/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace chemotax {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'A', 'X', 'S', 'N', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t solver_kind(const std::string& solver) {
    if (solver == "mc") return 0;
    if (solver == "ks") return 1;
    throw std::invalid_argument("snapshot: solver must be \"mc\" or \"ks\", got \"" + solver + "\"");
}

std::string solver_name(std::uint32_t kind) {
    if (kind == 0) return "mc";
    if (kind == 1) return "ks";
    throw std::runtime_error("snapshot: unknown solver kind " + std::to_string(kind));
}

std::string meta_blob(const SnapshotSeries& s) {
    std::string blob;
    for (const auto& [k, v] : s.meta) blob += k + " = " + v + "\n";
    return blob;
}

std::vector<std::pair<std::string, std::string>> parse_meta_blob(const std::string& blob) {
    std::vector<std::pair<std::string, std::string>> meta;
    std::istringstream is(blob);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        meta.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
    return meta;
}

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("snapshot: truncated binary stream");
    return v;
}

void check_frames(const SnapshotSeries& s) {
    for (const auto& f : s.frames)
        if (static_cast<int>(f.rho.size()) != s.grid.sites)
            throw std::invalid_argument("snapshot: frame size does not match grid");
}

} // namespace

void write_snapshots_csv(std::ostream& os, const SnapshotSeries& s) {
    validate(s.grid);
    solver_kind(s.solver);
    check_frames(s);
    const auto flags = os.flags();
    os.precision(17);
    os << "# sites = " << s.grid.sites << "\n";
    os << "# dx = " << s.grid.dx << "\n";
    os << "# dt = " << s.dt << "\n";
    os << "# solver = " << s.solver << "\n";
    for (const auto& [k, v] : s.meta) os << "# " << k << " = " << v << "\n";
    os << "# columns: t,site,x,rho,solver\n";
    for (const auto& f : s.frames)
        for (int i = 0; i < s.grid.sites; ++i)
            os << f.t << ',' << i << ',' << s.grid.center(i) << ',' << f.rho[i] << ',' << s.solver << "\n";
    os.flags(flags);
}

SnapshotSeries read_snapshots_csv(std::istream& is) {
    SnapshotSeries s;
    std::string line;
    bool have_sites = false, have_dx = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body.erase(0, 1);
            const auto eq = body.find(" = ");
            if (eq == std::string::npos) continue; // columns line or free comment
            const std::string key = body.substr(0, eq);
            const std::string val = body.substr(eq + 3);
            if (key == "sites") {
                s.grid.sites = std::stoi(val);
                have_sites = true;
            } else if (key == "dx") {
                s.grid.dx = std::stod(val);
                have_dx = true;
            } else if (key == "dt") {
                s.dt = std::stod(val);
            } else if (key == "solver") {
                s.solver = val;
            } else {
                s.meta.emplace_back(key, val);
            }
            continue;
        }
        if (!have_sites || !have_dx) throw std::runtime_error("snapshot CSV: data before sites/dx header");
        std::istringstream row(line);
        std::string t_s, site_s, x_s, rho_s;
        if (!std::getline(row, t_s, ',') || !std::getline(row, site_s, ',') || !std::getline(row, x_s, ',') ||
            !std::getline(row, rho_s, ','))
            throw std::runtime_error("snapshot CSV: malformed row: " + line);
        const double t = std::stod(t_s);
        const int site = std::stoi(site_s);
        if (s.frames.empty() || s.frames.back().t != t || site == 0) {
            if (!s.frames.empty() && static_cast<int>(s.frames.back().rho.size()) != s.grid.sites)
                throw std::runtime_error("snapshot CSV: incomplete frame");
            s.frames.push_back(Snapshot{t, {}});
            s.frames.back().rho.reserve(s.grid.sites);
        }
        if (site != static_cast<int>(s.frames.back().rho.size()))
            throw std::runtime_error("snapshot CSV: site indices out of order");
        s.frames.back().rho.push_back(std::stod(rho_s));
    }
    if (!s.frames.empty() && static_cast<int>(s.frames.back().rho.size()) != s.grid.sites)
        throw std::runtime_error("snapshot CSV: incomplete final frame");
    validate(s.grid);
    solver_kind(s.solver);
    return s;
}

void write_snapshots_binary(std::ostream& os, const SnapshotSeries& s) {
    validate(s.grid);
    check_frames(s);
    const std::string blob = meta_blob(s);
    os.write(kMagic, sizeof kMagic);
    put(os, kVersion);
    put(os, solver_kind(s.solver));
    put(os, static_cast<std::uint32_t>(s.grid.sites));
    put(os, s.grid.dx);
    put(os, s.dt);
    put(os, static_cast<std::uint64_t>(s.frames.size()));
    put(os, static_cast<std::uint32_t>(blob.size()));
    os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    for (const auto& f : s.frames) {
        put(os, f.t);
        os.write(reinterpret_cast<const char*>(f.rho.data()),
                 static_cast<std::streamsize>(f.rho.size() * sizeof(double)));
    }
}

SnapshotSeries read_snapshots_binary(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error("snapshot binary: bad magic");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion)
        throw std::runtime_error("snapshot binary: unsupported version " + std::to_string(version));
    SnapshotSeries s;
    s.solver = solver_name(get<std::uint32_t>(is));
    s.grid.sites = static_cast<int>(get<std::uint32_t>(is));
    s.grid.dx = get<double>(is);
    s.dt = get<double>(is);
    const auto frames = get<std::uint64_t>(is);
    const auto blob_len = get<std::uint32_t>(is);
    std::string blob(blob_len, '\0');
    is.read(blob.data(), blob_len);
    if (!is) throw std::runtime_error("snapshot binary: truncated metadata");
    s.meta = parse_meta_blob(blob);
    validate(s.grid);
    s.frames.resize(frames);
    for (auto& f : s.frames) {
        f.t = get<double>(is);
        f.rho.resize(s.grid.sites);
        is.read(reinterpret_cast<char*>(f.rho.data()),
                static_cast<std::streamsize>(f.rho.size() * sizeof(double)));
        if (!is) throw std::runtime_error("snapshot binary: truncated frame");
    }
    return s;
}

} // namespace chemotax
