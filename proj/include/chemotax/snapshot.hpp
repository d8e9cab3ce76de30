#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chemotax/field.hpp"

namespace chemotax {

// One density profile at time t; rho[i] belongs to lattice site i.
struct Snapshot {
    double t = 0.0;
    std::vector<double> rho;
};

// Snapshot stream shared by the particle and continuum solvers.
// meta carries the resolved run configuration written into file headers.
struct SnapshotSeries {
    FieldGrid grid;
    double dt = 0.0;
    std::string solver; // "mc" or "ks"
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<Snapshot> frames;
};

// CSV: '#'-prefixed header lines ("# key = value"), then rows
// t,site,x,rho,solver with full double round-trip precision.
void write_snapshots_csv(std::ostream& os, const SnapshotSeries& s);
SnapshotSeries read_snapshots_csv(std::istream& is);

// Compact binary: magic "CTAXSNP1", u32 version, u32 solver kind (0 mc, 1 ks),
// u32 sites, f64 dx, f64 dt, u64 frame count, u32 metadata byte length +
// metadata ("key = value" lines), then per frame: f64 t, sites x f64 rho.
// Little-endian, packed.
void write_snapshots_binary(std::ostream& os, const SnapshotSeries& s);
SnapshotSeries read_snapshots_binary(std::istream& is);

} // namespace chemotax
