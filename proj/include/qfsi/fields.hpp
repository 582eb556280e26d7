#pragma once

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "qfsi/grid.hpp"

namespace qfsi {

/// Cell-centered scalar samples over the full box lattice.
struct ScalarField {
    std::vector<double> a;
    explicit ScalarField(const Grid& g) : a(g.ncell, 0.0) {}
    ScalarField() = default;
    double& operator[](long c) { return a[c]; }
    double operator[](long c) const { return a[c]; }
    void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

/// MAC staggered velocity: three face-centered component arrays.
struct VelocityField {
    std::array<std::vector<double>, 3> c;
    explicit VelocityField(const Grid& g) {
        for (int a = 0; a < 3; ++a) c[a].assign(g.nf[a], 0.0);
    }
    VelocityField() = default;
    void zero() {
        for (auto& v : c) std::fill(v.begin(), v.end(), 0.0);
    }
    VelocityField& axpy(double s, const VelocityField& o) {
        for (int a = 0; a < 3; ++a)
            for (size_t i = 0; i < c[a].size(); ++i) c[a][i] += s * o.c[a][i];
        return *this;
    }
};

/// Cell-centered field of symmetric traceless tensors, stored as five
/// component planes (component-major).
struct QTensorField {
    std::array<std::vector<double>, 5> c;
    explicit QTensorField(const Grid& g) {
        for (auto& v : c) v.assign(g.ncell, 0.0);
    }
    QTensorField() = default;
    void zero() {
        for (auto& v : c) std::fill(v.begin(), v.end(), 0.0);
    }
    QTensor at(long cell) const {
        return {c[0][cell], c[1][cell], c[2][cell], c[3][cell], c[4][cell]};
    }
    void set(long cell, const QTensor& q) {
        for (int m = 0; m < 5; ++m) c[m][cell] = q[m];
    }
    QTensorField& axpy(double s, const QTensorField& o) {
        for (int m = 0; m < 5; ++m)
            for (size_t i = 0; i < c[m].size(); ++i) c[m][i] += s * o.c[m][i];
        return *this;
    }
};

/// Cell-centered general 3x3 tensor field (nine component planes).
struct Matrix3Field {
    std::array<std::vector<double>, 9> c;
    explicit Matrix3Field(const Grid& g) {
        for (auto& v : c) v.assign(g.ncell, 0.0);
    }
    Matrix3Field() = default;
    void zero() {
        for (auto& v : c) std::fill(v.begin(), v.end(), 0.0);
    }
    Mat3 at(long cell) const {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = c[3 * i + j][cell];
        return m;
    }
    void set(long cell, const Mat3& m) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c[3 * i + j][cell] = m(i, j);
    }
};

// ---------------------------------------------------------------------------
// Field snapshot format: one plain-text header line
//   qfsi-field <name> <nx> <ny> <nz> <ncomp> <dx> <time>
// followed by row-major little-endian 64-bit floats (component-major for
// multi-component fields).  Round trips are bit exact.
// ---------------------------------------------------------------------------

namespace detail {
inline void write_doubles_le(std::ofstream& os, const double* p, size_t count) {
    // assumes little-endian host (asserted at startup in the CLI)
    os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * 8));
}
inline void read_doubles_le(std::ifstream& is, double* p, size_t count) {
    is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * 8));
}
} // namespace detail

struct SnapshotHeader {
    std::string name;
    long nx = 0, ny = 0, nz = 0, ncomp = 1;
    double dx = 0, time = 0;
};

inline void write_snapshot(const std::string& path, const SnapshotHeader& h,
                           const std::vector<const std::vector<double>*>& comps) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    char hdr[256];
    std::snprintf(hdr, sizeof(hdr), "qfsi-field %s %ld %ld %ld %ld %.17g %.17g\n",
                  h.name.c_str(), h.nx, h.ny, h.nz, h.ncomp, h.dx, h.time);
    os << hdr;
    for (const auto* c : comps) detail::write_doubles_le(os, c->data(), c->size());
}

inline SnapshotHeader read_snapshot(const std::string& path,
                                    std::vector<std::vector<double>>& comps) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);
    SnapshotHeader h;
    char name[128];
    if (std::sscanf(line.c_str(), "qfsi-field %127s %ld %ld %ld %ld %lg %lg", name,
                    &h.nx, &h.ny, &h.nz, &h.ncomp, &h.dx, &h.time) != 7)
        throw std::runtime_error("bad snapshot header in " + path);
    h.name = name;
    comps.assign(h.ncomp, std::vector<double>(static_cast<size_t>(h.nx) * h.ny * h.nz));
    for (auto& c : comps) detail::read_doubles_le(is, c.data(), c.size());
    if (!is) throw std::runtime_error("truncated snapshot " + path);
    return h;
}

inline void save_scalar(const std::string& path, const Grid& g, const ScalarField& f,
                        const std::string& name, double time) {
    write_snapshot(path, {name, g.n, g.n, g.n, 1, g.dx, time}, {&f.a});
}

inline void save_qtensor(const std::string& path, const Grid& g, const QTensorField& f,
                         const std::string& name, double time) {
    write_snapshot(path, {name, g.n, g.n, g.n, 5, g.dx, time},
                   {&f.c[0], &f.c[1], &f.c[2], &f.c[3], &f.c[4]});
}

} // namespace qfsi
