#pragma once

// Run persistence: snapshot/checkpoint files, CSV emission, and 8-bit
// portable graymap images.
//
// Snapshot layout: a short text header followed by a raw little-endian
// float64 payload (u, then v, then r; 2-D fields x-major). Times and the
// controller state are printed as C hexfloats so a resumed run restarts
// from bit-identical state.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ecodamp/integrate.hpp"
#include "ecodamp/solver1d.hpp"
#include "ecodamp/solver2d.hpp"

namespace ecodamp {

namespace iodetail {

inline std::string hexfloat(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

inline double parse_double_token(const std::string& s, const std::string& what) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw IoError("snapshot: bad " + what + " value '" + s + "'");
    return v;
}

inline void write_doubles(std::ostream& os, const double* data, std::size_t count) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

inline void read_doubles(std::istream& is, double* data, std::size_t count) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw IoError("snapshot: truncated payload");
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(line);
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline void emit_resume(std::ostream& os, const ResumeState& rs) {
    os << "resume " << hexfloat(rs.dt) << " " << rs.streak << " " << rs.rejections << " " << rs.accepted
       << " " << rs.clamps << " " << rs.detector_window.size();
    for (const auto& [t, sup] : rs.detector_window) os << " " << hexfloat(t) << " " << hexfloat(sup);
    os << "\n";
}

inline ResumeState parse_resume(const std::vector<std::string>& tok) {
    if (tok.size() < 7) throw IoError("snapshot: malformed resume line");
    ResumeState rs;
    rs.dt = parse_double_token(tok[1], "resume dt");
    rs.streak = std::stoi(tok[2]);
    rs.rejections = std::stol(tok[3]);
    rs.accepted = std::stol(tok[4]);
    rs.clamps = std::stol(tok[5]);
    std::size_t n = std::stoul(tok[6]);
    if (tok.size() != 7 + 2 * n) throw IoError("snapshot: malformed resume window");
    for (std::size_t i = 0; i < n; ++i)
        rs.detector_window.emplace_back(parse_double_token(tok[7 + 2 * i], "window t"),
                                        parse_double_token(tok[8 + 2 * i], "window sup"));
    return rs;
}

}  // namespace iodetail

inline int snapshot_dim(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot '" + path + "'");
    std::string magic, dimline;
    std::getline(is, magic);
    std::getline(is, dimline);
    if (magic != "ecodamp-snapshot 1") throw IoError("'" + path + "' is not an ecodamp snapshot");
    auto tok = iodetail::split_ws(dimline);
    if (tok.size() != 2 || tok[0] != "dim") throw IoError("snapshot: malformed dim line");
    return std::stoi(tok[1]);
}

inline void write_snapshot(const std::string& path, const StateField1D& f, const ResumeState* resume = nullptr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write snapshot '" + path + "'");
    const ChebGrid& g = *f.grid;
    os << "ecodamp-snapshot 1\n";
    os << "dim 1\n";
    os << "grid1d " << g.order() << " " << iodetail::hexfloat(g.lo()) << " " << iodetail::hexfloat(g.hi())
       << "\n";
    os << "time " << iodetail::hexfloat(f.time) << "\n";
    if (resume) iodetail::emit_resume(os, *resume);
    os << "payload f64le " << 3 * g.size() << "\n";
    iodetail::write_doubles(os, f.u.data(), g.size());
    iodetail::write_doubles(os, f.v.data(), g.size());
    iodetail::write_doubles(os, f.r.data(), g.size());
}

inline void write_snapshot(const std::string& path, const StateField2D& f, const ResumeState* resume = nullptr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write snapshot '" + path + "'");
    const FDGrid2D& g = *f.grid;
    os << "ecodamp-snapshot 1\n";
    os << "dim 2\n";
    os << "grid2d " << g.nx << " " << g.ny << "\n";
    os << "time " << iodetail::hexfloat(f.time) << "\n";
    if (resume) iodetail::emit_resume(os, *resume);
    os << "payload f64le " << 3 * g.nx * g.ny << "\n";
    // x-major: for each x row, the ny values along y
    Matrix ut = f.u.transpose(), vt = f.v.transpose(), rt = f.r.transpose();
    iodetail::write_doubles(os, ut.data(), static_cast<std::size_t>(g.nx) * g.ny);
    iodetail::write_doubles(os, vt.data(), static_cast<std::size_t>(g.nx) * g.ny);
    iodetail::write_doubles(os, rt.data(), static_cast<std::size_t>(g.nx) * g.ny);
}

struct Snapshot1D {
    StateField1D state;
    bool has_resume = false;
    ResumeState resume;
};

struct Snapshot2D {
    StateField2D state;
    bool has_resume = false;
    ResumeState resume;
};

namespace iodetail {

template <typename Snap>
void read_header(std::ifstream& is, const std::string& path, int expect_dim, Snap& out,
                 std::vector<std::string>& gridtok, std::size_t& payload) {
    std::string line;
    std::getline(is, line);
    if (line != "ecodamp-snapshot 1") throw IoError("'" + path + "' is not an ecodamp snapshot");
    std::getline(is, line);
    auto dimtok = split_ws(line);
    if (dimtok.size() != 2 || dimtok[0] != "dim" || std::stoi(dimtok[1]) != expect_dim)
        throw IoError("snapshot '" + path + "': dimension mismatch");

    payload = 0;
    while (std::getline(is, line)) {
        auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "grid1d" || tok[0] == "grid2d") {
            gridtok = tok;
        } else if (tok[0] == "time") {
            out.state.time = parse_double_token(tok.at(1), "time");
        } else if (tok[0] == "resume") {
            out.resume = parse_resume(tok);
            out.has_resume = true;
        } else if (tok[0] == "payload") {
            if (tok.size() != 3 || tok[1] != "f64le") throw IoError("snapshot: malformed payload line");
            payload = std::stoul(tok[2]);
            return;
        } else {
            throw IoError("snapshot: unknown header line '" + line + "'");
        }
    }
    throw IoError("snapshot '" + path + "': missing payload");
}

}  // namespace iodetail

inline Snapshot1D read_snapshot_1d(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot '" + path + "'");
    Snapshot1D out;
    std::vector<std::string> gridtok;
    std::size_t payload = 0;
    iodetail::read_header(is, path, 1, out, gridtok, payload);
    if (gridtok.size() != 4) throw IoError("snapshot: malformed grid1d line");
    int order = std::stoi(gridtok[1]);
    double lo = iodetail::parse_double_token(gridtok[2], "grid lo");
    double hi = iodetail::parse_double_token(gridtok[3], "grid hi");
    auto grid = std::make_shared<const ChebGrid>(order, lo, hi);
    if (payload != static_cast<std::size_t>(3 * grid->size())) throw IoError("snapshot: payload size mismatch");
    out.state.grid = grid;
    out.state.u.resize(grid->size());
    out.state.v.resize(grid->size());
    out.state.r.resize(grid->size());
    iodetail::read_doubles(is, out.state.u.data(), grid->size());
    iodetail::read_doubles(is, out.state.v.data(), grid->size());
    iodetail::read_doubles(is, out.state.r.data(), grid->size());
    return out;
}

inline Snapshot2D read_snapshot_2d(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot '" + path + "'");
    Snapshot2D out;
    std::vector<std::string> gridtok;
    std::size_t payload = 0;
    iodetail::read_header(is, path, 2, out, gridtok, payload);
    if (gridtok.size() != 3) throw IoError("snapshot: malformed grid2d line");
    int nx = std::stoi(gridtok[1]), ny = std::stoi(gridtok[2]);
    auto grid = std::make_shared<const FDGrid2D>(nx, ny);
    const std::size_t count = static_cast<std::size_t>(nx) * ny;
    if (payload != 3 * count) throw IoError("snapshot: payload size mismatch");
    out.state.grid = grid;
    Matrix ut(ny, nx), vt(ny, nx), rt(ny, nx);
    iodetail::read_doubles(is, ut.data(), count);
    iodetail::read_doubles(is, vt.data(), count);
    iodetail::read_doubles(is, rt.data(), count);
    out.state.u = ut.transpose();
    out.state.v = vt.transpose();
    out.state.r = rt.transpose();
    return out;
}

// ---------------------------------------------------------------------------
// CSV

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : os_(path) {
        if (!os_) throw IoError("cannot write '" + path + "'");
        os_ << header << "\n";
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((os_ << (first ? "" : ","), first = false, put(cells)), ...);
        os_ << "\n";
    }

private:
    void put(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os_ << buf;
    }
    void put(long v) { os_ << v; }
    void put(int v) { os_ << v; }
    void put(const std::string& s) { os_ << s; }
    void put(const char* s) { os_ << s; }

    std::ofstream os_;
};

// ---------------------------------------------------------------------------
// Portable graymap (P5) with per-file min/max scaling

struct PgmScaling {
    double min = 0.0, max = 0.0;
};

inline PgmScaling write_pgm(const std::string& path, const Matrix& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write '" + path + "'");
    const double lo = field.minCoeff(), hi = field.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    os << "P5\n" << field.cols() << " " << field.rows() << "\n255\n";
    for (Eigen::Index i = 0; i < field.rows(); ++i)
        for (Eigen::Index j = 0; j < field.cols(); ++j) {
            double t = (field(i, j) - lo) / span;
            unsigned char byte = static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
            os.put(static_cast<char>(byte));
        }
    return {lo, hi};
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace ecodamp
