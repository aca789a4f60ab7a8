#include "ed/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ed {

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_header(std::ostream& os, const Grid& g) {
    os << "# grid " << g.dim;
    for (int d = 0; d < g.dim; ++d) os << ' ' << g.n[d];
    for (int d = 0; d < g.dim; ++d) os << ' ' << format_double(g.length[d]);
    os << ' ' << to_string(g.boundary) << '\n';
}

Grid parse_header(std::istream& is, const std::string& path) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("snapshot " + path + ": empty file");
    std::istringstream ss(line);
    std::string hash, word;
    ss >> hash >> word;
    if (hash != "#" || word != "grid") {
        throw ValidationError("snapshot " + path + ": missing '# grid' header");
    }
    Grid g;
    ss >> g.dim;
    if (g.dim < 1 || g.dim > 3) throw ValidationError("snapshot " + path + ": bad dimension");
    for (int d = 0; d < g.dim; ++d) ss >> g.n[d];
    for (int d = 0; d < g.dim; ++d) ss >> g.length[d];
    std::string bnd;
    ss >> bnd;
    if (!ss) throw ValidationError("snapshot " + path + ": truncated header");
    if (bnd == "periodic") {
        g.boundary = Boundary::Periodic;
    } else if (bnd == "reflecting") {
        g.boundary = Boundary::Reflecting;
    } else {
        throw ValidationError("snapshot " + path + ": unknown boundary '" + bnd + "'");
    }
    g.validate();
    return g;
}

}  // namespace

void save_field(const ScalarField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write " + path);
    write_header(os, f.grid);
    for (std::int64_t i = 0; i < f.size(); ++i) {
        os << i << ' ' << format_double(f[i]) << '\n';
    }
}

void save_field(const ComplexField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write " + path);
    write_header(os, f.grid);
    for (std::int64_t i = 0; i < f.size(); ++i) {
        os << i << ' ' << format_double(f[i].real()) << ' ' << format_double(f[i].imag()) << '\n';
    }
}

ScalarField load_scalar_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read " + path);
    Grid g = parse_header(is, path);
    ScalarField f(g);
    std::int64_t idx;
    double val;
    std::int64_t seen = 0;
    while (is >> idx >> val) {
        if (idx < 0 || idx >= f.size()) throw ValidationError("snapshot " + path + ": index out of range");
        f[idx] = val;
        ++seen;
    }
    if (seen != f.size()) throw ValidationError("snapshot " + path + ": wrong row count");
    return f;
}

ComplexField load_complex_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read " + path);
    Grid g = parse_header(is, path);
    ComplexField f(g);
    std::int64_t idx;
    double re, im;
    std::int64_t seen = 0;
    while (is >> idx >> re >> im) {
        if (idx < 0 || idx >= f.size()) throw ValidationError("snapshot " + path + ": index out of range");
        f[idx] = {re, im};
        ++seen;
    }
    if (seen != f.size()) throw ValidationError("snapshot " + path + ": wrong row count");
    return f;
}

bool snapshot_is_complex(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read " + path);
    std::string header, row;
    if (!std::getline(is, header) || !std::getline(is, row)) {
        throw ValidationError("snapshot " + path + ": truncated");
    }
    std::istringstream ss(row);
    std::string tok;
    int cols = 0;
    while (ss >> tok) ++cols;
    return cols == 3;
}

}  // namespace ed
