#include "shapes/gs1.hpp"

#include <fstream>
#include <sstream>

namespace shapes {

namespace {
void print_real(std::ostream& os, double v) {
    std::ostringstream tmp;
    tmp.precision(17);
    tmp << v;
    os << tmp.str();
}
}  // namespace

void write_gs1(std::ostream& os, const GridShape& s) {
    const Grid& g = s.grid();
    os << "GS1 " << g.dim << ' ';
    print_real(os, g.spacing);
    for (int d = 0; d < g.dim; ++d) {
        os << ' ';
        print_real(os, g.origin[d]);
    }
    os << '\n';
    for (const auto& c : s.cells()) {
        os << c[0];
        for (int d = 1; d < g.dim; ++d) os << ' ' << c[d];
        os << '\n';
    }
}

std::string write_gs1(const GridShape& s) {
    std::ostringstream os;
    write_gs1(os, s);
    return os.str();
}

GridShape read_gs1(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError(1, "missing GS1 header");
    std::istringstream header(line);
    std::string magic;
    int dim = 0;
    double spacing = 0.0;
    if (!(header >> magic) || magic != "GS1") throw ParseError(1, "expected 'GS1' magic");
    if (!(header >> dim) || dim < 1 || dim > 3) throw ParseError(1, "bad dimension");
    if (!(header >> spacing) || !(spacing > 0.0)) throw ParseError(1, "bad spacing");
    Point origin{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) {
        if (!(header >> origin[d])) throw ParseError(1, "missing origin component");
    }
    std::string trailing;
    if (header >> trailing) throw ParseError(1, "unexpected trailing token '" + trailing + "'");

    std::vector<CellIndex> cells;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        CellIndex c{0, 0, 0};
        for (int d = 0; d < dim; ++d) {
            if (!(row >> c[d])) throw ParseError(lineno, "expected " + std::to_string(dim) + " integer indices");
        }
        if (row >> trailing) throw ParseError(lineno, "unexpected trailing token '" + trailing + "'");
        cells.push_back(c);
    }
    return GridShape::from_cells(Grid(dim, spacing, origin), std::move(cells));
}

GridShape read_gs1_string(const std::string& text) {
    std::istringstream is(text);
    return read_gs1(is);
}

GridShape read_gs1_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw BadInput("cannot open shape file: " + path);
    return read_gs1(is);
}

void write_gs1_file(const std::string& path, const GridShape& s) {
    std::ofstream os(path);
    if (!os) throw BadInput("cannot write shape file: " + path);
    write_gs1(os, s);
}

}  // namespace shapes
