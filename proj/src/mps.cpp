#include "evmaas/mps.hpp"

#include <fstream>
#include <sstream>

#include "text.hpp"

namespace evmaas {

namespace {

constexpr std::size_t kMaxName = 255;
constexpr const char* kObjRow = "OBJ";

void check_name(const std::string& name) {
    if (name.empty() || name.size() > kMaxName) throw Error("MPS name must have 1-255 characters: " + name);
    if (name.find_first_of(" \t\r\n") != std::string::npos) throw Error("MPS name contains whitespace: " + name);
}

char row_type(Sense s) {
    switch (s) {
        case Sense::LessEqual: return 'L';
        case Sense::GreaterEqual: return 'G';
        case Sense::Equal: return 'E';
    }
    return 'E';
}

}  // namespace

std::string to_mps(const MILPModel& model, const std::string& name) {
    const auto& vars = model.variables();
    const auto& rows = model.constraints();
    check_name(name);

    // Column-major view of the matrix, row order preserved within a column.
    std::vector<std::vector<std::pair<int, double>>> cols(vars.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        check_name(rows[r].name);
        if (rows[r].name == kObjRow) throw Error("row name OBJ is reserved for the objective");
        for (const auto& t : rows[r].terms) {
            if (t.var < 0 || static_cast<std::size_t>(t.var) >= vars.size())
                throw Error("row " + rows[r].name + " references an unknown variable");
            cols[t.var].push_back({static_cast<int>(r), t.coef});
        }
    }

    std::ostringstream out;
    out << "NAME " << name << "\nROWS\n N " << kObjRow << '\n';
    for (const auto& row : rows) out << ' ' << row_type(row.sense) << ' ' << row.name << '\n';

    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t v = 0; v < vars.size(); ++v) {
        const auto& var = vars[v];
        check_name(var.name);
        const bool is_int = var.kind == VarKind::Binary;
        if (is_int != in_int) {
            out << " MARKER" << marker++ << " 'MARKER' " << (is_int ? "'INTORG'" : "'INTEND'") << '\n';
            in_int = is_int;
        }
        out << ' ' << var.name << ' ' << kObjRow << ' ' << text::format(var.objective) << '\n';
        for (const auto& [r, coef] : cols[v]) out << ' ' << var.name << ' ' << rows[r].name << ' ' << text::format(coef) << '\n';
    }
    if (in_int) out << " MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

    out << "RHS\n";
    for (const auto& row : rows) {
        if (row.rhs != 0.0) out << " RHS " << row.name << ' ' << text::format(row.rhs) << '\n';
    }

    out << "BOUNDS\n";
    for (const auto& var : vars) {
        if (var.lower == var.upper) {
            out << " FX BND " << var.name << ' ' << text::format(var.lower) << '\n';
            continue;
        }
        if (var.lower != 0.0) out << " LO BND " << var.name << ' ' << text::format(var.lower) << '\n';
        out << " UP BND " << var.name << ' ' << text::format(var.upper) << '\n';
    }
    out << "ENDATA\n";
    return out.str();
}

void write_mps(const MILPModel& model, const std::filesystem::path& path) {
    const auto text = to_mps(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace evmaas
