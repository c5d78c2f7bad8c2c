#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "s2oct/common.hpp"
#include "s2oct/model.hpp"

namespace s2oct {

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

// Free-format MPS with deterministic row/column order: columns appear in
// declaration order, entries within a column follow the constraint order,
// binaries sit between INTORG/INTEND markers with explicit [0,1] bounds.
inline void write_model_file(const MilpModel& model, const std::string& path) {
    std::ostringstream os;
    os << "NAME " << model.name << "\n";
    os << "ROWS\n";
    os << " N obj\n";
    for (const auto& row : model.rows) {
        const char sense = row.sense == lp::Sense::LE ? 'L' : row.sense == lp::Sense::GE ? 'G' : 'E';
        os << " " << sense << " " << row.name << "\n";
    }

    // Column-major entry lists.
    std::vector<std::vector<std::pair<int, double>>> per_col(model.vars.size());
    for (int r = 0; r < static_cast<int>(model.rows.size()); ++r)
        for (const auto& [col, coeff] : model.rows[r].terms) per_col[col].emplace_back(r, coeff);
    std::vector<double> obj_coeff(model.vars.size(), 0.0);
    std::vector<bool> in_obj(model.vars.size(), false);
    for (const auto& [col, coeff] : model.objective) {
        obj_coeff[col] += coeff;
        in_obj[col] = true;
    }

    os << "COLUMNS\n";
    bool in_integer = false;
    for (std::size_t j = 0; j < model.vars.size(); ++j) {
        const auto& var = model.vars[j];
        const bool want_integer = var.kind == VarKind::Binary;
        if (want_integer != in_integer) {
            os << "    MARKER 'MARKER' " << (want_integer ? "'INTORG'" : "'INTEND'") << "\n";
            in_integer = want_integer;
        }
        bool wrote = false;
        if (in_obj[j]) {
            os << "    " << var.name << " obj " << detail::fmt_num(obj_coeff[j]) << "\n";
            wrote = true;
        }
        for (const auto& [r, coeff] : per_col[j]) {
            os << "    " << var.name << " " << model.rows[r].name << " " << detail::fmt_num(coeff)
               << "\n";
            wrote = true;
        }
        if (!wrote) os << "    " << var.name << " obj 0\n";  // keep empty columns alive
    }
    if (in_integer) os << "    MARKER 'MARKER' 'INTEND'\n";

    os << "RHS\n";
    for (const auto& row : model.rows)
        if (row.rhs != 0.0) os << "    RHS " << row.name << " " << detail::fmt_num(row.rhs) << "\n";

    os << "BOUNDS\n";
    for (const auto& var : model.vars) {
        if (var.kind == VarKind::Binary) {
            os << " UP BND " << var.name << " 1\n";
            continue;
        }
        const bool lo_inf = !std::isfinite(var.lower);
        const bool hi_inf = !std::isfinite(var.upper);
        if (lo_inf && hi_inf) {
            os << " FR BND " << var.name << "\n";
            continue;
        }
        if (!lo_inf && !hi_inf && var.lower == var.upper) {
            os << " FX BND " << var.name << " " << detail::fmt_num(var.lower) << "\n";
            continue;
        }
        if (lo_inf)
            os << " MI BND " << var.name << "\n";
        else if (var.lower != 0.0)
            os << " LO BND " << var.name << " " << detail::fmt_num(var.lower) << "\n";
        if (!hi_inf) os << " UP BND " << var.name << " " << detail::fmt_num(var.upper) << "\n";
    }
    os << "ENDATA\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path);
    out << os.str();
    if (!out) throw IoError("short write on model file: " + path);
}

// Parses the writer's own subset of free MPS back into an IR.
inline MilpModel read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);

    MilpModel model;
    std::map<std::string, int> row_index;
    std::string obj_row_name = "obj";
    std::string section;
    bool in_integer = false;
    std::string line;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tok = detail::tokenize(line);
        if (tok.empty() || tok[0][0] == '*') continue;
        if (tok[0] == "NAME") {
            model.name = tok.size() > 1 ? tok[1] : "";
            continue;
        }
        // Section headers stand alone on their line; data lines never do.
        if (tok.size() == 1 &&
            (tok[0] == "ROWS" || tok[0] == "COLUMNS" || tok[0] == "RHS" || tok[0] == "BOUNDS" ||
             tok[0] == "RANGES" || tok[0] == "ENDATA")) {
            section = tok[0];
            continue;
        }
        if (section == "ROWS") {
            if (tok.size() < 2) throw FormatError("bad ROWS line: " + line);
            if (tok[0] == "N") {
                obj_row_name = tok[1];
            } else {
                lp::Sense sense = tok[0] == "L"   ? lp::Sense::LE
                                  : tok[0] == "G" ? lp::Sense::GE
                                                  : lp::Sense::EQ;
                if (tok[0] != "L" && tok[0] != "G" && tok[0] != "E")
                    throw FormatError("unknown row sense: " + line);
                row_index[tok[1]] = static_cast<int>(model.rows.size());
                model.rows.push_back({tok[1], {}, sense, 0.0});
            }
        } else if (section == "COLUMNS") {
            if (tok.size() >= 3 && (tok[1] == "'MARKER'" || tok[2] == "'MARKER'")) {
                const std::string& flag = tok.back();
                if (flag == "'INTORG'") in_integer = true;
                if (flag == "'INTEND'") in_integer = false;
                continue;
            }
            if (tok.size() < 3 || tok.size() % 2 == 0)
                throw FormatError("bad COLUMNS line: " + line);
            int col;
            if (model.has(tok[0])) {
                col = model.col(tok[0]);
            } else {
                col = model.add_var(tok[0], in_integer ? VarKind::Binary : VarKind::Continuous,
                                    0.0, in_integer ? 1.0 : lp::kInf);
            }
            for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                const double coeff = std::stod(tok[k + 1]);
                if (tok[k] == obj_row_name) {
                    if (coeff != 0.0) model.objective.emplace_back(col, coeff);
                } else {
                    const auto it = row_index.find(tok[k]);
                    if (it == row_index.end()) throw FormatError("unknown row in COLUMNS: " + tok[k]);
                    model.rows[it->second].terms.emplace_back(col, coeff);
                }
            }
        } else if (section == "RHS") {
            if (tok.size() < 3) throw FormatError("bad RHS line: " + line);
            for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                const auto it = row_index.find(tok[k]);
                if (it == row_index.end()) throw FormatError("unknown row in RHS: " + tok[k]);
                model.rows[it->second].rhs = std::stod(tok[k + 1]);
            }
        } else if (section == "BOUNDS") {
            if (tok.size() < 3) throw FormatError("bad BOUNDS line: " + line);
            const std::string& type = tok[0];
            const std::string& name = tok[2];
            if (!model.has(name)) throw FormatError("bound on unknown column: " + name);
            Variable& var = model.vars[static_cast<std::size_t>(model.col(name))];
            const double value = tok.size() > 3 ? std::stod(tok[3]) : 0.0;
            if (type == "LO")
                var.lower = value;
            else if (type == "UP")
                var.upper = value;
            else if (type == "FX")
                var.lower = var.upper = value;
            else if (type == "FR") {
                var.lower = -lp::kInf;
                var.upper = lp::kInf;
            } else if (type == "MI")
                var.lower = -lp::kInf;
            else if (type == "PL")
                var.upper = lp::kInf;
            else if (type == "BV") {
                var.kind = VarKind::Binary;
                var.lower = 0.0;
                var.upper = 1.0;
            } else
                throw FormatError("unsupported bound type: " + type);
        } else if (section == "RANGES") {
            throw FormatError("RANGES section is not supported");
        }
    }
    return model;
}

// Order-insensitive structural equality; round-trip tests compare with this.
inline bool models_equivalent(const MilpModel& a, const MilpModel& b) {
    if (a.vars.size() != b.vars.size() || a.rows.size() != b.rows.size()) return false;
    for (std::size_t j = 0; j < a.vars.size(); ++j) {
        const auto& va = a.vars[j];
        const auto& vb = b.vars[j];
        const bool lo_same = va.lower == vb.lower || (std::isinf(va.lower) && std::isinf(vb.lower) &&
                                                      std::signbit(va.lower) == std::signbit(vb.lower));
        const bool hi_same = va.upper == vb.upper || (std::isinf(va.upper) && std::isinf(vb.upper) &&
                                                      std::signbit(va.upper) == std::signbit(vb.upper));
        if (va.name != vb.name || va.kind != vb.kind || !lo_same || !hi_same) return false;
    }
    auto canon = [](const std::vector<std::pair<int, double>>& terms) {
        std::map<int, double> m;
        for (const auto& [col, coeff] : terms) m[col] += coeff;
        return m;
    };
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        const auto& ra = a.rows[r];
        const auto& rb = b.rows[r];
        if (ra.name != rb.name || ra.sense != rb.sense || ra.rhs != rb.rhs) return false;
        if (canon(ra.terms) != canon(rb.terms)) return false;
    }
    return canon(a.objective) == canon(b.objective);
}

}  // namespace s2oct
