#include "egrowth/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace egrowth {

namespace {

constexpr int max_gray = 65535;

std::string pgm_body(const GridSpec& s, const std::string& comment, const std::function<int(std::size_t)>& pixel) {
    std::ostringstream out;
    out << "P2\n# " << comment << "\n" << s.nx << ' ' << s.ny << '\n' << max_gray << '\n';
    for (int j = s.ny - 1; j >= 0; --j) {
        for (int i = 0; i < s.nx; ++i) {
            out << pixel(s.index(i, j));
            out << (i + 1 == s.nx ? '\n' : ' ');
        }
    }
    return out.str();
}

}  // namespace

std::string to_pgm(const ScalarField& f, double lo, double hi) {
    if (!(hi > lo)) hi = lo + 1.0;
    const std::string comment = "value = " + CsvTable::number(lo) + " + " + CsvTable::number(hi - lo) + " * pixel / 65535";
    return pgm_body(f.spec(), comment, [&](std::size_t k) {
        const double t = std::clamp((f[k] - lo) / (hi - lo), 0.0, 1.0);
        return static_cast<int>(std::lround(t * max_gray));
    });
}

std::string to_pgm(const ScalarField& f) {
    const auto v = f.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return to_pgm(f, *lo, *hi);
}

std::string mask_to_pgm(const GridSpec& spec, std::span<const std::uint8_t> mask) {
    if (mask.size() != spec.size()) throw Error(ErrorCode::spec_mismatch, "mask size does not match the grid");
    return pgm_body(spec, "value = pixel / 65535 (mask)", [&](std::size_t k) { return mask[k] ? max_gray : 0; });
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(const std::vector<std::string>& fields) {
    if (fields.size() != header_.size()) throw Error(ErrorCode::invalid_argument, "CSV row width does not match header");
    rows_.push_back(fields);
    return *this;
}

CsvTable& CsvTable::row(const std::vector<double>& values) {
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (double v : values) fields.push_back(number(v));
    return row(fields);
}

std::string CsvTable::quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string CsvTable::number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out += ',';
            out += quote(fields[i]);
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

CsvTable run_log_table(const GrowthState& state) {
    CsvTable t({"step", "t", "area", "rate", "re_t1", "im_t1", "re_t2", "im_t2", "re_t3", "im_t3", "re_t4", "im_t4",
                "max_vn", "solver_iters"});
    for (const auto& m : state.moment_log) {
        std::vector<double> v = {static_cast<double>(m.step), m.t, m.area, m.rate};
        for (std::size_t n = 1; n <= 4; ++n) {
            v.push_back(m.moments[n].real());
            v.push_back(m.moments[n].imag());
        }
        v.push_back(m.max_vn);
        v.push_back(static_cast<double>(m.solver_iters));
        t.row(v);
    }
    return t;
}

CsvTable boundary_table(double t, const GridDomain& D) {
    CsvTable out({"t", "index", "x", "y"});
    append_boundary(out, t, D);
    return out;
}

void append_boundary(CsvTable& table, double t, const GridDomain& D) {
    const auto nodes = D.boundary();
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        table.row(std::vector<double>{t, static_cast<double>(b), nodes[b].position.x, nodes[b].position.y});
    }
}

CsvTable trace_table(std::span<const std::pair<int, double>> trace) {
    CsvTable out({"iteration", "step"});
    for (const auto& [it, step] : trace) out.row(std::vector<double>{static_cast<double>(it), step});
    return out;
}

CsvTable profile_table(const GridDomain& D, const std::vector<std::pair<std::string, const BoundaryProfile*>>& columns) {
    std::vector<std::string> header = {"index", "x", "y", "theta"};
    for (const auto& c : columns) header.push_back(c.first);
    CsvTable out(header);
    const auto nodes = D.boundary();
    const std::vector<double> theta = D.boundary_angles();
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        std::vector<double> v = {static_cast<double>(b), nodes[b].position.x, nodes[b].position.y, theta[b]};
        for (const auto& c : columns) v.push_back((*c.second)[b]);
        out.row(v);
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::invalid_argument, "write failed for " + path.string());
}

}  // namespace egrowth
