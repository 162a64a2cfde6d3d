#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "egrowth/growth.hpp"

namespace egrowth {

/// Plain PGM (P2), max value 65535. Rows run from the top (largest y) down.
/// Pixel p stands for lo + (hi - lo) * p / 65535; the header comment says so.
std::string to_pgm(const ScalarField& f, double lo, double hi);
/// Scales to the field's own range.
std::string to_pgm(const ScalarField& f);
std::string mask_to_pgm(const GridSpec& spec, std::span<const std::uint8_t> mask);

/// CSV with a header row. Fields containing a comma, quote or newline are quoted.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row(const std::vector<std::string>& fields);
    CsvTable& row(const std::vector<double>& values);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

    static std::string quote(const std::string& field);
    /// Shortest round-trippable decimal form.
    static std::string number(double v);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// step, t, area, rate, Re t1, Im t1, ..., Re t4, Im t4, max_vn, solver_iters
CsvTable run_log_table(const GrowthState& state);
/// t, index, x, y per boundary node.
CsvTable boundary_table(double t, const GridDomain& D);
/// Adds one snapshot to a table made by boundary_table.
void append_boundary(CsvTable& table, double t, const GridDomain& D);
/// iteration, step
CsvTable trace_table(std::span<const std::pair<int, double>> trace);
CsvTable profile_table(const GridDomain& D, const std::vector<std::pair<std::string, const BoundaryProfile*>>& columns);

/// Writes text, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace egrowth
