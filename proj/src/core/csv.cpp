#include "csv.hpp"

#include <cstdio>
#include <fstream>

#include "errors.hpp"

namespace spotsim::csvio {

std::string field(std::string_view raw) {
    const bool needs_quoting = raw.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quoting) return std::string(raw);
    std::string out;
    out.reserve(raw.size() + 2);
    out.push_back('"');
    for (char c : raw) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_matrix_csv(const std::string& path, const market::TimeGrid& grid,
                      std::size_t n_paths, const std::vector<double>& matrix) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "path";
    for (double t : grid.t) out << ',' << number(t);
    out << '\n';
    const std::size_t width = grid.t.size();
    for (std::size_t p = 0; p < n_paths; ++p) {
        out << p;
        const double* row = matrix.data() + p * width;
        for (std::size_t m = 0; m < width; ++m) out << ',' << number(row[m]);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_report_csv(const std::string& path, const pricing::ValuationReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "contract,sampler,n_paths,price,rmse,path_seconds,opt_seconds,total_seconds\n";
    out << field(report.contract) << ',' << field(report.sampler) << ',' << report.n_paths
        << ',' << number(report.price) << ',' << number(report.rmse) << ','
        << number(report.path_seconds) << ',' << number(report.opt_seconds) << ','
        << number(report.total_seconds) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace spotsim::csvio
