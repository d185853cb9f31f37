/**
 * @file csv.cpp
 * @brief Fixed-schema CSV emitters and the strict reader.
 */

#include "fbnet/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fbnet {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);  // binary: '\n' endings everywhere
    if (!out) throw std::runtime_error("csv: cannot open for writing: " + file.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
    out.flush();
    if (!out) throw std::runtime_error("csv: write failed: " + file.string());
}

}  // namespace

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_history(const std::filesystem::path& file,
                   const std::vector<TrainRecord>& history, bool with_elapsed) {
    std::ofstream out = open_out(file);
    out << (with_elapsed ? "step,lr,loss,elapsed" : "step,lr,loss") << '\n';
    for (const TrainRecord& r : history) {
        out << r.step << ',' << csv_num(r.lr) << ',' << csv_num(r.loss);
        if (with_elapsed) out << ',' << csv_num(r.elapsed_s);
        out << '\n';
    }
    finish(out, file);
}

void write_boundary(const std::filesystem::path& file,
                    const std::vector<BoundaryRow>& rows) {
    std::ofstream out = open_out(file);
    out << "tau,sf,sf_dot\n";
    for (const BoundaryRow& r : rows)
        out << csv_num(r.tau) << ',' << csv_num(r.sf) << ',' << csv_num(r.sf_dot) << '\n';
    finish(out, file);
}

void write_surface(const std::filesystem::path& file,
                   const std::vector<SurfaceRow>& rows) {
    std::ofstream out = open_out(file);
    out << "tau,y,S,P,P_y,P_tau,P_yy,V,Delta,Gamma\n";
    for (const SurfaceRow& r : rows) {
        out << csv_num(r.tau) << ',' << csv_num(r.y) << ',' << csv_num(r.S) << ','
            << csv_num(r.P) << ',' << csv_num(r.P_y) << ',' << csv_num(r.P_tau) << ','
            << csv_num(r.P_yy) << ',' << csv_num(r.V) << ',' << csv_num(r.Delta) << ','
            << csv_num(r.Gamma) << '\n';
    }
    finish(out, file);
}

void write_report(const std::filesystem::path& file,
                  const std::vector<std::pair<std::string, std::string>>& rows) {
    std::ofstream out = open_out(file);
    out << "metric,value\n";
    for (const auto& [metric, value] : rows) out << metric << ',' << value << '\n';
    finish(out, file);
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& file,
                                                  const std::string& expected_header) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open for reading: " + file.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("csv: empty file: " + file.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw std::runtime_error("csv: header mismatch in " + file.string() + ": got \"" +
                                 line + "\", want \"" + expected_header + "\"");

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end == field.c_str() || *end != '\0')
                throw std::runtime_error("csv: bad numeric field \"" + field + "\" at " +
                                         file.string() + ":" + std::to_string(line_no));
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fbnet
