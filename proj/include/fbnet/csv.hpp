/**
 * @file csv.hpp
 * @brief Fixed-schema CSV emitters for run artifacts, and a strict reader
 *        used by the comparison report.
 *
 * All numeric fields are printed with "%.17g" so a double round-trips
 * exactly; identical inputs therefore produce byte-identical files.
 * Schemas (header row included, one record per line):
 *   history:  step,lr,loss,elapsed      (elapsed column optional)
 *   boundary: tau,sf,sf_dot
 *   surface:  tau,y,S,P,P_y,P_tau,P_yy,V,Delta,Gamma
 *   report:   metric,value
 */

#pragma once

#include "fbnet/optimizer.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fbnet {

/// One record of the boundary CSV: s̄_f and its velocity at a τ node.
struct BoundaryRow {
    double tau = 0.0;
    double sf = 0.0;
    double sf_dot = 0.0;
};

/// One record of the surface CSV: auxiliary parts and Greeks at (τ,y).
struct SurfaceRow {
    double tau = 0.0;
    double y = 0.0;
    double S = 0.0;
    double P = 0.0;
    double P_y = 0.0;
    double P_tau = 0.0;
    double P_yy = 0.0;
    double V = 0.0;
    double Delta = 0.0;
    double Gamma = 0.0;
};

/// "%.17g" rendering used for every numeric CSV field.
std::string csv_num(double v);

/**
 * history(step,lr,loss[,elapsed]). `with_elapsed=false` drops the wall-time
 * column so the file is a pure function of config and seed (reproduce mode).
 * @throws std::runtime_error if the file cannot be written.
 */
void write_history(const std::filesystem::path& file,
                   const std::vector<TrainRecord>& history, bool with_elapsed = true);

void write_boundary(const std::filesystem::path& file,
                    const std::vector<BoundaryRow>& rows);

void write_surface(const std::filesystem::path& file,
                   const std::vector<SurfaceRow>& rows);

/// report(metric,value) — values are pre-rendered strings (numbers via csv_num).
void write_report(const std::filesystem::path& file,
                  const std::vector<std::pair<std::string, std::string>>& rows);

/**
 * Reads a numeric CSV written by the emitters above. The header must match
 * `expected_header` exactly; every field must parse as a double.
 * @throws std::runtime_error on missing file, header mismatch, or bad field.
 */
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& file,
                                                  const std::string& expected_header);

}  // namespace fbnet
