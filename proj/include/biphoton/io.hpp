#ifndef BIPHOTON_IO_HPP
#define BIPHOTON_IO_HPP

// File formats.
//
// BPF2 (real matrix):  magic "BPF2", u32 version=1, u32 n1, u32 n2,
//   f64 spacing1, f64 spacing2, then n1*n2 little-endian f64, row-major.
//
// BPFS (frame stack):  magic "BPFS", u32 version=1, u32 M, u32 Ny, u32 Nx,
//   f64 pixel_pitch, u64 seed, then M*Ny*Nx little-endian u16,
//   frame-major then row-major.
//
// CSV files carry '#'-prefixed metadata lines (tool version, config hash)
// followed by a column-name header. Values are printed with 17 significant
// digits so re-reading is value-exact.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/detector_sim.hpp"
#include "biphoton/estimator.hpp"

namespace biphoton {

struct Bpf2Matrix {
    Eigen::MatrixXd values;
    double spacing1 = 0.0;
    double spacing2 = 0.0;
};

void write_bpf2(const std::string& path, const Eigen::MatrixXd& values, double spacing1,
                double spacing2);
Bpf2Matrix read_bpf2(const std::string& path);

void write_bpfs(const std::string& path, const FrameStack& stack);
FrameStack read_bpfs(const std::string& path);

// Streaming writer: frames are appended one at a time, nothing is kept in
// memory. The frame count is fixed up front by the header.
class BpfsWriter {
public:
    BpfsWriter(const std::string& path, const AcquisitionParams& params);
    ~BpfsWriter();
    void write_frame(std::span<const uint16_t> counts);
    void close(); // throws IoError if fewer frames were written than promised

private:
    std::ofstream out_;
    std::string path_;
    AcquisitionParams params_;
    int written_ = 0;
    bool closed_ = false;
};

// Streaming reader; frames are returned in order.
class BpfsReader {
public:
    explicit BpfsReader(const std::string& path);
    const AcquisitionParams& params() const { return params_; }
    int frames() const { return params_.frames; }
    void read_frame(std::span<uint16_t> out);

private:
    std::ifstream in_;
    std::string path_;
    AcquisitionParams params_;
    int read_ = 0;
};

// '#'-metadata lines, e.g. {"tool: bpsim 1.0.0", "config_hash: ..."}.
using CsvMeta = std::vector<std::string>;

void write_profile_csv(const std::string& path, const FringeProfile& profile,
                       const CsvMeta& meta);
FringeProfile read_profile_csv(const std::string& path);

// Matrix as (x1_m, x2_m, value) rows over cell-centered coordinates.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values, double spacing1,
                      double spacing2, const CsvMeta& meta);

// Field exports store the intensity |amplitude|^2 (the formats carry one
// real value per grid-point pair).
void write_field_bpf2(const std::string& path, const Field2D& field);
void write_field_csv(const std::string& path, const Field2D& field, const CsvMeta& meta);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string format_double(double v); // 17 significant digits

} // namespace biphoton

#endif
