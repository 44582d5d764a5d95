#include "biphoton/io.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

void put_u16(std::ostream& out, uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError(path + ": truncated header");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

uint64_t get_u64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError(path + ": truncated header");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in, const std::string& path) {
    const uint64_t bits = get_u64(in, path);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void expect_magic(std::istream& in, const char* magic, const std::string& path) {
    char buf[4];
    if (!in.read(buf, 4) || std::memcmp(buf, magic, 4) != 0)
        throw IoError(path + ": bad magic, expected " + magic);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_bpf2(const std::string& path, const Eigen::MatrixXd& values, double spacing1,
                double spacing2) {
    auto out = open_out(path, std::ios::binary);
    out.write("BPF2", 4);
    put_u32(out, 1);
    put_u32(out, static_cast<uint32_t>(values.rows()));
    put_u32(out, static_cast<uint32_t>(values.cols()));
    put_f64(out, spacing1);
    put_f64(out, spacing2);
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) put_f64(out, values(i, j));
    if (!out) throw IoError("write failed: " + path);
}

Bpf2Matrix read_bpf2(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    expect_magic(in, "BPF2", path);
    const uint32_t version = get_u32(in, path);
    if (version != 1) throw IoError(path + ": unsupported BPF2 version");
    const uint32_t n1 = get_u32(in, path);
    const uint32_t n2 = get_u32(in, path);
    if (n1 == 0 || n2 == 0 || static_cast<uint64_t>(n1) * n2 > (uint64_t{1} << 28))
        throw IoError(path + ": implausible BPF2 dimensions");
    Bpf2Matrix m;
    m.spacing1 = get_f64(in, path);
    m.spacing2 = get_f64(in, path);
    m.values.resize(n1, n2);
    for (uint32_t i = 0; i < n1; ++i)
        for (uint32_t j = 0; j < n2; ++j) m.values(i, j) = get_f64(in, path);
    return m;
}

void write_bpfs(const std::string& path, const FrameStack& stack) {
    BpfsWriter writer(path, stack.acquisition);
    for (int f = 0; f < stack.acquisition.frames; ++f) writer.write_frame(stack.frame(f));
    writer.close();
}

BpfsWriter::BpfsWriter(const std::string& path, const AcquisitionParams& params)
    : out_(open_out(path, std::ios::binary)), path_(path), params_(params) {
    out_.write("BPFS", 4);
    put_u32(out_, 1);
    put_u32(out_, static_cast<uint32_t>(params.frames));
    put_u32(out_, static_cast<uint32_t>(params.ny));
    put_u32(out_, static_cast<uint32_t>(params.nx));
    put_f64(out_, params.pixel_pitch);
    put_u64(out_, params.rng_seed);
}

void BpfsWriter::write_frame(std::span<const uint16_t> counts) {
    const size_t expected = static_cast<size_t>(params_.nx) * static_cast<size_t>(params_.ny);
    if (counts.size() != expected) throw IoError(path_ + ": frame size mismatch on write");
    if (written_ >= params_.frames) throw IoError(path_ + ": more frames written than declared");
    for (uint16_t c : counts) put_u16(out_, c);
    ++written_;
}

void BpfsWriter::close() {
    if (closed_) return;
    closed_ = true;
    if (written_ != params_.frames)
        throw IoError(path_ + ": wrote " + std::to_string(written_) + " of " +
                      std::to_string(params_.frames) + " frames");
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_);
    out_.close();
}

BpfsWriter::~BpfsWriter() {
    if (!closed_) {
        try {
            close();
        } catch (...) {
        }
    }
}

BpfsReader::BpfsReader(const std::string& path)
    : in_(open_in(path, std::ios::binary)), path_(path) {
    expect_magic(in_, "BPFS", path);
    const uint32_t version = get_u32(in_, path);
    if (version != 1) throw IoError(path + ": unsupported BPFS version");
    const uint32_t m = get_u32(in_, path);
    const uint32_t ny = get_u32(in_, path);
    const uint32_t nx = get_u32(in_, path);
    if (m == 0 || ny == 0 || nx == 0)
        throw IoError(path + ": empty BPFS dimensions");
    params_.frames = static_cast<int>(m);
    params_.ny = static_cast<int>(ny);
    params_.nx = static_cast<int>(nx);
    params_.pixel_pitch = get_f64(in_, path);
    params_.rng_seed = get_u64(in_, path);
    if (!(params_.pixel_pitch > 0.0)) throw IoError(path + ": non-positive pixel pitch");
}

void BpfsReader::read_frame(std::span<uint16_t> out) {
    const size_t expected = static_cast<size_t>(params_.nx) * static_cast<size_t>(params_.ny);
    if (out.size() != expected) throw IoError(path_ + ": frame buffer size mismatch");
    if (read_ >= params_.frames) throw IoError(path_ + ": read past the last frame");
    std::vector<unsigned char> raw(expected * 2);
    if (!in_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw IoError(path_ + ": truncated frame data");
    for (size_t i = 0; i < expected; ++i)
        out[i] = static_cast<uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
    ++read_;
}

FrameStack read_bpfs(const std::string& path) {
    BpfsReader reader(path);
    FrameStack stack;
    stack.acquisition = reader.params();
    const size_t frame_size = stack.frame_size();
    stack.counts.resize(frame_size * static_cast<size_t>(reader.frames()));
    for (int f = 0; f < reader.frames(); ++f)
        reader.read_frame({stack.counts.data() + static_cast<size_t>(f) * frame_size, frame_size});
    return stack;
}

namespace {

const char* kind_name(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::marginal: return "marginal";
        case ProfileKind::correlation: return "correlation";
        case ProfileKind::correlation_paired: return "correlation_paired";
        case ProfileKind::intensity: return "intensity";
    }
    return "unknown";
}

ProfileKind kind_from_name(const std::string& name, const std::string& path) {
    if (name == "marginal") return ProfileKind::marginal;
    if (name == "correlation") return ProfileKind::correlation;
    if (name == "correlation_paired") return ProfileKind::correlation_paired;
    if (name == "intensity") return ProfileKind::intensity;
    throw IoError(path + ": unknown profile kind '" + name + "'");
}

} // namespace

void write_profile_csv(const std::string& path, const FringeProfile& profile,
                       const CsvMeta& meta) {
    auto out = open_out(path, std::ios::out);
    for (const auto& line : meta) out << "# " << line << "\n";
    out << "# kind: " << kind_name(profile.kind) << "\n";
    const bool lag = profile.kind == ProfileKind::correlation ||
                     profile.kind == ProfileKind::correlation_paired;
    out << (lag ? "lag_m" : "x_m") << ",value\n";
    for (size_t i = 0; i < profile.abscissa.size(); ++i)
        out << format_double(profile.abscissa[i]) << "," << format_double(profile.values[i])
            << "\n";
    if (!out) throw IoError("write failed: " + path);
}

FringeProfile read_profile_csv(const std::string& path) {
    auto in = open_in(path, std::ios::in);
    FringeProfile profile;
    bool have_kind = false;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("kind:");
            if (pos != std::string::npos) {
                std::string name = line.substr(pos + 5);
                name.erase(0, name.find_first_not_of(" \t"));
                name.erase(name.find_last_not_of(" \t\r") + 1);
                profile.kind = kind_from_name(name, path);
                have_kind = true;
            }
            continue;
        }
        if (!header_seen) { // column names
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError(path + ": malformed CSV row: " + line);
        profile.abscissa.push_back(std::stod(line.substr(0, comma)));
        profile.values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (profile.abscissa.empty()) throw IoError(path + ": no data rows");
    if (!have_kind) profile.kind = ProfileKind::marginal;
    return profile;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values, double spacing1,
                      double spacing2, const CsvMeta& meta) {
    auto out = open_out(path, std::ios::out);
    for (const auto& line : meta) out << "# " << line << "\n";
    out << "x1_m,x2_m,value\n";
    const auto coord = [](Eigen::Index i, Eigen::Index n, double spacing) {
        return (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * spacing;
    };
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            out << format_double(coord(i, values.rows(), spacing1)) << ","
                << format_double(coord(j, values.cols(), spacing2)) << ","
                << format_double(values(i, j)) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void write_field_bpf2(const std::string& path, const Field2D& field) {
    write_bpf2(path, field.values.cwiseAbs2(), field.axis1.spacing(), field.axis2.spacing());
}

void write_field_csv(const std::string& path, const Field2D& field, const CsvMeta& meta) {
    write_matrix_csv(path, field.values.cwiseAbs2(), field.axis1.spacing(),
                     field.axis2.spacing(), meta);
}

void write_text_file(const std::string& path, const std::string& content) {
    auto out = open_out(path, std::ios::out);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    auto in = open_in(path, std::ios::in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace biphoton
