#pragma once

#include "mxgs/ground_state.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mxgs {

/// Binary field dump: "MXGS" + version "0001", u32 n, u32 N, f64 L, f64 s, f64 p,
/// then N^n f64 samples in ascending-coordinate row-major order. Little-endian.
inline constexpr std::string_view kFieldMagic = "MXGS";
inline constexpr std::string_view kFieldVersion = "0001";
inline constexpr std::size_t kFieldHeaderBytes = 8 + 4 + 4 + 8 + 8 + 8;

struct FieldHeader {
    std::uint32_t n = 0;
    std::uint32_t N = 0;
    double L = 0.0;
    double s = 0.0;
    double p = 0.0;
};

struct DecodedField {
    FieldHeader header;
    RealField field;
};

std::string encode_field(const RealField& f, double s, double p);
/// Throws FormatError (bad magic, truncation, trailing bytes, invalid grid) or
/// UnsupportedVersionError.
DecodedField decode_field(std::string_view bytes);

void save_field(const std::filesystem::path& path, const RealField& f, double s, double p);
DecodedField load_field(const std::filesystem::path& path);

/// Sidecar metadata path for a field dump: same stem, ".json".
std::filesystem::path sidecar_path(const std::filesystem::path& field_path);

/// Writes the field dump and its JSON sidecar.
void save_state(const std::filesystem::path& field_path, const GroundStateResult& state,
                const std::string& config_hash = {});

/// Reads a field dump (and its sidecar when present) and recomputes every
/// derived quantity. Header and sidecar must agree on n, N, L, s, p.
GroundStateResult load_state(const std::filesystem::path& field_path);

/// 17 significant digits with a '.' decimal separator, independent of the C locale.
std::string format_real(double x);

/// CSV writer. The first line is "# config_hash=<hash>" when a hash is given.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, const std::string& config_hash = {});
/// Variant whose cells are preformatted strings.
void write_csv_text(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows, const std::string& config_hash = {});

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mxgs
