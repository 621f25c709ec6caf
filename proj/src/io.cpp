#include "mxgs/io.hpp"

#include "mxgs/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mxgs {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(std::string_view bytes, std::size_t at, int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
    return v;
}

double get_f64(std::string_view bytes, std::size_t at) { return std::bit_cast<double>(get_le(bytes, at, 8)); }

}  // namespace

std::string encode_field(const RealField& f, double s, double p) {
    std::string out;
    out.reserve(kFieldHeaderBytes + 8 * f.size());
    out.append(kFieldMagic);
    out.append(kFieldVersion);
    put_u32(out, static_cast<std::uint32_t>(f.grid.n));
    put_u32(out, static_cast<std::uint32_t>(f.grid.N()));
    put_f64(out, f.grid.L());
    put_f64(out, s);
    put_f64(out, p);
    for (double x : to_ascending(f)) put_f64(out, x);
    return out;
}

DecodedField decode_field(std::string_view bytes) {
    if (bytes.size() < 8 || bytes.substr(0, 4) != kFieldMagic) throw FormatError("not a field dump: bad magic");
    if (bytes.substr(4, 4) != kFieldVersion)
        throw UnsupportedVersionError("unsupported field dump version '" + std::string(bytes.substr(4, 4)) + "'");
    if (bytes.size() < kFieldHeaderBytes) throw FormatError("truncated field dump header");

    DecodedField out;
    auto& h = out.header;
    h.n = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
    h.N = static_cast<std::uint32_t>(get_le(bytes, 12, 4));
    h.L = get_f64(bytes, 16);
    h.s = get_f64(bytes, 24);
    h.p = get_f64(bytes, 32);
    if (h.n < 1 || h.n > 3 || h.N < 8 || h.N > (1u << 24)) throw FormatError("field dump header has invalid dimensions");

    GridSpec grid;
    try {
        grid = build_grid(static_cast<int>(h.n), static_cast<int>(h.N), h.L);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("field dump header: ") + e.what());
    }
    const std::size_t count = grid.size();
    const std::size_t expected = kFieldHeaderBytes + 8 * count;
    if (bytes.size() < expected) throw FormatError("truncated field dump: expected " + std::to_string(expected) +
                                                   " bytes, found " + std::to_string(bytes.size()));
    if (bytes.size() > expected) throw FormatError("field dump has trailing bytes");

    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) data[i] = get_f64(bytes, kFieldHeaderBytes + 8 * i);
    out.field = from_ascending(grid, data);
    return out;
}

void save_field(const std::filesystem::path& path, const RealField& f, double s, double p) {
    write_text_file(path, encode_field(f, s, p));
}

DecodedField load_field(const std::filesystem::path& path) { return decode_field(read_text_file(path)); }

std::filesystem::path sidecar_path(const std::filesystem::path& field_path) {
    auto out = field_path;
    out.replace_extension(".json");
    return out;
}

void save_state(const std::filesystem::path& field_path, const GroundStateResult& state, const std::string& config_hash) {
    save_field(field_path, state.field, state.s(), state.p());
    nlohmann::ordered_json j;
    j["format"] = std::string(kFieldMagic) + std::string(kFieldVersion);
    j["field_file"] = field_path.filename().string();
    j["n"] = state.field.grid.n;
    j["N"] = state.field.grid.N();
    j["L"] = state.field.grid.L();
    j["s"] = state.s();
    j["p"] = state.p();
    j["shift"] = state.params.shift;
    j["lambda_s"] = state.lambda_s;
    j["residual_linf"] = state.residual_linf;
    j["nehari_rel"] = state.nehari_rel;
    j["iterations"] = state.iterations;
    j["converged"] = state.converged;
    j["method"] = state.method;
    j["center"] = std::vector<double>(state.center.begin(), state.center.begin() + state.field.grid.n);
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    write_text_file(sidecar_path(field_path), j.dump(2) + "\n");
}

GroundStateResult load_state(const std::filesystem::path& field_path) {
    auto decoded = load_field(field_path);
    const auto& h = decoded.header;

    GroundStateResult r;
    r.field = std::move(decoded.field);
    r.params = SymbolParams{static_cast<int>(h.n), h.s, h.p, 1.0};
    r.method = "loaded";

    const auto meta_path = sidecar_path(field_path);
    bool have_meta = false;
    nlohmann::json meta;
    if (std::filesystem::exists(meta_path)) {
        try {
            meta = nlohmann::json::parse(read_text_file(meta_path));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("unreadable state metadata " + meta_path.string() + ": " + e.what());
        }
        have_meta = true;
        auto mismatch = [&](const char* key, double header_value) {
            if (!meta.contains(key)) return;
            if (meta[key].get<double>() != header_value)
                throw FormatError(std::string("dimension mismatch between field dump and metadata: ") + key);
        };
        mismatch("n", h.n);
        mismatch("N", h.N);
        mismatch("L", h.L);
        mismatch("s", h.s);
        mismatch("p", h.p);
        if (meta.contains("shift")) r.params.shift = meta["shift"].get<double>();
        if (meta.contains("iterations")) r.iterations = meta["iterations"].get<int>();
        if (meta.contains("method")) r.method = meta["method"].get<std::string>();
    }
    try {
        validate(r.params);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("field dump parameters: ") + e.what());
    }
    if (!r.field.all_finite()) throw FormatError("field dump contains non-finite samples");

    finalize_result(r);
    const double umax = r.field.max_abs();
    const bool residual_ok = r.residual_linf <= 1e-8 * std::max(umax, 1e-300) && r.nehari_rel <= 1e-8;
    r.converged = have_meta && meta.contains("converged") ? (meta["converged"].get<bool>() && residual_ok) : residual_ok;
    return r;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv_text(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows, const std::string& config_hash) {
    std::ostringstream os;
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    write_text_file(path, os.str());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, const std::string& config_hash) {
    std::vector<std::vector<std::string>> text;
    text.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double x : row) cells.push_back(format_real(x));
        text.push_back(std::move(cells));
    }
    write_csv_text(path, header, text, config_hash);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw Error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace mxgs
