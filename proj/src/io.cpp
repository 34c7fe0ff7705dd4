#include "rlab/io.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

// Compact SHA-256 (FIPS 180-4), enough for reproducible artifact digests.
struct Sha256 {
    std::array<std::uint32_t, 8> h{0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                                   0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    std::array<std::uint8_t, 64> block{};
    std::size_t fill = 0;
    std::uint64_t total = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress(const std::uint8_t* p) {
        static constexpr std::uint32_t K[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, hh] = h;
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t mj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + mj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        total += len;
        while (len > 0) {
            const std::size_t take = std::min(len, block.size() - fill);
            std::memcpy(block.data() + fill, p, take);
            fill += take;
            p += take;
            len -= take;
            if (fill == block.size()) {
                compress(block.data());
                fill = 0;
            }
        }
    }

    std::string hex() {
        const std::uint64_t bits = total * 8;
        std::uint8_t pad = 0x80;
        update(&pad, 1);
        const std::uint8_t zero = 0;
        while (fill != 56) update(&zero, 1);
        for (int i = 7; i >= 0; --i) {
            const std::uint8_t b = std::uint8_t((bits >> (8 * i)) & 0xff);
            update(&b, 1);
        }
        char out[65];
        for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
        return std::string(out, 64);
    }
};

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

Polynomial parse_coeff_list(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ParseError("missing field `" + field + "`");
    const json& arr = j.at(field);
    if (!arr.is_array() || arr.empty())
        throw ParseError("field `" + field + "` must be a nonempty list of [re, im] pairs");
    std::vector<Complex> coeffs;
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
            throw ParseError("field `" + field + "` entries must be [re, im] number pairs");
        coeffs.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    return Polynomial{std::move(coeffs)};
}

json coeff_list(const Polynomial& p) {
    json arr = json::array();
    for (const Complex& c : p.coeffs()) arr.push_back(json::array({c.real(), c.imag()}));
    return arr;
}

Region parse_region(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError("field `region` must be an object with a `kind`");
    const std::string kind = j.at("kind").get<std::string>();
    auto center = [&]() {
        if (!j.contains("center")) return Complex{0.0};
        const auto& c = j.at("center");
        return Complex{c.at(0).get<double>(), c.at(1).get<double>()};
    };
    if (kind == "whole-sphere") return Region::whole_sphere();
    if (kind == "disk") return Region::disk(center(), j.at("radius").get<double>());
    if (kind == "annulus")
        return Region::annulus(center(), j.at("r").get<double>(), j.at("R").get<double>());
    throw ParseError("field `region.kind` must be whole-sphere, disk, or annulus");
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    Sha256 s;
    s.update(bytes.data(), bytes.size());
    return s.hex();
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file for digest: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

MapFile read_map_file(const std::string& path) {
    const json j = load_json(path);
    MapFile mf;
    mf.num = parse_coeff_list(j, "num");
    mf.den = parse_coeff_list(j, "den");
    if (j.contains("label")) mf.label = j.at("label").get<std::string>();
    return mf;
}

void write_map_file(const std::string& path, const RationalMap& map, const std::string& label,
                    const std::map<std::string, std::string>& extra) {
    json j;
    j["num"] = coeff_list(map.num());
    j["den"] = coeff_list(map.den());
    j["label"] = label;
    for (const auto& [k, v] : extra) j[k] = v;
    std::ofstream out(path);
    if (!out) throw Error("cannot write map file: " + path);
    out << j.dump(2) << "\n";
}

ExperimentFile read_experiment_file(const std::string& path) {
    const json j = load_json(path);
    ExperimentFile ex;
    if (!j.contains("experiment")) throw ParseError(path + ": missing field `experiment`");
    ex.experiment = j.at("experiment").get<std::string>();
    if (j.contains("map")) ex.map_path = j.at("map").get<std::string>();
    if (j.contains("phi")) ex.phi = j.at("phi").get<std::string>();
    if (j.contains("mu")) ex.mu = j.at("mu").get<std::string>();
    if (j.contains("n_schedule")) {
        for (const auto& n : j.at("n_schedule")) {
            if (!n.is_number_integer()) throw ParseError(path + ": `n_schedule` must be integers");
            ex.n_schedule.push_back(n.get<int>());
        }
    }
    if (j.contains("region")) ex.region = parse_region(j.at("region"));
    if (j.contains("tol")) ex.tol = j.at("tol").get<double>();
    if (j.contains("budget")) ex.budget = j.at("budget").get<std::uint64_t>();
    if (j.contains("node_budget")) ex.node_budget = j.at("node_budget").get<std::uint64_t>();
    if (j.contains("seed")) ex.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) ex.threads = j.at("threads").get<int>();
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) {
            if (!v.is_number()) throw ParseError(path + ": `params` values must be numbers");
            ex.params[k] = v.get<double>();
        }
    }
    return ex;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> header) : path_(std::move(path)) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body_ += ',';
        body_ += header[i];
    }
    body_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
    ++rows_;
}

void CsvWriter::number_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(fmt_g17(v));
    row(s);
}

std::pair<std::string, std::uint64_t> CsvWriter::save() {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw Error("cannot write artifact: " + path_);
    out << body_;
    return {sha256_hex(body_), rows_};
}

bool RunManifest::all_audits_passed() const {
    for (const Audit& a : audits)
        if (!a.pass) return false;
    return true;
}

void RunManifest::save(const std::string& path) const {
    json j;
    j["tool"] = tool;
    j["version"] = version;
    j["command"] = command;
    if (!experiment.empty()) j["experiment"] = experiment;
    json ins = json::array();
    for (const auto& [p, d] : inputs) ins.push_back({{"path", p}, {"sha256", d}});
    j["inputs"] = ins;
    j["seed"] = seed;
    j["tol"] = tol;
    j["budget"] = budget;
    j["threads"] = threads;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    json arts = json::array();
    for (const ArtifactEntry& a : artifacts)
        arts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"rows", a.rows}});
    j["artifacts"] = arts;
    json auds = json::array();
    for (const Audit& a : audits)
        auds.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    j["audits"] = auds;
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace rlab
