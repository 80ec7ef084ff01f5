#pragma once

/*
 * Deterministic file formats and run configuration.
 *
 * Binary grids share one layout: a single text header line, then the payload
 * as little-endian 64-bit floats.
 *   QWF1 — complex amplitudes (re, im pairs), site-major, coin fastest
 *   QWP1 — real probabilities, site-major
 *   QWD1 — dispersion surfaces over the k-grid, branch fastest
 * Run configuration is a flat key=value file with [sections]; wavevectors are
 * given in units of pi.
 */

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/continuum.hpp"
#include "qwalk/degeneracy.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/wavepacket.hpp"

namespace qwalk {

namespace detail {

inline void write_doubles(std::ostream& os, const double* data, std::size_t count) {
    static_assert(sizeof(double) == 8, "64-bit doubles required");
    os.write(reinterpret_cast<const char*>(data), std::streamsize(count * 8));
}

inline void read_doubles(std::istream& is, double* data, std::size_t count) {
    is.read(reinterpret_cast<char*>(data), std::streamsize(count * 8));
    if (!is) throw ContractError("file-format: truncated payload");
}

template <typename T>
std::string join_csv(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

template <typename T>
std::vector<T> split_csv(const std::string& s) {
    std::vector<T> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::istringstream conv(item);
        T value;
        if (!(conv >> value)) throw ContractError("file-format: bad numeric list: " + s);
        out.push_back(value);
    }
    return out;
}

inline std::map<std::string, std::string> parse_header(const std::string& line,
                                                       const std::string& magic) {
    std::istringstream is(line);
    std::string token;
    if (!(is >> token) || token != magic)
        throw ContractError("file-format: expected magic " + magic);
    std::map<std::string, std::string> fields;
    while (is >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ContractError("file-format: malformed header field: " + token);
        fields[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return fields;
}

inline std::string require_field(const std::map<std::string, std::string>& fields,
                                 const std::string& key) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ContractError("file-format: missing header field: " + key);
    return it->second;
}

}  // namespace detail

// ----------------------------------------------------------------- QWF1/QWP1

inline void write_state(std::ostream& os, const LatticeField& f,
                        const std::string& coin_id, const std::string& extra = "") {
    os << "QWF1 dim=" << f.dim_n << " shape=" << detail::join_csv(f.shape)
       << " origin=" << detail::join_csv(f.origin) << " time=" << f.time
       << " coin=" << coin_id;
    if (!extra.empty()) os << " " << extra;
    os << "\n";
    detail::write_doubles(os, reinterpret_cast<const double*>(f.amp.data()), f.amp.size() * 2);
}

inline LatticeField read_state(std::istream& is, std::string* coin_id = nullptr) {
    std::string line;
    if (!std::getline(is, line)) throw ContractError("file-format: missing header");
    const auto fields = detail::parse_header(line, "QWF1");
    LatticeField f = make_field(std::stoi(detail::require_field(fields, "dim")),
                                detail::split_csv<int>(detail::require_field(fields, "shape")),
                                detail::split_csv<long>(detail::require_field(fields, "origin")));
    f.time = std::stol(detail::require_field(fields, "time"));
    if (coin_id) *coin_id = detail::require_field(fields, "coin");
    detail::read_doubles(is, reinterpret_cast<double*>(f.amp.data()), f.amp.size() * 2);
    return f;
}

inline void write_probability(std::ostream& os, const ProbabilityField& p,
                              const std::string& coin_id) {
    os << "QWP1 dim=" << p.dim_n << " shape=" << detail::join_csv(p.shape)
       << " origin=" << detail::join_csv(p.origin) << " time=" << p.time
       << " coin=" << coin_id << "\n";
    detail::write_doubles(os, p.values.data(), p.values.size());
}

inline ProbabilityField read_probability(std::istream& is, std::string* coin_id = nullptr) {
    std::string line;
    if (!std::getline(is, line)) throw ContractError("file-format: missing header");
    const auto fields = detail::parse_header(line, "QWP1");
    ProbabilityField p;
    p.dim_n = std::stoi(detail::require_field(fields, "dim"));
    p.shape = detail::split_csv<int>(detail::require_field(fields, "shape"));
    p.origin = detail::split_csv<long>(detail::require_field(fields, "origin"));
    p.time = std::stol(detail::require_field(fields, "time"));
    if (coin_id) *coin_id = detail::require_field(fields, "coin");
    std::size_t n = 1;
    for (int s : p.shape) n *= std::size_t(s);
    p.values.resize(n);
    detail::read_doubles(is, p.values.data(), p.values.size());
    return p;
}

// ----------------------------------------------------------------------- QWD1

inline void write_dispersion(std::ostream& os, const DispersionSurface& s,
                             const std::string& coin_id) {
    os << "QWD1 dim=" << s.dim_n << " resolution=" << s.resolution
       << " branches=" << s.nbranches << " coin=" << coin_id << "\n";
    detail::write_doubles(os, s.omegas.data(), s.omegas.size());
}

inline DispersionSurface read_dispersion(std::istream& is, std::string* coin_id = nullptr) {
    std::string line;
    if (!std::getline(is, line)) throw ContractError("file-format: missing header");
    const auto fields = detail::parse_header(line, "QWD1");
    DispersionSurface s;
    s.dim_n = std::stoi(detail::require_field(fields, "dim"));
    s.resolution = std::stoi(detail::require_field(fields, "resolution"));
    s.nbranches = std::stoi(detail::require_field(fields, "branches"));
    if (coin_id) *coin_id = detail::require_field(fields, "coin");
    std::size_t cells = 1;
    for (int a = 0; a < s.dim_n; ++a) cells *= std::size_t(s.resolution);
    s.omegas.resize(cells * std::size_t(s.nbranches));
    detail::read_doubles(is, s.omegas.data(), s.omegas.size());
    return s;
}

// ------------------------------------------------------------------ checksums

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t file_checksum(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ContractError("file-format: cannot open " + path);
    std::vector<char> buf(1 << 16);
    std::uint64_t h = 14695981039346656037ull;
    while (is) {
        is.read(buf.data(), std::streamsize(buf.size()));
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[std::size_t(i)]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

// Manifest: one "<hex checksum>  <filename>" line per file.
inline std::string manifest_text(const std::vector<std::string>& paths) {
    std::ostringstream os;
    for (const std::string& path : paths) {
        os << std::hex;
        os.width(16);
        os.fill('0');
        os << file_checksum(path) << std::dec << "  "
           << path.substr(path.find_last_of('/') + 1) << "\n";
    }
    return os.str();
}

// ------------------------------------------------------------------ RunConfig

struct RunConfig {
    std::string coin = "grover";
    int dimension = 2;
    std::vector<int> shape;
    long steps = 0;
    long stride = 1;
    std::string backend = "spectral";  // or "position"
    int threads = 1;

    // packet
    std::string envelope = "gaussian";  // or "gaussian-sinc"
    double sigma = 10;
    double sigma0 = 0;
    std::vector<double> k0_pi;          // carrier in units of pi
    std::string coin_state = "phi_D";   // "branch:<s>" | "phi_D" | "explicit:re,im,..."
    std::vector<long> center;

    // outputs
    bool out_probability = true;
    bool out_moments = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            if (section == "run") {
                if (key == "coin") cfg.coin = value;
                else if (key == "dimension") cfg.dimension = std::stoi(value);
                else if (key == "shape") cfg.shape = detail::split_csv<int>(value);
                else if (key == "steps") cfg.steps = std::stol(value);
                else if (key == "stride") cfg.stride = std::stol(value);
                else if (key == "backend") cfg.backend = value;
                else if (key == "threads") cfg.threads = std::stoi(value);
                else throw ConfigError("unknown key " + key);
            } else if (section == "packet") {
                if (key == "envelope") cfg.envelope = value;
                else if (key == "sigma") cfg.sigma = std::stod(value);
                else if (key == "sigma0") cfg.sigma0 = std::stod(value);
                else if (key == "k0") cfg.k0_pi = detail::split_csv<double>(value);
                else if (key == "coin") cfg.coin_state = value;
                else if (key == "center") cfg.center = detail::split_csv<long>(value);
                else throw ConfigError("unknown key " + key);
            } else if (section == "output") {
                if (key == "probability") cfg.out_probability = (value == "true" || value == "1");
                else if (key == "moments") cfg.out_moments = (value == "true" || value == "1");
                else throw ConfigError("unknown key " + key);
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ", key '" + key +
                              "': " + e.what());
        }
    }
    if (cfg.steps < 0) throw ConfigError("steps must be >= 0");
    if (cfg.stride < 1) throw ConfigError("stride must be >= 1");
    if (cfg.backend != "spectral" && cfg.backend != "position")
        throw ConfigError("backend must be 'spectral' or 'position'");
    return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "[run]\n";
    os << "coin = " << cfg.coin << "\n";
    os << "dimension = " << cfg.dimension << "\n";
    if (!cfg.shape.empty()) os << "shape = " << detail::join_csv(cfg.shape) << "\n";
    os << "steps = " << cfg.steps << "\n";
    os << "stride = " << cfg.stride << "\n";
    os << "backend = " << cfg.backend << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "\n[packet]\n";
    os << "envelope = " << cfg.envelope << "\n";
    os << "sigma = " << cfg.sigma << "\n";
    if (cfg.sigma0 > 0) os << "sigma0 = " << cfg.sigma0 << "\n";
    if (!cfg.k0_pi.empty()) os << "k0 = " << detail::join_csv(cfg.k0_pi) << "\n";
    os << "coin = " << cfg.coin_state << "\n";
    if (!cfg.center.empty()) os << "center = " << detail::join_csv(cfg.center) << "\n";
    os << "\n[output]\n";
    os << "probability = " << (cfg.out_probability ? "true" : "false") << "\n";
    os << "moments = " << (cfg.out_moments ? "true" : "false") << "\n";
    return os.str();
}

// Builds the WavePacketSpec described by a config, resolving the coin-state
// selector against the given coin matrix.
inline WavePacketSpec packet_from_config(const RunConfig& cfg, const CoinMatrix& coin) {
    WavePacketSpec spec;
    if (cfg.envelope == "gaussian") spec.envelope = EnvelopeKind::kGaussian;
    else if (cfg.envelope == "gaussian-sinc") spec.envelope = EnvelopeKind::kGaussianSinc;
    else throw ConfigError("unknown envelope: " + cfg.envelope);
    spec.sigma = cfg.sigma;
    spec.sigma0 = cfg.sigma0;
    spec.k0.resize(cfg.dimension);
    for (int a = 0; a < cfg.dimension; ++a)
        spec.k0[a] = (std::size_t(a) < cfg.k0_pi.size()) ? cfg.k0_pi[std::size_t(a)] * M_PI : 0.0;
    spec.center = cfg.center;

    if (cfg.coin_state == "phi_D") {
        if (cfg.dimension != 2) throw ConfigError("phi_D requires dimension 2");
        spec.coin = diabolo_coin_state();
    } else if (cfg.coin_state.rfind("branch:", 0) == 0) {
        const int s = std::stoi(cfg.coin_state.substr(7));
        spec.coin = branch_coin_at(coin, spec.k0, s);
    } else if (cfg.coin_state.rfind("explicit:", 0) == 0) {
        const std::vector<double> nums = detail::split_csv<double>(cfg.coin_state.substr(9));
        if (nums.size() != std::size_t(4 * cfg.dimension))
            throw ConfigError("explicit coin needs 2*(2N) numbers (re,im pairs)");
        spec.coin.resize(2 * cfg.dimension);
        for (int j = 0; j < 2 * cfg.dimension; ++j)
            spec.coin[j] = cxd(nums[std::size_t(2 * j)], nums[std::size_t(2 * j + 1)]);
        const double n = spec.coin.norm();
        if (n <= 0) throw ConfigError("explicit coin vector is zero");
        spec.coin /= n;
    } else {
        throw ConfigError("unknown coin selector: " + cfg.coin_state);
    }
    return spec;
}

}  // namespace qwalk
