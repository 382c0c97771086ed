#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace spinstein {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Locale-independent float formatting: 12 significant digits, '.' decimal.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string digest_hex(const std::string& data) {
    static const char* hexd = "0123456789abcdef";
    const uint64_t h = fnv1a64(data);
    std::string s(16, '0');
    for (int i = 0; i < 16; ++i) s[15 - i] = hexd[(h >> (4 * i)) & 0xf];
    return s;
}

// Serializes rows of preformatted cells; caller formats numbers via
// format_double / std::to_string so output is locale-independent.
inline std::string csv_content(const std::vector<std::string>& header,
                               const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::invalid_argument("csv row width mismatch");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    return out.str();
}

// Writes the file and returns the content digest.
inline std::string write_csv(const std::string& path, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
    const std::string content = csv_content(header, rows);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw IoError("write failed: " + path);
    return digest_hex(content);
}

struct ExperimentManifest {
    std::string subcommand;
    std::vector<std::string> argv;  // everything after the program name
    uint64_t seed = 0;
    std::string version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::pair<std::string, std::string>> outputs;  // (relative filename, digest)

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["subcommand"] = subcommand;
        j["argv"] = argv;
        j["seed"] = seed;
        j["version"] = version;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at;
        nlohmann::json o = nlohmann::json::object();
        for (const auto& [name, digest] : outputs) o[name] = digest;
        j["outputs"] = o;
        return j;
    }

    static ExperimentManifest from_json(const nlohmann::json& j) {
        ExperimentManifest m;
        m.subcommand = j.at("subcommand").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        m.seed = j.at("seed").get<uint64_t>();
        m.version = j.value("version", "");
        m.started_at = j.value("started_at", "");
        m.finished_at = j.value("finished_at", "");
        for (auto it = j.at("outputs").begin(); it != j.at("outputs").end(); ++it)
            m.outputs.emplace_back(it.key(), it.value().get<std::string>());
        return m;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " + path);
        f << to_json().dump(2) << '\n';
        if (!f) throw IoError("write failed: " + path);
    }

    static ExperimentManifest load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open: " + path);
        nlohmann::json j;
        f >> j;
        return from_json(j);
    }
};

// Minimal SVG polyline plot of (x, y) series; CSV stays the authoritative output.
inline std::string svg_line_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const std::string& title) {
    const int w = 640, h = 400, pad = 50;
    double xmin = xs.empty() ? 0 : xs[0], xmax = xmin, ymin = ys.empty() ? 0 : ys[0], ymax = ymin;
    for (double x : xs) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    for (double y : ys) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad); };
    auto py = [&](double y) { return h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad); };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\""
      << h - pad << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << pad << "\" y=\"" << h - pad + 20 << "\">" << format_double(xmin)
      << "</text>\n<text x=\"" << w - pad << "\" y=\"" << h - pad + 20
      << "\" text-anchor=\"end\">" << format_double(xmax) << "</text>\n";
    s << "<text x=\"" << pad - 5 << "\" y=\"" << h - pad << "\" text-anchor=\"end\">"
      << format_double(ymin) << "</text>\n<text x=\"" << pad - 5 << "\" y=\"" << pad
      << "\" text-anchor=\"end\">" << format_double(ymax) << "</text>\n";
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < xs.size(); ++i) s << px(xs[i]) << ',' << py(ys[i]) << ' ';
    s << "\"/>\n</svg>\n";
    return s.str();
}

inline std::string write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed: " + path);
    return digest_hex(content);
}

}  // namespace spinstein
