// output.hpp - CSV tables, JSON sidecars, binary event logs and SVG plots

#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "avalanche/core.hpp"
#include "avalanche/errors.hpp"
#include "avalanche/stochastic.hpp"

namespace avalanche::output {

/// Shortest text that parses back to the same double.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

template <std::integral T>
inline std::string fmt(T v) {
    return std::to_string(v);
}
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }

/// CSV table with a `# key=value` preamble. Every file starts with the config hash
/// and the schema tag, then one header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& schema, const std::string& config_hash,
              const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), columns_(columns.size()) {
        if (!out_) fail(ErrorKind::ValidationError, "cannot write '" + path.string() + "'");
        out_ << "# config_hash=" << config_hash << "\n# schema=" << schema << "\n";
        row_strings(columns);
    }

    template <class... T>
    void row(const T&... values) {
        row_strings({fmt(values)...});
    }

    void row_strings(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) fail(ErrorKind::ValidationError, "CSV row has the wrong number of cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << escape(cells[i]);
        }
        out_ << '\n';
    }

private:
    static std::string escape(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }

    std::ofstream out_;
    std::size_t columns_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::ValidationError, "cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Binary event log
//
// Header (16 bytes): ASCII "AVEVLOG1", then u64 record count.
// Record (11 bytes, packed): f64 time, u8 kind, u16 site. All little-endian.

inline constexpr char event_log_magic[8] = {'A', 'V', 'E', 'V', 'L', 'O', 'G', '1'};

namespace detail {

inline void put_le(std::string& buf, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_le(const unsigned char* p, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

} // namespace detail

inline std::string encode_event_log(std::span<const stochastic::TimedEvent> events) {
    std::string buf(event_log_magic, sizeof event_log_magic);
    detail::put_le(buf, events.size(), 8);
    buf.reserve(16 + 11 * events.size());
    for (const auto& e : events) {
        detail::put_le(buf, std::bit_cast<std::uint64_t>(e.time), 8);
        detail::put_le(buf, static_cast<std::uint8_t>(e.event.kind), 1);
        detail::put_le(buf, e.event.site, 2);
    }
    return buf;
}

inline std::vector<stochastic::TimedEvent> decode_event_log(std::string_view bytes) {
    if (bytes.size() < 16 || !std::equal(event_log_magic, event_log_magic + 8, bytes.begin()))
        fail(ErrorKind::ParseError, "not an event log");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t n = detail::get_le(p + 8, 8);
    if (bytes.size() != 16 + 11 * n) fail(ErrorKind::ParseError, "event log length does not match its header");
    std::vector<stochastic::TimedEvent> out(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const unsigned char* r = p + 16 + 11 * i;
        out[i].time = std::bit_cast<double>(detail::get_le(r, 8));
        const auto kind = r[8];
        if (kind > static_cast<std::uint8_t>(JumpKind::Loss0)) fail(ErrorKind::ParseError, "bad event kind");
        out[i].event.kind = static_cast<JumpKind>(kind);
        out[i].event.site = static_cast<std::uint16_t>(detail::get_le(r + 9, 2));
    }
    return out;
}

inline void write_event_log(const std::filesystem::path& path, std::span<const stochastic::TimedEvent> events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::ValidationError, "cannot write '" + path.string() + "'");
    const auto buf = encode_event_log(events);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline std::vector<stochastic::TimedEvent> read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return decode_event_log(ss.str());
}

// ---------------------------------------------------------------------------
// SVG plots

struct Series {
    std::string label;
    std::vector<double> x{}, y{};
    std::vector<double> err{}; // optional symmetric error bars
    bool markers = false;
    bool line = true;
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    bool logx = false, logy = false;
    int width = 640, height = 420;
};

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % 10];
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        default: o += c;
        }
    }
    return o;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline std::vector<double> ticks(double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
        for (double e = std::floor(lo); e <= std::ceil(hi) + 1e-9; e += 1.0)
            if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(e);
        if (t.size() < 2) t = {lo, hi};
        return t;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(v);
    return t;
}

} // namespace detail

inline std::string line_plot_svg(const PlotSpec& spec, const std::vector<Series>& series) {
    const double ml = 70, mr = 150, mt = 36, mb = 50;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double a = tx(s.x[i]), b = ty(s.y[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            const double e = s.err.empty() ? 0.0 : s.err[i];
            x0 = std::min(x0, a);
            x1 = std::max(x1, a);
            y0 = std::min(y0, spec.logy ? b : b - e);
            y1 = std::max(y1, spec.logy ? b : b + e);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };
    auto pyr = [&](double b) { return mt + ph - (b - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::xml_escape(spec.title) << "</text>\n";
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : detail::ticks(x0, x1, spec.logx)) {
        const double X = ml + (t - x0) / (x1 - x0) * pw;
        o << "<line x1=\"" << detail::num(X) << "\" y1=\"" << mt + ph << "\" x2=\"" << detail::num(X) << "\" y2=\""
          << mt + ph + 5 << "\" stroke=\"black\"/>";
        o << "<text x=\"" << detail::num(X) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">"
          << detail::tick_label(spec.logx ? std::pow(10.0, t) : t) << "</text>\n";
    }
    for (double t : detail::ticks(y0, y1, spec.logy)) {
        const double Y = pyr(t);
        o << "<line x1=\"" << ml - 5 << "\" y1=\"" << detail::num(Y) << "\" x2=\"" << ml << "\" y2=\"" << detail::num(Y)
          << "\" stroke=\"black\"/>";
        o << "<text x=\"" << ml - 8 << "\" y=\"" << detail::num(Y + 4) << "\" text-anchor=\"end\">"
          << detail::tick_label(spec.logy ? std::pow(10.0, t) : t) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 10 << "\" text-anchor=\"middle\">"
      << detail::xml_escape(spec.xlabel) << "</text>\n";
    o << "<text transform=\"translate(16," << mt + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::xml_escape(spec.ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = palette(k);
        if (s.line) {
            o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.3\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(tx(s.x[i])) && std::isfinite(ty(s.y[i])))
                    o << detail::num(px(s.x[i])) << ',' << detail::num(py(s.y[i])) << ' ';
            o << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(tx(s.x[i])) || !std::isfinite(ty(s.y[i]))) continue;
            if (!s.err.empty() && !spec.logy)
                o << "<line x1=\"" << detail::num(px(s.x[i])) << "\" y1=\"" << detail::num(py(s.y[i] - s.err[i]))
                  << "\" x2=\"" << detail::num(px(s.x[i])) << "\" y2=\"" << detail::num(py(s.y[i] + s.err[i]))
                  << "\" stroke=\"" << c << "\"/>\n";
            if (s.markers)
                o << "<circle cx=\"" << detail::num(px(s.x[i])) << "\" cy=\"" << detail::num(py(s.y[i]))
                  << "\" r=\"3\" fill=\"" << c << "\"/>\n";
        }
        const double ly = mt + 14 + 16.0 * static_cast<double>(k);
        o << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw + 28 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>";
        o << "<text x=\"" << ml + pw + 32 << "\" y=\"" << ly << "\">" << detail::xml_escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

struct HeatCell {
    double x = 0, y = 0;
    int category = 0;
};

/// Categorical scatter of grid points, used for phase diagrams.
inline std::string category_map_svg(const PlotSpec& spec, const std::vector<HeatCell>& cells,
                                    const std::vector<std::string>& names) {
    std::vector<Series> series(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        series[k].label = names[k];
        series[k].markers = true;
        series[k].line = false;
    }
    for (const auto& c : cells) {
        if (c.category < 0 || static_cast<std::size_t>(c.category) >= names.size()) continue;
        series[static_cast<std::size_t>(c.category)].x.push_back(c.x);
        series[static_cast<std::size_t>(c.category)].y.push_back(c.y);
    }
    return line_plot_svg(spec, series);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::ValidationError, "cannot write '" + path.string() + "'");
    out << text;
}

} // namespace avalanche::output
