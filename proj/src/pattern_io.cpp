#include "anisok/pattern_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "anisok/error.hpp"

namespace anisok {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

[[noreturn]] void format_error(std::string_view source, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << source << ":" << line << ": " << what;
    throw Error(ErrorCode::format, os.str());
}

double parse_number(std::string_view tok, std::string_view source, std::size_t line) {
    double x = 0.0;
    const char* begin = tok.data();
    const char* end = tok.data() + tok.size();
    if (!tok.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
        format_error(source, line, "invalid number '" + std::string(tok) + "'");
    }
    return x;
}

}  // namespace

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

void write_pattern(std::ostream& os, const PatternFile& file) {
    for (const auto& c : file.comments) os << "#" << c << "\n";
    if (!file.units.empty()) os << "# units: " << file.units << "\n";
    const BoxWindow& w = file.pattern.window();
    os << "window";
    for (int i = 0; i < 3; ++i) os << " " << format_double(w.lo()[i]) << " " << format_double(w.hi()[i]);
    os << "\n";
    for (const Vec3& p : file.pattern.points()) {
        os << format_double(p.x) << " " << format_double(p.y) << " " << format_double(p.z) << "\n";
    }
}

void write_pattern_file(const std::filesystem::path& path, const PatternFile& file) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
    write_pattern(os, file);
    os.flush();
    if (!os) throw Error(ErrorCode::io, "write to '" + path.string() + "' failed");
}

PatternFile read_pattern(std::istream& is, std::string_view source) {
    PatternFile out;
    std::string raw;
    std::size_t line_no = 0;
    bool have_window = false;
    BoxWindow window;
    std::vector<Vec3> pts;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string_view body = trim(line.substr(1));
            if (body.starts_with("units:")) {
                out.units = std::string(trim(body.substr(6)));
            } else {
                out.comments.emplace_back(line.substr(1));
            }
            continue;
        }
        const auto toks = split_ws(line);
        if (!have_window) {
            if (toks.size() != 7 || toks[0] != "window") {
                format_error(source, line_no, "expected 'window x_lo x_hi y_lo y_hi z_lo z_hi'");
            }
            Vec3 lo, hi;
            for (int i = 0; i < 3; ++i) {
                lo[i] = parse_number(toks[1 + 2 * i], source, line_no);
                hi[i] = parse_number(toks[2 + 2 * i], source, line_no);
            }
            try {
                window = BoxWindow(lo, hi);
            } catch (const Error& e) {
                format_error(source, line_no, e.what());
            }
            have_window = true;
            continue;
        }
        if (toks.size() != 3) format_error(source, line_no, "expected three coordinates 'x y z'");
        Vec3 p{parse_number(toks[0], source, line_no), parse_number(toks[1], source, line_no),
               parse_number(toks[2], source, line_no)};
        if (!window.contains(p)) format_error(source, line_no, "point lies outside the window");
        pts.push_back(p);
    }
    if (!have_window) format_error(source, line_no, "missing 'window' line");
    try {
        out.pattern = PointPattern(std::move(pts), window);
    } catch (const Error& e) {
        format_error(source, line_no, e.what());
    }
    return out;
}

PatternFile read_pattern_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
    return read_pattern(is, path.string());
}

std::vector<std::filesystem::path> expand_pattern_paths(const std::vector<std::filesystem::path>& inputs) {
    std::vector<std::filesystem::path> out;
    for (const auto& in : inputs) {
        if (std::filesystem::is_directory(in)) {
            std::vector<std::filesystem::path> found;
            for (const auto& entry : std::filesystem::directory_iterator(in)) {
                const auto& p = entry.path();
                if (entry.is_regular_file() && p.extension() == ".txt" && p.filename() != "manifest.txt") {
                    found.push_back(p);
                }
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (std::filesystem::exists(in)) {
            out.push_back(in);
        } else {
            throw Error(ErrorCode::io, "input '" + in.string() + "' does not exist");
        }
    }
    if (out.empty()) throw Error(ErrorCode::empty_input, "no pattern files found in the inputs");
    return out;
}

}  // namespace anisok
