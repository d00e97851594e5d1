#include "xol/loss_csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "xol/error.hpp"

namespace xol {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out = s.substr(b, e - b);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

} // namespace

std::vector<double> read_losses(std::istream& in) {
    std::vector<double> losses;
    std::string line;
    std::size_t line_no = 0;
    bool first_row = true;
    std::size_t column = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (first_row) {
            first_row = false;
            width = cells.size();
            double probe = 0.0;
            if (width == 1 && parse_double(cells[0], probe)) {
                column = 0; // headerless single column; fall through to parse it
            } else {
                bool found = false;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    std::string name = cells[i];
                    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                    if (name == "loss") {
                        column = i;
                        found = true;
                        break;
                    }
                }
                if (!found) throw ParseError(line_no, "line " + std::to_string(line_no) + ": no 'loss' column in header");
                continue;
            }
        }
        if (cells.size() != width) {
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected " +
                                          std::to_string(width) + " fields, got " + std::to_string(cells.size()));
        }
        double v = 0.0;
        if (!parse_double(cells[column], v) || !std::isfinite(v)) {
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": not a number: '" + cells[column] + "'");
        }
        if (v < 0.0) {
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": negative loss " + cells[column]);
        }
        losses.push_back(v);
    }
    if (losses.empty()) throw ParseError(line_no, "no loss values found");
    return losses;
}

std::vector<double> read_losses_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    return read_losses(in);
}

std::uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const auto n = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

} // namespace xol
