#include "reebkit/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace reebkit {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string barcode_svg(const Barcode& bc, const std::string& title) {
    constexpr double left = 70, right = 20, top = 30, row = 14, axis_gap = 30;
    constexpr double width = 720;
    const double plot_w = width - left - right;

    double t_max = bc.horizon ? bc.horizon->to_double() : 0.0;
    for (const auto& b : bc.bars) t_max = std::max(t_max, (b.death ? *b.death : b.birth).to_double());
    if (t_max <= 0) t_max = 1;
    t_max *= bc.horizon ? 1.0 : 1.1;

    std::vector<std::size_t> order(bc.bars.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return bc.bars[a].birth < bc.bars[b].birth; });

    const double height = top + row * static_cast<double>(bc.bars.size()) + axis_gap + 20;
    auto x_of = [&](double t) { return left + plot_w * t / t_max; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" font-family=\"monospace\" font-size=\"10\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) s << "<text x=\"" << num(left) << "\" y=\"16\" font-size=\"12\">" << escape(title) << "</text>\n";

    for (std::size_t r = 0; r < order.size(); ++r) {
        const Bar& b = bc.bars[order[r]];
        const double y = top + row * static_cast<double>(r);
        const double x0 = x_of(b.birth.to_double());
        const double x1 = b.death ? x_of(b.death->to_double()) : left + plot_w;
        const char* fill = b.degree % 2 == 0 ? "#3b6ea5" : "#c0504d";
        s << "<rect x=\"" << num(x0) << "\" y=\"" << num(y + 2) << "\" width=\"" << num(std::max(x1 - x0, 1.0))
          << "\" height=\"" << num(row - 4) << "\" fill=\"" << fill << "\"/>\n";
        s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + row - 3) << "\" text-anchor=\"end\">deg "
          << b.degree << "</text>\n";
    }

    const double axis_y = top + row * static_cast<double>(order.size()) + 10;
    s << "<line x1=\"" << num(left) << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(left + plot_w) << "\" y2=\""
      << num(axis_y) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = t_max * i / 5.0;
        const double x = x_of(t);
        s << "<line x1=\"" << num(x) << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(x) << "\" y2=\"" << num(axis_y + 4)
          << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(x) << "\" y=\"" << num(axis_y + 16) << "\" text-anchor=\"middle\">" << num(t)
          << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace reebkit
