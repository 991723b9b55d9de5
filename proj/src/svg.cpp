#include <cstdio>
#include <fstream>
#include <sstream>

#include "mars/error.hpp"
#include "mars/io.hpp"

namespace mars::io {

namespace {

constexpr int kCellPx = 40;
constexpr int kHeaderPx = 24;

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

}  // namespace

std::string render_step_svg(const Plan& plan, std::size_t index) {
    if (index > plan.steps.size()) throw Error(ErrorCode::InvalidInput, "step index out of range");
    const Configuration& state = index == 0 ? plan.initial : plan.steps[index - 1].post_config;

    // One frame for the whole plan so the images line up.
    BoundingBox box;
    for (Cell c : plan.initial.cells()) box.extend(c);
    for (Cell c : plan.target.config.cells()) box.extend(c);
    for (const auto& s : plan.steps) {
        for (Cell c : s.post_config.cells()) box.extend(c);
        for (Cell c : s.path.waypoints) box.extend(c);
    }
    box = box.inflated(1);
    const int width = box.width() * kCellPx;
    const int height = box.height() * kCellPx + kHeaderPx;
    auto px = [&](Cell c) { return std::pair{(c.x - box.min_x) * kCellPx, (c.y - box.min_y) * kCellPx + kHeaderPx}; };

    std::ostringstream out;
    out << fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n", width,
               height, width, height);
    out << fmt("<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"#ffffff\"/>\n", width, height);

    std::string title = "initial";
    double cm = index == 0 ? kFaultFree : plan.steps[index - 1].post_cm;
    if (index > 0) {
        const auto& s = plan.steps[index - 1];
        title = "step " + std::to_string(index) + "/" + std::to_string(plan.steps.size()) + " " +
                std::string(to_string(s.phase)) + " " + std::string(to_string(s.kind));
    }
    out << "<text x=\"4\" y=\"16\" font-family=\"monospace\" font-size=\"12\">" << title;
    if (index > 0) out << (std::isinf(cm) ? std::string(" cm=fault-free") : fmt(" cm=%.6f", cm));
    out << "</text>\n";

    // Target footprint.
    for (Cell c : plan.target.config.cells()) {
        const auto [x, y] = px(c);
        out << fmt("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" stroke=\"#4a90d9\" "
                   "stroke-dasharray=\"4 3\"/>\n",
                   x + 1, y + 1, kCellPx - 2, kCellPx - 2);
    }

    for (const auto& [c, s] : state.units()) {
        const auto [x, y] = px(c);
        out << fmt("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\" stroke=\"#333333\"/>\n", x + 3,
                   y + 3, kCellPx - 6, kCellPx - 6, s.is_faulty() ? "#d62728" : "#9e9e9e");
        if (s.kind() == FaultState::Kind::RotorFault) {
            // Rotor slots counter-clockwise from (+,+); grid y grows downwards.
            static constexpr int sx[] = {1, -1, -1, 1};
            static constexpr int sy[] = {1, 1, -1, -1};
            const int r = s.rotor_index();
            out << fmt("<circle cx=\"%d\" cy=\"%d\" r=\"4\" fill=\"#000000\"/>\n", x + kCellPx / 2 + sx[r] * kCellPx / 4,
                       y + kCellPx / 2 + sy[r] * kCellPx / 4);
        } else if (s.kind() == FaultState::Kind::UnitFault) {
            out << fmt("<path d=\"M%d %dL%d %dM%d %dL%d %d\" stroke=\"#000000\" stroke-width=\"2\"/>\n", x + 10, y + 10,
                       x + kCellPx - 10, y + kCellPx - 10, x + kCellPx - 10, y + 10, x + 10, y + kCellPx - 10);
        }
    }

    if (index > 0) {
        const auto& s = plan.steps[index - 1];
        const Offset shift = s.path.goal() - s.reference;
        if (s.kind == StepKind::MoveSubassembly) {
            for (Cell c : s.moved_cells) {
                const auto [x, y] = px(c + shift);
                out << fmt("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" stroke=\"#1f3fbf\" "
                           "stroke-width=\"3\"/>\n",
                           x + 1, y + 1, kCellPx - 2, kCellPx - 2);
            }
        }
        out << "<polyline fill=\"none\" stroke=\"#ff8c00\" stroke-width=\"3\" points=\"";
        for (std::size_t i = 0; i < s.path.waypoints.size(); ++i) {
            const auto [x, y] = px(s.path.waypoints[i]);
            out << (i ? " " : "") << x + kCellPx / 2 << ',' << y + kCellPx / 2;
        }
        out << "\"/>\n";
        const auto [x0, y0] = px(s.path.start());
        out << fmt("<circle cx=\"%d\" cy=\"%d\" r=\"5\" fill=\"none\" stroke=\"#ff8c00\" stroke-width=\"2\"/>\n",
                   x0 + kCellPx / 2, y0 + kCellPx / 2);
    }
    out << "</svg>\n";
    return out.str();
}

void write_step_svgs(const Plan& plan, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i <= plan.steps.size(); ++i) {
        std::ofstream out(dir / fmt("step_%03zu.svg", i), std::ios::binary);
        if (!out) throw Error(ErrorCode::InvalidInput, "cannot write into " + dir.string());
        out << render_step_svg(plan, i);
    }
}

}  // namespace mars::io
