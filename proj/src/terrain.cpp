#include "segwave/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "segwave/errors.hpp"

namespace segwave {

std::string to_string(TerrainKind kind) {
    switch (kind) {
        case TerrainKind::Flat: return "flat";
        case TerrainKind::Step: return "step";
        case TerrainKind::Rugose: return "rugose";
    }
    return "flat";
}

TerrainKind terrain_kind_from_string(const std::string& s) {
    if (s == "flat") return TerrainKind::Flat;
    if (s == "step") return TerrainKind::Step;
    if (s == "rugose") return TerrainKind::Rugose;
    throw ConfigError("unknown terrain kind '" + s + "'");
}

Terrain::Terrain(TerrainKind kind, std::vector<TerrainCell> cells, double x_end,
                 double base_height, double cell_width)
    : kind_(kind),
      cells_(std::move(cells)),
      x_end_(x_end),
      base_height_(base_height),
      cell_width_(cell_width) {
    if (cells_.empty()) throw ConfigError("terrain needs at least one cell");
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (!(cells_[i].height >= 0.0) || !std::isfinite(cells_[i].height))
            throw ConfigError("terrain heights must be finite and non-negative");
        if (i > 0 && !(cells_[i].x_start > cells_[i - 1].x_start))
            throw ConfigError("terrain cells must be strictly increasing in x");
    }
    if (!(x_end_ > cells_.back().x_start)) throw ConfigError("terrain extent ends before last cell");
}

std::optional<double> Terrain::edge_x() const {
    for (std::size_t i = 1; i < cells_.size(); ++i)
        if (cells_[i].height > cells_[i - 1].height && cells_[i - 1].height == 0.0)
            return cells_[i].x_start;
    return std::nullopt;
}

std::size_t Terrain::cell_index(double x) const {
    auto it = std::upper_bound(cells_.begin(), cells_.end(), x,
                               [](double v, const TerrainCell& c) { return v < c.x_start; });
    if (it == cells_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(cells_.begin(), it) - 1);
}

double Terrain::elevation(double x) const {
    if (!(x >= x_begin() && x <= x_end_))
        throw ExtentError("x=" + std::to_string(x) + " outside terrain [" +
                          std::to_string(x_begin()) + ", " + std::to_string(x_end_) + "]");
    const std::size_t i = cell_index(x);
    double h = cells_[i].height;
    if (i > 0 && x == cells_[i].x_start) h = std::max(h, cells_[i - 1].height);
    return h;
}

std::optional<SurfaceContact> Terrain::probe(double x, double z) const {
    // Beyond the extent the boundary cells continue indefinitely.
    const std::size_t i = cell_index(x);
    const double h = cells_[i].height;
    if (z >= h) return std::nullopt;

    // Distance to the free region {z >= height(x)}: straight up out of this
    // cell, or sideways (possibly diagonally) into a lower neighbour. The
    // walk stops once the horizontal gap alone exceeds the best exit.
    SurfaceContact best{h - z, 0.0, 1.0};
    for (std::size_t k = i; k-- > 0;) {
        const double dx = x - cells_[k + 1].x_start;
        if (dx >= best.depth) break;
        const double dz = std::max(0.0, cells_[k].height - z);
        const double d = std::hypot(dx, dz);
        if (d <= 0.0) return std::nullopt;  // exactly on a face
        if (d < best.depth) best = {d, -dx / d, dz / d};
    }
    for (std::size_t k = i + 1; k < cells_.size(); ++k) {
        const double dx = cells_[k].x_start - x;
        if (dx >= best.depth) break;
        const double dz = std::max(0.0, cells_[k].height - z);
        const double d = std::hypot(dx, dz);
        if (d <= 0.0) return std::nullopt;
        if (d < best.depth) best = {d, dx / d, dz / d};
    }
    return best;
}

std::vector<std::pair<double, double>> Terrain::corners(double x0, double x1) const {
    std::vector<std::pair<double, double>> out;
    auto it = std::lower_bound(cells_.begin() + 1, cells_.end(), x0,
                               [](const TerrainCell& c, double v) { return c.x_start < v; });
    for (; it != cells_.end() && it->x_start <= x1; ++it) {
        const double h0 = (it - 1)->height;
        if (h0 != it->height) out.emplace_back(it->x_start, std::max(h0, it->height));
    }
    return out;
}

Terrain make_flat(double x_begin, double x_end) {
    return Terrain(TerrainKind::Flat, {{x_begin, 0.0}}, x_end, 0.0, 0.0);
}

Terrain make_step(double edge_x, double height, double x_begin, double x_end) {
    if (!(height > 0.0)) throw ConfigError("step height must be positive");
    if (!(edge_x > x_begin && edge_x < x_end)) throw ConfigError("step edge outside terrain span");
    return Terrain(TerrainKind::Step, {{x_begin, 0.0}, {edge_x, height}}, x_end, height, 0.0);
}

void RugoseParams::validate() const {
    if (!(rugosity >= 0.0)) throw ConfigError("rugosity must be non-negative");
    if (!(edge_height > 0.0)) throw ConfigError("edge height must be positive");
    if (!(cell_width > 0.0)) throw ConfigError("cell width must be positive");
    if (!(extent >= cell_width)) throw ConfigError("rugose extent shorter than one cell");
    if (!(robot_height > 0.0)) throw ConfigError("robot height must be positive");
    if (!(approach > 0.0)) throw ConfigError("approach length must be positive");
}

Terrain generate_rugose(const RugoseParams& p) {
    p.validate();
    const auto n_cells = static_cast<std::size_t>(std::floor(p.extent / p.cell_width + 1e-9));
    const double target = p.rugosity * p.robot_height;
    if (target > 0.0 && n_cells < 2)
        throw GenerationError("rugosity > 0 needs at least two cells");

    // Levels {0, 0.5, 1, 1.5} in units of the target; the first block sits
    // flush with the edge.
    std::vector<double> offsets(n_cells, 0.0);
    if (target > 0.0) {
        std::mt19937_64 rng(p.seed);
        constexpr int kMaxAttempts = 1000;
        double measured = 0.0;
        for (int attempt = 0; attempt < kMaxAttempts && measured == 0.0; ++attempt) {
            for (std::size_t i = 1; i < n_cells; ++i)
                offsets[i] = 0.5 * static_cast<double>(rng() % 4) * target;
            measured = 0.0;
            for (std::size_t i = 1; i < n_cells; ++i)
                measured += std::abs(offsets[i] - offsets[i - 1]);
            measured /= static_cast<double>(n_cells - 1);
        }
        if (measured == 0.0) throw GenerationError("could not draw a non-degenerate rugose field");
        const double scale = target / measured;
        for (double& o : offsets) o *= scale;
    }

    std::vector<TerrainCell> cells;
    cells.reserve(n_cells + 1);
    cells.push_back({p.edge_x - p.approach, 0.0});
    for (std::size_t i = 0; i < n_cells; ++i)
        cells.push_back({p.edge_x + static_cast<double>(i) * p.cell_width, p.edge_height + offsets[i]});
    const double x_end = p.edge_x + static_cast<double>(n_cells) * p.cell_width;

    Terrain t(TerrainKind::Rugose, std::move(cells), x_end, p.edge_height, p.cell_width);
    if (target > 0.0) {
        const double stat = mean_adjacent_step(t);
        if (std::abs(stat - target) > 0.15 * target)
            throw GenerationError("rugosity statistic outside tolerance");
    }
    return t;
}

double mean_adjacent_step(const Terrain& t) {
    const auto& cells = t.cells();
    std::size_t first = 0;
    if (auto ex = t.edge_x()) first = t.cell_index(*ex);
    if (cells.size() - first < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t i = first + 1; i < cells.size(); ++i)
        sum += std::abs(cells[i].height - cells[i - 1].height);
    return sum / static_cast<double>(cells.size() - first - 1);
}

}  // namespace segwave
