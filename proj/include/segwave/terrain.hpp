#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace segwave {

enum class TerrainKind { Flat, Step, Rugose };

std::string to_string(TerrainKind kind);
TerrainKind terrain_kind_from_string(const std::string& s);

struct TerrainCell {
    double x_start = 0.0;
    double height = 0.0;

    bool operator==(const TerrainCell&) const = default;
};

/// Penetration of a point into the terrain solid: distance to the nearest
/// free point, with the unit normal pointing toward it.
struct SurfaceContact {
    double depth = 0.0;
    double normal_x = 0.0;
    double normal_z = 1.0;
};

/// Piecewise-constant planar heightfield over [x_begin, x_end]. Immutable once
/// built; cells are sorted and each extends to the next cell's start.
class Terrain {
public:
    Terrain() = default;
    /// Throws ConfigError on unsorted cells, negative heights or an empty span.
    Terrain(TerrainKind kind, std::vector<TerrainCell> cells, double x_end, double base_height,
            double cell_width);

    TerrainKind kind() const { return kind_; }
    const std::vector<TerrainCell>& cells() const { return cells_; }
    double x_begin() const { return cells_.empty() ? 0.0 : cells_.front().x_start; }
    double x_end() const { return x_end_; }
    /// Edge height for Step/Rugose terrains, 0 for Flat.
    double base_height() const { return base_height_; }
    double cell_width() const { return cell_width_; }
    /// x of the first rise from the ground plane; nullopt on flat terrain.
    std::optional<double> edge_x() const;

    /// Surface height at `x`. On a cell boundary, the higher neighbour wins.
    /// Throws ExtentError outside [x_begin, x_end].
    double elevation(double x) const;

    /// Index of the cell containing `x` (boundaries belong to the right cell).
    std::size_t cell_index(double x) const;

    /// Contact query for a probe at (x, z); nullopt on or above the surface.
    /// Outside the extent the boundary cells continue. Vertical faces produce horizontal normals, buried
    /// wall bases diagonal ones.
    std::optional<SurfaceContact> probe(double x, double z) const;

    /// Convex top corners (x, z) of the vertical faces with x in [x0, x1],
    /// in increasing x.
    std::vector<std::pair<double, double>> corners(double x0, double x1) const;

    bool operator==(const Terrain&) const = default;

private:
    TerrainKind kind_ = TerrainKind::Flat;
    std::vector<TerrainCell> cells_;
    double x_end_ = 0.0;
    double base_height_ = 0.0;
    double cell_width_ = 0.0;
};

Terrain make_flat(double x_begin = -5.0, double x_end = 20.0);

/// Ground at 0 up to `edge_x`, then a plateau of `height`.
Terrain make_step(double edge_x, double height, double x_begin = -5.0, double x_end = 20.0);

struct RugoseParams {
    std::uint64_t seed = 0;
    double rugosity = 0.6;       // mean |adjacent height difference| / robot height
    double edge_height = 0.125;
    double cell_width = 0.10;
    double extent = 4.0;         // length of the blocky field past the edge
    double robot_height = 0.125; // standing height the rugosity is scaled by
    double edge_x = 0.0;
    double approach = 5.0;       // flat run-up before the edge

    void validate() const;
};

/// Seeded blocky field: flat approach, a vertical edge of `edge_height`, then
/// cells whose heights above the edge are drawn from four equally spaced
/// levels and rescaled so the mean adjacent |dh| equals rugosity*robot_height.
/// Deterministic in the parameters. Throws GenerationError when the target
/// cannot be met.
Terrain generate_rugose(const RugoseParams& p);

/// Mean |h(i+1) - h(i)| over the cells at or past the edge.
double mean_adjacent_step(const Terrain& t);

}  // namespace segwave
