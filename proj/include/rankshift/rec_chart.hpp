#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "rankshift/graph.hpp"
#include "rankshift/ranking.hpp"

namespace rankshift {

/// Ranking evolution chart: one point per node at (r_y, r_x), with the
/// identity line marking unchanged positions. Points above the line gained
/// positions, points below lost them.

/// node,r_x,r_y,delta,flagged,direction
void write_rec_data(std::ostream& out, const Ranking& x, const Ranking& y, std::span<const NodeIndex> flagged,
                    const NodeSet& nodes);

/// Standalone SVG. Flagged gainers are drawn as triangles, flagged losers as
/// inverted triangles, everything else as circles. Marker area grows with
/// |delta|; zero-delta markers are clamped to a minimum size.
void write_rec_svg(std::ostream& out, const Ranking& x, const Ranking& y, std::span<const NodeIndex> flagged,
                   const NodeSet& nodes, std::string_view title = {});

}  // namespace rankshift
