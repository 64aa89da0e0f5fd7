#pragma once

#include "busemann/geometry.hpp"
#include "busemann/measure.hpp"
#include "busemann/rng.hpp"

namespace busemann::detail {

Point uniform_in_box(Rng& rng, const Box& box);
Vec uniform_direction(Rng& rng, std::size_t n);

/// Draws a position from the normalized base measure (resolved atoms and line
/// measures). Requires finite total mass.
Point sample_position(const BaseMeasureND& mu, Rng& rng);

/// Segment inside `region` whose length is exp(lerp(log min, log max, scale_u)),
/// with uniformly distributed midpoint and direction.
Segment sample_segment(Rng& rng, const Box& region, double min_len, double max_len, double scale_u);

}  // namespace busemann::detail
