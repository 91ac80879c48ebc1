#pragma once

#include "leontief/cli.hpp"

namespace leontief::cli {

ExpectationEstimate estimate_expected(const RunConfig& c, const TechnologyMatrix& tech, std::span<const double> x,
                                      Execution exec);

/// Surface selected by config.model over a full input bundle.
BundleSurface make_bundle_surface(const RunConfig& c);

PlanarSurface to_planar(BundleSurface surface);

}  // namespace leontief::cli
