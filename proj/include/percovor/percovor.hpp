#ifndef PERCOVOR_PERCOVOR_HPP
#define PERCOVOR_PERCOVOR_HPP

#include "percovor/cell_metrics.hpp"
#include "percovor/gamma_experiments.hpp"
#include "percovor/io.hpp"
#include "percovor/percolation_metric.hpp"
#include "percovor/polyomino_contours.hpp"
#include "percovor/regular_cells.hpp"
#include "percovor/sampling.hpp"
#include "percovor/spin_energy.hpp"
#include "percovor/surface_tension.hpp"
#include "percovor/tessellation.hpp"

#endif  // PERCOVOR_PERCOVOR_HPP
