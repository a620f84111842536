#pragma once

#include <iosfwd>
#include <string>

#include "evykit/estimation.hpp"
#include "evykit/simulate.hpp"

// CSV formats. All files are UTF-8, comma-separated with dot decimals;
// lines starting with '#' are comments and are skipped on read. Numbers are
// written at full double precision.

namespace evy {

// Header: year,biomass_prey,biomass_pred,catch_prey,catch_pred
ObservationSeries read_observations_csv(std::istream& in,
                                        const std::string& source_name);
void write_observations_csv(std::ostream& out, const ObservationSeries& series);

// Header: year,y,z,v,w,catch_y,catch_z,in_kernel,constraints_ok
Trajectory read_trajectory_csv(std::istream& in,
                               const std::string& source_name);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

// Full-precision round-trippable rendering of a double.
std::string csv_double(double x);

}  // namespace evy
