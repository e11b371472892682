#include "gibbs/geometry.hpp"
#include "gibbs/operators.hpp"

namespace gibbs {

template double l2_norm_centered<double>(const MarkovOperator<double>&);
template double spectral_radius_centered<double>(const MarkovOperator<double>&);
template std::vector<double> power_norm_sequence<double>(const MarkovOperator<double>&, int);
template AngleResult<double> friedrichs_angle_bruteforce<double>(const TargetDistribution<double>&,
                                                                 Index);
template InclinationResult<double> inclination<double>(const TargetDistribution<double>&, int,
                                                       double, std::uint64_t, Index);

}  // namespace gibbs
