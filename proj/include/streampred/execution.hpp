#ifndef STREAMPRED_EXECUTION_HPP
#define STREAMPRED_EXECUTION_HPP

namespace streampred {

// Selects between the OpenMP kernels and their serial reference versions.
// Both paths must produce bitwise-identical results.
enum class Execution { serial, parallel };

}  // namespace streampred

#endif  // STREAMPRED_EXECUTION_HPP
