#pragma once

namespace efgcl {

/// Selects between the OpenMP kernels and their serial reference twins. Both
/// produce bit-identical results: work is split into a fixed number of
/// independent pieces and reduced in a fixed order regardless of thread count.
enum class Execution { kSerial, kParallel };

}  // namespace efgcl
