#pragma once

namespace crtrack {

// Execution policy for the data-parallel kernels. Every kernel keeps a plain
// serial reference path; the OpenMP path must produce bit-identical output
// because all kernels are elementwise independent.
enum class Exec { serial, parallel };

int max_threads();

}  // namespace crtrack
