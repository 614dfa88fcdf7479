#pragma once

#include <complex>
#include <cstdint>

namespace cxshrink {

// Address of an isolated random stream: (seed, stream_index) pairs map to
// disjoint keys, so replicates can be generated independently and in any
// order without sharing state.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

// Counter-based generator: output i is a fixed mix of (key, i). No hidden
// state beyond the counter, identical draws for identical (stream, counter).
class CounterRng {
public:
  explicit CounterRng(RngStream stream);

  std::uint64_t next_u64();

  // Uniform in the open interval (0, 1).
  double next_uniform();

  // Standard real normal via Box-Muller; consumes two uniforms.
  double next_normal();

  // Standard complex normal: Re and Im independent N(0, 1/2), E|z|^2 = 1.
  // One Box-Muller pair per draw.
  std::complex<double> next_cnormal();

private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace cxshrink
