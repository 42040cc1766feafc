// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_COMMON_HPP
#define OPLEARN_COMMON_HPP

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace oplearn {

using cplx = std::complex<double>;

// 64-byte aligned allocator so field buffers satisfy FFTW's SIMD alignment
// and cached plans can be executed on any of our vectors.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlign));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using ComplexVec = std::vector<cplx, AlignedAllocator<cplx>>;
using RealVec = std::vector<double, AlignedAllocator<double>>;

}  // namespace oplearn

#endif
