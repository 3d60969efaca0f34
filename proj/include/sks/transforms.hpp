// RAII wrapper over FFTW r2r plans.  Plans are created once per Domain with
// FFTW_UNALIGNED so they can be re-executed on any caller buffer of the same
// shape (fftw_execute_r2r on distinct arrays is thread safe; plan creation
// is serialized through a global mutex).
#pragma once

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace sks {

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

class R2RPlan {
 public:
  R2RPlan() = default;

  R2RPlan(const std::vector<int>& dims, const std::vector<fftw_r2r_kind>& kinds) {
    size_ = 1;
    for (int n : dims) size_ *= static_cast<size_t>(n);
    std::vector<double> in(size_, 0.0), out(size_, 0.0);
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan_ = fftw_plan_r2r(static_cast<int>(dims.size()), dims.data(), in.data(), out.data(),
                          const_cast<fftw_r2r_kind*>(kinds.data()),
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw std::runtime_error("fftw_plan_r2r failed");
  }

  R2RPlan(R2RPlan&& other) noexcept : plan_(other.plan_), size_(other.size_) {
    other.plan_ = nullptr;
  }
  R2RPlan& operator=(R2RPlan&& other) noexcept {
    if (this != &other) {
      destroy();
      plan_ = other.plan_;
      size_ = other.size_;
      other.plan_ = nullptr;
    }
    return *this;
  }
  R2RPlan(const R2RPlan&) = delete;
  R2RPlan& operator=(const R2RPlan&) = delete;
  ~R2RPlan() { destroy(); }

  // Out-of-place r2r execution; FFTW leaves the input intact.
  void execute(const double* in, double* out) const {
    fftw_execute_r2r(plan_, const_cast<double*>(in), out);
  }

  size_t size() const { return size_; }

 private:
  void destroy() {
    if (plan_) {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      fftw_destroy_plan(plan_);
      plan_ = nullptr;
    }
  }

  fftw_plan plan_ = nullptr;
  size_t size_ = 0;
};

}  // namespace sks
