#pragma once

#include <cstdint>
#include <ostream>

namespace clusterauth {

/// Primitive-operation tallies: hash, modular exponentiation, group
/// multiplication, XOR, secret-share evaluation.
struct OpCounts {
  std::uint64_t t_hf = 0;
  std::uint64_t t_me = 0;
  std::uint64_t t_mm = 0;
  std::uint64_t t_xor = 0;
  std::uint64_t t_sss = 0;

  OpCounts& operator+=(const OpCounts& o) {
    t_hf += o.t_hf;
    t_me += o.t_me;
    t_mm += o.t_mm;
    t_xor += o.t_xor;
    t_sss += o.t_sss;
    return *this;
  }
  friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

std::ostream& operator<<(std::ostream& os, const OpCounts& c);

/// Collects every primitive invoked on this thread while alive. Scopes nest:
/// on destruction a scope adds its tally to the enclosing one, so an outer
/// scope always sees the total.
class CounterScope {
 public:
  CounterScope();
  ~CounterScope();
  CounterScope(const CounterScope&) = delete;
  CounterScope& operator=(const CounterScope&) = delete;

  const OpCounts& counts() const { return counts_; }

 private:
  friend struct CounterAccess;
  OpCounts counts_;
  CounterScope* parent_;
};

namespace detail {
void count_hash();
void count_exp();
void count_mul();
void count_xor();
void count_share();
}  // namespace detail

}  // namespace clusterauth
