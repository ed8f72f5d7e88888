#include "clusterauth/counters.hpp"

namespace clusterauth {

namespace {
thread_local CounterScope* active_scope = nullptr;
}

struct CounterAccess {
  static OpCounts* current() { return active_scope ? &active_scope->counts_ : nullptr; }
};

CounterScope::CounterScope() : parent_(active_scope) { active_scope = this; }

CounterScope::~CounterScope() {
  active_scope = parent_;
  if (parent_) parent_->counts_ += counts_;
}

std::ostream& operator<<(std::ostream& os, const OpCounts& c) {
  return os << "{hf=" << c.t_hf << " me=" << c.t_me << " mm=" << c.t_mm << " xor=" << c.t_xor
            << " sss=" << c.t_sss << "}";
}

namespace detail {
void count_hash() {
  if (auto* c = CounterAccess::current()) ++c->t_hf;
}
void count_exp() {
  if (auto* c = CounterAccess::current()) ++c->t_me;
}
void count_mul() {
  if (auto* c = CounterAccess::current()) ++c->t_mm;
}
void count_xor() {
  if (auto* c = CounterAccess::current()) ++c->t_xor;
}
void count_share() {
  if (auto* c = CounterAccess::current()) ++c->t_sss;
}
}  // namespace detail

}  // namespace clusterauth
