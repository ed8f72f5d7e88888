#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clusterauth {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Block32 = std::array<std::uint8_t, 32>;

/// Prime-order subgroup of Z_p^*: q | p-1, g of order q. All exponent and
/// field arithmetic happens mod q.
struct GroupParams {
  std::string name;
  mpz_class p;
  mpz_class q;
  mpz_class g;

  /// Fixed wire width of a group element, ceil(bits(p) / 8).
  std::size_t elem_bytes() const;
};

bool operator==(const GroupParams& a, const GroupParams& b);

/// p = 23, q = 11, g = 2. Small enough for exhaustive oracles.
GroupParams tiny_group();
/// 2048-bit p with a 256-bit prime-order subgroup (RFC 5114 section 2.3).
GroupParams full_group();
/// "tiny" or "full"; throws ProtocolError(ConfigInvalid) otherwise.
GroupParams group_preset(std::string_view name);

/// Throws ProtocolError(InvalidGroup) unless q is prime, q | p-1, q < 2^256,
/// g != 1 and g^q = 1 (mod p).
void validate_group(const GroupParams& group);

class Scalar {
 public:
  Scalar() = default;
  explicit Scalar(mpz_class v) : v_(std::move(v)) {}
  explicit Scalar(unsigned long v) : v_(v) {}

  const mpz_class& value() const { return v_; }
  bool is_zero() const { return v_ == 0; }
  unsigned long to_ulong() const { return v_.get_ui(); }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }
  friend bool operator<(const Scalar& a, const Scalar& b) { return a.v_ < b.v_; }

 private:
  mpz_class v_{0};
};

class GroupElem {
 public:
  GroupElem() = default;
  explicit GroupElem(mpz_class v) : v_(std::move(v)) {}
  explicit GroupElem(unsigned long v) : v_(v) {}

  const mpz_class& value() const { return v_; }

  friend bool operator==(const GroupElem& a, const GroupElem& b) { return a.v_ == b.v_; }
  friend bool operator<(const GroupElem& a, const GroupElem& b) { return a.v_ < b.v_; }

 private:
  mpz_class v_{1};
};

// ---- subgroup operations (counted) -------------------------------------

GroupElem generator(const GroupParams& group);
GroupElem mod_exp(const GroupParams& group, const GroupElem& base, const Scalar& e);
/// g^e; same cost accounting as mod_exp.
GroupElem exp_g(const GroupParams& group, const Scalar& e);
GroupElem mul(const GroupParams& group, const GroupElem& a, const GroupElem& b);

/// Subgroup membership test, x in [1, p) and x^q = 1. Not counted: it is
/// input validation, not protocol arithmetic.
bool is_member(const GroupParams& group, const mpz_class& x);

// ---- Z_q arithmetic (uncounted) ------------------------------------------

Scalar reduce(const GroupParams& group, const mpz_class& v);
Scalar scalar_add(const GroupParams& group, const Scalar& a, const Scalar& b);
Scalar scalar_sub(const GroupParams& group, const Scalar& a, const Scalar& b);
Scalar scalar_mul(const GroupParams& group, const Scalar& a, const Scalar& b);
Scalar scalar_neg(const GroupParams& group, const Scalar& a);
/// Throws ProtocolError(ZeroInverse) for zero.
Scalar scalar_inv(const GroupParams& group, const Scalar& x);

// ---- hashing and the XOR domain -----------------------------------------

/// SHA-256 over u32-length-prefixed tag and parts. Counted as one T_HF.
Block32 hash_to_block(std::string_view tag, std::initializer_list<ByteView> parts);
Block32 hash_to_block(std::string_view tag, std::span<const ByteView> parts);
/// hash_to_block reduced mod q.
Scalar hash_to_scalar(const GroupParams& group, std::string_view tag,
                      std::initializer_list<ByteView> parts);
/// hash_to_block mapped into [1, q); used wherever a hash lands in an
/// exponent.
Scalar hash_to_exponent(const GroupParams& group, std::string_view tag,
                        std::initializer_list<ByteView> parts);
/// Same mapping as hash_to_exponent applied to an existing digest. No hash
/// is evaluated.
Scalar block_to_exponent(const GroupParams& group, const Block32& digest);

Block32 xor32(const Block32& a, const Block32& b);

/// Big-endian, left-zero-padded.
Block32 encode_scalar32(const Scalar& x);
/// Throws ProtocolError(OutOfRange) if the value is >= q.
Scalar decode_scalar32(const GroupParams& group, const Block32& b);
/// Millisecond timestamp as a right-aligned 32-byte block.
Block32 encode_time32(std::uint64_t ms);

/// Fixed-width big-endian encoding.
Bytes encode_elem(const GroupParams& group, const GroupElem& x);
/// Throws ProtocolError(Malformed) on width mismatch and NotInGroup for
/// non-members.
GroupElem decode_elem(const GroupParams& group, ByteView bytes);

/// hash_to_block("mask", encode_elem(x)).
Block32 mask_elem(const GroupParams& group, const GroupElem& x);

std::array<std::uint8_t, 8> encode_u64(std::uint64_t v);

// ---- polynomials --------------------------------------------------------

/// Horner evaluation mod q; coeffs[0] is the constant term. Counted as one
/// T_SSS.
Scalar poly_eval(const GroupParams& group, std::span<const Scalar> coeffs, const Scalar& x);

struct SharePoint {
  Scalar x;
  Scalar y;
};

/// Value at zero of the interpolating polynomial. Throws DuplicateAbscissa or
/// ZeroAbscissa.
Scalar lagrange_at_zero(const GroupParams& group, std::span<const SharePoint> points);

// ---- randomness ---------------------------------------------------------

/// Deterministic generator for every protocol draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Scalar scalar(const GroupParams& group);
  Scalar nonzero_scalar(const GroupParams& group);
  Block32 block();
  std::uint64_t next() { return engine_(); }
  /// Independent child stream, e.g. one per Monte-Carlo trial.
  Rng fork();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

std::string to_hex(ByteView bytes);

}  // namespace clusterauth
