#include "clusterauth/group.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "clusterauth/counters.hpp"
#include "clusterauth/errors.hpp"

namespace clusterauth {

namespace {

const char* kFullP =
    "87A8E61DB4B6663CFFBBD19C651959998CEEF608660DD0F25D2CEED4435E3B00E00DF8F1D61957D4FAF7DF45"
    "61B2AA3016C3D91134096FAA3BF4296D830E9A7C209E0C6497517ABD5A8A9D306BCF67ED91F9E6725B4758C0"
    "22E0B1EF4275BF7B6C5BFC11D45F9088B941F54EB1E59BB8BC39A0BF12307F5C4FDB70C581B23F76B63ACAE1"
    "CAA6B7902D52526735488A0EF13C6D9A51BFA4AB3AD8347796524D8EF6A167B5A41825D967E144E514056425"
    "1CCACB83E6B486F6B3CA3F7971506026C0B857F689962856DED4010ABD0BE621C3A3960A54E710C375F26375"
    "D7014103A4B54330C198AF126116D2276E11715F693877FAD7EF09CADB094AE91E1A1597";
const char* kFullG =
    "3FB32C9B73134D0B2E77506660EDBD484CA7B18F21EF205407F4793A1A0BA12510DBC15077BE463FFF4FED4A"
    "AC0BB555BE3A6C1B0C6B47B1BC3773BF7E8C6F62901228F8C28CBB18A55AE31341000A650196F931C77A57F2"
    "DDF463E5E9EC144B777DE62AAAB8A8628AC376D282D6ED3864E67982428EBC831D14348F6F2F9193B5045AF2"
    "767164E1DFC967C1FB3F2E55A4BD1BFFE83B9C80D052B985D182EA0ADB2A3B7313D3FE14C8484B1E052588B9"
    "B7D2BBD2DF016199ECD06E1557CD0915B3353BBB64E0EC377FD028370DF92B52C7891428CDC67EB6184B523D"
    "1DB246C32F63078490F00EF8D647D148D47954515E2327CFEF98C582664B4C0F6CC41659";
const char* kFullQ = "8CF83642A709A097B447997640129DA299B1A47D1EB3750BA308B0FE64F5FBD3";

mpz_class from_bytes(const std::uint8_t* data, std::size_t len) {
  mpz_class out;
  if (len) mpz_import(out.get_mpz_t(), len, 1, 1, 1, 0, data);
  return out;
}

// Big-endian into exactly `width` bytes; the caller guarantees it fits.
void to_bytes(const mpz_class& v, std::uint8_t* out, std::size_t width) {
  std::memset(out, 0, width);
  std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  if (v == 0) return;
  mpz_export(out + (width - n), nullptr, 1, 1, 1, 0, v.get_mpz_t());
}

void put_u32(EVP_MD_CTX* ctx, std::size_t n) {
  std::uint8_t len[4] = {std::uint8_t(n >> 24), std::uint8_t(n >> 16), std::uint8_t(n >> 8),
                         std::uint8_t(n)};
  EVP_DigestUpdate(ctx, len, 4);
}

}  // namespace

std::size_t GroupParams::elem_bytes() const { return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8; }

bool operator==(const GroupParams& a, const GroupParams& b) {
  return a.p == b.p && a.q == b.q && a.g == b.g;
}

GroupParams tiny_group() { return GroupParams{"tiny", 23, 11, 2}; }

GroupParams full_group() {
  GroupParams g;
  g.name = "full";
  g.p.set_str(kFullP, 16);
  g.q.set_str(kFullQ, 16);
  g.g.set_str(kFullG, 16);
  return g;
}

GroupParams group_preset(std::string_view name) {
  if (name == "tiny") return tiny_group();
  if (name == "full") return full_group();
  throw ProtocolError(Errc::ConfigInvalid, "unknown group preset '" + std::string(name) + "'");
}

void validate_group(const GroupParams& group) {
  auto fail = [](const char* why) { throw ProtocolError(Errc::InvalidGroup, why); };
  if (group.p < 3 || mpz_probab_prime_p(group.p.get_mpz_t(), 30) == 0) fail("p not prime");
  if (group.q < 2 || mpz_probab_prime_p(group.q.get_mpz_t(), 30) == 0) fail("q not prime");
  if (mpz_sizeinbase(group.q.get_mpz_t(), 2) > 256) fail("q exceeds 256 bits");
  mpz_class pm1 = group.p - 1;
  if (!mpz_divisible_p(pm1.get_mpz_t(), group.q.get_mpz_t())) fail("q does not divide p-1");
  if (group.g <= 1 || group.g >= group.p) fail("g out of range");
  mpz_class t;
  mpz_powm(t.get_mpz_t(), group.g.get_mpz_t(), group.q.get_mpz_t(), group.p.get_mpz_t());
  if (t != 1) fail("g does not have order q");
}

GroupElem generator(const GroupParams& group) { return GroupElem(group.g); }

GroupElem mod_exp(const GroupParams& group, const GroupElem& base, const Scalar& e) {
  detail::count_exp();
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.value().get_mpz_t(), e.value().get_mpz_t(), group.p.get_mpz_t());
  return GroupElem(out);
}

namespace {

// g^{d * 256^i} for every byte position i and byte value d, so g^e costs one
// multiplication per nonzero byte of e.
struct FixedBase {
  std::vector<std::array<mpz_class, 256>> rows;
};

const FixedBase* fixed_base(const GroupParams& group) {
  if (mpz_sizeinbase(group.p.get_mpz_t(), 2) < 512) return nullptr;
  static std::mutex mu;
  static std::map<std::pair<std::string, std::string>, std::unique_ptr<FixedBase>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(group.p.get_str(16), group.g.get_str(16));
  auto& slot = cache[key];
  if (!slot) {
    auto table = std::make_unique<FixedBase>();
    const std::size_t bytes = (mpz_sizeinbase(group.q.get_mpz_t(), 2) + 7) / 8;
    mpz_class base = group.g;
    for (std::size_t i = 0; i < bytes; ++i) {
      auto& row = table->rows.emplace_back();
      row[0] = 1;
      for (int d = 1; d < 256; ++d) row[d] = row[d - 1] * base % group.p;
      base = row[255] * base % group.p;
    }
    slot = std::move(table);
  }
  return slot.get();
}

}  // namespace

GroupElem exp_g(const GroupParams& group, const Scalar& e) {
  const FixedBase* table = fixed_base(group);
  if (!table) return mod_exp(group, generator(group), e);
  detail::count_exp();
  mpz_class x = e.value() % group.q;
  if (x < 0) x += group.q;
  mpz_class out = 1;
  for (std::size_t i = 0; i < table->rows.size() && x != 0; ++i) {
    unsigned long d = mpz_getlimbn(x.get_mpz_t(), 0) & 0xff;
    if (d) out = out * table->rows[i][d] % group.p;
    x >>= 8;
  }
  return GroupElem(out);
}

GroupElem mul(const GroupParams& group, const GroupElem& a, const GroupElem& b) {
  detail::count_mul();
  mpz_class out = a.value() * b.value();
  out %= group.p;
  return GroupElem(out);
}

bool is_member(const GroupParams& group, const mpz_class& x) {
  if (x < 1 || x >= group.p) return false;
  mpz_class t;
  mpz_powm(t.get_mpz_t(), x.get_mpz_t(), group.q.get_mpz_t(), group.p.get_mpz_t());
  return t == 1;
}

Scalar reduce(const GroupParams& group, const mpz_class& v) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), group.q.get_mpz_t());
  return Scalar(r);
}

Scalar scalar_add(const GroupParams& group, const Scalar& a, const Scalar& b) {
  return reduce(group, a.value() + b.value());
}

Scalar scalar_sub(const GroupParams& group, const Scalar& a, const Scalar& b) {
  return reduce(group, a.value() - b.value());
}

Scalar scalar_mul(const GroupParams& group, const Scalar& a, const Scalar& b) {
  return reduce(group, a.value() * b.value());
}

Scalar scalar_neg(const GroupParams& group, const Scalar& a) { return reduce(group, -a.value()); }

Scalar scalar_inv(const GroupParams& group, const Scalar& x) {
  Scalar r = reduce(group, x.value());
  if (r.is_zero()) throw ProtocolError(Errc::ZeroInverse);
  mpz_class out;
  mpz_invert(out.get_mpz_t(), r.value().get_mpz_t(), group.q.get_mpz_t());
  return Scalar(out);
}

Block32 hash_to_block(std::string_view tag, std::span<const ByteView> parts) {
  detail::count_hash();
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  put_u32(ctx.get(), tag.size());
  EVP_DigestUpdate(ctx.get(), tag.data(), tag.size());
  for (const auto& part : parts) {
    put_u32(ctx.get(), part.size());
    EVP_DigestUpdate(ctx.get(), part.data(), part.size());
  }
  Block32 out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), out.data(), &len);
  return out;
}

Block32 hash_to_block(std::string_view tag, std::initializer_list<ByteView> parts) {
  return hash_to_block(tag, std::span<const ByteView>(parts.begin(), parts.size()));
}

Scalar hash_to_scalar(const GroupParams& group, std::string_view tag,
                      std::initializer_list<ByteView> parts) {
  Block32 h = hash_to_block(tag, parts);
  return reduce(group, from_bytes(h.data(), h.size()));
}

Scalar block_to_exponent(const GroupParams& group, const Block32& digest) {
  mpz_class v = from_bytes(digest.data(), digest.size());
  mpz_class qm1 = group.q - 1;
  mpz_class r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), qm1.get_mpz_t());
  return Scalar(r + 1);
}

Scalar hash_to_exponent(const GroupParams& group, std::string_view tag,
                        std::initializer_list<ByteView> parts) {
  return block_to_exponent(group, hash_to_block(tag, parts));
}

Block32 xor32(const Block32& a, const Block32& b) {
  detail::count_xor();
  Block32 out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

Block32 encode_scalar32(const Scalar& x) {
  Block32 out{};
  to_bytes(x.value(), out.data(), out.size());
  return out;
}

Scalar decode_scalar32(const GroupParams& group, const Block32& b) {
  mpz_class v = from_bytes(b.data(), b.size());
  if (v >= group.q) throw ProtocolError(Errc::OutOfRange);
  return Scalar(v);
}

Block32 encode_time32(std::uint64_t ms) {
  Block32 out{};
  for (int i = 0; i < 8; ++i) out[31 - i] = std::uint8_t(ms >> (8 * i));
  return out;
}

Bytes encode_elem(const GroupParams& group, const GroupElem& x) {
  Bytes out(group.elem_bytes());
  to_bytes(x.value(), out.data(), out.size());
  return out;
}

GroupElem decode_elem(const GroupParams& group, ByteView bytes) {
  if (bytes.size() != group.elem_bytes()) throw ProtocolError(Errc::Malformed, "element width");
  mpz_class v = from_bytes(bytes.data(), bytes.size());
  if (!is_member(group, v)) throw ProtocolError(Errc::NotInGroup);
  return GroupElem(v);
}

Block32 mask_elem(const GroupParams& group, const GroupElem& x) {
  Bytes enc = encode_elem(group, x);
  return hash_to_block("mask", {ByteView(enc)});
}

std::array<std::uint8_t, 8> encode_u64(std::uint64_t v) {
  std::array<std::uint8_t, 8> out{};
  for (int i = 0; i < 8; ++i) out[7 - i] = std::uint8_t(v >> (8 * i));
  return out;
}

Scalar poly_eval(const GroupParams& group, std::span<const Scalar> coeffs, const Scalar& x) {
  detail::count_share();
  mpz_class acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * x.value() + it->value();
    acc %= group.q;
  }
  return Scalar(acc);
}

Scalar lagrange_at_zero(const GroupParams& group, std::span<const SharePoint> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (reduce(group, points[i].x.value()).is_zero()) throw ProtocolError(Errc::ZeroAbscissa);
    for (std::size_t j = 0; j < i; ++j) {
      if (reduce(group, points[i].x.value()) == reduce(group, points[j].x.value()))
        throw ProtocolError(Errc::DuplicateAbscissa);
    }
  }
  Scalar acc(0ul);
  for (std::size_t l = 0; l < points.size(); ++l) {
    Scalar num(1ul), den(1ul);
    for (std::size_t n = 0; n < points.size(); ++n) {
      if (n == l) continue;
      num = scalar_mul(group, num, scalar_neg(group, points[n].x));
      den = scalar_mul(group, den, scalar_sub(group, points[l].x, points[n].x));
    }
    Scalar basis = scalar_mul(group, num, scalar_inv(group, den));
    acc = scalar_add(group, acc, scalar_mul(group, points[l].y, basis));
  }
  return acc;
}

Scalar Rng::scalar(const GroupParams& group) {
  // 64 extra bits keep the modular bias negligible for any q.
  std::size_t words = (mpz_sizeinbase(group.q.get_mpz_t(), 2) + 63) / 64 + 1;
  mpz_class v = 0;
  for (std::size_t i = 0; i < words; ++i) {
    v <<= 64;
    std::uint64_t w = engine_();
    mpz_class part;
    mpz_import(part.get_mpz_t(), 1, 1, sizeof w, 0, 0, &w);
    v += part;
  }
  return reduce(group, v);
}

Scalar Rng::nonzero_scalar(const GroupParams& group) {
  for (;;) {
    Scalar s = scalar(group);
    if (!s.is_zero()) return s;
  }
}

Block32 Rng::block() {
  Block32 out;
  for (std::size_t i = 0; i < out.size(); i += 8) {
    std::uint64_t w = engine_();
    for (int b = 0; b < 8; ++b) out[i + b] = std::uint8_t(w >> (8 * b));
  }
  return out;
}

Rng Rng::fork() { return Rng(derive_seed(engine_(), 0x9e3779b97f4a7c15ull)); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ b);
}

std::string to_hex(ByteView bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

}  // namespace clusterauth
