#include "tenx18/exact_table.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tenx18/detail/parallel.hpp"
#include "tenx18/errors.hpp"

namespace tenx18 {

namespace {

// Next mask with the same popcount (Gosper's hack).
SlotMask next_combination(SlotMask v) {
  const SlotMask t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

std::vector<SlotMask> masks_of_size(int k, int size) {
  std::vector<SlotMask> masks;
  if (size == 0) return {0};
  const SlotMask limit = SlotMask{1} << k;
  for (SlotMask m = full_mask(size); m < limit; m = next_combination(m)) {
    masks.push_back(m);
  }
  return masks;
}

void check_query(const ExactTable& table, SlotMask free, int roll) {
  if ((free & ~table.config().all_slots()) != 0) {
    throw InvalidInput("free set names slots outside the board");
  }
  if (free == 0) throw NoMoves("no free slots left");
  if (!table.pmf().contains(roll)) {
    throw RangeError("roll " + std::to_string(roll) + " outside [" +
                     std::to_string(table.pmf().xmin()) + ", " +
                     std::to_string(table.pmf().xmax()) + "]");
  }
}

}  // namespace

const Rational& ExactTable::value(SlotMask remaining) const {
  if (remaining >= values_.size()) {
    throw RangeError("subset mask outside the table");
  }
  return values_[remaining];
}

ExactTable build_exact_table(const Pmf& pmf, const SlotConfig& config,
                             const ExactTableOptions& options) {
  const int k = config.size();
  if (k > options.max_slots) {
    std::ostringstream msg;
    msg << "exact table for " << k << " slots needs 2^" << k << " = "
        << (k < 64 ? std::to_string(SlotMask{1} << k) : std::string("2^64"))
        << " entries; limit is " << options.max_slots << " slots";
    throw CapacityError(msg.str());
  }

  const int width = pmf.width();
  // gain[(slot - 1) * width + (x - xmin)] = multiplier(slot) * x
  std::vector<Rational> gain(static_cast<std::size_t>(k * width));
  for (int slot = 1; slot <= k; ++slot) {
    for (int d = 0; d < width; ++d) {
      gain[static_cast<std::size_t>((slot - 1) * width + d)] =
          config.multiplier(slot) * (pmf.xmin() + d);
    }
  }

  std::vector<Rational> values(std::size_t{1} << k, Rational(0));
  for (int size = 1; size <= k; ++size) {
    const auto stratum = masks_of_size(k, size);
    detail::parallel_for(
        stratum.size(),
        [&](std::size_t n) {
          const SlotMask set = stratum[n];
          const auto slots = slots_of(set);
          Rational total(0), best, candidate;
          for (int d = 0; d < width; ++d) {
            const Rational& p = pmf.probs()[static_cast<std::size_t>(d)];
            if (sgn(p) == 0) continue;
            bool first = true;
            for (int slot : slots) {
              candidate = gain[static_cast<std::size_t>((slot - 1) * width + d)] +
                          values[set & ~slot_bit(slot)];
              if (first || candidate > best) {
                best = candidate;
                first = false;
              }
            }
            total += p * best;
          }
          values[set] = total;
        },
        options.threads);
  }
  return ExactTable(pmf, config, std::move(values));
}

std::vector<MoveEvaluation> move_evaluations(const ExactTable& table, SlotMask free,
                                             int roll) {
  check_query(table, free, roll);
  std::vector<MoveEvaluation> evals;
  for (int slot : slots_of(free)) {
    evals.push_back(
        {slot, table.config().multiplier(slot) * roll + table.value(free & ~slot_bit(slot))});
  }
  std::stable_sort(evals.begin(), evals.end(),
                   [](const MoveEvaluation& a, const MoveEvaluation& b) {
                     return a.expected > b.expected;
                   });
  return evals;
}

int best_move(const ExactTable& table, SlotMask free, int roll) {
  return move_evaluations(table, free, roll).front().slot;
}

std::optional<ClosestCall> closest_call(const ExactTable& table, CallScope scope) {
  const SlotMask all = table.config().all_slots();
  std::optional<ClosestCall> best;

  auto visit = [&](SlotMask free) {
    for (int roll = table.pmf().xmin(); roll <= table.pmf().xmax(); ++roll) {
      const auto evals = move_evaluations(table, free, roll);
      Rational gap = evals[0].expected - evals[1].expected;
      if (sgn(gap) <= 0) continue;
      if (!best || gap < best->gap) {
        best = ClosestCall{free, roll, evals[0].slot, evals[1].slot, std::move(gap)};
      }
    }
  };

  if (scope == CallScope::kFirstMove) {
    if (slot_count(all) >= 2) visit(all);
  } else {
    for (SlotMask free = 1; free <= all; ++free) {
      if (slot_count(free) >= 2) visit(free);
    }
  }
  return best;
}

std::vector<std::uint8_t> exact_policy(const ExactTable& table) {
  const int width = table.pmf().width();
  std::vector<std::uint8_t> policy(table.size() * static_cast<std::size_t>(width), 0);
  detail::parallel_for(table.size() - 1, [&](std::size_t n) {
    const SlotMask free = n + 1;
    for (int d = 0; d < width; ++d) {
      policy[free * static_cast<std::size_t>(width) + static_cast<std::size_t>(d)] =
          static_cast<std::uint8_t>(best_move(table, free, table.pmf().xmin() + d));
    }
  });
  return policy;
}

void write_exact_table(const ExactTable& table, std::ostream& out, int precision) {
  out << "mask,slots,cardinality,exact,decimal\n";
  for (SlotMask mask = 0; mask < table.size(); ++mask) {
    std::string slots;
    for (int slot : slots_of(mask)) {
      if (!slots.empty()) slots += ' ';
      slots += std::to_string(slot);
    }
    out << mask << ',' << slots << ',' << slot_count(mask) << ','
        << to_fraction_string(table.value(mask)) << ','
        << to_decimal(table.value(mask), precision) << '\n';
  }
}

std::uint64_t table_key(const Pmf& pmf, const SlotConfig& config) {
  return fnv1a(pmf.canonical_string() + "|" + config.canonical_string());
}

std::filesystem::path exact_cache_path(const std::filesystem::path& dir,
                                       const Pmf& pmf, const SlotConfig& config) {
  std::ostringstream name;
  name << "exact-" << std::hex << std::setw(16) << std::setfill('0')
       << table_key(pmf, config) << ".bin";
  return dir / name.str();
}

namespace {

constexpr char kCacheMagic[8] = {'T', 'X', '1', '8', 'E', 'X', 'C', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

void put_bytes(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

bool get_bytes(std::istream& in, std::string& s) {
  std::uint32_t n;
  if (!get_u32(in, n) || n > (1u << 28)) return false;
  s.resize(n);
  return static_cast<bool>(in.read(s.data(), n));
}

std::string export_magnitude(const BigInt& z) {
  std::size_t count = 0;
  std::string bytes((mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8, '\0');
  mpz_export(bytes.data(), &count, 1, 1, 1, 0, z.get_mpz_t());
  bytes.resize(count);
  return bytes;
}

BigInt import_magnitude(const std::string& bytes) {
  BigInt z;
  mpz_import(z.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return z;
}

}  // namespace

void save_exact_cache(const ExactTable& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = exact_cache_path(dir, table.pmf(), table.config());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp);
    out.write(kCacheMagic, sizeof kCacheMagic);
    put_u32(out, kCacheVersion);
    put_bytes(out, table.pmf().canonical_string());
    put_bytes(out, table.config().canonical_string());
    put_u32(out, static_cast<std::uint32_t>(table.size()));
    for (const auto& v : table.values()) {
      out.put(sgn(v) < 0 ? 1 : 0);
      put_bytes(out, export_magnitude(v.get_num()));
      put_bytes(out, export_magnitude(v.get_den()));
    }
    if (!out) throw Error("failed writing cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<ExactTable> load_exact_cache(const Pmf& pmf, const SlotConfig& config,
                                           const std::filesystem::path& dir) {
  std::ifstream in(exact_cache_path(dir, pmf, config), std::ios::binary);
  if (!in) return std::nullopt;

  char magic[sizeof kCacheMagic];
  std::uint32_t version = 0, count = 0;
  std::string pmf_text, config_text;
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCacheMagic, sizeof magic) != 0 ||
      !get_u32(in, version) || version != kCacheVersion ||
      !get_bytes(in, pmf_text) || pmf_text != pmf.canonical_string() ||
      !get_bytes(in, config_text) || config_text != config.canonical_string() ||
      !get_u32(in, count) || count != (std::size_t{1} << config.size())) {
    return std::nullopt;
  }

  std::vector<Rational> values;
  values.reserve(count);
  std::string num, den;
  for (std::uint32_t i = 0; i < count; ++i) {
    const int sign = in.get();
    if (sign == EOF || !get_bytes(in, num) || !get_bytes(in, den)) return std::nullopt;
    Rational v(import_magnitude(num), import_magnitude(den));
    if (v.get_den() == 0) return std::nullopt;
    v.canonicalize();
    if (sign == 1) v = -v;
    values.push_back(std::move(v));
  }
  return ExactTable(pmf, config, std::move(values));
}

}  // namespace tenx18
