#include "unate/function_io.hpp"

#include <fstream>

namespace unate {

namespace {

std::size_t table_bytes(int n) { return std::max<std::size_t>(1, (std::size_t{1} << n) / 8); }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw PreconditionError(std::string("invalid hex digit '") + c + "'");
}

}  // namespace

std::string truth_table_hex(const DenseTable& table) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t bytes = table_bytes(table.dimension());
  std::string out;
  out.reserve(2 * bytes);
  const auto words = table.words();
  for (std::size_t b = 0; b < bytes; ++b) {
    const auto byte = static_cast<unsigned>((words[b / 8] >> (8 * (b % 8))) & 0xffu);
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xf]);
  }
  return out;
}

DenseTable parse_truth_table_hex(int n, const std::string& hex) {
  DenseTable table(n);
  const std::size_t bytes = table_bytes(n);
  if (hex.size() != 2 * bytes) {
    throw PreconditionError("truth_table_hex for n=" + std::to_string(n) + " must have " +
                            std::to_string(2 * bytes) + " hex digits");
  }
  auto words = table.words();
  for (std::size_t b = 0; b < bytes; ++b) {
    const auto byte = static_cast<std::uint64_t>(hex_value(hex[2 * b]) * 16 + hex_value(hex[2 * b + 1]));
    words[b / 8] |= byte << (8 * (b % 8));
  }
  if (n < 3 && (words[0] & ~low_mask(1 << n)) != 0) {
    throw PreconditionError("truth table has bits beyond 2^n entries");
  }
  return table;
}

nlohmann::json function_to_json(const BooleanFunction& f, FunctionFormat format) {
  nlohmann::json j;
  j["n"] = f.dimension();
  const bool dense = format == FunctionFormat::Dense ||
                     (format == FunctionFormat::Auto && f.kind() == "dense");
  if (dense) {
    const DenseTable* table = f.dense_table();
    if (table == nullptr) throw PreconditionError("function has no dense form");
    j["kind"] = "dense";
    j["truth_table_hex"] = truth_table_hex(*table);
  } else {
    j["kind"] = "sparse";
    auto ones = nlohmann::json::array();
    for (const BitPoint& x : f.ones()) ones.push_back(x.to_string());
    j["ones"] = std::move(ones);
  }
  return j;
}

FunctionPtr function_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dense") {
    return DenseFunction::make(parse_truth_table_hex(n, j.at("truth_table_hex").get<std::string>()));
  }
  if (kind == "sparse") {
    std::vector<BitPoint> ones;
    for (const auto& s : j.at("ones")) {
      BitPoint x = BitPoint::parse(s.get<std::string>());
      if (x.dimension() != n) throw DimensionMismatchError(n, x.dimension());
      ones.push_back(x);
    }
    return SparseFunction::make(n, std::move(ones));
  }
  throw PreconditionError("unknown function kind: " + kind);
}

FunctionPtr load_function(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return function_from_json(j);
}

void save_function(const BooleanFunction& f, const std::filesystem::path& path, FunctionFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << function_to_json(f, format).dump() << '\n';
}

}  // namespace unate
