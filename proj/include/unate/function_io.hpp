#pragma once

// JSON interchange for Boolean functions:
//   {"n": 3, "kind": "dense",  "truth_table_hex": "c0"}
//   {"n": 3, "kind": "sparse", "ones": ["110", "111"]}
// The truth table is little-endian by point index: bit k of byte k/8 is f at the
// point whose packed value is k (coordinate 1 is the least significant bit).

#include <filesystem>
#include <string>

#include <json.hpp>

#include "unate/function.hpp"

namespace unate {

enum class FunctionFormat { Auto, Dense, Sparse };

/// Auto keeps dense functions dense and writes everything else as sparse.
nlohmann::json function_to_json(const BooleanFunction& f, FunctionFormat format = FunctionFormat::Auto);
FunctionPtr function_from_json(const nlohmann::json& j);

std::string truth_table_hex(const DenseTable& table);
DenseTable parse_truth_table_hex(int n, const std::string& hex);

FunctionPtr load_function(const std::filesystem::path& path);
void save_function(const BooleanFunction& f, const std::filesystem::path& path,
                   FunctionFormat format = FunctionFormat::Auto);

}  // namespace unate
