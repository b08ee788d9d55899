#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scnd/lp.hpp"

namespace scnd {

enum class VarKind : std::uint8_t { P, Qij, Qjk, W, Y, Xij, Xjk };

/// Symbolic name of one network variable, e.g. Qij(2, 5).
struct VarRef {
    VarKind kind = VarKind::P;
    std::size_t a = 0;
    std::size_t b = 0;

    bool operator==(const VarRef&) const = default;
};

std::string to_string(const VarRef& ref);
std::optional<VarRef> parse_var_ref(const std::string& name);

/// Bijection between network variables and column indices.
///
/// Columns are laid out in blocks P, Qij, Qjk, W, Y, Xij, Xjk; inside a block
/// the first index varies slowest.
class VarIndex {
public:
    VarIndex() = default;
    VarIndex(std::size_t n_plants, std::size_t n_warehouses, std::size_t n_customers);

    std::size_t n_plants() const noexcept { return I_; }
    std::size_t n_warehouses() const noexcept { return J_; }
    std::size_t n_customers() const noexcept { return K_; }
    int n_vars() const noexcept;

    int col(const VarRef& ref) const;
    VarRef ref(int col) const;

    int p(std::size_t i) const { return col({VarKind::P, i, 0}); }
    int qij(std::size_t i, std::size_t j) const { return col({VarKind::Qij, i, j}); }
    int qjk(std::size_t j, std::size_t k) const { return col({VarKind::Qjk, j, k}); }
    int w(std::size_t j) const { return col({VarKind::W, j, 0}); }
    int y(std::size_t j) const { return col({VarKind::Y, j, 0}); }
    int xij(std::size_t i, std::size_t j) const { return col({VarKind::Xij, i, j}); }
    int xjk(std::size_t j, std::size_t k) const { return col({VarKind::Xjk, j, k}); }

    bool operator==(const VarIndex&) const = default;

private:
    std::size_t block_size(VarKind kind) const;
    std::size_t block_start(VarKind kind) const;

    std::size_t I_ = 0, J_ = 0, K_ = 0;
};

/// Linear program plus an integrality mask. Integer columns are binaries.
struct MilpProblem {
    LinearProgram lp;
    std::vector<std::uint8_t> integrality;
    /// Empty for problems that do not come from a network instance.
    VarIndex var_index;

    int n_vars() const noexcept { return lp.n_vars; }
    std::size_t n_binaries() const;
};

}  // namespace scnd
