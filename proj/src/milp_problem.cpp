#include "scnd/milp_problem.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <stdexcept>

namespace scnd {

namespace {

constexpr std::array<const char*, 7> kKindNames = {"P", "Qij", "Qjk", "W", "Y", "Xij", "Xjk"};

bool two_indexed(VarKind k) {
    return k == VarKind::Qij || k == VarKind::Qjk || k == VarKind::Xij || k == VarKind::Xjk;
}

}  // namespace

std::string to_string(const VarRef& ref) {
    std::string s = kKindNames[static_cast<std::size_t>(ref.kind)];
    s += "(" + std::to_string(ref.a);
    if (two_indexed(ref.kind)) s += "," + std::to_string(ref.b);
    return s + ")";
}

std::optional<VarRef> parse_var_ref(const std::string& name) {
    const auto open = name.find('(');
    if (open == std::string::npos || name.back() != ')') return std::nullopt;
    const std::string kind = name.substr(0, open);
    const auto it = std::find_if(kKindNames.begin(), kKindNames.end(),
                                 [&](const char* n) { return kind == n; });
    if (it == kKindNames.end()) return std::nullopt;
    VarRef ref;
    ref.kind = static_cast<VarKind>(it - kKindNames.begin());
    unsigned long a = 0, b = 0;
    char tail = 0;
    const std::string args = name.substr(open + 1);
    if (two_indexed(ref.kind)) {
        if (std::sscanf(args.c_str(), "%lu,%lu%c", &a, &b, &tail) != 3 || tail != ')') return std::nullopt;
    } else if (std::sscanf(args.c_str(), "%lu%c", &a, &tail) != 2 || tail != ')') {
        return std::nullopt;
    }
    ref.a = a;
    ref.b = b;
    return ref;
}

VarIndex::VarIndex(std::size_t n_plants, std::size_t n_warehouses, std::size_t n_customers)
    : I_(n_plants), J_(n_warehouses), K_(n_customers) {}

std::size_t VarIndex::block_size(VarKind kind) const {
    switch (kind) {
        case VarKind::P: return I_;
        case VarKind::Qij: case VarKind::Xij: return I_ * J_;
        case VarKind::Qjk: case VarKind::Xjk: return J_ * K_;
        case VarKind::W: case VarKind::Y: return J_;
    }
    return 0;
}

std::size_t VarIndex::block_start(VarKind kind) const {
    std::size_t start = 0;
    for (auto k = VarKind::P; k != kind; k = static_cast<VarKind>(static_cast<int>(k) + 1))
        start += block_size(k);
    return start;
}

int VarIndex::n_vars() const noexcept { return static_cast<int>(I_ + 2 * I_ * J_ + 2 * J_ * K_ + 2 * J_); }

int VarIndex::col(const VarRef& ref) const {
    std::size_t offset = 0;
    switch (ref.kind) {
        case VarKind::P:
            if (ref.a >= I_) throw std::out_of_range("plant index");
            offset = ref.a;
            break;
        case VarKind::W: case VarKind::Y:
            if (ref.a >= J_) throw std::out_of_range("warehouse index");
            offset = ref.a;
            break;
        case VarKind::Qij: case VarKind::Xij:
            if (ref.a >= I_ || ref.b >= J_) throw std::out_of_range("plant-warehouse index");
            offset = ref.a * J_ + ref.b;
            break;
        case VarKind::Qjk: case VarKind::Xjk:
            if (ref.a >= J_ || ref.b >= K_) throw std::out_of_range("warehouse-customer index");
            offset = ref.a * K_ + ref.b;
            break;
    }
    return static_cast<int>(block_start(ref.kind) + offset);
}

VarRef VarIndex::ref(int col) const {
    if (col < 0 || col >= n_vars()) throw std::out_of_range("column index");
    auto c = static_cast<std::size_t>(col);
    for (int k = 0; k < 7; ++k) {
        const auto kind = static_cast<VarKind>(k);
        const std::size_t size = block_size(kind);
        if (c < size) {
            switch (kind) {
                case VarKind::Qij: case VarKind::Xij: return {kind, c / J_, c % J_};
                case VarKind::Qjk: case VarKind::Xjk: return {kind, c / K_, c % K_};
                default: return {kind, c, 0};
            }
        }
        c -= size;
    }
    throw std::out_of_range("column index");
}

std::size_t MilpProblem::n_binaries() const {
    return static_cast<std::size_t>(std::count(integrality.begin(), integrality.end(), 1));
}

}  // namespace scnd
