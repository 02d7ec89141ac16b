#pragma once

#include <cstdint>
#include <vector>

namespace bulkjl::walecki {

/// Undirected edge of K_N over vertex ids. Vertex 0 is the hub placed at the
/// origin; vertex i (1 <= i <= N-1) is the (i-1)-th power of the primitive
/// (N-1)-st root of unity on the circle. Normalized so u < v.
struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;

    Edge() = default;
    Edge(std::uint32_t a, std::uint32_t b) : u(a < b ? a : b), v(a < b ? b : a) {}
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class SubgraphKind : std::uint8_t {
    w_odd,                // W_{2j+1}, the odd product class (odd N)
    w0_plus,              // augmented nonnegative-real-part half of W_{2j} (odd N)
    w0_minus,             // augmented negative-real-part half of W_{2j} (odd N)
    w_tilde_even,         // augmented W_{2j} (even N)
    w_tilde_odd,          // augmented W_{2j+1} (even N)
    one_factor_leftover,  // augmented W_{N-2} (even N)
};

const char* subgraph_kind_name(SubgraphKind kind);

struct Subgraph {
    SubgraphKind kind;
    int cycle_index;  // -1 for the leftover 1-factor
    std::vector<Edge> edges;
};

/// Partition of E(K_N): Hamiltonian cycles (as edge walks) plus the
/// 1-regular subgraphs they decompose into. The subgraph lists always
/// partition E(K_N) with each subgraph 1-regular. For odd N < 7 the
/// three-way cycle split falls outside the domain of the size guarantees,
/// flagged via odd_split_in_corollary_domain.
struct EdgeDecomposition {
    std::uint32_t n = 0;
    std::vector<std::vector<Edge>> cycles;  // each a closed walk of N edges
    std::vector<Subgraph> subgraphs;
    bool odd_split_in_corollary_domain = true;
};

/// The product-indexed 1-regular set W_p: edges between circle vertices
/// whose exponents sum to p mod N-1. Requires N >= 3 and 0 <= p <= N-2.
std::vector<Edge> w_set(std::uint32_t n, std::uint32_t p);

/// Full decomposition of K_N: (N-1)/2 Hamiltonian cycles for odd N;
/// (N-2)/2 cycles plus a leftover 1-factor of size N/2 for even N.
EdgeDecomposition decompose(std::uint32_t n);

/// The 1-regular pieces only (even N: N-1 one-factors of size N/2; odd N:
/// 3(N-1)/2 pieces with the corollary's sizes).
std::vector<Subgraph> split_subgraphs(std::uint32_t n);

/// Rotation action: advances every circle exponent by j (hub fixed).
/// Maps W_p onto W_{(p+2j) mod (N-1)}.
Edge rotate_edge(const Edge& e, std::uint32_t j, std::uint32_t n);

}  // namespace bulkjl::walecki
