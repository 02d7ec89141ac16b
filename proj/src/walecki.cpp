#include "bulkjl/walecki.hpp"

#include <algorithm>
#include <string>

#include "bulkjl/errors.hpp"

namespace bulkjl::walecki {

namespace {

// Vertex id of circle exponent e (0-based): the hub is id 0.
inline std::uint32_t vid(std::uint32_t exponent) { return exponent + 1; }

// Multiplicative inverse of 2 mod the odd modulus n1: (n1+1)/2.
inline std::uint32_t inv2_mod(std::uint32_t n1) { return (n1 + 1) / 2; }

void require_n(std::uint32_t n, const char* who) {
    if (n < 3) throw input_error(std::string(who) + ": need N >= 3");
}

// Hub edge completing W_p to a 1-factor when N-1 is odd: W_p misses exactly
// the circle vertex v with 2v = p (mod N-1).
Edge hub_edge_for(std::uint32_t p, std::uint32_t n1) {
    const std::uint32_t missing = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(p) * inv2_mod(n1)) % n1);
    return Edge(0, vid(missing));
}

}  // namespace

const char* subgraph_kind_name(SubgraphKind kind) {
    switch (kind) {
        case SubgraphKind::w_odd: return "w_odd";
        case SubgraphKind::w0_plus: return "w0_plus";
        case SubgraphKind::w0_minus: return "w0_minus";
        case SubgraphKind::w_tilde_even: return "w_tilde_even";
        case SubgraphKind::w_tilde_odd: return "w_tilde_odd";
        case SubgraphKind::one_factor_leftover: return "one_factor_leftover";
    }
    return "?";
}

Edge rotate_edge(const Edge& e, std::uint32_t j, std::uint32_t n) {
    const std::uint32_t n1 = n - 1;
    const auto rot = [&](std::uint32_t id) -> std::uint32_t {
        if (id == 0) return 0;
        return vid((id - 1 + j) % n1);
    };
    return Edge(rot(e.u), rot(e.v));
}

std::vector<Edge> w_set(std::uint32_t n, std::uint32_t p) {
    require_n(n, "w_set");
    const std::uint32_t n1 = n - 1;
    if (p > n - 2) throw input_error("w_set: p out of range [0, N-2]");
    std::vector<Edge> edges;
    for (std::uint32_t j = 0; j < n1; ++j) {
        const std::uint32_t k = (p + n1 - j % n1) % n1;  // j + k = p (mod N-1)
        if (j < k) edges.emplace_back(vid(j), vid(k));
    }
    return edges;
}

EdgeDecomposition decompose(std::uint32_t n) {
    require_n(n, "decompose");
    const std::uint32_t n1 = n - 1;
    EdgeDecomposition out;
    out.n = n;

    if (n % 2 == 1) {
        // N odd, N-1 even: (N-1)/2 cycles, each W~_{2j}^+ | W~_{2j}^- | W_{2j+1}.
        out.odd_split_in_corollary_domain = (n >= 7);
        const std::uint32_t half = n1 / 2;  // exponent of the vertex -1

        // Split W_0 by the sign of the real part of its conjugate vertex
        // pairs <w^k, w^-k>, k = 1..(N-3)/2. Exact rule: real part
        // cos(2 pi k/(N-1)) is nonnegative iff 4k <= N-1.
        std::vector<Edge> w0_plus;
        std::vector<Edge> w0_minus;
        for (std::uint32_t k = 1; 2 * k < n1; ++k) {
            const Edge e(vid(k), vid(n1 - k));
            if (4 * k <= n1) {
                w0_plus.push_back(e);
            } else {
                w0_minus.push_back(e);
            }
        }
        w0_plus.emplace_back(0u, vid(0));      // <o, 1>
        w0_minus.emplace_back(0u, vid(half));  // <o, -1>

        for (std::uint32_t j = 0; j < n1 / 2; ++j) {
            // Pieces of cycle j by rotating the j = 0 pieces (labels travel
            // with the rotation; no re-classification by real part).
            Subgraph plus{SubgraphKind::w0_plus, static_cast<int>(j), {}};
            Subgraph minus{SubgraphKind::w0_minus, static_cast<int>(j), {}};
            for (const Edge& e : w0_plus) plus.edges.push_back(rotate_edge(e, j, n));
            for (const Edge& e : w0_minus) minus.edges.push_back(rotate_edge(e, j, n));
            Subgraph odd{SubgraphKind::w_odd, static_cast<int>(j),
                         w_set(n, (2 * j + 1) % n1)};

            // Cycle walk (o, 1, w, w^-1, ..., w^{(N-3)/2}, w^{-(N-3)/2}, -1),
            // rotated by j.
            std::vector<std::uint32_t> walk;
            walk.reserve(n);
            walk.push_back(0);
            walk.push_back(vid(j % n1));
            for (std::uint32_t k = 1; 2 * k < n1; ++k) {
                walk.push_back(vid((k + j) % n1));
                walk.push_back(vid((n1 - k + j) % n1));
            }
            walk.push_back(vid((half + j) % n1));
            std::vector<Edge> cycle;
            cycle.reserve(n);
            for (std::uint32_t t = 0; t < n; ++t) {
                cycle.emplace_back(walk[t], walk[(t + 1) % n]);
            }

            out.cycles.push_back(std::move(cycle));
            out.subgraphs.push_back(std::move(plus));
            out.subgraphs.push_back(std::move(minus));
            out.subgraphs.push_back(std::move(odd));
        }
    } else {
        // N even, N-1 odd: (N-2)/2 cycles W~_{2j} | W~_{2j+1} plus the
        // leftover 1-factor W~_{N-2}. Every W_p misses exactly one circle
        // vertex; the hub edge fills it.
        for (std::uint32_t j = 0; 2 * j + 1 < n1; ++j) {
            Subgraph even{SubgraphKind::w_tilde_even, static_cast<int>(j), w_set(n, 2 * j)};
            even.edges.push_back(hub_edge_for(2 * j, n1));
            Subgraph odd{SubgraphKind::w_tilde_odd, static_cast<int>(j), w_set(n, 2 * j + 1)};
            odd.edges.push_back(hub_edge_for(2 * j + 1, n1));

            // Cycle walk (o, 1, w, w^-1, ..., w^{(N-2)/2}, w^{-(N-2)/2}),
            // rotated by j.
            std::vector<std::uint32_t> walk;
            walk.reserve(n);
            walk.push_back(0);
            walk.push_back(vid(j % n1));
            for (std::uint32_t k = 1; 2 * k < n1; ++k) {
                walk.push_back(vid((k + j) % n1));
                walk.push_back(vid((n1 - k + j) % n1));
            }
            std::vector<Edge> cycle;
            cycle.reserve(n);
            for (std::uint32_t t = 0; t < n; ++t) {
                cycle.emplace_back(walk[t], walk[(t + 1) % n]);
            }

            out.cycles.push_back(std::move(cycle));
            out.subgraphs.push_back(std::move(even));
            out.subgraphs.push_back(std::move(odd));
        }
        Subgraph leftover{SubgraphKind::one_factor_leftover, -1, w_set(n, n1 - 1)};
        leftover.edges.push_back(hub_edge_for(n1 - 1, n1));
        out.subgraphs.push_back(std::move(leftover));
    }
    return out;
}

std::vector<Subgraph> split_subgraphs(std::uint32_t n) {
    return decompose(n).subgraphs;
}

}  // namespace bulkjl::walecki
