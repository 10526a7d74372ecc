#pragma once
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lobeq {

struct GridParams {
    double core_halfwidth_sigmas = 12.0;
    double core_step_sigmas = 0.02;
    double tail_ratio = 1.05;
    double tail_max_sigmas = 1e4;
    int hermite_nodes = 64;
};

// Symmetric node set: uniform core on [-hw, hw], geometric extension to
// +-tail_max, everything scaled by sigma. Zero is always a node.
struct Grid {
    std::vector<double> nodes;
    double core_step = 0.0;   // in x units (sigma-scaled)
    double sigma = 1.0;
    std::size_t zero_index = 0;
    int hermite_nodes = 64;

    std::size_t size() const { return nodes.size(); }
    double operator[](std::size_t i) const { return nodes[i]; }
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }
};

inline Grid build_grid(const GridParams& p, double sigma) {
    if (sigma <= 0.0 || p.core_step_sigmas <= 0.0 || p.tail_ratio <= 1.0)
        throw std::invalid_argument("grid: bad parameters");
    if (p.core_halfwidth_sigmas < 10.0)
        throw std::invalid_argument("grid: core must cover at least 10 sigmas");
    std::vector<double> pos;
    long ncore = std::lround(p.core_halfwidth_sigmas / p.core_step_sigmas);
    pos.reserve(ncore + 256);
    for (long i = 0; i <= ncore; ++i) pos.push_back(i * p.core_step_sigmas);
    double x = pos.back();
    while (x < p.tail_max_sigmas) {
        x *= p.tail_ratio;
        pos.push_back(std::min(x, p.tail_max_sigmas));
    }
    Grid g;
    g.core_step = p.core_step_sigmas * sigma;
    g.sigma = sigma;
    g.hermite_nodes = p.hermite_nodes;
    g.nodes.reserve(2 * pos.size() - 1);
    for (std::size_t i = pos.size(); i-- > 1;) g.nodes.push_back(-pos[i] * sigma);
    for (std::size_t i = 0; i < pos.size(); ++i) g.nodes.push_back(pos[i] * sigma);
    g.zero_index = pos.size() - 1;
    g.nodes[g.zero_index] = 0.0;
    return g;
}

}  // namespace lobeq
