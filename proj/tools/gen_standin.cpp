// Generates the bundled heavy-tailed stand-in loss file used by the analyze
// examples: Pareto draws plus a handful of injected extreme claims.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "xol/rng.hpp"
#include "xol/severity.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write a synthetic heavy-tailed loss CSV"};
    std::string path = "standin_losses.csv";
    std::size_t n = 10000;
    double alpha = 2.5;
    double lambda = 2.38;
    std::uint64_t seed = 9613;
    std::vector<double> extremes{315.54, 180.2, 142.7, 98.4, 77.9, 64.1, 55.3, 49.8};
    app.add_option("--out", path)->capture_default_str();
    app.add_option("--n", n)->capture_default_str();
    app.add_option("--alpha", alpha)->capture_default_str();
    app.add_option("--lambda", lambda)->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    app.add_option("--extremes", extremes);
    CLI11_PARSE(app, argc, argv);

    if (extremes.size() >= n) {
        std::cerr << "more extremes than losses\n";
        return 64;
    }
    auto losses = xol::sample(xol::SeverityModel::pareto(alpha, lambda), n - extremes.size(), seed);
    // Spread the extremes through the file instead of appending them.
    xol::Rng rng(seed ^ 0x5eedULL);
    for (double e : extremes) {
        const auto pos = static_cast<std::size_t>(rng.uniform() * static_cast<double>(losses.size() + 1));
        losses.insert(losses.begin() + static_cast<std::ptrdiff_t>(pos), e);
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write " << path << '\n';
        return 65;
    }
    out << "claim_id,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < losses.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", losses[i]);
        out << i + 1 << ',' << buf << '\n';
    }
    return 0;
}
