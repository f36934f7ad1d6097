#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatlab {

// Thrown when an enumeration would exceed its configured work budget.
// The CLI maps this to exit code 3.
class resource_error : public std::runtime_error {
public:
    resource_error(const std::string& what, std::uint64_t budget)
        : std::runtime_error(what + " (budget " + std::to_string(budget) + ")"), budget_(budget) {}
    std::uint64_t budget() const { return budget_; }

private:
    std::uint64_t budget_;
};

// Thrown when a run-level check fails (extinction, degenerate fit, failed
// certification). The CLI maps this to exit code 1.
class check_failure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64, used to derive independent per-item seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t item) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (item + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
// the outcome is identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads);

int default_thread_count();

// Global parallelism budget, owned by the CLI. 1 = sequential.
int  get_thread_budget();
void set_thread_budget(int threads);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

// Shortest round-trip decimal formatting ("%.17g" trimmed), deterministic
// across runs and thread counts.
std::string format_double(double x);

std::vector<double> parse_double_list(const std::string& csv);

}  // namespace flatlab
