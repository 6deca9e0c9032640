#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace s2 {

// Dimensions never exceed 4, so keep everything on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

constexpr double pi = std::numbers::pi;
constexpr double fd_step = 1e-5;   // first derivatives
constexpr double fd_step2 = 1e-4;  // second derivatives, eigenframe flows

enum class Errc { invalid_argument = 1, domain, numerical, io, config, internal };

class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

// name(arg, key=value, ...) where values may themselves contain parentheses.
struct Spec {
    std::string name;
    std::vector<std::string> positional;
    std::vector<std::pair<std::string, std::string>> named;

    bool has(std::string_view key) const;
    std::optional<std::string> get(std::string_view key, int pos = -1) const;
    std::string str(std::string_view key, int pos, const std::string& dflt) const;
    double num(std::string_view key, int pos, double dflt) const;
    double num_required(std::string_view key, int pos) const;
    long integer(std::string_view key, int pos, long dflt) const;
    // every named key must appear in `allowed`
    void check_keys(std::initializer_list<std::string_view> allowed) const;
    std::string text;
};

Spec parse_spec(std::string_view text);
double parse_number(std::string_view text);
std::string trim(std::string_view s);
std::vector<std::string> split_top_level(std::string_view s, char sep);

// Stable summation independent of how the terms were produced.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Runs fn(i) for i in [0, n) on the available hardware threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace s2
