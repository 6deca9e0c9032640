#include "sigma2/common.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace s2 {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_top_level(std::string_view s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[') ++depth;
        else if (c == ')' || c == ']') --depth;
        else if (c == sep && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    std::string last = trim(s.substr(start));
    if (!last.empty() || !out.empty()) out.push_back(last);
    return out;
}

double parse_number(std::string_view text) {
    std::string t = trim(text);
    if (t == "pi") return pi;
    if (t == "-pi") return -pi;
    if (t.size() > 3 && t.substr(t.size() - 3) == "*pi") return parse_number(t.substr(0, t.size() - 3)) * pi;
    if (t.size() > 3 && t.substr(t.size() - 3) == "/pi") return parse_number(t.substr(0, t.size() - 3)) / pi;
    if (auto p = t.find("pi/"); p != std::string::npos && p + 3 < t.size()) {
        double sign = (p == 1 && t[0] == '-') ? -1.0 : 1.0;
        if (p == 0 || (p == 1 && t[0] == '-')) return sign * pi / parse_number(t.substr(p + 3));
    }
    double v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        fail(Errc::invalid_argument, "not a number: '" + t + "'");
    return v;
}

Spec parse_spec(std::string_view text) {
    Spec sp;
    sp.text = trim(text);
    std::string_view t = sp.text;
    auto open = t.find('(');
    if (open == std::string_view::npos) {
        sp.name = std::string(t);
    } else {
        if (t.back() != ')') fail(Errc::invalid_argument, "unbalanced parentheses in '" + sp.text + "'");
        sp.name = trim(t.substr(0, open));
        auto inner = t.substr(open + 1, t.size() - open - 2);
        for (auto& item : split_top_level(inner, ',')) {
            if (item.empty()) continue;
            int depth = 0;
            std::size_t eq = std::string::npos;
            for (std::size_t i = 0; i < item.size(); ++i) {
                if (item[i] == '(' || item[i] == '[') ++depth;
                else if (item[i] == ')' || item[i] == ']') --depth;
                else if (item[i] == '=' && depth == 0) { eq = i; break; }
            }
            if (eq == std::string::npos) {
                if (!sp.named.empty())
                    fail(Errc::invalid_argument, "positional argument after named one in '" + sp.text + "'");
                sp.positional.push_back(item);
            } else {
                sp.named.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
            }
        }
    }
    if (sp.name.empty()) fail(Errc::invalid_argument, "empty specifier");
    return sp;
}

bool Spec::has(std::string_view key) const {
    for (auto& [k, v] : named)
        if (k == key) return true;
    return false;
}

std::optional<std::string> Spec::get(std::string_view key, int pos) const {
    for (auto& [k, v] : named)
        if (k == key) return v;
    if (pos >= 0 && pos < static_cast<int>(positional.size())) return positional[pos];
    return std::nullopt;
}

std::string Spec::str(std::string_view key, int pos, const std::string& dflt) const {
    auto v = get(key, pos);
    return v ? *v : dflt;
}

double Spec::num(std::string_view key, int pos, double dflt) const {
    auto v = get(key, pos);
    return v ? parse_number(*v) : dflt;
}

double Spec::num_required(std::string_view key, int pos) const {
    auto v = get(key, pos);
    if (!v) fail(Errc::invalid_argument, name + ": missing parameter '" + std::string(key) + "'");
    return parse_number(*v);
}

long Spec::integer(std::string_view key, int pos, long dflt) const {
    auto v = get(key, pos);
    if (!v) return dflt;
    double d = parse_number(*v);
    if (d != std::round(d)) fail(Errc::invalid_argument, name + ": '" + std::string(key) + "' must be an integer");
    return static_cast<long>(d);
}

void Spec::check_keys(std::initializer_list<std::string_view> allowed) const {
    for (auto& [k, v] : named)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            fail(Errc::invalid_argument, name + ": unknown parameter '" + k + "'");
    if (positional.size() > allowed.size())
        fail(Errc::invalid_argument, name + ": too many arguments");
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t workers = std::min<std::size_t>(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (!err) err = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace s2
