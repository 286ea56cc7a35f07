#include "bellforge/questions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bellforge {

bool QuestionSet::contains(const Question& q) const {
    return std::binary_search(members.begin(), members.end(), q);
}

QuestionSet make_set(int m, int n, std::vector<Question> items) {
    for (const auto& q : items) {
        if (static_cast<int>(q.size()) != n) throw std::invalid_argument("question length mismatch");
        for (int v : q)
            if (v < 1 || v > m) throw std::invalid_argument("question symbol out of range");
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return QuestionSet{m, n, std::move(items)};
}

Question add_mod(const Question& x, const Question& offset, int m) {
    if (x.size() != offset.size()) throw std::invalid_argument("length mismatch");
    Question r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = ((x[i] - 1) + (offset[i] - 1)) % m + 1;
    return r;
}

QuestionSet base_set(int m, int n) {
    if (m < 2) throw std::invalid_argument("alphabet size must be at least 2");
    if (n < 1) throw std::invalid_argument("question length must be at least 1");
    std::vector<Question> items;
    if (n == 1) {
        for (int k = 0; k < m; ++k) items.push_back(Question{k + 1});
        return make_set(m, n, std::move(items));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    Question d(n, 1);
                    d[i] = k + 1;
                    d[j] = l + 1;
                    items.push_back(std::move(d));
                }
    return make_set(m, n, std::move(items));
}

QuestionSet expand_special(const Question& chi, int m) {
    const int n = static_cast<int>(chi.size());
    QuestionSet d = base_set(m, n);
    std::vector<Question> items;
    items.reserve(d.size());
    for (const auto& off : d.members) items.push_back(add_mod(chi, off, m));
    return make_set(m, n, std::move(items));
}

QuestionSet build_question_set(const QuestionSet& specials) {
    if (specials.members.empty()) throw std::invalid_argument("empty special set");
    std::vector<Question> items;
    for (const auto& chi : specials.members) {
        auto part = expand_special(chi, specials.m);
        items.insert(items.end(), part.members.begin(), part.members.end());
    }
    return make_set(specials.m, specials.n, std::move(items));
}

Question drop_position(const Question& x, int j) {
    if (j < 1 || j > static_cast<int>(x.size())) throw std::out_of_range("position out of range");
    Question r;
    r.reserve(x.size() - 1);
    for (int i = 0; i < static_cast<int>(x.size()); ++i)
        if (i != j - 1) r.push_back(x[i]);
    return r;
}

Question insert_position(const Question& x, int j, int value) {
    if (j < 1 || j > static_cast<int>(x.size()) + 1) throw std::out_of_range("position out of range");
    Question r = x;
    r.insert(r.begin() + (j - 1), value);
    return r;
}

Question with_position(const Question& x, int j, int value) {
    if (j < 1 || j > static_cast<int>(x.size())) throw std::out_of_range("position out of range");
    Question r = x;
    r[j - 1] = value;
    return r;
}

QuestionSet reduced_set(const QuestionSet& specials, int j) {
    if (j < 1 || j > specials.n) throw std::out_of_range("position out of range");
    const int m = specials.m;
    std::vector<Question> items;
    for (const auto& chi : specials.members) {
        Question base = drop_position(chi, j);
        items.push_back(base);
        for (std::size_t i = 0; i < base.size(); ++i)
            for (int k = 1; k < m; ++k) {
                Question q = base;
                q[i] = ((q[i] - 1) + k) % m + 1;
                items.push_back(std::move(q));
            }
    }
    return make_set(m, specials.n - 1, std::move(items));
}

QuestionSet position_set(const QuestionSet& specials, int j) {
    QuestionSet r = reduced_set(specials, j);
    std::vector<Question> items;
    for (const auto& xr : r.members)
        for (int q = 1; q <= specials.m; ++q) items.push_back(insert_position(xr, j, q));
    return make_set(specials.m, specials.n, std::move(items));
}

std::size_t base_set_bound(int m, int n) {
    std::size_t a = static_cast<std::size_t>(m - 1);
    std::size_t nn = static_cast<std::size_t>(n);
    return 1 + a * nn + a * a * nn * (nn - 1) / 2;
}

std::size_t reduced_set_bound(int m, int n) { return 1 + static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(n); }

std::string to_string(const Question& x) {
    std::string s;
    for (int v : x) s.push_back(static_cast<char>('0' + v));
    return s;
}

Question parse_question(const std::string& s) {
    Question q;
    for (char c : s) {
        if (c < '1' || c > '9') throw std::invalid_argument("invalid question symbol in '" + s + "'");
        q.push_back(c - '0');
    }
    if (q.empty()) throw std::invalid_argument("empty question");
    return q;
}

QuestionSet random_specials(int n, std::size_t count, double min_z_fraction, std::mt19937_64& rng, int m) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (count == 0) throw std::invalid_argument("need at least one special question");
    double cap = std::pow(static_cast<double>(m), n);
    if (static_cast<double>(count) > cap) throw std::invalid_argument("more specials requested than exist");
    const int need_z = static_cast<int>(std::ceil(min_z_fraction * n - 1e-12));
    if (need_z > n) throw std::invalid_argument("min_z_fraction above 1");
    std::vector<Question> items;
    std::size_t attempts = 0;
    while (items.size() < count) {
        if (++attempts > 1000 * count) throw std::runtime_error("could not draw enough distinct special questions");
        Question q(n);
        for (auto& v : q) v = static_cast<int>(rng() % static_cast<std::uint64_t>(m)) + 1;
        int have = static_cast<int>(std::count(q.begin(), q.end(), 3));
        while (have < need_z) {
            std::size_t pos = rng() % static_cast<std::uint64_t>(n);
            if (q[pos] != 3) {
                q[pos] = 3;
                ++have;
            }
        }
        if (std::find(items.begin(), items.end(), q) == items.end()) items.push_back(std::move(q));
    }
    return make_set(m, n, std::move(items));
}

}  // namespace bellforge
