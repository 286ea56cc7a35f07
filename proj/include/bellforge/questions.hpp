#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bellforge {

// Symbols are display values 1..m; arithmetic is done on value-1 modulo m.
using Question = std::vector<int>;

struct QuestionSet {
    int m = 5;
    int n = 0;
    std::vector<Question> members;  // sorted, unique

    std::size_t size() const { return members.size(); }
    bool contains(const Question& q) const;
};

QuestionSet make_set(int m, int n, std::vector<Question> items);

QuestionSet base_set(int m, int n);
QuestionSet expand_special(const Question& chi, int m);
QuestionSet build_question_set(const QuestionSet& specials);
QuestionSet reduced_set(const QuestionSet& specials, int j);
QuestionSet position_set(const QuestionSet& specials, int j);

Question drop_position(const Question& x, int j);
Question insert_position(const Question& x, int j, int value);
Question with_position(const Question& x, int j, int value);
Question add_mod(const Question& x, const Question& offset, int m);

std::size_t base_set_bound(int m, int n);
std::size_t reduced_set_bound(int m, int n);

std::string to_string(const Question& x);
Question parse_question(const std::string& s);

QuestionSet random_specials(int n, std::size_t count, double min_z_fraction, std::mt19937_64& rng, int m = 5);

}  // namespace bellforge
