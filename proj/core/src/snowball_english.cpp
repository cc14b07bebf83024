// Snowball English (Porter2) stemmer, following the english.sbl program of
// Snowball 3.1. The control flow mirrors the generated stemmers: a cursor walks
// backwards from the end of the word and [bra, ket) marks the slice to replace.

#include "lexqa/text_analysis.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace lexqa {

namespace {

struct Among {
    std::string_view s;
    int result;
};

constexpr bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}
constexpr bool is_vowel_wxy(char c) { return is_vowel(c) || c == 'w' || c == 'x' || c == 'Y'; }
constexpr bool is_aeo(char c) { return c == 'a' || c == 'e' || c == 'o'; }
constexpr bool is_valid_li(char c) {
    return std::string_view("cdeghkmnrt").find(c) != std::string_view::npos;
}

constexpr std::array kPrefixes{
    Among{"arsen", -1}, Among{"commun", -1}, Among{"emerg", -1},
    Among{"gener", -1}, Among{"inter", -1},  Among{"later", -1},
    Among{"organ", -1}, Among{"past", -1},   Among{"univers", -1},
};
constexpr std::array kApostrophe{Among{"'", 1}, Among{"'s'", 1}, Among{"'s", 1}};
constexpr std::array kStep1a{
    Among{"ied", 2}, Among{"s", 3}, Among{"ies", 2}, Among{"sses", 1}, Among{"ss", -1}, Among{"us", -1},
};
constexpr std::array kStep1bEeException{Among{"succ", 1}, Among{"proc", 1}, Among{"exc", 1}};
constexpr std::array kStep1bIng{
    Among{"even", 2}, Among{"cann", 2}, Among{"inn", 2}, Among{"earr", 2},
    Among{"herr", 2}, Among{"out", 2},  Among{"y", 1},
};
constexpr std::array kStep1b{
    Among{"", -1},    Among{"ed", 2},    Among{"eed", 1},   Among{"ing", 3},
    Among{"edly", 2}, Among{"eedly", 1}, Among{"ingly", 2},
};
constexpr std::array kStep1bTail{
    Among{"", 3},    Among{"bb", 2}, Among{"dd", 2}, Among{"ff", 2}, Among{"gg", 2},
    Among{"bl", 1},  Among{"mm", 2}, Among{"nn", 2}, Among{"pp", 2}, Among{"rr", 2},
    Among{"at", 1},  Among{"tt", 2}, Among{"iz", 1},
};
constexpr std::array kStep2{
    Among{"anci", 3},    Among{"enci", 2},    Among{"ogi", 14},     Among{"li", 16},
    Among{"bli", 12},    Among{"abli", 4},    Among{"alli", 8},     Among{"fulli", 9},
    Among{"lessli", 15}, Among{"ousli", 10},  Among{"entli", 5},    Among{"aliti", 8},
    Among{"biliti", 12}, Among{"iviti", 11},  Among{"tional", 1},   Among{"ational", 7},
    Among{"alism", 8},   Among{"ation", 7},   Among{"ization", 6},  Among{"izer", 6},
    Among{"ator", 7},    Among{"iveness", 11}, Among{"fulness", 9}, Among{"ousness", 10},
    Among{"ogist", 13},
};
constexpr std::array kStep3{
    Among{"icate", 4}, Among{"ative", 6}, Among{"alize", 3}, Among{"iciti", 4}, Among{"ical", 4},
    Among{"tional", 1}, Among{"ational", 2}, Among{"ful", 5}, Among{"ness", 5},
};
constexpr std::array kStep4{
    Among{"ic", 1},  Among{"ance", 1}, Among{"ence", 1}, Among{"able", 1}, Among{"ible", 1},
    Among{"ate", 1}, Among{"ive", 1},  Among{"ize", 1},  Among{"iti", 1},  Among{"al", 1},
    Among{"ism", 1}, Among{"ion", 2},  Among{"er", 1},   Among{"ous", 1},  Among{"ant", 1},
    Among{"ent", 1}, Among{"ment", 1}, Among{"ement", 1},
};
constexpr std::array kStep5{Among{"e", 1}, Among{"l", 2}};

struct Exception {
    std::string_view word;
    std::string_view replacement;  // empty: keep as is
};
constexpr std::array kExceptions{
    Exception{"andes", ""},  Exception{"atlas", ""},  Exception{"bias", ""},
    Exception{"cosmos", ""}, Exception{"early", "earli"}, Exception{"gently", "gentl"},
    Exception{"howe", ""},   Exception{"idly", "idl"}, Exception{"news", ""},
    Exception{"only", "onli"}, Exception{"singly", "singl"}, Exception{"skies", "sky"},
    Exception{"skis", "ski"}, Exception{"sky", ""},   Exception{"ugly", "ugli"},
};

class Stemmer {
  public:
    explicit Stemmer(std::string_view word) : cur_(word) {}

    std::string run() {
        for (const auto& e : kExceptions) {
            if (cur_ == e.word) return e.replacement.empty() ? cur_ : std::string(e.replacement);
        }
        if (cur_.size() < 3) return cur_;

        prelude();
        mark_regions();
        cursor_ = cur_.size();
        step_1a();
        cursor_ = cur_.size();
        step_1b();
        cursor_ = cur_.size();
        step_1c();
        cursor_ = cur_.size();
        step_2();
        cursor_ = cur_.size();
        step_3();
        cursor_ = cur_.size();
        step_4();
        cursor_ = cur_.size();
        step_5();
        if (y_found_) {
            for (auto& c : cur_)
                if (c == 'Y') c = 'y';
        }
        return cur_;
    }

  private:
    std::size_t limit() const { return cur_.size(); }

    // Longest entry that is a suffix of cur_[0, cursor_); moves the cursor to its start.
    template <std::size_t N>
    int find_among_b(const std::array<Among, N>& table) {
        const Among* best = nullptr;
        const std::string_view head(cur_.data(), cursor_);
        for (const auto& a : table) {
            if (head.ends_with(a.s) && (!best || a.s.size() > best->s.size())) best = &a;
        }
        if (!best) return 0;
        cursor_ -= best->s.size();
        return best->result;
    }

    void slice_from(std::string_view s) {
        const auto old_len = ket_ - bra_;
        cur_.replace(bra_, old_len, s);
        if (cursor_ >= ket_) cursor_ = cursor_ + s.size() - old_len;
        else if (cursor_ > bra_) cursor_ = bra_;
        ket_ = bra_ + s.size();
    }
    void slice_del() { slice_from({}); }

    bool in_grouping_b(bool (*pred)(char)) {
        if (cursor_ == 0 || !pred(cur_[cursor_ - 1])) return false;
        --cursor_;
        return true;
    }
    bool out_grouping_b(bool (*pred)(char)) {
        if (cursor_ == 0 || pred(cur_[cursor_ - 1])) return false;
        --cursor_;
        return true;
    }
    // Moves backwards until the character before the cursor is a vowel.
    bool go_out_vowel_b() {
        while (cursor_ > 0) {
            if (is_vowel(cur_[cursor_ - 1])) return true;
            --cursor_;
        }
        return false;
    }
    bool in_r1() const { return p1_ <= cursor_; }
    bool in_r2() const { return p2_ <= cursor_; }

    void prelude() {
        if (!cur_.empty() && cur_[0] == '\'') cur_.erase(0, 1);
        if (!cur_.empty() && cur_[0] == 'y') {
            cur_[0] = 'Y';
            y_found_ = true;
        }
        for (std::size_t i = 0; i + 1 < cur_.size(); ++i) {
            if (is_vowel(cur_[i]) && cur_[i + 1] == 'y') {
                cur_[i + 1] = 'Y';
                y_found_ = true;
            }
        }
    }

    void mark_regions() {
        p1_ = p2_ = limit();
        std::size_t c = 0;
        const Among* prefix = nullptr;
        for (const auto& a : kPrefixes) {
            if (std::string_view(cur_).starts_with(a.s) && (!prefix || a.s.size() > prefix->s.size()))
                prefix = &a;
        }
        // position just past the first non-vowel that follows a vowel, starting at c
        auto next_region = [&](std::size_t from) -> std::optional<std::size_t> {
            std::size_t i = from;
            while (i < limit() && !is_vowel(cur_[i])) ++i;
            if (i >= limit()) return std::nullopt;
            ++i;
            while (i < limit() && is_vowel(cur_[i])) ++i;
            if (i >= limit()) return std::nullopt;
            return i + 1;
        };
        if (prefix) {
            c = prefix->s.size();
        } else {
            auto r = next_region(0);
            if (!r) return;
            c = *r;
        }
        p1_ = c;
        auto r2 = next_region(c);
        if (!r2) return;
        p2_ = *r2;
    }

    bool shortv() {
        const auto saved = cursor_;
        if (out_grouping_b(is_vowel_wxy) && in_grouping_b(is_vowel) && out_grouping_b(is_vowel))
            return true;
        cursor_ = saved;
        if (out_grouping_b(is_vowel) && in_grouping_b(is_vowel) && cursor_ == 0) return true;
        cursor_ = saved;
        if (std::string_view(cur_.data(), cursor_).ends_with("past")) {
            cursor_ -= 4;
            return true;
        }
        return false;
    }

    void step_1a() {
        ket_ = cursor_;
        {
            const auto saved = cursor_;
            if (find_among_b(kApostrophe) != 0) {
                bra_ = cursor_;
                slice_del();
            } else {
                cursor_ = saved;
            }
        }
        ket_ = cursor_;
        const int v = find_among_b(kStep1a);
        if (v == 0) return;
        bra_ = cursor_;
        if (v == 1) {
            slice_from("ss");
        } else if (v == 2) {
            slice_from(cursor_ >= 2 ? "i" : "ie");
        } else if (v == 3) {
            if (cursor_ == 0) return;
            --cursor_;
            if (!go_out_vowel_b()) return;
            slice_del();
        }
    }

    void step_1b() {
        ket_ = cursor_;
        int v = find_among_b(kStep1b);
        bra_ = cursor_;
        const auto suffix_start = cursor_;

        bool strip = false;
        if (v == 1) {
            if (in_r1()) {
                const auto saved = cursor_;
                const bool exception = find_among_b(kStep1bEeException) != 0 && cursor_ == 0;
                cursor_ = saved;
                if (!exception) slice_from("ee");
            }
            return;
        } else if (v == 2) {
            strip = true;
        } else if (v == 3) {
            const int w = find_among_b(kStep1bIng);
            if (w == 0) {
                strip = true;
            } else if (w == 1) {
                const auto before_y = cursor_;
                if (out_grouping_b(is_vowel) && cursor_ == 0) {
                    cursor_ = before_y;
                    bra_ = cursor_;
                    slice_from("ie");
                    return;
                }
                strip = true;
            } else {
                if (cursor_ > 0) strip = true;
                else return;
            }
        } else {
            return;
        }
        if (!strip) return;

        cursor_ = suffix_start;
        if (!go_out_vowel_b()) return;
        cursor_ = suffix_start;
        slice_del();

        ket_ = bra_ = cursor_;
        const auto end = cursor_;
        const int t = find_among_b(kStep1bTail);
        if (t == 1) {
            slice_from("e");
            return;
        }
        if (t == 2) {
            const auto saved = cursor_;
            if (in_grouping_b(is_aeo) && cursor_ == 0) return;
            cursor_ = saved;
            cursor_ = end;
            ket_ = cursor_;
            if (cursor_ == 0) return;
            --cursor_;
            bra_ = cursor_;
            slice_del();
            return;
        }
        // t == 3
        if (cursor_ != p1_) return;
        if (!shortv()) return;
        cursor_ = end;
        slice_from("e");
    }

    void step_1c() {
        ket_ = cursor_;
        if (cursor_ == 0 || (cur_[cursor_ - 1] != 'y' && cur_[cursor_ - 1] != 'Y')) return;
        --cursor_;
        bra_ = cursor_;
        if (!out_grouping_b(is_vowel)) return;
        if (cursor_ == 0) return;
        slice_from("i");
    }

    void step_2() {
        ket_ = cursor_;
        const int v = find_among_b(kStep2);
        if (v == 0) return;
        bra_ = cursor_;
        if (!in_r1()) return;
        switch (v) {
            case 1: slice_from("tion"); break;
            case 2: slice_from("ence"); break;
            case 3: slice_from("ance"); break;
            case 4: slice_from("able"); break;
            case 5: slice_from("ent"); break;
            case 6: slice_from("ize"); break;
            case 7: slice_from("ate"); break;
            case 8: slice_from("al"); break;
            case 9: slice_from("ful"); break;
            case 10: slice_from("ous"); break;
            case 11: slice_from("ive"); break;
            case 12: slice_from("ble"); break;
            case 13: slice_from("og"); break;
            case 14:
                if (cursor_ == 0 || cur_[cursor_ - 1] != 'l') return;
                --cursor_;
                slice_from("og");
                break;
            case 15: slice_from("less"); break;
            default:
                if (!in_grouping_b(is_valid_li)) return;
                slice_del();
                break;
        }
    }

    void step_3() {
        ket_ = cursor_;
        const int v = find_among_b(kStep3);
        if (v == 0) return;
        bra_ = cursor_;
        if (!in_r1()) return;
        switch (v) {
            case 1: slice_from("tion"); break;
            case 2: slice_from("ate"); break;
            case 3: slice_from("al"); break;
            case 4: slice_from("ic"); break;
            case 5: slice_del(); break;
            default:
                if (!in_r2()) return;
                slice_del();
                break;
        }
    }

    void step_4() {
        ket_ = cursor_;
        const int v = find_among_b(kStep4);
        if (v == 0) return;
        bra_ = cursor_;
        if (!in_r2()) return;
        if (v == 1) {
            slice_del();
            return;
        }
        if (cursor_ == 0 || (cur_[cursor_ - 1] != 's' && cur_[cursor_ - 1] != 't')) return;
        --cursor_;
        slice_del();
    }

    void step_5() {
        ket_ = cursor_;
        const int v = find_among_b(kStep5);
        if (v == 0) return;
        bra_ = cursor_;
        if (v == 1) {
            if (!in_r2()) {
                if (!in_r1()) return;
                const auto saved = cursor_;
                if (shortv()) return;
                cursor_ = saved;
            }
            slice_del();
            return;
        }
        if (!in_r2()) return;
        if (cursor_ == 0 || cur_[cursor_ - 1] != 'l') return;
        --cursor_;
        slice_del();
    }

    std::string cur_;
    std::size_t cursor_ = 0;
    std::size_t bra_ = 0;
    std::size_t ket_ = 0;
    std::size_t p1_ = 0;
    std::size_t p2_ = 0;
    bool y_found_ = false;
};

}  // namespace

std::string snowball_english(std::string_view token) { return Stemmer(token).run(); }

std::string stem(std::string_view token) {
    std::string current(token);
    // converges in a handful of passes on English text; the bound only guards pathological input
    for (int pass = 0; pass < 32; ++pass) {
        auto next = snowball_english(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

}  // namespace lexqa
