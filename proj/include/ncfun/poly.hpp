#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/matrix.hpp"
#include "ncfun/scalar.hpp"

namespace ncfun {

/// A word over letters {0,..,d-1}; the empty word is the unit.
struct NcWord {
    std::vector<std::uint32_t> letters;

    NcWord() = default;
    NcWord(std::initializer_list<std::uint32_t> ls) : letters(ls) {}
    explicit NcWord(std::vector<std::uint32_t> ls) : letters(std::move(ls)) {}

    std::size_t length() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
    std::uint32_t max_letter() const {
        std::uint32_t m = 0;
        for (auto l : letters) m = std::max(m, l + 1);
        return m;
    }
    NcWord concat(const NcWord& o) const {
        NcWord w(letters);
        w.letters.insert(w.letters.end(), o.letters.begin(), o.letters.end());
        return w;
    }
    auto operator<=>(const NcWord&) const = default;
};

/// Free-algebra polynomial in d noncommuting letters: a finite word->coeff
/// map with no zero coefficients stored.
template <Scalar T>
class NcPoly {
public:
    NcPoly() = default;
    explicit NcPoly(std::uint32_t num_letters) : d_(num_letters) {}

    static NcPoly constant(std::uint32_t d, const T& c) {
        NcPoly p(d);
        p.add_term(NcWord{}, c);
        return p;
    }
    static NcPoly letter(std::uint32_t d, std::uint32_t i) {
        NcPoly p(d);
        p.add_term(NcWord{i}, T(1));
        return p;
    }

    std::uint32_t num_letters() const { return d_; }
    const std::map<NcWord, T>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t degree() const {
        std::size_t m = 0;
        for (const auto& [w, c] : terms_) m = std::max(m, w.length());
        return m;
    }

    void add_term(const NcWord& w, const T& c) {
        if (w.max_letter() > d_) throw LetterCountMismatch("word uses letter beyond alphabet");
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            if (!ScalarTraits<T>::is_zero(c)) terms_.emplace(w, c);
        } else {
            it->second += c;
            if (ScalarTraits<T>::is_zero(it->second)) terms_.erase(it);
        }
    }

    NcPoly operator+(const NcPoly& o) const {
        require_same_alphabet(o);
        NcPoly r(*this);
        for (const auto& [w, c] : o.terms_) r.add_term(w, c);
        return r;
    }
    NcPoly operator-(const NcPoly& o) const {
        require_same_alphabet(o);
        NcPoly r(*this);
        for (const auto& [w, c] : o.terms_) r.add_term(w, -c);
        return r;
    }
    NcPoly operator-() const {
        NcPoly r(d_);
        for (const auto& [w, c] : terms_) r.terms_.emplace(w, -c);
        return r;
    }
    NcPoly operator*(const NcPoly& o) const {
        require_same_alphabet(o);
        NcPoly r(d_);
        for (const auto& [w1, c1] : terms_)
            for (const auto& [w2, c2] : o.terms_) r.add_term(w1.concat(w2), c1 * c2);
        return r;
    }
    NcPoly operator*(const T& s) const {
        NcPoly r(d_);
        if (ScalarTraits<T>::is_zero(s)) return r;
        for (const auto& [w, c] : terms_) r.terms_.emplace(w, c * s);
        return r;
    }
    friend NcPoly operator*(const T& s, const NcPoly& p) { return p * s; }

    bool operator==(const NcPoly& o) const { return d_ == o.d_ && terms_ == o.terms_; }

    /// Substitutes subs[i] for letter i. All substitutes share one target
    /// alphabet.
    NcPoly compose(const std::vector<NcPoly>& subs) const {
        if (subs.size() != d_) throw LetterCountMismatch("one substitute per letter required");
        const std::uint32_t dd = subs.empty() ? d_ : subs.front().num_letters();
        for (const auto& s : subs)
            if (s.num_letters() != dd) throw LetterCountMismatch("substitutes disagree on alphabet");
        NcPoly r(dd);
        for (const auto& [w, c] : terms_) {
            NcPoly prod = NcPoly::constant(dd, c);
            for (auto l : w.letters) prod = prod * subs[l];
            r = r + prod;
        }
        return r;
    }

    /// The degree-`k` homogeneous part.
    NcPoly homogeneous_part(std::size_t k) const {
        NcPoly r(d_);
        for (const auto& [w, c] : terms_)
            if (w.length() == k) r.terms_.emplace(w, c);
        return r;
    }

private:
    void require_same_alphabet(const NcPoly& o) const {
        if (d_ != o.d_) throw LetterCountMismatch("polynomials over different alphabets");
    }

    std::uint32_t d_ = 0;
    std::map<NcWord, T> terms_;
};

/// A tuple-valued nc polynomial map F : (X,Y) -> F^c with letters split into
/// an X block (first `split` letters) and a Y block (the rest).
template <Scalar T>
struct NcPolyMap {
    std::vector<NcPoly<T>> components;
    std::uint32_t split = 0; // number of X letters; Y letters follow

    NcPolyMap() = default;
    NcPolyMap(std::vector<NcPoly<T>> comps, std::uint32_t x_letters)
        : components(std::move(comps)), split(x_letters) {
        validate();
    }

    std::uint32_t num_letters() const {
        return components.empty() ? 0 : components.front().num_letters();
    }
    std::uint32_t x_letters() const { return split; }
    std::uint32_t y_letters() const { return num_letters() - split; }
    std::size_t num_components() const { return components.size(); }

    void validate() const {
        if (components.empty()) throw ComponentCountMismatch("empty polynomial map");
        const std::uint32_t d = components.front().num_letters();
        for (const auto& p : components)
            if (p.num_letters() != d)
                throw LetterCountMismatch("map components over different alphabets");
        if (split > d) throw LetterCountMismatch("letter split exceeds alphabet");
    }
};

} // namespace ncfun
