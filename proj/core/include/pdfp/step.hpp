#pragma once

#include "pdfp/vec.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdfp {

/// A proximal step parameter: either one positive scalar or a positive
/// per-coordinate diagonal. Separable prox operators consume it
/// componentwise; non-separable ones require it constant on their block.
class StepSize {
public:
    explicit StepSize(double s) : scalar_(true), value_(s) {}
    explicit StepSize(std::vector<double> d) : scalar_(false), diag_(std::move(d)) {}

    bool is_scalar() const { return scalar_; }

    double scalar_value() const
    {
        if (!scalar_)
            throw std::logic_error("StepSize: diagonal step used where a scalar is required");
        return value_;
    }

    /// Entry i; a scalar step broadcasts.
    double at(std::size_t i) const { return scalar_ ? value_ : diag_.at(i); }

    /// 0 for a scalar step, the diagonal length otherwise.
    std::size_t size() const { return scalar_ ? 0 : diag_.size(); }

    const std::vector<double>& diagonal() const
    {
        if (scalar_)
            throw std::logic_error("StepSize: scalar step has no diagonal");
        return diag_;
    }

    StepSize reciprocal() const
    {
        if (scalar_)
            return StepSize(1.0 / value_);
        std::vector<double> r(diag_.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = 1.0 / diag_[i];
        return StepSize(std::move(r));
    }

    StepSize slice(std::size_t begin, std::size_t len) const
    {
        if (scalar_)
            return *this;
        if (begin + len > diag_.size())
            throw std::out_of_range("StepSize::slice out of range");
        return StepSize(std::vector<double>(diag_.begin() + static_cast<std::ptrdiff_t>(begin),
                                            diag_.begin() + static_cast<std::ptrdiff_t>(begin + len)));
    }

    /// The single value this step takes on [begin, begin+len); throws if the
    /// diagonal is not constant there.
    double uniform(std::size_t begin, std::size_t len) const
    {
        if (scalar_)
            return value_;
        if (len == 0 || begin + len > diag_.size())
            throw std::out_of_range("StepSize::uniform out of range");
        const double v = diag_[begin];
        for (std::size_t i = begin + 1; i < begin + len; ++i)
            if (diag_[i] != v)
                throw std::invalid_argument(
                    "StepSize: diagonal step must be constant on a non-separable block");
        return v;
    }

    void require_positive(const std::string& who) const
    {
        if (scalar_) {
            if (!(value_ > 0.0))
                throw std::invalid_argument(who + ": step must be positive, got " +
                                            std::to_string(value_));
            return;
        }
        for (std::size_t i = 0; i < diag_.size(); ++i)
            if (!(diag_[i] > 0.0))
                throw std::invalid_argument(who + ": step entry " + std::to_string(i) +
                                            " must be positive, got " + std::to_string(diag_[i]));
    }

    void require_dim(std::size_t n, const std::string& who) const
    {
        if (!scalar_ && diag_.size() != n)
            throw std::invalid_argument(who + ": diagonal step length " +
                                        std::to_string(diag_.size()) + " does not match dim " +
                                        std::to_string(n));
    }

private:
    bool scalar_;
    double value_ = 0.0;
    std::vector<double> diag_;
};

}  // namespace pdfp
