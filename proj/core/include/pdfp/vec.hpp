#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdfp {

/// Finite-dimensional real vector, the universal state carrier.
using DenseVector = std::vector<double>;

inline double dot(const DenseVector& a, const DenseVector& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot: size mismatch " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(const DenseVector& a)
{
    return std::sqrt(dot(a, a));
}

inline DenseVector operator+(const DenseVector& a, const DenseVector& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("vector add: size mismatch");
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + b[i];
    return r;
}

inline DenseVector operator-(const DenseVector& a, const DenseVector& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("vector sub: size mismatch");
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

inline DenseVector operator*(double s, const DenseVector& a)
{
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = s * a[i];
    return r;
}

/// r += s * a
inline void axpy(double s, const DenseVector& a, DenseVector& r)
{
    if (a.size() != r.size())
        throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] += s * a[i];
}

inline DenseVector zeros(std::size_t n)
{
    return DenseVector(n, 0.0);
}

}  // namespace pdfp
