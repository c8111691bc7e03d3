#pragma once

// Staggered-grid difference operators shared by the forward and adjoint
// solvers. All three are length-generic and apply componentwise to scalar or
// vector-valued entries. None of them divides by the grid spacing; callers
// apply 1/ds where the discretization requires it.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosserat {

enum class FieldKind { node, element, interior };

// Number of entries a field of the given kind has on a grid of N segments.
inline std::size_t field_length(FieldKind kind, int N) {
    switch (kind) {
        case FieldKind::node: return static_cast<std::size_t>(N) + 1;
        case FieldKind::element: return static_cast<std::size_t>(N);
        case FieldKind::interior: return static_cast<std::size_t>(N) - 1;
    }
    return 0;
}

template <class T>
struct StaggeredField {
    FieldKind kind;
    std::vector<T> values;

    StaggeredField(FieldKind k, int N, const T& fill) : kind(k), values(field_length(k, N), fill) {}
    bool matches(int N) const { return values.size() == field_length(kind, N); }
};

// M entries -> M+1 entries: out[0] = b[0], out[i] = b[i] - b[i-1], out[M] = -b[M-1].
template <class T>
void dtilde(std::span<const T> b, std::span<T> out) {
    const std::size_t M = b.size();
    if (M < 1) throw std::invalid_argument("dtilde: empty input");
    if (out.size() != M + 1) throw std::invalid_argument("dtilde: output must have M+1 entries");
    out[0] = b[0];
    for (std::size_t i = 1; i < M; ++i) out[i] = b[i] - b[i - 1];
    out[M] = -b[M - 1];
}

template <class T>
std::vector<T> dtilde(std::span<const T> b) {
    if (b.empty()) throw std::invalid_argument("dtilde: empty input");
    std::vector<T> out(b.size() + 1);
    dtilde<T>(b, std::span<T>(out));
    return out;
}

template <class T>
std::vector<T> dtilde(const std::vector<T>& b) {
    return dtilde<T>(std::span<const T>(b));
}

// M entries -> M-1 entries: out[l] = b[l+1] - b[l].
template <class T>
void dbar(std::span<const T> b, std::span<T> out) {
    const std::size_t M = b.size();
    if (M < 2) throw std::invalid_argument("dbar: need at least two entries, got " + std::to_string(M));
    if (out.size() != M - 1) throw std::invalid_argument("dbar: output must have M-1 entries");
    for (std::size_t l = 0; l + 1 < M; ++l) out[l] = b[l + 1] - b[l];
}

template <class T>
std::vector<T> dbar(std::span<const T> b) {
    if (b.size() < 2) throw std::invalid_argument("dbar: need at least two entries, got " + std::to_string(b.size()));
    std::vector<T> out(b.size() - 1);
    dbar<T>(b, std::span<T>(out));
    return out;
}

template <class T>
std::vector<T> dbar(const std::vector<T>& b) {
    return dbar<T>(std::span<const T>(b));
}

// Forward difference from M+1 node values to M segment values. Same stencil
// as dbar; kept separate because it maps nodes to elements rather than
// elements to interior nodes, and its sizing error reads differently.
template <class T>
std::vector<T> node_diff(std::span<const T> a) {
    if (a.size() < 2) throw std::invalid_argument("node_diff: need at least two node values");
    std::vector<T> out(a.size() - 1);
    for (std::size_t j = 0; j + 1 < a.size(); ++j) out[j] = a[j + 1] - a[j];
    return out;
}

template <class T>
std::vector<T> node_diff(const std::vector<T>& a) {
    return node_diff<T>(std::span<const T>(a));
}

}  // namespace cosserat
