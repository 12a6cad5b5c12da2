#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sphens/geometry.hpp"
#include "sphens/linalg.hpp"
#include "sphens/rng.hpp"

namespace sphens {

enum class SamplerKind { MatrixModel, HkpvDpp, UniformIid };

/// CLI names: "matrix", "dpp", "iid".
std::string_view sampler_name(SamplerKind kind) noexcept;
std::optional<SamplerKind> parse_sampler(std::string_view name) noexcept;
SeedTag sampler_tag(SamplerKind kind) noexcept;

/// Proposal budget for a single HKPV acceptance.
inline constexpr std::uint64_t kHkpvProposalBudget = 10'000'000;

/// n x n matrix of standard complex Gaussians (real and imaginary parts N(0, 1/2)).
ComplexMatrix sample_gaussian_matrix(std::size_t n, std::uint64_t seed);

/// Eigenvalues of A^{-1} B for independent Gaussian A, B (A then B from one
/// stream), mapped to the sphere by inverse stereographic projection.
Configuration sample_matrix_model(std::size_t n, std::uint64_t seed);

/// Sequential projection-DPP sampler with uniform-on-sphere proposals.
Configuration sample_dpp_hkpv(std::size_t n, std::uint64_t seed);

/// n independent uniform points on the sphere.
Configuration sample_uniform_iid(std::size_t n, std::uint64_t seed);

/// Q_k ~ BetaPrime(k+1, n-k) for k = 0..n-1, independent.
std::vector<double> sample_moduli_squared(std::size_t n, std::uint64_t seed);

/// Dispatch on kind.
Configuration sample(SamplerKind kind, std::size_t n, std::uint64_t seed);

}  // namespace sphens
