#pragma once

namespace subdif {

/// E_alpha(z) for alpha in (0,1] and z <= 0, accurate to ~1e-10 relative.
///
/// Power series with compensated (Neumaier) summation where the alternating
/// sum is well conditioned (|z|^{1/alpha} <= 5); otherwise the completely
/// monotone spectral representation
///   E_alpha(-x) = (sin(pi alpha)/pi) int_0^inf r^{alpha-1} e^{-r x^{1/alpha}}
///                 / (r^{2alpha} + 2 r^alpha cos(pi alpha) + 1) dr
/// evaluated by adaptive quadrature after substitutions that remove the
/// endpoint singularity. alpha = 1 returns exp(z). Valid for z >= -1e12.
double mittag_leffler(double alpha, double z);

}  // namespace subdif
