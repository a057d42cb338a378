//! Bessel, Laguerre and displacement-operator special functions.

use statrs::function::factorial::ln_factorial;

use crate::linalg::{C64, ZERO};

/// Arguments above this use the large-`z` expansion of `ln I₀`.
pub const LOG_I0_SWITCH: f64 = 30.0;

/// `ln I₀(z)` for `z ≥ 0` without overflow.
pub fn log_bessel_i0(z: f64) -> f64 {
    let z = z.abs();
    if z <= LOG_I0_SWITCH {
        // Σ (z²/4)^k / (k!)²
        let q = 0.25 * z * z;
        let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 0.0f64);
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum.ln()
    } else {
        // 1 + Σ ((2k−1)!!)² / (k! (8z)^k)
        let mut series = 1.0;
        let mut term = 1.0;
        for k in 1..=7 {
            let odd = (2 * k - 1) as f64;
            term *= odd * odd / (k as f64 * 8.0 * z);
            series += term;
        }
        z - 0.5 * (2.0 * std::f64::consts::PI * z).ln() + series.ln()
    }
}

/// Generalized Laguerre polynomial `L_n^{(a)}(x)` by three-term recurrence.
pub fn assoc_laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn laguerre(n: usize, x: f64) -> f64 {
    assoc_laguerre(n, 0.0, x)
}

/// `⟨n| exp(−i x p̂) |n⟩ = e^{−x²/4} L_n(x²/2)`.
pub fn displaced_fock_overlap(n: usize, x: f64) -> f64 {
    (-0.25 * x * x).exp() * laguerre(n, 0.5 * x * x)
}

/// Matrix element `⟨m| D(α) |n⟩` of the displacement `exp(α a† − α* a)`.
pub fn displacement_element(m: usize, n: usize, alpha: C64) -> C64 {
    let x = alpha.norm_sqr();
    if alpha == ZERO {
        return if m == n { C64::new(1.0, 0.0) } else { ZERO };
    }
    let gauss = (-0.5 * x).exp();
    if m >= n {
        let d = m - n;
        let scale = (0.5 * (ln_factorial(n as u64) - ln_factorial(m as u64))).exp();
        alpha.powu(d as u32) * (scale * gauss * assoc_laguerre(n, d as f64, x))
    } else {
        let d = n - m;
        let scale = (0.5 * (ln_factorial(m as u64) - ln_factorial(n as u64))).exp();
        (-alpha.conj()).powu(d as u32) * (scale * gauss * assoc_laguerre(m, d as f64, x))
    }
}

/// Log-magnitude of `⟨D₁(γ₁)D₂(γ₂)⟩` in the classically correlated pair
/// state `Σ (1−u²)u^{2n} |nn⟩⟨nn|` with `u = tanh r`.
pub fn classical_char_factor(g1abs: f64, g2abs: f64, r: f64) -> f64 {
    let f = 2.0 * (g1abs * g1abs + g2abs * g2abs);
    let g = 2.0 * g1abs * g2abs;
    -(2.0 * r).cosh() / 4.0 * f + log_bessel_i0(g * (2.0 * r).sinh() / 2.0)
}

/// [`classical_char_factor`] for an arbitrary correlation parameter `u ∈ [0, 1)`.
pub fn classical_char_factor_u(g1abs: f64, g2abs: f64, u: f64) -> f64 {
    let u2 = u * u;
    let x = g1abs * g1abs + g2abs * g2abs;
    -(1.0 + u2) / (2.0 * (1.0 - u2)) * x
        + log_bessel_i0(2.0 * u * g1abs * g2abs / (1.0 - u2))
}

/// Log of `⟨D₁(γ₁)D₂(γ₂)⟩` in the two-mode squeezed vacuum
/// `Σ tanhⁿr / cosh r |nn⟩`. The expectation is real and positive.
pub fn entangled_char_factor(gamma1: C64, gamma2: C64, r: f64) -> f64 {
    -(2.0 * r).cosh() * (gamma1.norm_sqr() + gamma2.norm_sqr()) / 2.0
        + (2.0 * r).sinh() * (gamma1 * gamma2).re
}

/// Occupation weights `(1−u²)u^{2n}` for `n = 0..=n_max`.
pub fn geometric_weights(u: f64, n_max: usize) -> Vec<f64> {
    let u2 = u * u;
    let mut w = Vec::with_capacity(n_max + 1);
    let mut p = 1.0 - u2;
    for _ in 0..=n_max {
        w.push(p);
        p *= u2;
    }
    w
}
