//! Adaptive Gauss–Kronrod integration and Gauss–Laguerre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate on `[a, b]` with `|K15 − G7|` as error.
pub fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection until the summed error estimate is below
/// `max(rel_tol·|I|, abs_tol)`.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    let (value, err) = gauss_kronrod_15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, err });
    let (mut total, mut total_err) = (value, err);
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature {
                target: rel_tol,
                estimate: f64::NAN,
                intervals: heap.len(),
            });
        }
        if total_err <= (rel_tol * total.abs()).max(abs_tol) {
            // re-sum to limit drift from the running updates
            return Ok(heap.iter().map(|p| p.value).sum());
        }
        if heap.len() >= max_intervals {
            return Err(Error::Quadrature {
                target: rel_tol,
                estimate: total_err / total.abs().max(f64::MIN_POSITIVE),
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gauss_kronrod_15(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
    }
}

/// Nodes and weights of the `n`-point rule for `∫₀^∞ x^α e^{−x} f(x) dx`,
/// from the Golub–Welsch eigenproblem.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = 2.0 * k as f64 + alpha + 1.0;
        if k + 1 < n {
            let b = ((k as f64 + 1.0) * (k as f64 + 1.0 + alpha)).sqrt();
            jac[(k, k + 1)] = b;
            jac[(k + 1, k)] = b;
        }
    }
    let eig = jac.symmetric_eigen();
    let mu0 = gamma(alpha + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| (eig.eigenvalues[j], mu0 * eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        let (v, e) = gauss_kronrod_15(&|x: f64| x.powi(6) - 2.0 * x, 0.0, 2.0);
        assert!((v - (128.0 / 7.0 - 4.0)).abs() < 1e-12);
        assert!(e < 1e-10);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| 1.0 / (1e-4 + (x - 0.3).powi(2));
        let exact = 100.0 * ((0.7f64 / 1e-2).atan() + (0.3f64 / 1e-2).atan());
        let v = integrate_adaptive(f, 0.0, 1.0, 1e-10, 0.0, 1000).unwrap();
        assert!(((v - exact) / exact).abs() < 1e-9);
        assert_eq!(integrate_adaptive(|_| 0.0, 0.0, 1.0, 1e-8, 0.0, 10).unwrap(), 0.0);
    }

    #[test]
    fn adaptive_reports_failure() {
        let r = integrate_adaptive(|x: f64| (1.0 / x).sin() / x, 1e-9, 1.0, 1e-12, 0.0, 4);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn laguerre_rule_moments() {
        let (x, w) = gauss_laguerre(1, 1.0);
        // one node at the mean of x e^{−x}
        assert!((x[0] - 2.0).abs() < 1e-14 && (w[0] - 1.0).abs() < 1e-14);
        let (x, w) = gauss_laguerre(6, 1.0);
        // ∫ x·x^k e^{−x} = (k+1)!
        for k in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            let exact: f64 = (1..=k + 1).map(|j| j as f64).product();
            assert!(((q - exact) / exact).abs() < 1e-10, "k={k}");
        }
        let (_, w) = gauss_laguerre(4, 0.5);
        assert!((w.iter().sum::<f64>() - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }
}
