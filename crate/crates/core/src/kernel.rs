//! Gaussian kernel: parameter selection, LCU coefficients and the scalar oracle.
//!
//! The truncated sum
//!
//! ```text
//!   K(λ) = (δz/√(2π)) Σ_{l=-L}^{L-1} e^{-(lδz)²/2} e^{ilλ}
//! ```
//!
//! is within `ε` of 1 at `λ = 0` and within `ε` of 0 on `[Δ, 2π−Δ]` once `δz` and
//! `L` are chosen as in [`select_params`]. Everything at the operator level is
//! tested against [`kernel_value`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, pairwise_sum_complex, Real};

/// Default proof constant `c`.
pub const DEFAULT_KERNEL_CONSTANT: f64 = 40.0;

/// Number of uniform points used for sup-norm sweeps over the gap region.
pub const GRID_POINTS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub epsilon: f64,
    pub delta: f64,
    pub c: f64,
    pub dz: f64,
    /// Half-width of the coefficient window; a power of two.
    pub l: usize,
    /// Half-width of the compact Gaussian prepared before the centered transform.
    pub l_star: usize,
    /// Qubits of the coefficient register, `log₂(2L)`.
    pub m: usize,
}

impl KernelParams {
    /// Qubits holding the compact Gaussian, `log₂(2L*)`.
    pub fn k(&self) -> usize {
        (2 * self.l_star).trailing_zeros() as usize
    }

    /// Conditions the parameter choice must satisfy, with a label for each.
    pub fn conditions(&self) -> Vec<(&'static str, bool)> {
        let (e, c, dz, l) = (self.epsilon, self.c, self.dz, self.l as f64);
        let ln = f64::ln;
        vec![
            ("dz <= pi/sqrt(ln(2c/eps))", dz <= std::f64::consts::PI / ln(2.0 * c / e).sqrt()),
            ("dz <= delta/sqrt(2 ln(4c/eps))", dz <= self.delta / (2.0 * ln(4.0 * c / e)).sqrt()),
            ("(L-1) dz >= sqrt(2 ln(4c/eps))", (l - 1.0) * dz >= (2.0 * ln(4.0 * c / e)).sqrt()),
            ("L dz >= sqrt(12 ln(1/eps))", l * dz >= (12.0 * ln(1.0 / e)).sqrt()),
            ("L^2 dz^2 >= 4 ln(1/eps)", (l * dz).powi(2) >= 4.0 * ln(1.0 / e)),
            ("L = 2^(m-1)", self.l.is_power_of_two() && 1usize << (self.m - 1) == self.l),
            ("L* <= L", self.l_star <= self.l),
        ]
    }
}

fn validate_inputs(epsilon: f64, delta: f64, c: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 0.2) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1/5]")));
    }
    if !(delta > 0.0 && delta < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("gap {delta} outside (0, pi)")));
    }
    if !(c > 1.0) {
        return Err(Error::InvalidParameter(format!("kernel constant {c} must exceed 1")));
    }
    Ok(())
}

/// Picks `δz`, the power-of-two `L` and `L*` for precision `epsilon` and gap `delta`.
pub fn select_params(epsilon: f64, delta: f64, c: f64) -> Result<KernelParams> {
    validate_inputs(epsilon, delta, c)?;
    let pi = std::f64::consts::PI;
    let dz = (pi / (2.0 * c / epsilon).ln().sqrt()).min(delta / (2.0 * (4.0 * c / epsilon).ln()).sqrt());

    let chernoff = (2.0 * (4.0 * c / epsilon).ln()).sqrt();
    let width = (12.0 * (1.0 / epsilon).ln()).sqrt();
    let width_sq = 4.0 * (1.0 / epsilon).ln();
    let mut l = 1usize;
    while !((l as f64 - 1.0) * dz >= chernoff && l as f64 * dz >= width && (l as f64 * dz).powi(2) >= width_sq) {
        l *= 2;
    }

    let raw = 1.0 + ((l as f64 * dz / pi) * (c / epsilon).ln().sqrt()).ceil();
    let l_star = (raw as usize).next_power_of_two().min(l);
    let m = (2 * l).trailing_zeros() as usize;
    Ok(KernelParams { epsilon, delta, c, dz, l, l_star, m })
}

/// `α_l = (δz/√(2π)) e^{-(lδz)²/2}` for `−L ≤ l ≤ L−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaTable<T> {
    l: usize,
    alphas: Vec<T>,
}

impl<T: Real> AlphaTable<T> {
    pub fn get(&self, l: i64) -> T {
        self.alphas[(l + self.l as i64) as usize]
    }

    /// Coefficients ordered from `l = −L` to `l = L−1`.
    pub fn as_slice(&self) -> &[T] {
        &self.alphas
    }

    pub fn half_width(&self) -> usize {
        self.l
    }

    pub fn sum(&self) -> T {
        pairwise_sum(&self.alphas)
    }

    /// `(l, α_l)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.alphas.iter().enumerate().map(move |(i, &a)| (i as i64 - self.l as i64, a))
    }
}

fn gaussian_weight<T: Real>(l: i64, dz: T) -> T {
    let x = T::lit(l as f64) * dz;
    dz / (T::TAU()).sqrt() * (-(x * x) / T::lit(2.0)).exp()
}

pub fn alpha_coeffs<T: Real>(params: &KernelParams) -> AlphaTable<T> {
    let dz = T::lit(params.dz);
    let half = params.l as i64;
    let alphas = (-half..half).map(|l| gaussian_weight(l, dz)).collect();
    AlphaTable { l: params.l, alphas }
}

/// Direct summation of `Σ_l coeffs[l] e^{ilλ}` for coefficients indexed from `−L`.
pub fn trig_sum<T: Real>(coeffs: &[T], half_width: usize, lambda: T) -> Complex<T> {
    let terms: Vec<Complex<T>> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let l = T::lit(i as f64 - half_width as f64);
            Complex::from_polar(a, l * lambda)
        })
        .collect();
    pairwise_sum_complex(&terms)
}

/// The truncated kernel `K(λ)`.
pub fn kernel_value<T: Real>(lambda: T, params: &KernelParams) -> Complex<T> {
    let table = alpha_coeffs::<T>(params);
    trig_sum(table.as_slice(), params.l, lambda)
}

/// `points` uniform samples of `[delta, 2π − delta]`, endpoints included.
pub fn gap_grid(delta: f64, points: usize) -> Vec<f64> {
    let hi = std::f64::consts::TAU - delta;
    let n = points.max(2);
    (0..n).map(|i| delta + (hi - delta) * i as f64 / (n - 1) as f64).collect()
}

/// Supremum of `|Σ_l coeffs[l] e^{ilλ}|` over the gap region: a uniform grid of
/// [`GRID_POINTS`] points plus a local refinement around the largest sample.
pub fn sup_over_gap<T: Real>(coeffs: &[T], half_width: usize, delta: f64) -> (f64, f64) {
    let grid = gap_grid(delta, GRID_POINTS);
    let eval = |x: f64| trig_sum(coeffs, half_width, T::lit(x)).norm().as_f64();
    let (mut best_x, mut best) = (grid[0], f64::NEG_INFINITY);
    for &x in &grid {
        let v = eval(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let step = grid[1] - grid[0];
    let lo = (best_x - step).max(delta);
    let hi = (best_x + step).min(std::f64::consts::TAU - delta);
    for i in 0..=64 {
        let x = lo + (hi - lo) * i as f64 / 64.0;
        let v = eval(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    (best, best_x)
}

/// `sup_{λ ∈ [Δ, 2π−Δ]} |K(λ)|`.
pub fn kernel_sup_over_gap(params: &KernelParams) -> (f64, f64) {
    let table = alpha_coeffs::<f64>(params);
    sup_over_gap(table.as_slice(), params.l, params.delta)
}

/// Both sides of the Poisson identity
/// `Σ_k e^{-((λ+2πk)/δz)²/2} = (δz/√(2π)) Σ_l e^{-(lδz)²/2} e^{ilλ}`,
/// truncated at `|k| ≤ K` and `|l| ≤ ⌈K/δz⌉`.
pub fn poisson_check<T: Real>(lambda: T, dz: T, order: usize) -> (T, Complex<T>) {
    let k = order as i64;
    let lhs_terms: Vec<T> = (-k..=k)
        .map(|k| {
            let x = (lambda + T::TAU() * T::lit(k as f64)) / dz;
            (-(x * x) / T::lit(2.0)).exp()
        })
        .collect();
    let l_max = (T::lit(order as f64) / dz).ceil().to_i64().unwrap_or(i64::MAX).max(1);
    let rhs_terms: Vec<Complex<T>> = (-l_max..=l_max)
        .map(|l| Complex::from_polar(gaussian_weight(l, dz), T::lit(l as f64) * lambda))
        .collect();
    (pairwise_sum(&lhs_terms), pairwise_sum_complex(&rhs_terms))
}

/// Mass of the discarded coefficients, `(δz/√(2π)) Σ_{|l| ≥ L} e^{-(lδz)²/2}`, and the
/// Chernoff-type bound `2 e^{-((L−1)δz)²/2}` on it.
pub fn truncation_tail(params: &KernelParams) -> (f64, f64) {
    let dz = params.dz;
    let mut terms = Vec::new();
    let mut l = params.l as i64;
    loop {
        let w = gaussian_weight::<f64>(l, dz);
        // l ≥ L on the right and l < −L on the left
        terms.push(w);
        if l > params.l as i64 {
            terms.push(w);
        }
        if w < 1e-300 || l > params.l as i64 + 1_000_000 {
            break;
        }
        l += 1;
    }
    let bound = 2.0 * (-((params.l as f64 - 1.0) * dz).powi(2) / 2.0).exp();
    (pairwise_sum(&terms), bound)
}

/// `N = Σ_{l=-L*}^{L*-1} e^{-2(lπ/(Lδz))²}`.
pub fn phi_normalization<T: Real>(params: &KernelParams) -> T {
    let terms: Vec<T> = phi_profile::<T>(params).iter().map(|x| *x * *x).collect();
    pairwise_sum(&terms)
}

fn phi_profile<T: Real>(params: &KernelParams) -> Vec<T> {
    let scale = T::PI() / (T::lit(params.l as f64) * T::lit(params.dz));
    let half = params.l_star as i64;
    (-half..half)
        .map(|l| {
            let x = T::lit(l as f64) * scale;
            (-(x * x)).exp()
        })
        .collect()
}

/// Normalized compact Gaussian `|φ⟩`, index `j` holding `l = j − L*`.
pub fn phi_amplitudes<T: Real>(params: &KernelParams) -> Vec<Complex<T>> {
    let profile = phi_profile::<T>(params);
    let norm = phi_normalization::<T>(params).sqrt();
    profile.into_iter().map(|x| Complex::new(x / norm, T::zero())).collect()
}

/// Target Gaussian `|ψ⟩ = Σ_l √α_l |l⟩`, basis index `l + L`.
pub fn psi_amplitudes<T: Real>(params: &KernelParams) -> Vec<Complex<T>> {
    alpha_coeffs::<T>(params).as_slice().iter().map(|a| Complex::new(a.sqrt(), T::zero())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn p(eps: f64, delta: f64) -> KernelParams {
        select_params(eps, delta, DEFAULT_KERNEL_CONSTANT).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(select_params(0.3, 0.5, 40.0).is_err());
        assert!(select_params(0.0, 0.5, 40.0).is_err());
        assert!(select_params(0.1, PI, 40.0).is_err());
        assert!(select_params(0.1, 0.5, 1.0).is_err());
    }

    #[test]
    fn selected_params_meet_all_conditions() {
        for eps in [0.2, 0.1, 1e-2, 1e-3, 1e-6] {
            for delta in [3.0, 0.5, 0.1, 0.02] {
                let params = p(eps, delta);
                for (name, ok) in params.conditions() {
                    assert!(ok, "{name} fails at eps={eps} delta={delta}");
                }
                // L is the smallest power of two: half of it must violate a condition
                if params.l > 1 {
                    let smaller = KernelParams { l: params.l / 2, m: params.m - 1, l_star: 1, ..params.clone() };
                    assert!(smaller.conditions().iter().any(|(_, ok)| !ok));
                }
            }
        }
    }

    #[test]
    fn l_scales_like_log_over_gap() {
        // 10x smaller eps: L grows by at most a factor 2 past the rounding plateau
        for delta in [0.5, 0.1, 0.02] {
            let mut prev = p(1e-2, delta).l;
            for eps in [1e-3, 1e-4, 1e-5, 1e-6] {
                let l = p(eps, delta).l;
                assert!(l >= prev && l <= 2 * prev, "eps={eps} delta={delta}: {prev} -> {l}");
                prev = l;
            }
        }
        // halving the gap doubles L up to power-of-two rounding
        for eps in [1e-1, 1e-2, 1e-3] {
            for delta in [0.8, 0.4, 0.1, 0.05] {
                let (a, b) = (p(eps, delta).l, p(eps, delta / 2.0).l);
                assert!(b == 2 * a || b == 4 * a || b == a, "eps={eps} delta={delta}: {a} -> {b}");
                assert!(b >= a);
            }
        }
    }

    #[test]
    fn l_star_is_logarithmic_and_gap_independent() {
        // L·δz sits below twice its minimum, so L* is capped by a Δ-free envelope
        for eps in [1e-1f64, 1e-2, 1e-3, 1e-5] {
            let c = DEFAULT_KERNEL_CONSTANT;
            let max_dz = PI / (2.0 * c / eps).ln().sqrt();
            let min_width = (12.0 * (1.0 / eps).ln()).sqrt().max((2.0 * (4.0 * c / eps).ln()).sqrt() + max_dz);
            let envelope = (1.0 + (2.0 * min_width / PI * (c / eps).ln().sqrt()).ceil()) as usize;
            for delta in [0.5, 0.05, 0.005] {
                let params = p(eps, delta);
                assert!(params.l_star <= envelope.next_power_of_two(), "eps={eps} delta={delta}");
                assert!(params.l_star.is_power_of_two());
            }
        }
    }

    #[test]
    fn alpha_examples() {
        let params = p(1e-2, 0.5);
        let table = alpha_coeffs::<f64>(&params);
        assert!((table.get(0) - params.dz / TAU.sqrt()).abs() < 1e-16);
        assert_eq!(table.get(1), table.get(-1));
        for l in 1..params.l as i64 {
            assert_eq!(table.get(l), table.get(-l));
            assert!(table.get(l) < table.get(l - 1) && table.get(l) > 0.0);
        }
        let s = table.sum();
        assert!((s - 1.0).abs() <= params.epsilon);
    }

    #[test]
    fn kernel_bounds_and_symmetry() {
        for (eps, delta) in [(1e-1, 0.5), (1e-2, 0.3), (1e-3, 1.0)] {
            let params = p(eps, delta);
            assert!((kernel_value(0.0f64, &params) - Complex::new(1.0, 0.0)).norm() <= eps);
            let (sup, _) = kernel_sup_over_gap(&params);
            assert!(sup <= eps, "sup {sup} at eps={eps}");
            for lam in [0.1, 0.7, 2.0, 5.5] {
                let a = kernel_value(lam, &params);
                let b = kernel_value(-lam, &params);
                assert!((a - b.conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn kernel_in_f32() {
        let params = p(1e-2, 0.5);
        let v = kernel_value(0.0f32, &params);
        assert!((v.re - 1.0).abs() < 1e-2 && v.im.abs() < 1e-5);
    }

    #[test]
    fn tail_bound_holds() {
        for (eps, delta) in [(1e-1, 0.5), (1e-2, 0.1), (1e-3, 0.02)] {
            let params = p(eps, delta);
            let (tail, bound) = truncation_tail(&params);
            assert!(tail <= bound && bound <= eps / (2.0 * params.c), "{tail} {bound}");
        }
    }

    #[test]
    fn poisson_examples() {
        let (lhs, rhs) = poisson_check(0.0f64, 0.5, 20);
        assert!((rhs - Complex::new(lhs, 0.0)).norm() <= 1e-12);
        for lam in [0.3, 1.7, -2.5] {
            let (l1, r1) = poisson_check(lam, 0.5f64, 20);
            let (l2, r2) = poisson_check(lam + TAU, 0.5f64, 20);
            assert!((l1 - l2).abs() <= 1e-12 && (r1 - r2).norm() <= 1e-12);
        }
        let (lhs, rhs) = poisson_check(0.4f64, 10.0, 20);
        assert!((rhs - Complex::new(lhs, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn phi_examples() {
        let params = p(1e-3, 0.05);
        let phi = phi_amplitudes::<f64>(&params);
        assert_eq!(phi.len(), 2 * params.l_star);
        let norm: f64 = phi.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let ls = params.l_star;
        for l in 1..ls {
            assert_eq!(phi[ls + l], phi[ls - l]);
        }
        // reverse-order summation oracle for the normalization
        let scale = PI / (params.l as f64 * params.dz);
        let mut oracle = 0.0;
        for l in (-(ls as i64)..ls as i64).rev() {
            oracle += (-2.0 * (l as f64 * scale).powi(2)).exp();
        }
        assert!((phi_normalization::<f64>(&params) - oracle).abs() < 1e-12);
    }

    #[test]
    fn psi_examples() {
        let params = p(1e-2, 0.5);
        let psi = psi_amplitudes::<f64>(&params);
        let alpha = alpha_coeffs::<f64>(&params);
        for (i, (_, a)) in alpha.iter().enumerate() {
            assert!((psi[i].re - a.sqrt()).abs() < 1e-15);
        }
        let n2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        assert!((n2 - 1.0).abs() <= params.epsilon);
        let peak = psi.iter().enumerate().max_by(|a, b| a.1.re.total_cmp(&b.1.re)).unwrap().0;
        assert_eq!(peak, params.l);
    }
}
