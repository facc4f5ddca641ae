//! The search eigenphase `λ` and the quantities built on it.
//!
//! With `U₀ = U·R` and `R` a rank-one reflection on the origin, an eigenphase
//! `λ` of `U₀` not shared with `U` solves
//!
//! ```text
//! F(λ) = Σ_j w_j · cot((λ − φ_j)/2) = 0,     w_j = |⟨0|v_j⟩|²,
//! ```
//!
//! summed over an eigenbasis of `U` (the imaginary part of the completeness
//! identity; its real part holds identically). `F` falls from `+∞` to `−∞`
//! between consecutive weighted poles `φ_j`, so each gap holds exactly one
//! root. At `θ = π/4` the search eigenphase is the root in `(0, φ_min)`.
//!
//! Everything here evaluates finite sums exactly. The large-`n` formulas
//! (`λ ≈ 1/(nC)`, the success-probability curve, the overlaps) are exposed
//! as model quantities for comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::scalar::{Cplx, Real};
use crate::spectral::{
    self, coefficients, eigvec, numerical_spectrum, wrap_phase, zero_phase_floor, MomentumPair, PhaseClass,
};
use crate::walk::WalkConfig;

/// Number of grid points used to bracket the root in `(0, φ_min)`.
pub const BRACKET_GRID: usize = 256;
/// Absolute width at which bisection stops.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// One summand of the secular function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularTerm<T> {
    pub k: usize,
    pub l: usize,
    /// `None` for numerically obtained terms.
    pub class: Option<PhaseClass>,
    /// `|⟨0|v⟩|²` in `[0, 1]`.
    pub weight: T,
    /// Sign-adjusted eigenphase in `(−π, π]`.
    pub phase: T,
}

/// Weights and eigenphases of a full eigenbasis of `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularTable<T: Real> {
    pub n: usize,
    pub terms: Vec<SecularTerm<T>>,
}

#[inline]
fn cot_half<T: Real>(x: T) -> T {
    let h = x * T::lit(0.5);
    h.cos() / h.sin()
}

/// `1 − cos x`, evaluated as `2 sin²(x/2)`.
#[inline]
fn one_minus_cos<T: Real>(x: T) -> T {
    let s = (x * T::lit(0.5)).sin();
    T::lit(2.0) * s * s
}

impl<T: Real> SecularTable<T> {
    /// Closed-form table at `θ = π/4`, one term per momentum `(k, l)`.
    pub fn closed_form(n: usize) -> Result<Self> {
        let terms = MomentumPair::all(n)?
            .into_iter()
            .map(|m| {
                let v = eigvec::<T>(m)?;
                Ok(SecularTerm {
                    k: m.k(),
                    l: m.l(),
                    class: Some(PhaseClass::of(m)),
                    weight: v[0].norm_sqr(),
                    phase: spectral::eigenphase(m),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, terms })
    }

    /// Table from numerically projected blocks of the configured `U`.
    pub fn numerical(lattice: LatticeSpec, config: &WalkConfig<T>) -> Result<Self> {
        let terms = numerical_spectrum(lattice, config)?
            .into_iter()
            .map(|e| SecularTerm { k: e.momentum.k(), l: e.momentum.l(), class: None, weight: e.weight(), phase: e.phi })
            .collect();
        Ok(Self { n: lattice.n(), terms })
    }

    /// `Σ w` over the table; equals `2n²` for a complete eigenbasis.
    pub fn total_weight(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| acc + t.weight)
    }

    /// `F(λ) = Σ w · cot((λ − φ)/2)`, all terms.
    pub fn secular(&self, lambda: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| acc + t.weight * cot_half(lambda - t.phase))
    }

    /// Weighted poles of `F` in increasing order, phases within `merge` of
    /// each other combined and weights below `drop` discarded.
    pub fn poles(&self, merge: T, drop: T) -> Vec<(T, T)> {
        let mut raw: Vec<(T, T)> = self.terms.iter().map(|t| (t.phase, t.weight)).collect();
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite phases"));
        let mut merged: Vec<(T, T)> = Vec::new();
        for (p, w) in raw {
            match merged.last_mut() {
                Some(last) if (p - last.0).abs() <= merge => last.1 += w,
                _ => merged.push((p, w)),
            }
        }
        // phases near −π and π are the same point on the circle
        if merged.len() > 1 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if (first.0 + T::PI() + T::PI() - last.0).abs() <= merge {
                merged.last_mut().unwrap().1 += first.1;
                merged.remove(0);
            }
        }
        merged.retain(|&(_, w)| w > drop);
        merged
    }
}

/// The secular function at `θ = π/4` split three ways: the `2n − 1`
/// eigenvalues `−1` carrying weight (a `tan` term), the diagonal momenta
/// `k = l < n`, and the Generic double sum.
#[derive(Debug, Clone)]
pub struct SecularSplit<T: Real> {
    n: usize,
    diagonal_shifts: Vec<T>,
    generic: Vec<(T, T)>,
}

impl<T: Real> SecularSplit<T> {
    pub fn new(n: usize) -> Result<Self> {
        LatticeSpec::new(n)?;
        let n_t = T::from_usize_lossy(n);
        let diagonal_shifts = (0..n)
            .filter(|&k| 2 * k != n)
            .map(|k| T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / n_t)
            .collect();
        let mut generic = Vec::new();
        for m in MomentumPair::all(n)? {
            if PhaseClass::of(m) == PhaseClass::Generic {
                generic.push((eigvec::<T>(m)?[0].norm_sqr(), spectral::eigenphase::<T>(m)));
            }
        }
        Ok(Self { n, diagonal_shifts, generic })
    }

    pub fn eval(&self, lambda: T) -> T {
        let n_t = T::from_usize_lossy(self.n);
        let pi_terms = (T::one() - T::lit(2.0) * n_t) * (lambda * T::lit(0.5)).tan();
        let diagonal = self.diagonal_shifts.iter().fold(T::zero(), |acc, &s| acc + cot_half(lambda + s));
        let generic = self.generic.iter().fold(T::zero(), |acc, &(w, p)| acc + w * cot_half(lambda - p));
        pi_terms + diagonal + generic
    }
}

/// [`SecularSplit::eval`] for a single `λ`.
pub fn secular_split<T: Real>(n: usize, lambda: T) -> Result<T> {
    Ok(SecularSplit::new(n)?.eval(lambda))
}

/// Bisection on a decreasing function with `f(lo) > 0 > f(hi)`.
fn bisect_decreasing<T: Real>(mut lo: T, mut hi: T, tol: T, f: impl Fn(T) -> T) -> T {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) * T::lit(0.5);
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) * T::lit(0.5)
}

fn root_tolerance<T: Real>(scale: T) -> T {
    T::lit(ROOT_TOLERANCE).max(T::epsilon() * T::lit(4.0) * scale)
}

/// The search eigenphase at `θ = π/4`, default ordering, marked origin: the
/// root of the split secular function in `(0, φ_min)`, bracketed on a
/// 256-point grid and bisected to `1e-12`.
pub fn lambda_root<T: Real>(n: usize) -> Result<T> {
    let lattice = LatticeSpec::new(n)?;
    let phi_min: T = spectral::phi_min(lattice, &WalkConfig::unmarked())?;
    let split = SecularSplit::<T>::new(n)?;
    let f = |x: T| split.eval(x);
    let step = phi_min / T::from_usize_lossy(BRACKET_GRID + 1);
    let mut prev_x = step;
    let mut prev_f = f(prev_x);
    for i in 2..=BRACKET_GRID {
        let x = step * T::from_usize_lossy(i);
        let fx = f(x);
        if prev_f > T::zero() && fx <= T::zero() {
            return Ok(bisect_decreasing(prev_x, x, root_tolerance(x), f));
        }
        prev_x = x;
        prev_f = fx;
    }
    Err(Error::NoRoot { lo: 0.0, hi: phi_min.to_f64_lossy() })
}

/// Smallest positive root of the secular function for any angle and
/// ordering, using numerically projected blocks. At `θ = π/4` with the
/// default ordering this is the same root as [`lambda_root`].
pub fn lambda_general<T: Real>(lattice: LatticeSpec, config: &WalkConfig<T>) -> Result<T> {
    let table = SecularTable::numerical(lattice, config)?;
    smallest_positive_root(&table)
}

/// Smallest root of `F` above the zero-phase floor, searching the gaps
/// between weighted poles in increasing order.
pub fn smallest_positive_root<T: Real>(table: &SecularTable<T>) -> Result<T> {
    let merge = T::lit(1e-10).max(T::epsilon().sqrt() * T::lit(1e-2));
    let drop = T::lit(1e-13).max(T::epsilon() * T::lit(100.0));
    let poles = table.poles(merge, drop);
    if poles.is_empty() {
        return Err(Error::NoRoot { lo: -std::f64::consts::PI, hi: std::f64::consts::PI });
    }
    let two_pi = T::PI() + T::PI();
    let floor = zero_phase_floor::<T>();
    let f = |x: T| table.secular(x);
    let count = poles.len();
    for i in 0..count {
        let lo = poles[i].0;
        let hi = if i + 1 < count { poles[i + 1].0 } else { poles[0].0 + two_pi };
        if hi <= floor {
            continue;
        }
        let root = bisect_decreasing(lo, hi, root_tolerance(two_pi), f);
        let phase = wrap_phase(root);
        if phase > floor {
            return Ok(phase);
        }
    }
    Err(Error::NoRoot { lo: 0.0, hi: std::f64::consts::PI })
}

/// `C²` by direct summation over Generic momenta:
/// `(1/2n²) Σ |⟨0|v⟩|² / (1 − cos φ)`.
pub fn c2_direct<T: Real>(n: usize) -> Result<T> {
    let mut sum = T::zero();
    for m in MomentumPair::all(n)? {
        if PhaseClass::of(m) == PhaseClass::Generic {
            let v = eigvec::<T>(m)?;
            sum += v[0].norm_sqr() / one_minus_cos(spectral::phi::<T>(m).1);
        }
    }
    let n_t = T::from_usize_lossy(n);
    Ok(sum / (T::lit(2.0) * n_t * n_t))
}

/// `b / (sin φ (1 − cos φ))` for a Generic momentum, `None` otherwise.
pub fn symmetry_summand<T: Real>(m: MomentumPair) -> Option<T> {
    if PhaseClass::of(m) != PhaseClass::Generic {
        return None;
    }
    let p = spectral::phi::<T>(m).1;
    Some(coefficients::<T>(m).b / (p.sin() * one_minus_cos(p)))
}

/// Sum of [`symmetry_summand`] over all Generic momenta; vanishes because
/// the summand is odd under `(k, l) → (n − k, n − l)`.
pub fn symmetry_sum<T: Real>(n: usize) -> Result<T> {
    Ok(MomentumPair::all(n)?.into_iter().filter_map(symmetry_summand::<T>).fold(T::zero(), |a, b| a + b))
}

/// `f_kl = cos(πk/n) + cos(πl/n)`.
pub fn f_kl<T: Real>(k: usize, l: usize, n: usize) -> T {
    let step = T::PI() / T::from_usize_lossy(n);
    (step * T::from_usize_lossy(k)).cos() + (step * T::from_usize_lossy(l)).cos()
}

/// `(1/n²) Σ_{0≤k,l<n, (k,l)≠(0,0)} 1/(2 − f_kl)`, with `2 − f_kl` written
/// as `2 sin²(πk/2n) + 2 sin²(πl/2n)`.
pub fn c2_reduced<T: Real>(n: usize) -> Result<T> {
    LatticeSpec::new(n)?;
    let half_step = T::PI() / T::from_usize_lossy(2 * n);
    let sq: Vec<T> = (0..n)
        .map(|k| {
            let s = (half_step * T::from_usize_lossy(k)).sin();
            T::lit(2.0) * s * s
        })
        .collect();
    let mut sum = T::zero();
    for k in 0..n {
        for l in 0..n {
            if k != 0 || l != 0 {
                sum += T::one() / (sq[k] + sq[l]);
            }
        }
    }
    let n_t = T::from_usize_lossy(n);
    Ok(sum / (n_t * n_t))
}

/// `I(n) = Σ_{0≤k,l<n, (k,l)≠(0,0)} 1/(k² + l²)`.
pub fn i_n<T: Real>(n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::DegenerateLattice(n));
    }
    let mut sum = T::zero();
    for k in 0..n {
        for l in 0..n {
            if k != 0 || l != 0 {
                sum += T::one() / T::from_usize_lossy(k * k + l * l);
            }
        }
    }
    Ok(sum)
}

/// `(2 I(n)/π², I(n)/2)`: the leading-order sandwich around `C²`.
pub fn c2_bounds<T: Real>(n: usize) -> Result<(T, T)> {
    let i = i_n::<T>(n)?;
    Ok((T::lit(2.0) * i / (T::PI() * T::PI()), i * T::lit(0.5)))
}

/// Model `λ ≈ 1/(nC)` with `C² = c2_direct(n)`; the positive root.
pub fn lambda_approx<T: Real>(n: usize) -> Result<T> {
    let c = c2_direct::<T>(n)?.sqrt();
    Ok(T::one() / (T::from_usize_lossy(n) * c))
}

/// Model success probability `(n²λ²/2) sin²(λ(t + ½))`.
pub fn success_model<T: Real>(n: usize, lambda: T, t: T) -> T {
    let n_t = T::from_usize_lossy(n);
    let s = (lambda * (t + T::lit(0.5))).sin();
    n_t * n_t * lambda * lambda * T::lit(0.5) * s * s
}

/// Model peak `n²λ²/2`.
pub fn success_peak<T: Real>(n: usize, lambda: T) -> T {
    let n_t = T::from_usize_lossy(n);
    n_t * n_t * lambda * lambda * T::lit(0.5)
}

/// `round(π/(2λ))`.
pub fn optimal_time<T: Real>(lambda: T) -> usize {
    (T::PI() / (T::lit(2.0) * lambda)).round().to_usize().unwrap_or(usize::MAX)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlaps<T: Real> {
    /// `|⟨0,0|λ⟩| ≈ nλ/2`.
    pub marked: T,
    /// `⟨λ|ψ₀⟩ ≈ −i e^{iλ/2}/√2`.
    pub initial: Cplx<T>,
}

/// Leading-order model overlaps of the search eigenvector.
pub fn overlaps<T: Real>(n: usize, lambda: T) -> Overlaps<T> {
    let half = lambda * T::lit(0.5);
    let initial = Cplx::new(T::zero(), -T::one()) * Cplx::from_polar(T::one(), half) / T::SQRT_2();
    Overlaps { marked: T::from_usize_lossy(n) * half, initial }
}

/// Per-`n` summary of the eigenphase analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsRecord {
    pub n: usize,
    pub lambda_exact: f64,
    pub lambda_approx: f64,
    pub c2_direct: f64,
    pub c2_reduced: f64,
    pub i_n: f64,
    pub phi_min: f64,
    pub overlap_marked: f64,
    pub t_opt: f64,
    pub p_model: f64,
}

impl AsymptoticsRecord {
    pub fn compute(n: usize) -> Result<Self> {
        let lattice = LatticeSpec::new(n)?;
        let lambda = lambda_root::<f64>(n)?;
        let c2 = c2_direct::<f64>(n)?;
        Ok(Self {
            n,
            lambda_exact: lambda,
            lambda_approx: 1.0 / (n as f64 * c2.sqrt()),
            c2_direct: c2,
            c2_reduced: c2_reduced(n)?,
            i_n: i_n(n)?,
            phi_min: spectral::phi_min(lattice, &WalkConfig::unmarked())?,
            overlap_marked: overlaps(n, lambda).marked,
            t_opt: std::f64::consts::PI / (2.0 * lambda),
            p_model: success_peak(n, lambda),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn completeness_of_weights() {
        for n in 2..10 {
            let t = SecularTable::<f64>::closed_form(n).unwrap();
            assert!((t.total_weight() - 2.0 * (n * n) as f64).abs() < 1e-10);
            for term in &t.terms {
                assert!((0.0..=1.0 + 1e-12).contains(&term.weight));
            }
        }
    }

    #[test]
    fn split_matches_unsplit() {
        for n in [2, 3, 4, 5, 8, 11] {
            let t = SecularTable::<f64>::closed_form(n).unwrap();
            for lambda in [0.013, 0.05, 0.2, 0.37] {
                let a = t.secular(lambda);
                let b = secular_split::<f64>(n, lambda).unwrap();
                assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "n={n} λ={lambda}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lambda_root_inside_bracket_with_small_residual() {
        for n in 4..=32 {
            let lam = lambda_root::<f64>(n).unwrap();
            let pm: f64 = spectral::phi_min(LatticeSpec::new(n).unwrap(), &WalkConfig::unmarked()).unwrap();
            assert!(lam > 0.0 && lam < pm, "n={n}");
            let table = SecularTable::<f64>::closed_form(n).unwrap();
            assert!(table.secular(lam).abs() < 1e-9 * (n * n) as f64);
        }
    }

    #[test]
    fn lambda_general_agrees_at_quarter_turn() {
        for n in [2, 3, 5, 8] {
            let a = lambda_root::<f64>(n).unwrap();
            let b = lambda_general::<f64>(LatticeSpec::new(n).unwrap(), &WalkConfig::default()).unwrap();
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn reduced_sum_small_case() {
        assert!((c2_reduced::<f64>(2).unwrap() - 0.625).abs() < 1e-15);
        assert!((f_kl::<f64>(0, 0, 7) - 2.0).abs() < 1e-15);
        assert!((f_kl::<f64>(0, 1, 2) - 1.0).abs() < 1e-15);
        assert!(f_kl::<f64>(1, 1, 2).abs() < 1e-15);
    }

    #[test]
    fn i_n_small_case_and_monotone() {
        assert!((i_n::<f64>(2).unwrap() - 2.5).abs() < 1e-15);
        let mut prev = 0.0;
        for n in 2..64 {
            let v = i_n::<f64>(n).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(i_n::<f64>(1).is_err());
    }

    #[test]
    fn symmetry_sum_vanishes() {
        assert!(symmetry_sum::<f64>(4).unwrap().abs() < 1e-10);
        assert!(symmetry_sum::<f64>(32).unwrap().abs() < 1e-9 * 1024.0);
    }

    #[test]
    fn model_formulas() {
        let n = 10;
        let lam: f64 = 0.05;
        let t0 = success_model(n, lam, 0.0);
        assert!((t0 - (n * n) as f64 * lam.powi(2) / 2.0 * (lam / 2.0).sin().powi(2)).abs() < 1e-15);
        let peak = success_model(n, lam, PI / (2.0 * lam) - 0.5);
        assert!((peak - success_peak(n, lam)).abs() < 1e-15);
        assert_eq!(optimal_time(FRAC_PI_2), 1);
        let o = overlaps(n, lam);
        assert!((o.marked - 0.25).abs() < 1e-15);
        assert!((2.0 * o.initial.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(overlaps(n, 0.0).marked == 0.0);
    }

    #[test]
    fn single_precision_root() {
        let a = lambda_root::<f32>(6).unwrap() as f64;
        let b = lambda_root::<f64>(6).unwrap();
        assert!((a - b).abs() / b < 1e-4, "{a} vs {b}");
    }
}
