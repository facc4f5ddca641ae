//! Momentum-space analysis of the unmarked evolution `U`.
//!
//! For each momentum `(k, l)` with `0 ≤ k, l < 2n` the plane-wave states
//! `|ψ⁰_kl⟩` (even sublattice) and `|ψ¹_kl⟩` (odd sublattice) span a plane
//! invariant under `U`. At `θ = π/4` with the default ordering the 2×2 block
//! of `U` on that plane is known in closed form,
//!
//! ```text
//! U_red = [[A, B], [−B*, A*]],   A = a + ib,   B = c + id,
//! ```
//!
//! with `a, b, c, d` trigonometric polynomials in `k̃ = πk/n`, `l̃ = πl/n`.
//! For other angles or orderings the block is obtained numerically by
//! projecting the matrix-free operator onto the plane.
//!
//! Momenta `(k, l)` and `(k+n, l+n)` label the same plane (the odd basis
//! vector flips sign). The eigenbasis takes the `e^{+iφ}` eigenvector from
//! `k < n` and the `e^{−iφ}` one from `k ≥ n`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::scalar::{cplx, Cplx, Real};
use crate::walk::{StateVector, Walk, WalkConfig};

/// A 2×2 complex matrix, row-major.
pub type Mat2<T> = [[Cplx<T>; 2]; 2];

/// A vector in a reduced plane: components along `|ψ⁰⟩` and `|ψ¹⟩`.
pub type Vec2<T> = [Cplx<T>; 2];

/// Reduces an angle into `(−π, π]`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x % two_pi;
    if y <= -T::PI() {
        y += two_pi;
    } else if y > T::PI() {
        y -= two_pi;
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MomentumPair {
    k: usize,
    l: usize,
    n: usize,
}

impl MomentumPair {
    pub fn new(k: usize, l: usize, n: usize) -> Result<Self> {
        if n <= 1 {
            return Err(Error::DegenerateLattice(n));
        }
        if k >= 2 * n || l >= 2 * n {
            return Err(Error::MomentumOutOfRange { k, l, n });
        }
        Ok(Self { k, l, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `πk/n`.
    pub fn tilde_k<T: Real>(&self) -> T {
        T::PI() * T::from_usize_lossy(self.k) / T::from_usize_lossy(self.n)
    }

    /// `πl/n`.
    pub fn tilde_l<T: Real>(&self) -> T {
        T::PI() * T::from_usize_lossy(self.l) / T::from_usize_lossy(self.n)
    }

    /// Whether this momentum takes the `+φ` eigenvector (`k < n`).
    pub fn is_lower(&self) -> bool {
        self.k < self.n
    }

    /// All `4n²` momenta, `k` outer.
    pub fn all(n: usize) -> Result<Vec<MomentumPair>> {
        let lattice = LatticeSpec::new(n)?;
        let side = lattice.side();
        Ok((0..side).flat_map(|k| (0..side).map(move |l| MomentumPair { k, l, n })).collect())
    }
}

impl fmt::Display for MomentumPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; n={})", self.k, self.l, self.n)
    }
}

/// Closed-form block coefficients at `θ = π/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBlock<T: Real> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> ReducedBlock<T> {
    pub fn big_a(&self) -> Cplx<T> {
        cplx(self.a, self.b)
    }

    pub fn big_b(&self) -> Cplx<T> {
        cplx(self.c, self.d)
    }

    /// `[[A, B], [−B*, A*]]`.
    pub fn matrix(&self) -> Mat2<T> {
        let a = self.big_a();
        let b = self.big_b();
        [[a, b], [-b.conj(), a.conj()]]
    }

    /// `|A|² + |B|²`.
    pub fn determinant(&self) -> T {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }
}

pub fn coefficients<T: Real>(m: MomentumPair) -> ReducedBlock<T> {
    let kt: T = m.tilde_k();
    let lt: T = m.tilde_l();
    let half = T::lit(0.5);
    let f = kt.cos() + lt.cos();
    ReducedBlock {
        a: half * f * f - T::one(),
        b: -half * (kt.sin() + lt.sin()) * f,
        c: half * (lt - kt).sin() * f,
        d: half * ((kt - lt).cos() - T::one()) * f,
    }
}

pub fn reduced_operator<T: Real>(m: MomentumPair) -> Mat2<T> {
    coefficients(m).matrix()
}

/// Which branch of the eigenphase formula applies to a momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseClass {
    /// `k ± l ≡ n (mod 2n)`: eigenvalue −1.
    TrivialPi,
    /// `k = l`: `φ = −2πk/n`.
    Diagonal,
    Generic,
}

impl PhaseClass {
    pub fn of(m: MomentumPair) -> Self {
        let two_n = 2 * m.n;
        let sum = (m.k + m.l) % two_n;
        let diff = (m.k + two_n - m.l) % two_n;
        if sum == m.n || diff == m.n {
            PhaseClass::TrivialPi
        } else if m.k == m.l {
            PhaseClass::Diagonal
        } else {
            PhaseClass::Generic
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseClass::TrivialPi => "trivial_pi",
            PhaseClass::Diagonal => "diagonal",
            PhaseClass::Generic => "generic",
        }
    }
}

impl fmt::Display for PhaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sin φ` for a Generic momentum, as `√(b² + c² + d²) = √(1 − a²)`.
fn generic_sin<T: Real>(block: &ReducedBlock<T>) -> T {
    (block.b * block.b + block.c * block.c + block.d * block.d).sqrt()
}

/// Unsigned eigenphase `φ_kl` of the closed-form branches, in `(−π, π]`.
///
/// The Generic branch evaluates `arccos(a)` as `atan2(sin φ, a)`, which is
/// accurate near `a = 1`.
pub fn phi<T: Real>(m: MomentumPair) -> (PhaseClass, T) {
    let class = PhaseClass::of(m);
    let value = match class {
        PhaseClass::TrivialPi => T::PI(),
        PhaseClass::Diagonal => {
            let two_n = 2 * m.n;
            // −2πk/n ≡ −π·(2k mod 2n)/n
            let r = (2 * m.k) % two_n;
            wrap_phase(-T::PI() * T::from_usize_lossy(r) / T::from_usize_lossy(m.n))
        }
        PhaseClass::Generic => {
            let block = coefficients::<T>(m);
            generic_sin(&block).atan2(block.a)
        }
    };
    (class, value)
}

/// Eigenphase of the eigenbasis vector attached to `m`: `φ_kl` for `k < n`,
/// `−φ_kl` for `k ≥ n`, in `(−π, π]`.
pub fn eigenphase<T: Real>(m: MomentumPair) -> T {
    let (_, p) = phi::<T>(m);
    if m.is_lower() {
        p
    } else {
        wrap_phase(-p)
    }
}

/// Reduced eigenvector attached to `m`.
///
/// Generic momenta with `k < n` use the closed form
/// `(√(b+s), (d+ic)/√(b+s)) / √(2s)`, `s = sin φ`; for `k ≥ n` the
/// `e^{−iφ}` eigenvector `(−v₁*, v₀*)` is returned. Trivial classes give
/// `(1, 0)` for `k < n` and `(0, 1)` otherwise. When `b + s` is too small
/// for the closed form the vector is built from a row of `U_red − e^{iφ}`.
pub fn eigvec<T: Real>(m: MomentumPair) -> Result<Vec2<T>> {
    let zero = cplx(T::zero(), T::zero());
    let one = cplx(T::one(), T::zero());
    if PhaseClass::of(m) != PhaseClass::Generic {
        return Ok(if m.is_lower() { [one, zero] } else { [zero, one] });
    }
    let block = coefficients::<T>(m);
    let s = generic_sin(&block);
    let b_plus_s = block.b + s;
    let plus = if b_plus_s > T::lit(1e-12) {
        let root = b_plus_s.sqrt();
        let scale = T::one() / (T::lit(2.0) * s).sqrt();
        [cplx(root * scale, T::zero()), cplx(block.d, block.c) / root * scale]
    } else {
        let p = block.a.acos();
        kernel_vector(&block.matrix(), Cplx::from_polar(T::one(), p)).ok_or(Error::DegenerateEigenvector { k: m.k, l: m.l })?
    };
    Ok(if m.is_lower() { plus } else { [-plus[1].conj(), plus[0].conj()] })
}

/// Unit vector `v` with `(M − μ)v ≈ 0`, from whichever row of `M − μ` is
/// larger. `None` if `M − μ` vanishes.
fn kernel_vector<T: Real>(m: &Mat2<T>, mu: Cplx<T>) -> Option<Vec2<T>> {
    let from_first = [m[0][1], mu - m[0][0]];
    let from_second = [mu - m[1][1], m[1][0]];
    let n1 = from_first[0].norm_sqr() + from_first[1].norm_sqr();
    let n2 = from_second[0].norm_sqr() + from_second[1].norm_sqr();
    let (v, norm_sqr) = if n1 >= n2 { (from_first, n1) } else { (from_second, n2) };
    if norm_sqr <= T::epsilon() * T::epsilon() {
        return None;
    }
    let norm = norm_sqr.sqrt();
    Some([v[0] / norm, v[1] / norm])
}

pub fn mat2_mul_vec<T: Real>(m: &Mat2<T>, v: &Vec2<T>) -> Vec2<T> {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// `|ψ⁰_kl⟩` (`which = 0`, even sublattice) or `|ψ¹_kl⟩` (`which = 1`):
/// amplitude `ω^{kx+ly}/(√2 n)` on vertices of parity `which`,
/// `ω = e^{πi/n}`.
pub fn basis_state<T: Real>(m: MomentumPair, which: usize) -> Result<StateVector<T>> {
    let lattice = LatticeSpec::new(m.n)?;
    let two_n = lattice.side();
    let scale = T::one() / (T::SQRT_2() * T::from_usize_lossy(m.n));
    let step = T::PI() / T::from_usize_lossy(m.n);
    let amplitudes = lattice
        .vertices()
        .map(|v| {
            if v.parity() == which % 2 {
                let exponent = (m.k * v.x + m.l * v.y) % two_n;
                Cplx::from_polar(scale, step * T::from_usize_lossy(exponent))
            } else {
                cplx(T::zero(), T::zero())
            }
        })
        .collect();
    StateVector::from_amplitudes(lattice, amplitudes)
}

/// `⟨0|v⟩·|ψ⁰_kl⟩ + ⟨1|v⟩·|ψ¹_kl⟩`.
pub fn lift_eigenvector<T: Real>(m: MomentumPair, v: &Vec2<T>) -> Result<StateVector<T>> {
    let mut even = basis_state::<T>(m, 0)?;
    let odd = basis_state::<T>(m, 1)?;
    for (e, o) in even.amplitudes_mut().iter_mut().zip(odd.amplitudes()) {
        *e = *e * v[0] + *o * v[1];
    }
    Ok(even)
}

/// Largest deviation of `U|ψ⁰⟩`, `U|ψ¹⟩` from the closed-form block action
/// `A|ψ⁰⟩ − B*|ψ¹⟩` and `B|ψ⁰⟩ + A*|ψ¹⟩`.
pub fn verify_invariant_plane<T: Real>(m: MomentumPair, walk: &Walk<T>) -> Result<T> {
    let block = coefficients::<T>(m);
    let (big_a, big_b) = (block.big_a(), block.big_b());
    let psi0 = basis_state::<T>(m, 0)?;
    let psi1 = basis_state::<T>(m, 1)?;
    let mut u0 = psi0.clone();
    walk.apply(&mut u0)?;
    let mut u1 = psi1.clone();
    walk.apply(&mut u1)?;
    let mut r0 = T::zero();
    let mut r1 = T::zero();
    for i in 0..psi0.amplitudes().len() {
        let (p0, p1) = (psi0.amplitudes()[i], psi1.amplitudes()[i]);
        r0 += (u0.amplitudes()[i] - (big_a * p0 - big_b.conj() * p1)).norm_sqr();
        r1 += (u1.amplitudes()[i] - (big_b * p0 + big_a.conj() * p1)).norm_sqr();
    }
    Ok(r0.sqrt().max(r1.sqrt()))
}

/// One member of the closed-form eigenbasis of `U` at `θ = π/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEntry<T: Real> {
    pub momentum: MomentumPair,
    pub class: PhaseClass,
    /// Eigenphase of this eigenvector in `(−π, π]`.
    pub phi: T,
    pub v: Vec2<T>,
}

impl<T: Real> SpectralEntry<T> {
    pub fn eigenvalue(&self) -> Cplx<T> {
        Cplx::from_polar(T::one(), self.phi)
    }

    pub fn lift(&self) -> Result<StateVector<T>> {
        lift_eigenvector(self.momentum, &self.v)
    }

    /// `|⟨0|v⟩|²`; equals `2n²·|⟨0,0|ψ⟩|²` for the lifted vector.
    pub fn weight(&self) -> T {
        self.v[0].norm_sqr()
    }
}

/// All `N = 4n²` eigenpairs, momenta in `k`-major order.
pub fn enumerate_spectrum<T: Real>(n: usize) -> Result<Vec<SpectralEntry<T>>> {
    MomentumPair::all(n)?
        .into_iter()
        .map(|m| {
            Ok(SpectralEntry { momentum: m, class: PhaseClass::of(m), phi: eigenphase(m), v: eigvec(m)? })
        })
        .collect()
}

/// Block of `U` on the `(k, l)` plane by projection:
/// `M_ij = ⟨ψ^i|U|ψ^j⟩`.
pub fn projected_block<T: Real>(m: MomentumPair, walk: &Walk<T>) -> Result<Mat2<T>> {
    let psi = [basis_state::<T>(m, 0)?, basis_state::<T>(m, 1)?];
    let mut block = [[cplx(T::zero(), T::zero()); 2]; 2];
    for j in 0..2 {
        let mut image = psi[j].clone();
        walk.apply(&mut image)?;
        for i in 0..2 {
            block[i][j] = psi[i].inner(&image)?;
        }
    }
    Ok(block)
}

/// Eigenpairs of a 2×2 unitary, as `(phase, unit vector)`, phases in
/// `(−π, π]`. A scalar block returns the standard basis.
pub fn eig2_unitary<T: Real>(m: &Mat2<T>) -> [(T, Vec2<T>); 2] {
    let half = T::lit(0.5);
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr * half * half - det).sqrt();
    let mus = [tr * half + disc, tr * half - disc];
    let zero = cplx(T::zero(), T::zero());
    let one = cplx(T::one(), T::zero());
    let standard = [[one, zero], [zero, one]];
    let mut out = [(T::zero(), [zero, zero]); 2];
    for (slot, (mu, fallback)) in out.iter_mut().zip(mus.iter().zip(standard)) {
        let v = if disc.norm() <= T::epsilon().sqrt() * T::lit(1e-3) {
            fallback
        } else {
            kernel_vector(m, *mu).unwrap_or(fallback)
        };
        *slot = (wrap_phase(mu.im.atan2(mu.re)), v);
    }
    out
}

/// Numerically obtained eigenpair of `U` for an arbitrary configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalEntry<T: Real> {
    pub momentum: MomentumPair,
    pub phi: T,
    pub v: Vec2<T>,
}

impl<T: Real> NumericalEntry<T> {
    pub fn weight(&self) -> T {
        self.v[0].norm_sqr()
    }
}

/// Full eigenbasis of the unmarked `U` for any angle and ordering, two
/// entries per plane `(k, l)` with `k < n`. The oracle in `config` is
/// ignored.
pub fn numerical_spectrum<T: Real>(lattice: LatticeSpec, config: &WalkConfig<T>) -> Result<Vec<NumericalEntry<T>>> {
    let n = lattice.n();
    let walk = Walk::new(lattice, config.with_marked(None))?;
    let planes: Vec<MomentumPair> = (0..n).flat_map(|k| (0..2 * n).map(move |l| MomentumPair { k, l, n })).collect();
    let blocks: Vec<Result<Mat2<T>>> = planes.par_iter().map(|&m| projected_block(m, &walk)).collect();
    let mut out = Vec::with_capacity(2 * planes.len());
    for (m, block) in planes.into_iter().zip(blocks) {
        for (phi, v) in eig2_unitary(&block?) {
            out.push(NumericalEntry { momentum: m, phi, v });
        }
    }
    Ok(out)
}

/// Phases at or below this are treated as zero when looking for the
/// smallest positive eigenphase.
pub fn zero_phase_floor<T: Real>() -> T {
    T::epsilon().sqrt()
}

/// Smallest positive eigenphase of the unmarked `U`.
///
/// At `θ = π/4` with the default ordering this is `arccos(a_{1,0})`;
/// otherwise it is read off the numerically projected blocks.
pub fn phi_min<T: Real>(lattice: LatticeSpec, config: &WalkConfig<T>) -> Result<T> {
    if is_closed_form(config) {
        return Ok(phi::<T>(MomentumPair::new(1, 0, lattice.n())?).1);
    }
    phi_min_numerical(lattice, config)
}

/// [`phi_min`] always through the projection path.
pub fn phi_min_numerical<T: Real>(lattice: LatticeSpec, config: &WalkConfig<T>) -> Result<T> {
    let floor = zero_phase_floor::<T>();
    numerical_spectrum(lattice, config)?
        .into_iter()
        .map(|e| e.phi)
        .filter(|&p| p > floor)
        .fold(None, |best: Option<T>, p| Some(best.map_or(p, |b| b.min(p))))
        .ok_or(Error::NoRoot { lo: 0.0, hi: std::f64::consts::PI })
}

/// True when the closed-form momentum analysis applies.
pub fn is_closed_form<T: Real>(config: &WalkConfig<T>) -> bool {
    (config.theta - T::FRAC_PI_4()).abs() <= T::epsilon() * T::lit(8.0)
        && config.ordering == crate::walk::Ordering::DEFAULT
        && config.global_sign == crate::walk::GlobalSign::Minus
}

/// `⟨0,0|ψ⟩` for a lifted reduced vector: `⟨0|v⟩/(√2 n)`.
pub fn origin_overlap<T: Real>(n: usize, v: &Vec2<T>) -> Cplx<T> {
    v[0] / (T::SQRT_2() * T::from_usize_lossy(n))
}
