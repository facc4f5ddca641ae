//! Matrix-free staggered evolution with Hamiltonians.
//!
//! One step of the search walk is `U₀ = s · U_{o4} U_{o3} U_{o2} U_{o1} · R`,
//! where `o1..o4` is the configured [`Ordering`] (first entry applied first),
//! `s` the global sign and `R` the oracle reflection on the marked vertex.
//! Each `U_ab = exp(iθ H_ab)` acts on a polygon `(anchor, partner)` as the
//! 2×2 block `cos θ · I + i sin θ · X`, exactly, since `H_ab` restricted to a
//! polygon is the swap matrix.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_tessellation, Label, LatticeSpec, Tessellation, Vertex};
use crate::scalar::{cplx, Cplx, Real};

/// Walker state `|ψ⟩`: one complex amplitude per vertex, indexed `x + 2n·y`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    lattice: LatticeSpec,
    amplitudes: Vec<Cplx<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn zeros(lattice: LatticeSpec) -> Self {
        Self { lattice, amplitudes: vec![Cplx::new(T::zero(), T::zero()); lattice.num_vertices()] }
    }

    /// Computational basis state `|x, y⟩`.
    pub fn basis(lattice: LatticeSpec, v: Vertex) -> Result<Self> {
        let idx = lattice.vertex_index(v)?;
        let mut s = Self::zeros(lattice);
        s.amplitudes[idx] = Cplx::new(T::one(), T::zero());
        Ok(s)
    }

    pub fn from_amplitudes(lattice: LatticeSpec, amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        if amplitudes.len() != lattice.num_vertices() {
            return Err(Error::LatticeMismatch { state: amplitudes.len(), expected: lattice.num_vertices() });
        }
        Ok(Self { lattice, amplitudes })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Cplx<T>> {
        self.amplitudes
    }

    pub fn amplitude(&self, v: Vertex) -> Result<Cplx<T>> {
        Ok(self.amplitudes[self.lattice.vertex_index(v)?])
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm. Never called by the evolution routines.
    pub fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > T::zero() {
            for a in &mut self.amplitudes {
                *a /= norm;
            }
        }
    }

    /// `p_xy = |⟨x,y|ψ⟩|²`.
    pub fn probability(&self, v: Vertex) -> Result<T> {
        Ok(self.amplitude(v)?.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        self.check_same_lattice(other.lattice.num_vertices())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Cplx::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_same_lattice(other.lattice.num_vertices())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |acc, (a, b)| acc + (a - b).norm_sqr())
            .sqrt())
    }

    /// Writes a `x,y,re,im,prob` snapshot, one row per vertex in index order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y", "re", "im", "prob"])?;
        for (v, a) in self.lattice.vertices().zip(&self.amplitudes) {
            w.write_record([
                v.x.to_string(),
                v.y.to_string(),
                crate::emit::fmt_f64(a.re.to_f64_lossy()),
                crate::emit::fmt_f64(a.im.to_f64_lossy()),
                crate::emit::fmt_f64(a.norm_sqr().to_f64_lossy()),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    fn check_same_lattice(&self, other: usize) -> Result<()> {
        if other != self.amplitudes.len() {
            return Err(Error::LatticeMismatch { state: other, expected: self.amplitudes.len() });
        }
        Ok(())
    }
}

/// `|ψ₀⟩ = (1/(√2 n)) Σ_{x+y even} |x, y⟩`.
pub fn initial_state<T: Real>(lattice: LatticeSpec) -> StateVector<T> {
    let amp = T::one() / (T::SQRT_2() * T::from_usize_lossy(lattice.n()));
    let amplitudes = lattice
        .vertices()
        .map(|v| if v.is_even() { cplx(amp, T::zero()) } else { cplx(T::zero(), T::zero()) })
        .collect();
    StateVector { lattice, amplitudes }
}

/// Application order of the four tessellation unitaries, first applied first.
///
/// The product written `U = −U₁₁U₁₀U₀₁U₀₀` corresponds to `00,01,10,11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ordering([Label; 4]);

impl Ordering {
    pub const DEFAULT: Ordering = Ordering([Label::L00, Label::L01, Label::L10, Label::L11]);
    /// `U = −U₁₁U₀₁U₁₀U₀₀`.
    pub const ALTERNATIVE: Ordering = Ordering([Label::L00, Label::L10, Label::L01, Label::L11]);

    pub fn new(labels: [Label; 4]) -> Result<Self> {
        let mut sorted = labels;
        sorted.sort();
        if sorted != Label::ALL {
            let s: Vec<_> = labels.iter().map(|l| l.as_str()).collect();
            return Err(Error::BadOrdering(s.join(",")));
        }
        Ok(Self(labels))
    }

    pub fn labels(&self) -> [Label; 4] {
        self.0
    }
}

impl Default for Ordering {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::BadOrdering(s.to_string()));
        }
        let mut labels = [Label::L00; 4];
        for (slot, part) in labels.iter_mut().zip(parts) {
            *slot = part.parse().map_err(|_| Error::BadOrdering(s.to_string()))?;
        }
        Ordering::new(labels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlobalSign {
    Plus,
    Minus,
}

impl GlobalSign {
    pub fn value(self) -> i32 {
        match self {
            GlobalSign::Plus => 1,
            GlobalSign::Minus => -1,
        }
    }
}

impl TryFrom<i32> for GlobalSign {
    type Error = Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(GlobalSign::Plus),
            -1 => Ok(GlobalSign::Minus),
            other => Err(Error::BadSign(other)),
        }
    }
}

/// Parameters of one step of the walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig<T: Real> {
    pub theta: T,
    pub ordering: Ordering,
    pub global_sign: GlobalSign,
    pub marked: Option<Vertex>,
}

impl<T: Real> Default for WalkConfig<T> {
    fn default() -> Self {
        Self {
            theta: T::FRAC_PI_4(),
            ordering: Ordering::DEFAULT,
            global_sign: GlobalSign::Minus,
            marked: Some(Vertex::ORIGIN),
        }
    }
}

impl<T: Real> WalkConfig<T> {
    /// Default configuration without an oracle: the bare evolution `U`.
    pub fn unmarked() -> Self {
        Self { marked: None, ..Self::default() }
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_ordering(mut self, ordering: Ordering) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_marked(mut self, marked: Option<Vertex>) -> Self {
        self.marked = marked;
        self
    }
}

#[inline]
fn rotate_pairs<T: Real>(amps: &mut [Cplx<T>], pairs: &[(usize, usize)], cos: T, sin: T) {
    for &(a, b) in pairs {
        let alpha = amps[a];
        let beta = amps[b];
        // i·z = (−im, re)
        amps[a] = cplx(alpha.re * cos - beta.im * sin, alpha.im * cos + beta.re * sin);
        amps[b] = cplx(beta.re * cos - alpha.im * sin, beta.im * cos + alpha.re * sin);
    }
}

/// Applies `exp(iθ H_ab)` for one tessellation in place.
pub fn apply_tessellation_unitary<T: Real>(state: &mut StateVector<T>, tess: &Tessellation, theta: T) -> Result<()> {
    if tess.lattice() != state.lattice() {
        return Err(Error::LatticeMismatch {
            state: state.lattice.num_vertices(),
            expected: tess.lattice().num_vertices(),
        });
    }
    let pairs = tess.index_pairs(&state.lattice);
    rotate_pairs(&mut state.amplitudes, &pairs, theta.cos(), theta.sin());
    Ok(())
}

/// `R = I − 2|m⟩⟨m|` applied in place.
pub fn apply_oracle<T: Real>(state: &mut StateVector<T>, marked: Vertex) -> Result<()> {
    let idx = state.lattice.vertex_index(marked)?;
    state.amplitudes[idx] = -state.amplitudes[idx];
    Ok(())
}

/// Precomputed step operator for a fixed lattice and configuration.
#[derive(Debug, Clone)]
pub struct Walk<T: Real> {
    lattice: LatticeSpec,
    config: WalkConfig<T>,
    sweeps: [Vec<(usize, usize)>; 4],
    cos: T,
    sin: T,
    marked: Option<usize>,
}

impl<T: Real> Walk<T> {
    pub fn new(lattice: LatticeSpec, config: WalkConfig<T>) -> Result<Self> {
        let marked = config.marked.map(|m| lattice.vertex_index(m)).transpose()?;
        let sweeps = config.ordering.labels().map(|label| build_tessellation(&lattice, label).index_pairs(&lattice));
        Ok(Self { lattice, config, sweeps, cos: config.theta.cos(), sin: config.theta.sin(), marked })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn config(&self) -> &WalkConfig<T> {
        &self.config
    }

    /// One step on a raw amplitude buffer of length `N`.
    pub fn apply_in_place(&self, amps: &mut [Cplx<T>]) {
        debug_assert_eq!(amps.len(), self.lattice.num_vertices());
        if let Some(m) = self.marked {
            amps[m] = -amps[m];
        }
        for pairs in &self.sweeps {
            rotate_pairs(amps, pairs, self.cos, self.sin);
        }
        if self.config.global_sign == GlobalSign::Minus {
            for a in amps.iter_mut() {
                *a = -*a;
            }
        }
    }

    pub fn apply(&self, state: &mut StateVector<T>) -> Result<()> {
        if state.lattice != self.lattice {
            return Err(Error::LatticeMismatch {
                state: state.lattice.num_vertices(),
                expected: self.lattice.num_vertices(),
            });
        }
        self.apply_in_place(&mut state.amplitudes);
        Ok(())
    }
}

/// One step `U₀|ψ⟩` (or `U|ψ⟩` when no vertex is marked).
pub fn step<T: Real>(state: &StateVector<T>, config: &WalkConfig<T>) -> Result<StateVector<T>> {
    let walk = Walk::new(state.lattice, *config)?;
    let mut out = state.clone();
    walk.apply(&mut out)?;
    Ok(out)
}

/// Probability-at-target time series and the final state.
#[derive(Debug, Clone)]
pub struct Evolution<T: Real> {
    /// `p(t)` for `t = 0..=steps`.
    pub probabilities: Vec<T>,
    pub final_state: StateVector<T>,
}

/// Runs `steps` steps, recording `|⟨m|ψ(t)⟩|²` where `m` is the marked
/// vertex (the origin when the configuration is unmarked).
pub fn evolve<T: Real>(state: StateVector<T>, config: &WalkConfig<T>, steps: usize) -> Result<Evolution<T>> {
    let walk = Walk::new(state.lattice, *config)?;
    let target = state.lattice.vertex_index(config.marked.unwrap_or(Vertex::ORIGIN))?;
    let mut state = state;
    let mut probabilities = Vec::with_capacity(steps + 1);
    probabilities.push(state.amplitudes[target].norm_sqr());
    for _ in 0..steps {
        walk.apply_in_place(&mut state.amplitudes);
        probabilities.push(state.amplitudes[target].norm_sqr());
    }
    Ok(Evolution { probabilities, final_state: state })
}
