//! Torus geometry and the four-tessellation cover.
//!
//! Vertices of the `2n × 2n` torus are indexed row-major with `x` fastest:
//! `index = x + 2n·y`. Every tessellation pairs each even-parity vertex
//! (the polygon *anchor*) with one odd-parity neighbour (the *partner*).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size of the torus: side `2n`, `N = 4n²` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    n: usize,
}

impl LatticeSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n <= 1 {
            return Err(Error::DegenerateLattice(n));
        }
        Ok(Self { n })
    }

    /// Half side length.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn side(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        4 * self.n * self.n
    }

    pub fn vertex_index(&self, v: Vertex) -> Result<usize> {
        let side = self.side();
        if v.x >= side || v.y >= side {
            return Err(Error::VertexOutOfRange { x: v.x as i64, y: v.y as i64, side });
        }
        Ok(v.x + side * v.y)
    }

    pub fn vertex_at(&self, index: usize) -> Result<Vertex> {
        let num_vertices = self.num_vertices();
        if index >= num_vertices {
            return Err(Error::IndexOutOfRange { index, num_vertices });
        }
        let side = self.side();
        Ok(Vertex { x: index % side, y: index / side })
    }

    /// Builds a vertex, rejecting coordinates outside `[0, 2n)`.
    pub fn vertex(&self, x: usize, y: usize) -> Result<Vertex> {
        let side = self.side();
        if x >= side || y >= side {
            return Err(Error::VertexOutOfRange { x: x as i64, y: y as i64, side });
        }
        Ok(Vertex { x, y })
    }

    /// Builds a vertex from arbitrary integer coordinates, reducing them
    /// modulo `2n`.
    pub fn wrap(&self, x: i64, y: i64) -> Vertex {
        let side = self.side() as i64;
        Vertex { x: x.rem_euclid(side) as usize, y: y.rem_euclid(side) as usize }
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, x: usize, y: usize) -> usize {
        x + self.side() * y
    }

    /// All vertices in index order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let side = self.side();
        (0..self.num_vertices()).map(move |i| Vertex { x: i % side, y: i / side })
    }
}

/// A lattice site with coordinates already reduced modulo `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub x: usize,
    pub y: usize,
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { x: 0, y: 0 };

    /// `(x + y) mod 2`; 0 for the anchor class.
    #[inline]
    pub fn parity(&self) -> usize {
        (self.x + self.y) % 2
    }

    #[inline]
    pub fn is_even(&self) -> bool {
        self.parity() == 0
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Tessellation label `ab`. The partner of anchor `(x, y)` is
/// `(x + (-1)^a δ_{b0}, y + (-1)^a δ_{b1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    L00,
    L01,
    L10,
    L11,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::L00, Label::L01, Label::L10, Label::L11];

    /// The `(dx, dy)` offset from anchor to partner.
    pub fn shift(self) -> (i64, i64) {
        match self {
            Label::L00 => (1, 0),
            Label::L01 => (0, 1),
            Label::L10 => (-1, 0),
            Label::L11 => (0, -1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::L00 => "00",
            Label::L01 => "01",
            Label::L10 => "10",
            Label::L11 => "11",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "00" => Ok(Label::L00),
            "01" => Ok(Label::L01),
            "10" => Ok(Label::L10),
            "11" => Ok(Label::L11),
            other => Err(Error::BadLabel(other.to_string())),
        }
    }
}

/// Two adjacent vertices; the anchor has even parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polygon {
    pub anchor: Vertex,
    pub partner: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tessellation {
    label: Label,
    lattice: LatticeSpec,
    polygons: Vec<Polygon>,
}

impl Tessellation {
    pub fn label(&self) -> Label {
        self.label
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    /// `(anchor, partner)` vertex indices of every polygon.
    pub fn index_pairs(&self, lattice: &LatticeSpec) -> Vec<(usize, usize)> {
        self.polygons
            .iter()
            .map(|p| {
                (
                    lattice.index_unchecked(p.anchor.x, p.anchor.y),
                    lattice.index_unchecked(p.partner.x, p.partner.y),
                )
            })
            .collect()
    }

    /// Undirected edges spanned by the polygons.
    pub fn edges(&self, lattice: &LatticeSpec) -> impl Iterator<Item = Edge> + '_ {
        let lattice = *lattice;
        self.polygons.iter().map(move |p| {
            Edge::new(
                lattice.index_unchecked(p.anchor.x, p.anchor.y),
                lattice.index_unchecked(p.partner.x, p.partner.y),
            )
        })
    }
}

/// Builds `T_ab`: one polygon per even-parity anchor, anchors in index order.
pub fn build_tessellation(lattice: &LatticeSpec, label: Label) -> Tessellation {
    let (dx, dy) = label.shift();
    let polygons = lattice
        .vertices()
        .filter(Vertex::is_even)
        .map(|anchor| Polygon {
            anchor,
            partner: lattice.wrap(anchor.x as i64 + dx, anchor.y as i64 + dy),
        })
        .collect();
    Tessellation { label, lattice: *lattice, polygons }
}

/// Undirected edge stored as `(min index, max index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }
}

/// The `2N` edges of the 4-regular torus.
pub fn torus_edges(lattice: &LatticeSpec) -> BTreeSet<Edge> {
    lattice
        .vertices()
        .flat_map(|v| {
            let here = lattice.index_unchecked(v.x, v.y);
            let right = lattice.wrap(v.x as i64 + 1, v.y as i64);
            let up = lattice.wrap(v.x as i64, v.y as i64 + 1);
            [
                Edge::new(here, lattice.index_unchecked(right.x, right.y)),
                Edge::new(here, lattice.index_unchecked(up.x, up.y)),
            ]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCover {
    pub covered: bool,
    /// Torus edges no polygon spans, in sorted order.
    pub uncovered: Vec<Edge>,
}

/// Checks whether the polygon edges of `tessellations` jointly equal the
/// torus edge set.
pub fn edge_cover_check(tessellations: &[Tessellation], lattice: &LatticeSpec) -> EdgeCover {
    let covered: BTreeSet<Edge> = tessellations.iter().flat_map(|t| t.edges(lattice)).collect();
    let all = torus_edges(lattice);
    let uncovered: Vec<Edge> = all.difference(&covered).copied().collect();
    EdgeCover { covered: uncovered.is_empty() && covered.is_subset(&all), uncovered }
}
