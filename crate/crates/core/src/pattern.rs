//! The triangulated hyperbolic-paraboloid crease pattern.
//!
//! Ring `k` is the square with corners `(±k, ±k)`. The central square (ring 1)
//! is split by the diagonal `LL(1)–UR(1)`. Each trapezoid between rings `k-1`
//! and `k` is split by one triangulation diagonal running from a ring-`(k-1)`
//! "source" corner to a ring-`k` "target" corner. In the standard rule the
//! sources are `LR, UL` and the targets `LL, UR`; the flipped rule swaps both
//! pairs. The asymmetric triangulation uses the standard rule everywhere; the
//! alternating one flips it on odd rings `k >= 3`.
//!
//! Every target corner has creases to exactly three ring-`(k-1)` vertices and
//! the remaining two corners have one ring-`(k-1)` crease plus two square
//! edges to targets, which is the order in which the constructor solves them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriangulationKind {
    Asymmetric,
    AlternatingAsymmetric,
}

impl TriangulationKind {
    pub fn short_name(self) -> &'static str {
        match self {
            TriangulationKind::Asymmetric => "asym",
            TriangulationKind::AlternatingAsymmetric => "alt",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown triangulation kind {0:?} (expected asym or alt)")]
pub struct ParseKindError(pub String);

impl FromStr for TriangulationKind {
    type Err = ParseKindError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "asym" | "asymmetric" => Ok(TriangulationKind::Asymmetric),
            "alt" | "alternating" | "alternating-asymmetric" => Ok(TriangulationKind::AlternatingAsymmetric),
            _ => Err(ParseKindError(s.to_string())),
        }
    }
}

impl fmt::Display for TriangulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Square corner, listed counter-clockwise from lower-left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    LL,
    LR,
    UR,
    UL,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::LL, Corner::LR, Corner::UR, Corner::UL];

    fn index(self) -> usize {
        self as usize
    }

    /// Next corner counter-clockwise.
    pub fn next(self) -> Corner {
        Corner::ALL[(self.index() + 1) % 4]
    }

    pub fn prev(self) -> Corner {
        Corner::ALL[(self.index() + 3) % 4]
    }

    fn signs(self) -> (i64, i64) {
        match self {
            Corner::LL => (-1, -1),
            Corner::LR => (1, -1),
            Corner::UR => (1, 1),
            Corner::UL => (-1, 1),
        }
    }

    /// Whether the corner lies on the diagonal `x = y`.
    pub fn on_main_axis(self) -> bool {
        matches!(self, Corner::LL | Corner::UR)
    }
}

/// Side of a square, named by the counter-clockwise edge from a corner:
/// `Bottom = LL→LR`, `Right = LR→UR`, `Top = UR→UL`, `Left = UL→LL`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub fn from_corner(c: Corner) -> Side {
        match c {
            Corner::LL => Side::Bottom,
            Corner::LR => Side::Right,
            Corner::UR => Side::Top,
            Corner::UL => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CornerId {
    pub ring: u32,
    pub corner: Corner,
}

impl CornerId {
    pub fn new(ring: u32, corner: Corner) -> Self {
        assert!(ring >= 1, "rings are numbered from 1");
        CornerId { ring, corner }
    }

    /// Exact coordinates in the flat paper.
    pub fn planar_coords(self) -> (i64, i64) {
        let (sx, sy) = self.corner.signs();
        let k = self.ring as i64;
        (sx * k, sy * k)
    }

    /// Dense index: `4(ring - 1) + corner`.
    pub fn index(self) -> usize {
        4 * (self.ring as usize - 1) + self.corner.index()
    }

    pub fn from_index(i: usize) -> Self {
        CornerId::new(i as u32 / 4 + 1, Corner::ALL[i % 4])
    }
}

pub fn planar_coords(v: CornerId) -> (i64, i64) {
    v.planar_coords()
}

impl fmt::Display for CornerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.corner, self.ring)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CreaseKind {
    CentralDiagonal,
    SquareEdge { ring: u32, side: Side },
    /// Segment of a main diagonal from ring `ring - 1` to ring `ring`.
    MainDiagonal { ring: u32, corner: Corner },
    TriangulationDiagonal { ring: u32, side: Side },
}

/// Mountain-valley assignment of a crease.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MvSign {
    Mountain,
    Valley,
    Unassigned,
}

impl MvSign {
    pub fn from_i32(s: i32) -> MvSign {
        match s.signum() {
            1 => MvSign::Mountain,
            -1 => MvSign::Valley,
            _ => MvSign::Unassigned,
        }
    }

    pub fn value(self) -> Option<i32> {
        match self {
            MvSign::Mountain => Some(1),
            MvSign::Valley => Some(-1),
            MvSign::Unassigned => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crease {
    pub kind: CreaseKind,
    pub endpoints: (CornerId, CornerId),
    pub mv: MvSign,
    pub len_sq: i64,
}

impl Crease {
    fn new(kind: CreaseKind, a: CornerId, b: CornerId, mv: MvSign) -> Self {
        let (ax, ay) = a.planar_coords();
        let (bx, by) = b.planar_coords();
        let len_sq = (ax - bx).pow(2) + (ay - by).pow(2);
        Crease { kind, endpoints: (a, b), mv, len_sq }
    }

    /// Exact squared length in the flat paper (creases stay straight when folded).
    pub fn len_sq(&self) -> i64 {
        self.len_sq
    }

    /// Ring that this crease was created with.
    pub fn ring(&self) -> u32 {
        match self.kind {
            CreaseKind::CentralDiagonal => 1,
            CreaseKind::SquareEdge { ring, .. }
            | CreaseKind::MainDiagonal { ring, .. }
            | CreaseKind::TriangulationDiagonal { ring, .. } => ring,
        }
    }
}

pub fn crease_len_sq(c: &Crease) -> i64 {
    c.len_sq()
}

/// Triangle with vertices counter-clockwise in the flat paper.
pub type Face = [CornerId; 3];

#[derive(Clone, Debug)]
pub struct CreasePattern {
    pub n: u32,
    pub kind: TriangulationKind,
    pub creases: Vec<Crease>,
    pub faces: Vec<Face>,
    crease_of: HashMap<(CornerId, CornerId), usize>,
    /// Directed edge `a → b` to the third vertex of the face on its left.
    left_of: HashMap<(CornerId, CornerId), CornerId>,
}

/// Mountain-valley signs of the hypar: the central diagonal is a mountain
/// (this fixes the global orientation), square rings alternate, and each
/// main-diagonal segment has the sign opposite to its outer square.
pub fn square_sign(ring: u32) -> i32 {
    if ring.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn main_diagonal_sign(ring: u32) -> i32 {
    -square_sign(ring)
}

impl TriangulationKind {
    /// Whether ring `k` uses the flipped triangulation rule.
    pub fn flipped(self, ring: u32) -> bool {
        self == TriangulationKind::AlternatingAsymmetric && ring >= 3 && ring % 2 == 1
    }

    /// `(targets, others)` for ring `k >= 2`: targets are solved first, from
    /// three ring-`(k-1)` vertices; the others second.
    pub fn schedule(self, ring: u32) -> ([Corner; 2], [Corner; 2]) {
        if self.flipped(ring) {
            ([Corner::LR, Corner::UL], [Corner::LL, Corner::UR])
        } else {
            ([Corner::LL, Corner::UR], [Corner::LR, Corner::UL])
        }
    }
}

impl CreasePattern {
    pub fn build(n: u32, kind: TriangulationKind) -> CreasePattern {
        assert!(n >= 1, "a pattern has at least one ring");
        let mut creases = Vec::new();
        let mut faces: Vec<Face> = Vec::new();
        let id = CornerId::new;
        let sq = |k: u32| MvSign::from_i32(square_sign(k));

        creases.push(Crease::new(CreaseKind::CentralDiagonal, id(1, Corner::LL), id(1, Corner::UR), MvSign::Mountain));
        for c in Corner::ALL {
            creases.push(Crease::new(
                CreaseKind::SquareEdge { ring: 1, side: Side::from_corner(c) },
                id(1, c),
                id(1, c.next()),
                sq(1),
            ));
        }
        faces.push([id(1, Corner::LL), id(1, Corner::LR), id(1, Corner::UR)]);
        faces.push([id(1, Corner::LL), id(1, Corner::UR), id(1, Corner::UL)]);

        for k in 2..=n {
            let (_, sources) = kind.schedule(k);
            for c in Corner::ALL {
                creases.push(Crease::new(
                    CreaseKind::SquareEdge { ring: k, side: Side::from_corner(c) },
                    id(k, c),
                    id(k, c.next()),
                    sq(k),
                ));
                creases.push(Crease::new(
                    CreaseKind::MainDiagonal { ring: k, corner: c },
                    id(k - 1, c),
                    id(k, c),
                    MvSign::from_i32(main_diagonal_sign(k)),
                ));
            }
            for c in Corner::ALL {
                let d = c.next();
                let side = Side::from_corner(c);
                let (ic, id_, oc, od) = (id(k - 1, c), id(k - 1, d), id(k, c), id(k, d));
                if sources.contains(&c) {
                    creases.push(Crease::new(CreaseKind::TriangulationDiagonal { ring: k, side }, ic, od, MvSign::Unassigned));
                    faces.push([ic, id_, od]);
                    faces.push([ic, od, oc]);
                } else {
                    creases.push(Crease::new(CreaseKind::TriangulationDiagonal { ring: k, side }, id_, oc, MvSign::Unassigned));
                    faces.push([ic, id_, oc]);
                    faces.push([id_, od, oc]);
                }
            }
        }

        let faces: Vec<Face> = faces.into_iter().map(ccw).collect();
        let mut crease_of = HashMap::new();
        for (i, c) in creases.iter().enumerate() {
            crease_of.insert(c.endpoints, i);
            crease_of.insert((c.endpoints.1, c.endpoints.0), i);
        }
        let mut left_of = HashMap::new();
        for f in &faces {
            for i in 0..3 {
                left_of.insert((f[i], f[(i + 1) % 3]), f[(i + 2) % 3]);
            }
        }
        CreasePattern { n, kind, creases, faces, crease_of, left_of }
    }

    pub fn vertex_count(&self) -> usize {
        4 * self.n as usize
    }

    pub fn vertices(&self) -> impl Iterator<Item = CornerId> {
        (0..self.vertex_count()).map(CornerId::from_index)
    }

    pub fn crease_between(&self, a: CornerId, b: CornerId) -> Option<usize> {
        self.crease_of.get(&(a, b)).copied()
    }

    /// Third vertex of the face to the left of `a → b`, if any.
    pub fn left_wing(&self, a: CornerId, b: CornerId) -> Option<CornerId> {
        self.left_of.get(&(a, b)).copied()
    }

    /// `(right, left)` wings of an interior crease, oriented along its endpoints.
    pub fn wings(&self, crease: usize) -> Option<(CornerId, CornerId)> {
        let (a, b) = self.creases[crease].endpoints;
        Some((self.left_wing(b, a)?, self.left_wing(a, b)?))
    }

    pub fn is_interior_crease(&self, crease: usize) -> bool {
        self.wings(crease).is_some()
    }

    /// Creases incident to `v`.
    pub fn incident(&self, v: CornerId) -> Vec<usize> {
        self.creases
            .iter()
            .enumerate()
            .filter(|(_, c)| c.endpoints.0 == v || c.endpoints.1 == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Neighbours of `v` via creases.
    pub fn neighbours(&self, v: CornerId) -> Vec<CornerId> {
        self.incident(v)
            .into_iter()
            .map(|i| {
                let (a, b) = self.creases[i].endpoints;
                if a == v {
                    b
                } else {
                    a
                }
            })
            .collect()
    }

    /// Vertices strictly inside the paper (not on the outer ring).
    pub fn is_interior_vertex(&self, v: CornerId) -> bool {
        v.ring < self.n
    }

    pub fn face_ring(f: &Face) -> u32 {
        f.iter().map(|v| v.ring).max().unwrap()
    }

    /// Creases of the first `ring` rings come first in `creases`; this is the count.
    pub fn crease_count_through(ring: u32) -> usize {
        if ring == 0 {
            0
        } else {
            5 + 12 * (ring as usize - 1)
        }
    }

    pub fn face_count_through(ring: u32) -> usize {
        if ring == 0 {
            0
        } else {
            2 + 8 * (ring as usize - 1)
        }
    }
}

fn twice_area(f: &Face) -> i64 {
    let (ax, ay) = f[0].planar_coords();
    let (bx, by) = f[1].planar_coords();
    let (cx, cy) = f[2].planar_coords();
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

fn ccw(f: Face) -> Face {
    if twice_area(&f) > 0 {
        f
    } else {
        [f[0], f[2], f[1]]
    }
}

/// Versioned plain-data form of a pattern for `--dump-pattern`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternDocument {
    pub format: String,
    pub version: u32,
    pub n: u32,
    pub kind: TriangulationKind,
    pub vertices: Vec<VertexRecord>,
    pub creases: Vec<CreaseRecord>,
    pub faces: Vec<[String; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: String,
    pub x: i64,
    pub y: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CreaseRecord {
    pub kind: CreaseKind,
    pub a: String,
    pub b: String,
    pub mv: MvSign,
    pub len_sq: i64,
}

impl CreasePattern {
    pub fn to_document(&self) -> PatternDocument {
        PatternDocument {
            format: "hypar-pattern".into(),
            version: 1,
            n: self.n,
            kind: self.kind,
            vertices: self
                .vertices()
                .map(|v| {
                    let (x, y) = v.planar_coords();
                    VertexRecord { id: v.to_string(), x, y }
                })
                .collect(),
            creases: self
                .creases
                .iter()
                .map(|c| CreaseRecord {
                    kind: c.kind,
                    a: c.endpoints.0.to_string(),
                    b: c.endpoints.1.to_string(),
                    mv: c.mv,
                    len_sq: c.len_sq,
                })
                .collect(),
            faces: self.faces.iter().map(|f| f.map(|v| v.to_string())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use Corner::*;

    fn id(k: u32, c: Corner) -> CornerId {
        CornerId::new(k, c)
    }

    #[test]
    fn base_case() {
        let p = CreasePattern::build(1, TriangulationKind::Asymmetric);
        assert_eq!(p.faces.len(), 2);
        let interior: Vec<_> = (0..p.creases.len()).filter(|&i| p.is_interior_crease(i)).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(p.creases[interior[0]].kind, CreaseKind::CentralDiagonal);
    }

    #[test]
    fn solvability_schedule_examples() {
        let p = CreasePattern::build(3, TriangulationKind::Asymmetric);
        assert_eq!(p.faces.len(), 18);
        let ring1 = |v: CornerId| -> HashSet<CornerId> { p.neighbours(v).into_iter().filter(|w| w.ring == 1).collect() };
        assert_eq!(ring1(id(2, LL)), [id(1, LL), id(1, LR), id(1, UL)].into_iter().collect());
        assert_eq!(ring1(id(2, LR)), [id(1, LR)].into_iter().collect());
        let ring2: HashSet<_> = p.neighbours(id(2, LR)).into_iter().filter(|w| w.ring == 2).collect();
        assert_eq!(ring2, [id(2, LL), id(2, UR)].into_iter().collect());
    }

    #[test]
    fn squared_lengths() {
        let p = CreasePattern::build(4, TriangulationKind::Asymmetric);
        for c in &p.creases {
            match c.kind {
                CreaseKind::MainDiagonal { .. } => assert_eq!(c.len_sq(), 2),
                CreaseKind::SquareEdge { ring, .. } => assert_eq!(c.len_sq(), (2 * ring as i64).pow(2)),
                CreaseKind::TriangulationDiagonal { ring, side: Side::Bottom } => {
                    assert_eq!(c.endpoints, (id(ring - 1, LR), id(ring, LL)));
                    assert_eq!(c.len_sq(), (2 * ring as i64 - 1).pow(2) + 1);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn planar_coordinates() {
        assert_eq!(planar_coords(id(1, LL)), (-1, -1));
        assert_eq!(planar_coords(id(3, UR)), (3, 3));
        assert_eq!(planar_coords(id(2, UL)), (-2, 2));
    }

    fn check_invariants(n: u32, kind: TriangulationKind) {
        let p = CreasePattern::build(n, kind);
        assert_eq!(p.faces.len(), 2 + 8 * (n as usize - 1));
        let area: i64 = p.faces.iter().map(twice_area).sum();
        assert_eq!(area, 2 * (2 * n as i64).pow(2));
        // each crease borders two faces unless it lies on the outer boundary
        for (i, c) in p.creases.iter().enumerate() {
            let boundary = matches!(c.kind, CreaseKind::SquareEdge { ring, .. } if ring == n);
            assert_eq!(p.is_interior_crease(i), !boundary, "{:?}", c.kind);
        }
        // every face edge is a crease
        for f in &p.faces {
            for i in 0..3 {
                assert!(p.crease_between(f[i], f[(i + 1) % 3]).is_some());
            }
        }
        for k in 2..=n {
            let (targets, others) = kind.schedule(k);
            for c in Corner::ALL {
                let v = id(k, c);
                let inner = p.neighbours(v).into_iter().filter(|w| w.ring == k - 1).count();
                let same: HashSet<_> = p.neighbours(v).into_iter().filter(|w| w.ring == k).collect();
                if targets.contains(&c) {
                    assert_eq!(inner, 3);
                } else {
                    assert!(others.contains(&c));
                    assert_eq!(inner, 1);
                    assert_eq!(same, targets.iter().map(|&t| id(k, t)).collect());
                }
            }
        }
        // interior vertices: faces around them close up; degrees are even
        // except at the two central corners off the single central diagonal
        for v in p.vertices().filter(|v| p.is_interior_vertex(*v)) {
            let deg = p.incident(v).len();
            let around = p.faces.iter().filter(|f| f.contains(&v)).count();
            assert_eq!(deg, around, "{v}");
            if v.ring == 1 && !v.corner.on_main_axis() {
                assert_eq!(deg, 5, "{v}");
            } else {
                assert!(deg >= 4 && deg.is_multiple_of(2), "{v} has degree {deg}");
            }
        }
    }

    #[test]
    fn structural_invariants() {
        for n in 1..=9 {
            check_invariants(n, TriangulationKind::Asymmetric);
            check_invariants(n, TriangulationKind::AlternatingAsymmetric);
        }
    }

    #[test]
    fn patterns_are_prefixes() {
        let small = CreasePattern::build(3, TriangulationKind::AlternatingAsymmetric);
        let big = CreasePattern::build(6, TriangulationKind::AlternatingAsymmetric);
        assert_eq!(small.creases[..], big.creases[..CreasePattern::crease_count_through(3)]);
        assert_eq!(small.faces[..], big.faces[..CreasePattern::face_count_through(3)]);
    }

    #[test]
    fn mv_signs() {
        let p = CreasePattern::build(4, TriangulationKind::Asymmetric);
        for c in &p.creases {
            match c.kind {
                CreaseKind::CentralDiagonal => assert_eq!(c.mv, MvSign::Mountain),
                CreaseKind::SquareEdge { ring, .. } => assert_eq!(c.mv.value(), Some(if ring % 2 == 0 { 1 } else { -1 })),
                CreaseKind::MainDiagonal { ring, .. } => assert_eq!(c.mv.value(), Some(if ring % 2 == 0 { -1 } else { 1 })),
                CreaseKind::TriangulationDiagonal { .. } => assert_eq!(c.mv, MvSign::Unassigned),
            }
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("asym".parse::<TriangulationKind>().unwrap(), TriangulationKind::Asymmetric);
        assert_eq!("alt".parse::<TriangulationKind>().unwrap(), TriangulationKind::AlternatingAsymmetric);
        assert!("sym".parse::<TriangulationKind>().is_err());
    }
}
