//! Exact arithmetic on the hexagonal lattice of unit-disk centers.
//!
//! A lattice point `(u, v)` with `u ≡ v (mod 2)` sits at Cartesian
//! `(u, v·√3)`. Disks have radius 1, so two lattice disks touch exactly when
//! `Δu² + 3·Δv² = 4`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Squared center distance (in lattice units) at which two disks touch.
pub const TOUCH: i64 = 4;

/// A disk center on the hexagonal lattice. Serialized as `[u, v]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticePoint {
    pub u: i64,
    pub v: i64,
}

impl From<[i64; 2]> for LatticePoint {
    fn from([u, v]: [i64; 2]) -> Self {
        LatticePoint { u, v }
    }
}

impl From<LatticePoint> for [i64; 2] {
    fn from(p: LatticePoint) -> Self {
        [p.u, p.v]
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { u: 0, v: 0 };

    /// Panics in debug builds if the parity invariant is broken.
    pub fn new(u: i64, v: i64) -> Self {
        debug_assert!(
            (u - v).rem_euclid(2) == 0,
            "lattice point ({u}, {v}) violates parity"
        );
        LatticePoint { u, v }
    }

    pub fn is_valid(self) -> bool {
        (self.u - self.v).rem_euclid(2) == 0
    }

    pub fn step(self, d: Direction) -> Self {
        self + d.vector()
    }

    pub fn neighbors(self) -> [LatticePoint; 6] {
        let mut out = [self; 6];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self + Direction::ALL[k].vector();
        }
        out
    }

    pub fn to_cartesian(self) -> RealPoint {
        RealPoint {
            x: self.u as f64,
            y: self.v as f64 * SQRT3,
        }
    }

    /// Rotates `self` about `center` by `k · 60°` counterclockwise.
    pub fn rotate60(self, center: LatticePoint, k: i64) -> Self {
        let mut off = self - center;
        for _ in 0..k.rem_euclid(6) {
            off = LatticePoint {
                u: (off.u - 3 * off.v) / 2,
                v: (off.u + off.v) / 2,
            };
        }
        center + off
    }

    /// The direction of `other - self` if the two are lattice neighbors.
    pub fn direction_to(self, other: LatticePoint) -> Option<Direction> {
        Direction::from_vector(other - self)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint {
            u: self.u + o.u,
            v: self.v + o.v,
        }
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint {
            u: self.u - o.u,
            v: self.v - o.v,
        }
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint {
            u: -self.u,
            v: -self.v,
        }
    }
}

pub fn squared_distance(p: LatticePoint, q: LatticePoint) -> i64 {
    let d = q - p;
    d.u * d.u + 3 * d.v * d.v
}

pub fn rotate60(p: LatticePoint, center: LatticePoint, k: i64) -> LatticePoint {
    p.rotate60(center, k)
}

pub fn neighbors(p: LatticePoint) -> [LatticePoint; 6] {
    p.neighbors()
}

pub fn to_cartesian(p: LatticePoint) -> RealPoint {
    p.to_cartesian()
}

/// One of the six unit steps, counterclockwise from east.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Direction(u8);

const STEPS: [(i64, i64); 6] = [(2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1)];

impl Direction {
    pub const E: Direction = Direction(0);
    pub const NE: Direction = Direction(1);
    pub const NW: Direction = Direction(2);
    pub const W: Direction = Direction(3);
    pub const SW: Direction = Direction(4);
    pub const SE: Direction = Direction(5);
    pub const ALL: [Direction; 6] = [
        Direction(0),
        Direction(1),
        Direction(2),
        Direction(3),
        Direction(4),
        Direction(5),
    ];

    pub fn new(k: i64) -> Self {
        Direction(k.rem_euclid(6) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn vector(self) -> LatticePoint {
        let (u, v) = STEPS[self.0 as usize];
        LatticePoint { u, v }
    }

    /// Rotates by `k · 60°` counterclockwise.
    pub fn rotate(self, k: i64) -> Self {
        Direction::new(self.0 as i64 + k)
    }

    pub fn opposite(self) -> Self {
        self.rotate(3)
    }

    pub fn from_vector(d: LatticePoint) -> Option<Direction> {
        STEPS
            .iter()
            .position(|&(u, v)| d.u == u && d.v == v)
            .map(|k| Direction(k as u8))
    }
}

impl TryFrom<u8> for Direction {
    type Error = String;
    fn try_from(k: u8) -> Result<Self, Self::Error> {
        if k < 6 {
            Ok(Direction(k))
        } else {
            Err(format!("direction index {k} out of range 0..6"))
        }
    }
}

impl From<Direction> for u8 {
    fn from(d: Direction) -> u8 {
        d.0
    }
}

/// Anchor for a gadget: a lattice position and the direction it faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pose {
    pub at: LatticePoint,
    pub facing: Direction,
}

impl Pose {
    pub fn new(at: LatticePoint, facing: Direction) -> Self {
        Pose { at, facing }
    }

    /// Maps a point given relative to the canonical pose (origin, facing east)
    /// into the frame of `self`.
    pub fn apply(&self, local: LatticePoint) -> LatticePoint {
        local.rotate60(LatticePoint::ORIGIN, self.facing.index() as i64) + self.at
    }

    pub fn apply_pose(&self, local: Pose) -> Pose {
        Pose {
            at: self.apply(local.at),
            facing: local.facing.rotate(self.facing.index() as i64),
        }
    }

    pub fn rotate60(&self, center: LatticePoint, k: i64) -> Pose {
        Pose {
            at: self.at.rotate60(center, k),
            facing: self.facing.rotate(k),
        }
    }
}

impl Default for Pose {
    fn default() -> Self {
        Pose::new(LatticePoint::ORIGIN, Direction::E)
    }
}

/// A point in the plane, used for externally supplied placements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct RealPoint {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for RealPoint {
    fn from([x, y]: [f64; 2]) -> Self {
        RealPoint { x, y }
    }
}

impl From<RealPoint> for [f64; 2] {
    fn from(p: RealPoint) -> Self {
        [p.x, p.y]
    }
}

impl RealPoint {
    pub fn new(x: f64, y: f64) -> Self {
        RealPoint { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn squared_distance(self, o: RealPoint) -> f64 {
        let dx = o.x - self.x;
        let dy = o.y - self.y;
        dx * dx + dy * dy
    }

    /// Rotates by `k · 60°` counterclockwise about `center`.
    pub fn rotate60(self, center: RealPoint, k: i64) -> RealPoint {
        let theta = (k.rem_euclid(6) as f64) * std::f64::consts::FRAC_PI_3;
        let (s, c) = theta.sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        RealPoint {
            x: center.x + c * dx - s * dy,
            y: center.y + s * dx + c * dy,
        }
    }
}

/// Counterclockwise angular comparison of two nonzero lattice offsets,
/// starting from the positive x axis. Uses only integer arithmetic on the
/// exact embedding `(Δu, Δv·√3)`.
pub fn angular_cmp(a: LatticePoint, b: LatticePoint) -> Ordering {
    fn upper(p: LatticePoint) -> bool {
        p.v > 0 || (p.v == 0 && p.u > 0)
    }
    match (upper(a), upper(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => {
            // cross(a, b) = √3 · (a.u·b.v − a.v·b.u); positive means a before b.
            let cross = a.u * b.v - a.v * b.u;
            0.cmp(&cross)
        }
    }
}

/// Axis-aligned box in lattice coordinates, inclusive on both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub min: LatticePoint,
    pub max: LatticePoint,
}

impl LatticeBox {
    pub fn new(min: LatticePoint, max: LatticePoint) -> Self {
        LatticeBox { min, max }
    }

    pub fn around<I: IntoIterator<Item = LatticePoint>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = LatticeBox::new(first, first);
        for p in it {
            b.include(p);
        }
        Some(b)
    }

    pub fn include(&mut self, p: LatticePoint) {
        self.min.u = self.min.u.min(p.u);
        self.min.v = self.min.v.min(p.v);
        self.max.u = self.max.u.max(p.u);
        self.max.v = self.max.v.max(p.v);
    }

    pub fn union(mut self, other: LatticeBox) -> Self {
        self.include(other.min);
        self.include(other.max);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.min.u > self.max.u || self.min.v > self.max.v
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        p.u >= self.min.u && p.u <= self.max.u && p.v >= self.min.v && p.v <= self.max.v
    }

    /// Grows the box by `du` columns and `dv` rows on every side.
    pub fn expand(&self, du: i64, dv: i64) -> Self {
        LatticeBox {
            min: LatticePoint {
                u: self.min.u - du,
                v: self.min.v - dv,
            },
            max: LatticePoint {
                u: self.max.u + du,
                v: self.max.v + dv,
            },
        }
    }

    pub fn width(&self) -> i64 {
        self.max.u - self.min.u
    }

    pub fn height(&self) -> i64 {
        self.max.v - self.min.v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn lp(u: i64, v: i64) -> LatticePoint {
        LatticePoint::new(u, v)
    }

    fn arb_point() -> impl Strategy<Value = LatticePoint> {
        (-50i64..50, -50i64..50).prop_map(|(a, v)| LatticePoint { u: 2 * a + v.rem_euclid(2), v })
    }

    #[test]
    fn cartesian_examples() {
        assert_eq!(to_cartesian(lp(0, 0)), RealPoint::new(0.0, 0.0));
        assert_eq!(to_cartesian(lp(2, 0)), RealPoint::new(2.0, 0.0));
        let p = to_cartesian(lp(1, 1));
        assert_eq!(p.x, 1.0);
        assert!((p.y - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn squared_distance_examples() {
        assert_eq!(squared_distance(lp(0, 0), lp(2, 0)), 4);
        assert_eq!(squared_distance(lp(0, 0), lp(1, 1)), 4);
        assert_eq!(squared_distance(lp(0, 0), lp(3, 1)), 12);
    }

    #[test]
    fn rotate_examples() {
        assert_eq!(rotate60(lp(2, 0), LatticePoint::ORIGIN, 1), lp(1, 1));
        assert_eq!(rotate60(lp(1, 1), LatticePoint::ORIGIN, 1), lp(-1, 1));
        assert_eq!(rotate60(lp(5, 3), lp(1, 1), 6), lp(5, 3));
        assert_eq!(rotate60(lp(5, 3), lp(1, 1), -1), rotate60(lp(5, 3), lp(1, 1), 5));
    }

    #[test]
    fn neighbor_examples() {
        let ns = neighbors(LatticePoint::ORIGIN);
        assert_eq!(
            ns,
            [lp(2, 0), lp(1, 1), lp(-1, 1), lp(-2, 0), lp(-1, -1), lp(1, -1)]
        );
        assert!(ns.iter().all(|&q| squared_distance(LatticePoint::ORIGIN, q) == 4));
    }

    #[test]
    fn second_shell_by_enumeration() {
        let first: BTreeSet<LatticePoint> = neighbors(LatticePoint::ORIGIN).into_iter().collect();
        let mut reached = BTreeSet::new();
        for a in neighbors(LatticePoint::ORIGIN) {
            for b in neighbors(a) {
                if !first.contains(&b) {
                    reached.insert(b);
                }
            }
        }
        // Oracle: all lattice points within squared distance 16 that are not
        // first-shell neighbors, found by scanning a box.
        let mut expected = BTreeSet::new();
        for u in -6i64..=6 {
            for v in -3i64..=3 {
                let p = LatticePoint { u, v };
                if p.is_valid() && matches!(squared_distance(LatticePoint::ORIGIN, p), 0 | 12 | 16) {
                    expected.insert(p);
                }
            }
        }
        assert!(reached.contains(&LatticePoint::ORIGIN));
        assert_eq!(reached.len(), 13);
        assert_eq!(reached, expected);
    }

    #[test]
    fn direction_algebra() {
        for d in Direction::ALL {
            assert_eq!(d.opposite().vector(), -d.vector());
            assert_eq!(d.rotate(1).vector(), d.vector().rotate60(LatticePoint::ORIGIN, 1));
            assert_eq!(Direction::from_vector(d.vector()), Some(d));
        }
    }

    #[test]
    fn neighbors_match_box_scan() {
        let p = lp(3, -1);
        let mut scanned = Vec::new();
        for du in -4..=4 {
            for dv in -2..=2 {
                let q = LatticePoint { u: p.u + du, v: p.v + dv };
                if q.is_valid() && squared_distance(p, q) == 4 {
                    scanned.push(q);
                }
            }
        }
        let mut ns = neighbors(p).to_vec();
        ns.sort();
        scanned.sort();
        assert_eq!(ns, scanned);
    }

    #[test]
    fn angular_order_of_directions() {
        let mut v: Vec<LatticePoint> = Direction::ALL.iter().rev().map(|d| d.vector()).collect();
        v.sort_by(|a, b| angular_cmp(*a, *b));
        let expected: Vec<LatticePoint> = Direction::ALL.iter().map(|d| d.vector()).collect();
        assert_eq!(v, expected);
    }

    #[test]
    fn serde_shapes() {
        assert_eq!(serde_json::to_string(&lp(3, -1)).unwrap(), "[3,-1]");
        let p: LatticePoint = serde_json::from_str("[-2,0]").unwrap();
        assert_eq!(p, lp(-2, 0));
    }

    proptest! {
        #[test]
        fn parity_closed(p in arb_point(), c in arb_point(), k in -12i64..12) {
            prop_assert!(p.rotate60(c, k).is_valid());
            for q in p.neighbors() {
                prop_assert!(q.is_valid());
            }
        }

        #[test]
        fn rotation_is_isometry(p in arb_point(), q in arb_point(), c in arb_point(), k in -12i64..12) {
            prop_assert_eq!(
                squared_distance(p.rotate60(c, k), q.rotate60(c, k)),
                squared_distance(p, q)
            );
        }

        #[test]
        fn rotation_composes(p in arb_point(), c in arb_point(), a in -6i64..6, b in -6i64..6) {
            prop_assert_eq!(p.rotate60(c, a).rotate60(c, b), p.rotate60(c, a + b));
        }

        #[test]
        fn cartesian_rotation_agrees(p in arb_point(), k in 0i64..6) {
            let exact = p.rotate60(LatticePoint::ORIGIN, k).to_cartesian();
            let real = p.to_cartesian().rotate60(RealPoint::new(0.0, 0.0), k);
            prop_assert!((exact.x - real.x).abs() < 1e-9 && (exact.y - real.y).abs() < 1e-9);
        }

        #[test]
        fn pose_apply_matches_rotation(p in arb_point(), at in arb_point(), f in 0i64..6) {
            let pose = Pose::new(at, Direction::new(f));
            prop_assert_eq!(pose.apply(p), p.rotate60(LatticePoint::ORIGIN, f) + at);
        }
    }
}
