//! Outward-rounded interval arithmetic on `f64`.
//!
//! Rounding is emulated by stepping every computed endpoint 4 units in the last
//! place away from the interval (`PAD_ULPS`). That over-covers the error of a
//! single correctly rounded IEEE operation, so each endpoint produced here
//! encloses the exact real result.

use std::fmt;

pub const PAD_ULPS: u32 = 4;

#[inline]
pub fn round_down(mut x: f64) -> f64 {
    for _ in 0..PAD_ULPS {
        x = x.next_down();
    }
    x
}

#[inline]
pub fn round_up(mut x: f64) -> f64 {
    for _ in 0..PAD_ULPS {
        x = x.next_up();
    }
    x
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is inverted");
        Self { lo, hi }
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        round_up(self.hi - self.lo)
    }

    pub fn mid(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Widen both endpoints by `eps`.
    pub fn inflate(&self, eps: f64) -> Self {
        Self::new(round_down(self.lo - eps), round_up(self.hi + eps))
    }

    /// Certified lower bound on the distance between two intervals (0 if they meet).
    pub fn gap(&self, other: &Interval) -> f64 {
        let g = if self.hi < other.lo {
            other.lo - self.hi
        } else if other.hi < self.lo {
            self.lo - other.hi
        } else {
            return 0.0;
        };
        round_down(g).max(0.0)
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn scale(&self, k: f64) -> Self {
        let (a, b) = (self.lo * k, self.hi * k);
        Self::new(round_down(a.min(b)), round_up(a.max(b)))
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval::new(round_down(self.lo + rhs.lo), round_up(self.hi + rhs.hi))
    }
}

impl std::ops::Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval::new(round_down(self.lo - rhs.hi), round_up(self.hi - rhs.lo))
    }
}

impl std::ops::Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(round_down(lo), round_up(hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Axis-aligned box in R^n, n <= 3.
#[derive(Clone, Debug, PartialEq)]
pub struct IBox {
    sides: Vec<Interval>,
}

impl IBox {
    pub fn new(sides: Vec<Interval>) -> Self {
        Self { sides }
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Self {
        Self::new(
            lo.iter()
                .zip(hi)
                .map(|(&l, &h)| Interval::new(l, h))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn lo(&self) -> Vec<f64> {
        self.sides.iter().map(Interval::lo).collect()
    }

    pub fn hi(&self) -> Vec<f64> {
        self.sides.iter().map(Interval::hi).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.sides.iter().map(Interval::mid).collect()
    }

    /// Upper bound on the Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        let s: f64 = self.sides.iter().map(|i| i.width() * i.width()).sum();
        round_up(round_up(s).sqrt())
    }

    /// Certified lower bound on the Euclidean distance between two boxes.
    pub fn distance(&self, other: &IBox) -> f64 {
        let s: f64 = self
            .sides
            .iter()
            .zip(&other.sides)
            .map(|(a, b)| {
                let g = a.gap(b);
                round_down(g * g).max(0.0)
            })
            .sum();
        if s <= 0.0 {
            return 0.0;
        }
        round_down(round_down(s).sqrt()).max(0.0)
    }

    /// Largest distance between a point of `self` and a point of `other`
    /// (not rounded; used only to rule out separation).
    pub fn far_distance(&self, other: &IBox) -> f64 {
        self.sides
            .iter()
            .zip(&other.sides)
            .map(|(a, b)| {
                let g = (a.hi() - b.lo()).abs().max((b.hi() - a.lo()).abs());
                g * g
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains_box(&self, other: &IBox) -> bool {
        self.sides
            .iter()
            .zip(&other.sides)
            .all(|(a, b)| a.contains_interval(b))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.sides.iter().zip(x).all(|(s, &v)| s.contains(v))
    }

    pub fn inflate(&self, eps: f64) -> Self {
        Self::new(self.sides.iter().map(|s| s.inflate(eps)).collect())
    }

    pub fn intersects(&self, other: &IBox) -> bool {
        self.sides
            .iter()
            .zip(&other.sides)
            .all(|(a, b)| a.intersects(b))
    }
}
