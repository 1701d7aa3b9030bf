//! Affine iterated function systems in R^n (n <= 3), words over the map
//! alphabet, and points of the coding space.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GenposError, Result};
use crate::interval::{round_up, IBox, Interval};

pub const MAX_DIM: usize = 3;

/// Relative widenings tried, smallest first, when the hull invariance check
/// fails only by rounding slack.
const HULL_SLACK: [f64; 4] = [1e-15, 1e-14, 1e-13, 1e-12];

type Mat = [[f64; MAX_DIM]; MAX_DIM];
type Vector = [f64; MAX_DIM];

/// One affine contraction `x -> A x + b` with a certified Lipschitz ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    dim: usize,
    matrix: Mat,
    offset: Vector,
    ratio: f64,
}

/// Upper bound for the operator 2-norm of the leading `dim x dim` block.
///
/// Exact in one dimension. Otherwise the smaller of the Frobenius norm and
/// `sqrt(||A^T A||_inf)`, both of which dominate the spectral norm; the second
/// one is tight for similarities.
fn operator_norm_bound(dim: usize, a: &Mat) -> f64 {
    if dim == 1 {
        return a[0][0].abs();
    }
    let mut frob = 0.0;
    for row in a.iter().take(dim) {
        for v in row.iter().take(dim) {
            frob = round_up(frob + round_up(v * v));
        }
    }
    let mut gram_inf: f64 = 0.0;
    for i in 0..dim {
        let mut row_sum = 0.0;
        for j in 0..dim {
            let mut g = 0.0;
            for k in 0..dim {
                g += a[k][i] * a[k][j];
            }
            row_sum = round_up(row_sum + round_up(g.abs()));
        }
        gram_inf = gram_inf.max(row_sum);
    }
    round_up(frob.sqrt()).min(round_up(gram_inf.sqrt()))
}

impl AffineMap {
    pub fn new(matrix: &[Vec<f64>], offset: &[f64]) -> Result<Self> {
        let dim = offset.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(GenposError::domain("dim", format!("must be 1, 2 or 3, got {dim}")));
        }
        if matrix.len() != dim || matrix.iter().any(|row| row.len() != dim) {
            return Err(GenposError::domain("matrix", format!("must be {dim}x{dim}")));
        }
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        for i in 0..dim {
            b[i] = offset[i];
            for j in 0..dim {
                m[i][j] = matrix[i][j];
            }
        }
        if m.iter().flatten().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(GenposError::domain("matrix", "entries must be finite"));
        }
        let ratio = operator_norm_bound(dim, &m);
        if ratio >= 1.0 {
            return Err(GenposError::domain(
                "matrix",
                format!("Lipschitz bound {ratio} is not a contraction"),
            ));
        }
        Ok(Self { dim, matrix: m, offset: b, ratio })
    }

    /// One-dimensional map `x -> a x + b`.
    pub fn linear_1d(a: f64, b: f64) -> Result<Self> {
        Self::new(&[vec![a]], &[b])
    }

    /// Replace the computed ratio by a caller-supplied one. The override must
    /// not undercut the computed bound and must stay below 1.
    pub fn with_ratio(mut self, ratio: f64) -> Result<Self> {
        if !(ratio >= self.ratio && ratio < 1.0) {
            return Err(GenposError::domain(
                "ratio",
                format!("override {ratio} must lie in [{}, 1)", self.ratio),
            ));
        }
        self.ratio = ratio;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.matrix[i][..self.dim].to_vec())
            .collect()
    }

    pub fn offset(&self) -> Vec<f64> {
        self.offset[..self.dim].to_vec()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                let mut acc = self.offset[i];
                for j in 0..self.dim {
                    acc += self.matrix[i][j] * x[j];
                }
                acc
            })
            .collect()
    }

    /// `self ∘ inner`, i.e. apply `inner` first.
    pub fn then_inner(&self, inner: &AffineMap) -> AffineMap {
        let d = self.dim;
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        for i in 0..d {
            let mut acc = self.offset[i];
            for k in 0..d {
                acc += self.matrix[i][k] * inner.offset[k];
            }
            b[i] = acc;
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.matrix[i][k] * inner.matrix[k][j];
                }
                m[i][j] = s;
            }
        }
        let product = round_up(self.ratio * inner.ratio);
        let ratio = product.min(operator_norm_bound(d, &m));
        AffineMap {
            dim: d,
            matrix: m,
            offset: b,
            ratio,
        }
    }

    pub fn identity(dim: usize) -> AffineMap {
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        AffineMap {
            dim,
            matrix: m,
            offset: [0.0; MAX_DIM],
            ratio: 1.0,
        }
    }

    /// The unique fixed point, solving `(I - A) x = b` by Gaussian elimination.
    pub fn fixed_point(&self) -> Vec<f64> {
        let d = self.dim;
        let mut a = [[0.0; MAX_DIM + 1]; MAX_DIM];
        for i in 0..d {
            for j in 0..d {
                a[i][j] = if i == j { 1.0 } else { 0.0 } - self.matrix[i][j];
            }
            a[i][d] = self.offset[i];
        }
        for col in 0..d {
            let piv = (col..d)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap_or(col);
            a.swap(col, piv);
            for row in 0..d {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for c in col..=d {
                        a[row][c] -= f * a[col][c];
                    }
                }
            }
        }
        (0..d).map(|i| a[i][d] / a[i][i]).collect()
    }

    pub fn to_interval(&self) -> IntervalAffine {
        let mut m = [[Interval::point(0.0); MAX_DIM]; MAX_DIM];
        let mut b = [Interval::point(0.0); MAX_DIM];
        for i in 0..self.dim {
            b[i] = Interval::point(self.offset[i]);
            for j in 0..self.dim {
                m[i][j] = Interval::point(self.matrix[i][j]);
            }
        }
        IntervalAffine {
            dim: self.dim,
            matrix: m,
            offset: b,
        }
    }

    /// Outward-rounded image of a box.
    pub fn image(&self, b: &IBox) -> IBox {
        self.to_interval().image(b)
    }
}

/// Affine map with interval coefficients. Compositions of [`AffineMap`]s are
/// carried in this form so that rounding in the composition is enclosed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalAffine {
    dim: usize,
    matrix: [[Interval; MAX_DIM]; MAX_DIM],
    offset: [Interval; MAX_DIM],
}

impl IntervalAffine {
    pub fn identity(dim: usize) -> Self {
        AffineMap::identity(dim).to_interval()
    }

    /// `self ∘ inner`.
    pub fn then_inner(&self, inner: &IntervalAffine) -> IntervalAffine {
        let d = self.dim;
        let mut m = [[Interval::point(0.0); MAX_DIM]; MAX_DIM];
        let mut b = [Interval::point(0.0); MAX_DIM];
        for i in 0..d {
            let mut acc = self.offset[i];
            for k in 0..d {
                acc = acc + self.matrix[i][k] * inner.offset[k];
            }
            b[i] = acc;
            for j in 0..d {
                let mut s = self.matrix[i][0] * inner.matrix[0][j];
                for k in 1..d {
                    s = s + self.matrix[i][k] * inner.matrix[k][j];
                }
                m[i][j] = s;
            }
        }
        IntervalAffine {
            dim: d,
            matrix: m,
            offset: b,
        }
    }

    pub fn image(&self, b: &IBox) -> IBox {
        let sides = b.sides();
        IBox::new(
            (0..self.dim)
                .map(|i| {
                    let mut acc = self.offset[i];
                    for (j, s) in sides.iter().enumerate().take(self.dim) {
                        acc = acc + self.matrix[i][j] * *s;
                    }
                    acc
                })
                .collect(),
        )
    }
}

/// Finite word over the alphabet `{1..m}`. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// The word `letter^count`.
    pub fn repeat(letter: usize, count: usize) -> Self {
        Word(vec![letter; count])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pushed(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l > m) {
            Some(bad) => Err(GenposError::domain(
                "word",
                format!("letter {bad} outside 1..={m}"),
            )),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Word {
    type Err = GenposError;

    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        if s.is_empty() {
            return Ok(Word::empty());
        }
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| GenposError::domain("word", format!("bad letter {p:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<usize>::deserialize(d).map(Word)
    }
}

/// Longest common prefix of two words and whether they are incomparable.
pub fn word_meet(a: &Word, b: &Word) -> (Word, bool) {
    let n = a
        .0
        .iter()
        .zip(&b.0)
        .take_while(|(x, y)| x == y)
        .count();
    let meet = Word(a.0[..n].to_vec());
    let incomparable = n < a.len() && n < b.len();
    (meet, incomparable)
}

/// Contraction ratios `r_1..r_m`, each in (0,1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RatioVector {
    entries: Vec<f64>,
    sbar: f64,
}

impl RatioVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(GenposError::domain("ratios", "need at least two entries"));
        }
        if let Some(bad) = entries.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(GenposError::domain(
                "ratios",
                format!("entry {bad} outside (0,1)"),
            ));
        }
        let sbar = entries.iter().copied().fold(0.0, f64::max);
        Ok(Self { entries, sbar })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `r̄ = max r_i`.
    pub fn max_ratio(&self) -> f64 {
        self.sbar
    }

    /// Upper bound on `r_w = r_{w_1} ... r_{w_n}` (1 for the empty word).
    pub fn word_ratio(&self, w: &Word) -> f64 {
        w.letters()
            .iter()
            .fold(1.0, |acc, &l| round_up(acc * self.entries[l - 1]))
    }

    /// Plain floating-point product, used where a metric value (not a bound) is wanted.
    fn word_product(&self, letters: impl Iterator<Item = usize>) -> f64 {
        letters.fold(1.0, |acc, l| acc * self.entries[l - 1])
    }

    /// True when every entry is at least the certified ratio of the matching map.
    pub fn dominates(&self, system: &IFSystem) -> bool {
        self.entries.len() == system.len()
            && self
                .entries
                .iter()
                .zip(system.maps())
                .all(|(r, m)| *r >= m.ratio())
    }
}

impl TryFrom<Vec<f64>> for RatioVector {
    type Error = GenposError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        RatioVector::new(v)
    }
}

impl From<RatioVector> for Vec<f64> {
    fn from(r: RatioVector) -> Vec<f64> {
        r.entries
    }
}

/// Eventually constant point of the coding space: `prefix · tail^∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Address {
    pub prefix: Word,
    pub tail: usize,
}

impl Address {
    pub fn new(prefix: Word, tail: usize) -> Self {
        Self { prefix, tail }
    }

    pub fn constant(tail: usize) -> Self {
        Self::new(Word::empty(), tail)
    }

    pub fn letter(&self, i: usize) -> usize {
        self.prefix.letters().get(i).copied().unwrap_or(self.tail)
    }

    /// First `depth` letters.
    pub fn truncate(&self, depth: usize) -> Word {
        Word((0..depth).map(|i| self.letter(i)).collect())
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        self.prefix.validate(m)?;
        Word(vec![self.tail]).validate(m)
    }
}

/// `ρ_r(α, β) = r_{α∧β}`; 1 when the meet is empty and 0 for identical addresses.
/// The meet is truncated to `depth_cap` letters, which can only enlarge the value.
pub fn coding_distance(a: &Address, b: &Address, r: &RatioVector, depth_cap: usize) -> Result<f64> {
    if depth_cap == 0 {
        return Err(GenposError::domain("depth_cap", "must be at least 1"));
    }
    a.validate(r.len())?;
    b.validate(r.len())?;
    let horizon = a.prefix.len().max(b.prefix.len());
    let meet_len = (0..=horizon).find(|&i| a.letter(i) != b.letter(i));
    match meet_len {
        None => Ok(0.0),
        Some(n) => Ok(r.word_product((0..n.min(depth_cap)).map(|i| a.letter(i)))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullDescriptor {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// JSON form of an [`IFSystem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub dim: usize,
    pub maps: Vec<MapDescriptor>,
    pub hull: HullDescriptor,
}

/// Ordered list of affine contractions together with an invariant box.
#[derive(Clone, Debug, PartialEq)]
pub struct IFSystem {
    maps: Vec<AffineMap>,
    hull: IBox,
}

impl IFSystem {
    /// Validates `m >= 2`, consistent dimensions and `S_i(hull) ⊆ hull` under
    /// outward rounding. If the check fails only by rounding slack, the hull is
    /// widened by at most `1e-12 · (1 + diam)` and re-verified.
    pub fn new(maps: Vec<AffineMap>, hull: IBox) -> Result<Self> {
        if maps.len() < 2 {
            return Err(GenposError::domain("maps", "a system needs at least two maps"));
        }
        let dim = maps[0].dim();
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(GenposError::domain("maps", "all maps must share one dimension"));
        }
        if hull.dim() != dim {
            return Err(GenposError::domain("hull", format!("must have dimension {dim}")));
        }
        if hull.sides().iter().any(|s| !(s.lo().is_finite() && s.hi().is_finite())) {
            return Err(GenposError::domain("hull", "bounds must be finite"));
        }
        let invariant = |h: &IBox| maps.iter().all(|m| h.contains_box(&m.image(h)));
        if invariant(&hull) {
            return Ok(Self { maps, hull });
        }
        let scale = 1.0 + hull.diameter();
        for slack in HULL_SLACK {
            let widened = hull.inflate(slack * scale);
            if invariant(&widened) {
                return Ok(Self { maps, hull: widened });
            }
        }
        let widened = hull.inflate(HULL_SLACK[3] * scale);
        let bad = maps
            .iter()
            .position(|m| !widened.contains_box(&m.image(&widened)))
            .unwrap_or(0);
        Err(GenposError::domain(
            "hull",
            format!("image of the hull under map {} leaves the hull", bad + 1),
        ))
    }

    pub fn from_descriptor(d: &SystemDescriptor) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d.dim) {
            return Err(GenposError::domain("dim", format!("must be 1, 2 or 3, got {}", d.dim)));
        }
        let maps = d
            .maps
            .iter()
            .map(|md| {
                if md.offset.len() != d.dim {
                    return Err(GenposError::domain("offset", format!("must have length {}", d.dim)));
                }
                let m = AffineMap::new(&md.matrix, &md.offset)?;
                match md.ratio {
                    Some(r) => m.with_ratio(r),
                    None => Ok(m),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if d.hull.lo.len() != d.dim || d.hull.hi.len() != d.dim {
            return Err(GenposError::domain("hull", format!("bounds must have length {}", d.dim)));
        }
        if d.hull.lo.iter().zip(&d.hull.hi).any(|(l, h)| !(l <= h)) {
            return Err(GenposError::domain("hull", "lo must not exceed hi"));
        }
        Self::new(maps, IBox::from_bounds(&d.hull.lo, &d.hull.hi))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let d: SystemDescriptor =
            serde_json::from_str(json).map_err(|e| GenposError::Descriptor(e.to_string()))?;
        Self::from_descriptor(&d)
    }

    pub fn to_descriptor(&self) -> SystemDescriptor {
        SystemDescriptor {
            dim: self.dim(),
            maps: self
                .maps
                .iter()
                .map(|m| MapDescriptor {
                    matrix: m.matrix(),
                    offset: m.offset(),
                    ratio: None,
                })
                .collect(),
            hull: HullDescriptor {
                lo: self.hull.lo(),
                hi: self.hull.hi(),
            },
        }
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn map(&self, letter: usize) -> &AffineMap {
        &self.maps[letter - 1]
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn hull(&self) -> &IBox {
        &self.hull
    }

    /// Certified ratios of the maps as a [`RatioVector`].
    pub fn ratios(&self) -> Result<RatioVector> {
        RatioVector::new(self.maps.iter().map(AffineMap::ratio).collect())
    }

    /// Outward-rounded enclosure of `S_w` with interval coefficients.
    pub fn compose_interval(&self, word: &Word) -> Result<IntervalAffine> {
        word.validate(self.len())?;
        Ok(word
            .letters()
            .iter()
            .fold(IntervalAffine::identity(self.dim()), |acc, &l| {
                acc.then_inner(&self.map(l).to_interval())
            }))
    }

    /// Outward-rounded box enclosing `S_w(V)`.
    pub fn piece_box(&self, word: &Word) -> Result<IBox> {
        Ok(self.compose_interval(word)?.image(&self.hull))
    }
}

/// `S_w = S_{w_1} ∘ ... ∘ S_{w_n}` as a floating-point affine map.
pub fn compose(system: &IFSystem, word: &Word) -> Result<AffineMap> {
    word.validate(system.len())?;
    Ok(word
        .letters()
        .iter()
        .fold(AffineMap::identity(system.dim()), |acc, &l| {
            acc.then_inner(system.map(l))
        }))
}

/// Approximate `π(α)` as `S_{α|depth}(center of V)`. The true point lies within
/// `ratio(S_{α|depth}) · diam(V)` of the returned point.
pub fn address_point(system: &IFSystem, address: &Address, depth: usize) -> Result<(Vec<f64>, f64)> {
    if depth == 0 {
        return Err(GenposError::domain("depth", "must be at least 1"));
    }
    address.validate(system.len())?;
    let s = compose(system, &address.truncate(depth))?;
    let point = s.apply(&system.hull.center());
    Ok((point, round_up(s.ratio() * system.hull.diameter())))
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor() -> IFSystem {
        IFSystem::new(
            vec![
                AffineMap::linear_1d(1.0 / 3.0, 0.0).unwrap(),
                AffineMap::linear_1d(1.0 / 3.0, 2.0 / 3.0).unwrap(),
            ],
            IBox::from_bounds(&[0.0], &[1.0]),
        )
        .unwrap()
    }

    #[test]
    fn compose_single_letter() {
        let s = compose(&cantor(), &Word::new(vec![1])).unwrap();
        assert_eq!(s.matrix(), vec![vec![1.0 / 3.0]]);
        assert_eq!(s.offset(), vec![0.0]);
    }

    #[test]
    fn compose_two_letters_hand_value() {
        // S1(S2(x)) = ((x + 2)/3)/3 = (x + 2)/9
        let s = compose(&cantor(), &Word::new(vec![1, 2])).unwrap();
        assert!((s.matrix()[0][0] - 1.0 / 9.0).abs() < 1e-16);
        assert!((s.offset()[0] - 2.0 / 9.0).abs() < 1e-16);
        assert!((s.ratio() - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn compose_rejects_bad_letter() {
        assert!(compose(&cantor(), &Word::new(vec![1, 3])).is_err());
        assert!(compose(&cantor(), &Word::new(vec![0])).is_err());
    }

    #[test]
    fn meet_examples() {
        let w = |v: &[usize]| Word::new(v.to_vec());
        assert_eq!(word_meet(&w(&[1, 2, 1]), &w(&[1, 2, 2])), (w(&[1, 2]), true));
        assert_eq!(word_meet(&w(&[1, 2]), &w(&[1, 2, 2])), (w(&[1, 2]), false));
        assert_eq!(word_meet(&w(&[3]), &w(&[1])), (Word::empty(), true));
    }

    #[test]
    fn coding_distance_examples() {
        let r = RatioVector::new(vec![1.0 / 3.0; 3]).unwrap();
        let d = coding_distance(&Address::constant(1), &Address::constant(2), &r, 10).unwrap();
        assert_eq!(d, 1.0);
        let a = Address::new(Word::new(vec![1, 1]), 3);
        let b = Address::new(Word::new(vec![1, 2]), 3);
        assert!((coding_distance(&a, &b, &r, 10).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(coding_distance(&a, &a, &r, 10).unwrap(), 0.0);
        // written differently, same point of I^∞
        let a2 = Address::new(Word::new(vec![1, 1, 3, 3]), 3);
        assert_eq!(coding_distance(&a, &a2, &r, 10).unwrap(), 0.0);
        assert!(coding_distance(&a, &b, &r, 0).is_err());
    }

    #[test]
    fn address_points_of_cantor() {
        let s = cantor();
        for depth in [1, 5, 20] {
            let (p, e) = address_point(&s, &Address::constant(1), depth).unwrap();
            assert!(p[0].abs() <= e);
            assert!((e - (1.0f64 / 3.0).powi(depth as i32)).abs() < 1e-12);
            let (p, e) = address_point(&s, &Address::constant(2), depth).unwrap();
            assert!((p[0] - 1.0).abs() <= e);
        }
        let (p, e) = address_point(&s, &Address::new(Word::new(vec![2]), 1), 10).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() <= e);
        assert!((e - 3f64.powi(-10)).abs() < 1e-12);
    }

    #[test]
    fn hull_must_be_invariant() {
        let maps = vec![
            AffineMap::linear_1d(0.5, 0.0).unwrap(),
            AffineMap::linear_1d(0.5, 0.9).unwrap(),
        ];
        assert!(IFSystem::new(maps, IBox::from_bounds(&[0.0], &[1.0])).is_err());
    }

    #[test]
    fn single_map_or_expanding_map_rejected() {
        assert!(IFSystem::new(
            vec![AffineMap::linear_1d(0.5, 0.0).unwrap()],
            IBox::from_bounds(&[0.0], &[1.0])
        )
        .is_err());
        assert!(AffineMap::linear_1d(1.0, 0.0).is_err());
        assert!(AffineMap::new(&[vec![0.5, 0.0], vec![0.0, 0.5]], &[0.0]).is_err());
    }

    #[test]
    fn ratio_override_cannot_undercut() {
        let m = AffineMap::linear_1d(0.5, 0.0).unwrap();
        assert!(m.with_ratio(0.4).is_err());
        assert!(m.with_ratio(1.0).is_err());
        assert_eq!(m.with_ratio(0.6).unwrap().ratio(), 0.6);
    }

    #[test]
    fn rotation_similarity_ratio_is_tight() {
        let (c, s) = (0.3f64.cos() * 0.5, 0.3f64.sin() * 0.5);
        let m = AffineMap::new(&[vec![c, -s], vec![s, c]], &[0.0, 0.0]).unwrap();
        assert!(m.ratio() >= 0.5 && m.ratio() < 0.5 + 1e-12);
    }

    #[test]
    fn fixed_point_solves_linear_system() {
        let m = AffineMap::new(&[vec![0.5, 0.1], vec![-0.2, 0.3]], &[1.0, 2.0]).unwrap();
        let x = m.fixed_point();
        let y = m.apply(&x);
        assert!(euclid(&x, &y) < 1e-14);
    }

    #[test]
    fn descriptor_roundtrip() {
        let json = r#"{"dim":1,"maps":[{"matrix":[[0.3333333333333333]],"offset":[0.0]},
            {"matrix":[[0.3333333333333333]],"offset":[0.6666666666666666]}],
            "hull":{"lo":[0.0],"hi":[1.0]}}"#;
        let s = IFSystem::from_json(json).unwrap();
        assert_eq!(s.len(), 2);
        let again = IFSystem::from_descriptor(&s.to_descriptor()).unwrap();
        assert_eq!(again.maps(), s.maps());
    }

    #[test]
    fn word_parsing() {
        assert_eq!("1,2,3".parse::<Word>().unwrap(), Word::new(vec![1, 2, 3]));
        assert_eq!("[2]".parse::<Word>().unwrap(), Word::new(vec![2]));
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
        assert!("1,x".parse::<Word>().is_err());
    }
}
