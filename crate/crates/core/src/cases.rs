//! The two worked families: an exact-overlap system `{t x, b x, (x+8)/9}` and a
//! six-map system whose pieces `K_3`, `K_4` meet in the single point `1/2`.

use serde::{Deserialize, Serialize};

use crate::certify::{disjointness_certificate, Certificate, DisjointnessRequest};
use crate::error::{GenposError, Result};
use crate::family::{FamilyDescriptor, FamilyKind};
use crate::ifs::{address_point, compose, AffineMap, Address, IFSystem, Word};
use crate::interval::{IBox, Interval};
use crate::separation::{check_pair_disjoint, cover_contains, SeparationVerdict, Status};

/// Open upper end of the exact-overlap parameter range.
pub const EXACT_OVERLAP_MAX: f64 = 1.0 / 9.0;
/// Open upper end of the one-point parameter range.
pub const ONE_POINT_MAX: f64 = 1.0 / 36.0;
/// The one-point constant `h`, common point of `K_3` and `K_4`.
pub const ONE_POINT_H: f64 = 0.5;
/// The one-point constant `a`.
pub const ONE_POINT_A: f64 = 1.0 / 3.0;

fn in_open(field: &str, v: f64, max: f64, label: &str) -> Result<()> {
    if v > 0.0 && v < max {
        Ok(())
    } else {
        Err(GenposError::domain(field, format!("{v} is outside (0, {label})")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactOverlapParams {
    pub t: f64,
    pub b: f64,
}

impl ExactOverlapParams {
    pub fn new(t: f64, b: f64) -> Result<Self> {
        in_open("t", t, EXACT_OVERLAP_MAX, "1/9")?;
        in_open("b", b, EXACT_OVERLAP_MAX, "1/9")?;
        Ok(Self { t, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnePointParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl OnePointParams {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        in_open("p", p, ONE_POINT_MAX, "1/36")?;
        in_open("q", q, ONE_POINT_MAX, "1/36")?;
        in_open("r", r, ONE_POINT_MAX, "1/36")?;
        Ok(Self { p, q, r })
    }
}

fn unit_hull() -> IBox {
    IBox::from_bounds(&[0.0], &[1.0])
}

pub(crate) fn build_exact_overlap_unchecked(t: f64, b: f64) -> Result<IFSystem> {
    IFSystem::new(
        vec![
            AffineMap::linear_1d(t, 0.0)?,
            AffineMap::linear_1d(b, 0.0)?,
            AffineMap::linear_1d(1.0 / 9.0, 8.0 / 9.0)?,
        ],
        unit_hull(),
    )
}

/// `{t x, b x, (x + 8)/9}` on `[0, 1]`.
pub fn build_exact_overlap(params: &ExactOverlapParams) -> Result<IFSystem> {
    let p = ExactOverlapParams::new(params.t, params.b)?;
    build_exact_overlap_unchecked(p.t, p.b)
}

pub(crate) fn build_one_point_unchecked(p: f64, q: f64, r: f64) -> Result<IFSystem> {
    let (h, a) = (ONE_POINT_H, ONE_POINT_A);
    IFSystem::new(
        vec![
            AffineMap::linear_1d(p, 0.0)?,
            AffineMap::linear_1d(r, a)?,
            AffineMap::linear_1d(-q, h)?,
            AffineMap::linear_1d(r, h - r)?,
            AffineMap::linear_1d(-r, 1.0 - a)?,
            AffineMap::linear_1d(r, 1.0 - r)?,
        ],
        unit_hull(),
    )
}

/// `{p x, a + r x, h − q x, h − r + r x, 1 − a − r x, 1 − r + r x}` on `[0, 1]`
/// with `h = 1/2`, `a = 1/3`.
pub fn build_one_point(params: &OnePointParams) -> Result<IFSystem> {
    let p = OnePointParams::new(params.p, params.q, params.r)?;
    build_one_point_unchecked(p.p, p.q, p.r)
}

/// A parameter interval; `open` marks whether the endpoints are excluded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub open: bool,
}

impl ParamRange {
    pub fn is_empty(&self) -> bool {
        if self.open {
            self.lo >= self.hi
        } else {
            self.lo > self.hi
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.open {
            self.lo < x && x < self.hi
        } else {
            self.lo <= x && x <= self.hi
        }
    }

    pub fn inflate(&self, eps: f64) -> Self {
        Self {
            lo: self.lo - eps,
            hi: self.hi + eps,
            open: self.open,
        }
    }
}

fn check_exponents(m: usize, n: usize, b: f64) -> Result<()> {
    if m == 0 {
        return Err(GenposError::domain("m", "must be at least 1"));
    }
    if n == 0 {
        return Err(GenposError::domain("n", "must be at least 1"));
    }
    in_open("b", b, EXACT_OVERLAP_MAX, "1/9")
}

/// The `t` for which the hulls `t^m [8/9, 1]` and `b^n [8/9, 1]` of
/// `S_1^m(K_3)` and `S_2^n(K_3)` meet, including `m = n`.
pub fn hull_meet_interval(m: usize, n: usize, b: f64) -> ParamRange {
    let bn = b.powi(n as i32);
    let lo = (8.0 * bn / 9.0).powf(1.0 / m as f64);
    let hi = (9.0 * bn / 8.0)
        .min(9f64.powi(-(m as i32)))
        .powf(1.0 / m as f64)
        .min(EXACT_OVERLAP_MAX);
    ParamRange { lo, hi, open: false }
}

/// `D_mn = { t : 8b^n/9 <= t^m <= min(9b^n/8, 9^-m) }` for `m != n`.
pub fn dmn_interval_exact(m: usize, n: usize, b: f64) -> Result<ParamRange> {
    check_exponents(m, n, b)?;
    if m == n {
        return Err(GenposError::Precondition("m and n must differ".into()));
    }
    Ok(hull_meet_interval(m, n, b))
}

/// Lower bound `(8 − (9/8 + 1)/(8/9)) b^n = (359/64) b^n` on the
/// transversality margin over `D_mn`.
pub fn margin_exact_overlap(n: usize, b: f64) -> f64 {
    359.0 / 64.0 * b.powi(n as i32)
}

/// Transversality certificate for `S_1^m` against `S_2^n` over `D_mn`, using
/// `c_j = 8 b^n`, `C_k = 0` and `r_j <= 9 b^n / 8`.
pub fn exact_overlap_certificate(m: usize, n: usize, b: f64) -> Result<Certificate> {
    let d = dmn_interval_exact(m, n, b)?;
    if d.is_empty() {
        return Err(GenposError::Precondition(format!("D_{m}{n} is empty for b = {b}")));
    }
    let fam = FamilyDescriptor::new(FamilyKind::ExactOverlap { b }, IBox::from_bounds(&[d.lo], &[d.hi]))?;
    let j = Word::repeat(1, m);
    let k = Word::repeat(2, n);
    let bn = b.powi(n as i32);
    let mut req = DisjointnessRequest::new(j.clone(), k, 8.0 * bn, 0.0);
    req.rj_bound = Some((9.0 * bn / 8.0).max(fam.ratios().word_ratio(&j)));
    disjointness_certificate(&fam, &req)
}

/// Outcome of one exponent pair in a case classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub m: usize,
    pub n: usize,
    pub status: Status,
    /// Smallest certified gap, or the unresolved diameter when undecided.
    pub gap_or_overlap: f64,
    pub depth: usize,
    /// Settled by the hull-interval screen without refinement.
    pub fast_path: bool,
    /// Piece indices `(j, i)` left undecided (one-point only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undecided_pieces: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub kind: String,
    pub params: serde_json::Value,
    pub max_mn: usize,
    pub verified: bool,
    pub conclusion: String,
    pub outcomes: Vec<PairOutcome>,
    pub undecided: Vec<(usize, usize)>,
}

impl CaseReport {
    fn finish(kind: &str, params: serde_json::Value, max_mn: usize, outcomes: Vec<PairOutcome>) -> Self {
        let undecided: Vec<_> = outcomes
            .iter()
            .filter(|o| o.status == Status::Undecided)
            .map(|o| (o.m, o.n))
            .collect();
        let verified = undecided.is_empty();
        let conclusion = if verified {
            format!("{kind} verified up to max_mn = {max_mn}")
        } else {
            format!("{} exponent pairs undecided", undecided.len())
        };
        Self {
            kind: kind.into(),
            params,
            max_mn,
            verified,
            conclusion,
            outcomes,
            undecided,
        }
    }
}

fn outcome(m: usize, n: usize, v: &SeparationVerdict) -> PairOutcome {
    PairOutcome {
        m,
        n,
        status: v.status,
        gap_or_overlap: if v.status == Status::Disjoint { v.gap } else { v.overlap_diameter },
        depth: v.depth_used,
        fast_path: false,
        undecided_pieces: Vec::new(),
    }
}

/// Checks `S_1^m(K_3)` against `S_2^n(K_3)` for `1 <= m, n <= max_mn`.
///
/// The diagonal `m = n` is included: there the two pieces coincide exactly
/// when `t = b`, which must not be reported as verified.
pub fn classify_exact_overlap(params: &ExactOverlapParams, max_mn: usize, tol: f64, depth: usize) -> Result<CaseReport> {
    if max_mn == 0 {
        return Err(GenposError::domain("max_mn", "must be at least 1"));
    }
    let system = build_exact_overlap(params)?;
    let mut outcomes = Vec::new();
    for m in 1..=max_mn {
        for n in 1..=max_mn {
            let j = Word::repeat(1, m).pushed(3);
            let k = Word::repeat(2, n).pushed(3);
            let v = check_pair_disjoint(&system, &j, &k, tol, depth)?;
            outcomes.push(outcome(m, n, &v));
        }
    }
    Ok(CaseReport::finish(
        "exact-overlap",
        serde_json::json!({ "t": params.t, "b": params.b }),
        max_mn,
        outcomes,
    ))
}

/// Samples addresses `1 2 α` and checks that each point lies in the depth-`depth`
/// covers of both `K_1` and `K_2`, as `S_1 S_2 = S_2 S_1`. Returns the number of
/// samples that fail (zero when the inclusion holds).
pub fn commuting_inclusion_check(params: &ExactOverlapParams, samples: usize, depth: usize, seed: u64) -> Result<usize> {
    use rand::{Rng, SeedableRng};
    let system = build_exact_overlap(params)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..samples {
        let mut letters = vec![1, 2];
        letters.extend((0..depth).map(|_| rng.gen_range(1..=3)));
        let address = Address::new(Word::new(letters), rng.gen_range(1..=3));
        let (x, _) = address_point(&system, &address, depth + 2)?;
        let in_k1 = cover_contains(&system, &Word::new(vec![1]), depth, &x)?;
        let in_k2 = cover_contains(&system, &Word::new(vec![2]), depth, &x)?;
        if !(in_k1 && in_k2) {
            failures += 1;
        }
    }
    Ok(failures)
}

/// `D_mn(p, r) = (r^{n+1} / (3 p^m), min(3 r^{n+1} / p^m, 1/36))`, open.
pub fn dmn_interval_onepoint(m: usize, n: usize, p: f64, r: f64) -> Result<ParamRange> {
    in_open("p", p, ONE_POINT_MAX, "1/36")?;
    in_open("r", r, ONE_POINT_MAX, "1/36")?;
    let ratio = r.powi(n as i32 + 1) / p.powi(m as i32);
    Ok(ParamRange {
        lo: ONE_POINT_A * ratio,
        hi: (ratio / ONE_POINT_A).min(ONE_POINT_MAX),
        open: true,
    })
}

/// `p^m (1/3 − 1/35 − 3/35) = (23/105) p^m`.
pub fn margin_one_point(m: usize, p: f64) -> f64 {
    23.0 / 105.0 * p.powi(m as i32)
}

/// Transversality certificate for `S_3 S_1^m` against `S_4 S_6^n` over
/// `D_mn(p, r)`, using `c_j = p^m / 3`, `C_k = 0`, `r_j <= p^m / 36` and
/// `r_k <= 3 p^m / 36`.
pub fn one_point_certificate(m: usize, n: usize, p: f64, r: f64) -> Result<Certificate> {
    let d = dmn_interval_onepoint(m, n, p, r)?;
    if d.is_empty() {
        return Err(GenposError::Precondition(format!("D_{m}{n}(p, r) is empty")));
    }
    let fam = FamilyDescriptor::new(FamilyKind::OnePoint { p, r }, IBox::from_bounds(&[d.lo], &[d.hi]))?;
    let j = Word::new(vec![3]).concat(&Word::repeat(1, m));
    let k = Word::new(vec![4]).concat(&Word::repeat(6, n));
    let pm = p.powi(m as i32);
    let mut req = DisjointnessRequest::new(j.clone(), k.clone(), pm / 3.0, 0.0);
    req.rj_bound = Some((pm / 36.0).max(fam.ratios().word_ratio(&j)));
    req.rk_bound = Some((3.0 * pm / 36.0).max(fam.ratios().word_ratio(&k)));
    disjointness_certificate(&fam, &req)
}

/// Checks `S_3 S_1^m(K_j)` against `S_4 S_6^n(K_i)` for `j != 1`, `i != 6` and
/// `0 <= m, n <= max_mn`. Pairs whose hull ranges `p^m q [1/3, 1]` and
/// `r^{n+1} [1/3, 1]` are separated are settled without refinement.
pub fn classify_one_point(params: &OnePointParams, max_mn: usize, tol: f64, depth: usize) -> Result<CaseReport> {
    let system = build_one_point(params)?;
    let mut outcomes = Vec::new();
    for m in 0..=max_mn {
        for n in 0..=max_mn {
            let left = Interval::point(params.q) * Interval::point(params.p.powi(m as i32));
            let right = Interval::point(params.r.powi(n as i32 + 1));
            let third = Interval::new(ONE_POINT_A, 1.0);
            let screen = (left * third).gap(&(right * third));
            if screen > 0.0 {
                outcomes.push(PairOutcome {
                    m,
                    n,
                    status: Status::Disjoint,
                    gap_or_overlap: screen,
                    depth: 0,
                    fast_path: true,
                    undecided_pieces: Vec::new(),
                });
                continue;
            }
            let head_j = Word::new(vec![3]).concat(&Word::repeat(1, m));
            let head_i = Word::new(vec![4]).concat(&Word::repeat(6, n));
            let mut gap = f64::INFINITY;
            let mut worst_overlap: f64 = 0.0;
            let mut deepest = 0;
            let mut undecided = Vec::new();
            for j in 2..=6 {
                for i in 1..=5 {
                    let v = check_pair_disjoint(&system, &head_j.pushed(j), &head_i.pushed(i), tol, depth)?;
                    deepest = deepest.max(v.depth_used);
                    match v.status {
                        Status::Disjoint => gap = gap.min(v.gap),
                        Status::Undecided => {
                            worst_overlap = worst_overlap.max(v.overlap_diameter);
                            undecided.push((j, i));
                        }
                    }
                }
            }
            let settled = undecided.is_empty();
            outcomes.push(PairOutcome {
                m,
                n,
                status: if settled { Status::Disjoint } else { Status::Undecided },
                gap_or_overlap: if settled { gap } else { worst_overlap },
                depth: deepest,
                fast_path: false,
                undecided_pieces: undecided,
            });
        }
    }
    Ok(CaseReport::finish(
        "one-point",
        serde_json::json!({ "p": params.p, "q": params.q, "r": params.r }),
        max_mn,
        outcomes,
    ))
}

/// One element `S_i^{-1} S_j` of the difference set, as `x -> scale x + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WspWitness {
    pub m: usize,
    pub n: usize,
    pub map_scale: f64,
    pub map_offset: f64,
    /// `|map_scale − 1| + |map_offset|`.
    pub identity_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSequence {
    pub kind: String,
    pub log_ratio: f64,
    pub witnesses: Vec<WspWitness>,
    /// False when the exponent cap was hit before `target_tol`.
    pub reached_tol: bool,
}

/// Which witness search to run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessKind {
    ExactOverlap(ExactOverlapParams),
    OnePoint(OnePointParams),
}

const RATIONAL_MAX_DEN: i64 = 1_000_000;

/// Partial quotients of the continued fraction of `x >= 0`, stopping once a
/// convergent denominator would exceed `max_den`.
fn partial_quotients(x: f64, max_den: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if !(a < i64::MAX as f64 / 4.0) {
            break;
        }
        let a = a as i64;
        let Some(k) = a.checked_mul(k1).and_then(|v| v.checked_add(k0)) else { break };
        if k > max_den {
            // the last quotient still matters for intermediate fractions
            out.push(a);
            break;
        }
        out.push(a);
        (k0, k1) = (k1, k);
        let frac = rest - a as f64;
        if frac <= f64::EPSILON * rest.max(1.0) {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}

/// Continued-fraction convergents `(numerator, denominator)` of `x >= 0`, up to
/// denominator `max_den`.
pub fn convergents(x: f64, max_den: i64) -> Vec<(i64, i64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut out = Vec::new();
    for a in partial_quotients(x, max_den) {
        let (h, k) = (a * h1 + h0, a * k1 + k0);
        if k > max_den {
            break;
        }
        out.push((h, k));
        (h0, h1, k0, k1) = (h1, h, k1, k);
    }
    out
}

/// Convergents together with the intermediate fractions between them, in
/// increasing order of denominator, up to `max_den`. These are exactly the
/// best one-sided approximations of `x`.
pub fn intermediate_fractions(x: f64, max_den: i64) -> Vec<(i64, i64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut out = Vec::new();
    'outer: for a in partial_quotients(x, max_den) {
        for j in 1..=a {
            let (h, k) = (j * h1 + h0, j * k1 + k0);
            if k > max_den {
                break 'outer;
            }
            out.push((h, k));
        }
        let (h, k) = (a * h1 + h0, a * k1 + k0);
        (h0, h1, k0, k1) = (h1, h, k1, k);
    }
    out
}

/// Rejects log-ratios that agree with a fraction of denominator at most 10^6
/// to within rounding.
fn screen_rational(x: f64) -> Result<()> {
    let tol = 32.0 * f64::EPSILON * x.abs().max(1.0);
    for (num, den) in convergents(x, RATIONAL_MAX_DEN) {
        if (x - num as f64 / den as f64).abs() <= tol {
            return Err(GenposError::RationalLogRatio { value: x, num, den });
        }
    }
    Ok(())
}

/// Searches for maps `S_i^{-1} S_j` approaching the identity.
///
/// Exact overlap: `S_2^{-n} S_1^l (x) = t^l b^{-n} x` along the continued-fraction
/// convergents and intermediate fractions `n / l` of `log t / log b`, with
/// `l <= max_exponent`. Intermediate fractions are needed because
/// `|t^l b^{-n} - 1|` weighs over- and undershoots differently.
/// One point: `G_n^{-1} H_m` for `H_m = S_3 S_1^m S_5`, `G_n = S_4 S_6^n S_2`,
/// scanning `m <= max_exponent` with the best `n` for each; this problem is
/// inhomogeneous, so there is no convergent recursion to follow.
pub fn wsp_witness_search(kind: &WitnessKind, target_tol: f64, max_exponent: usize) -> Result<WitnessSequence> {
    if !(target_tol > 0.0) {
        return Err(GenposError::domain("tol", "must be positive"));
    }
    if max_exponent == 0 {
        return Err(GenposError::domain("max_exp", "must be at least 1"));
    }
    let mut witnesses: Vec<WspWitness> = Vec::new();
    let mut reached_tol = false;
    let push = |w: WspWitness, out: &mut Vec<WspWitness>| -> bool {
        if out.last().is_none_or(|last| w.identity_distance < last.identity_distance) {
            out.push(w);
            if w.identity_distance <= target_tol {
                return true;
            }
        }
        false
    };
    match kind {
        WitnessKind::ExactOverlap(params) => {
            let p = ExactOverlapParams::new(params.t, params.b)?;
            let (lt, lb) = (p.t.ln(), p.b.ln());
            let x = lt / lb;
            screen_rational(x)?;
            for (n, l) in intermediate_fractions(x, max_exponent as i64) {
                if n <= 0 {
                    continue;
                }
                let scale = (l as f64 * lt - n as f64 * lb).exp();
                let w = WspWitness {
                    m: l as usize,
                    n: n as usize,
                    map_scale: scale,
                    map_offset: 0.0,
                    identity_distance: (scale - 1.0).abs(),
                };
                if push(w, &mut witnesses) {
                    reached_tol = true;
                    break;
                }
            }
            Ok(WitnessSequence {
                kind: "exact-overlap".into(),
                log_ratio: x,
                witnesses,
                reached_tol,
            })
        }
        WitnessKind::OnePoint(params) => {
            let p = OnePointParams::new(params.p, params.q, params.r)?;
            let (lp, lq, lr) = (p.p.ln(), p.q.ln(), p.r.ln());
            let x = lp / lr;
            screen_rational(x)?;
            for m in 0..=max_exponent {
                // n + 1 closest to (m log p + log q) / log r, with n >= 0
                let target = (m as f64 * lp + lq) / lr;
                let base = (target.floor() as i64).max(1);
                let mut best: Option<WspWitness> = None;
                for e in [base, base + 1] {
                    let n = (e - 1) as usize;
                    let w = one_point_witness(m, n, lp, lq, lr, p.r);
                    if best.is_none_or(|b| w.identity_distance < b.identity_distance) {
                        best = Some(w);
                    }
                }
                if let Some(w) = best {
                    if push(w, &mut witnesses) {
                        reached_tol = true;
                        break;
                    }
                }
            }
            Ok(WitnessSequence {
                kind: "one-point".into(),
                log_ratio: x,
                witnesses,
                reached_tol,
            })
        }
    }
}

/// `G_n^{-1} H_m (x) = (r^{n+1} − p^m q)(1 − a)/r^{n+2} + (p^m q / r^{n+1}) x`,
/// evaluated through logarithms so large exponents do not underflow.
fn one_point_witness(m: usize, n: usize, lp: f64, lq: f64, lr: f64, r: f64) -> WspWitness {
    let scale = (m as f64 * lp + lq - (n + 1) as f64 * lr).exp();
    let offset = (1.0 - scale) * (1.0 - ONE_POINT_A) / r;
    WspWitness {
        m,
        n,
        map_scale: scale,
        map_offset: offset,
        identity_distance: (scale - 1.0).abs() + offset.abs(),
    }
}

/// `(scale, offset)` of `G_n^{-1} H_m` obtained by composing the actual maps.
pub fn one_point_composed_witness(params: &OnePointParams, m: usize, n: usize) -> Result<(f64, f64)> {
    let system = build_one_point(params)?;
    let h = compose(&system, &Word::new(vec![3]).concat(&Word::repeat(1, m)).pushed(5))?;
    let g = compose(&system, &Word::new(vec![4]).concat(&Word::repeat(6, n)).pushed(2))?;
    let (ah, ch) = (h.matrix()[0][0], h.offset()[0]);
    let (ag, cg) = (g.matrix()[0][0], g.offset()[0]);
    Ok((ah / ag, (ch - cg) / ag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn exact_overlap_builder() {
        let s = build_exact_overlap(&ExactOverlapParams { t: 0.1, b: 0.1 }).unwrap();
        assert_eq!(s.map(1), s.map(2));
        let s = build_exact_overlap(&ExactOverlapParams { t: 0.05, b: 0.1 }).unwrap();
        assert_eq!(s.map(1).fixed_point(), vec![0.0]);
        assert!(close(s.map(3).fixed_point()[0], 1.0, 1e-15));
        assert!(build_exact_overlap(&ExactOverlapParams { t: 0.2, b: 0.1 }).is_err());
        let r = s.ratios().unwrap();
        assert_eq!(r.entries(), &[0.05, 0.1, 1.0 / 9.0]);
    }

    #[test]
    fn dmn_exact_examples() {
        let d = dmn_interval_exact(1, 2, 0.1).unwrap();
        assert!(close(d.lo, 0.08 / 9.0, 1e-15) && close(d.hi, 0.01125, 1e-15));
        assert!(dmn_interval_exact(1, 1, 0.1).is_err());
        assert!(dmn_interval_exact(3, 1, 0.1).unwrap().is_empty());
        for m in 1..8 {
            for n in 1..8 {
                if m != n {
                    assert!(dmn_interval_exact(m, n, 0.1).unwrap().hi <= EXACT_OVERLAP_MAX);
                }
            }
        }
    }

    #[test]
    fn margins() {
        assert!(close(margin_exact_overlap(1, 0.1), 0.5609375, 1e-15));
        assert!(close(margin_exact_overlap(3, 0.1), 5.609375e-3, 1e-15));
        assert!(close(margin_one_point(0, 0.02), 0.219_047_619_047_619_05, 1e-15));
        assert!(close(margin_one_point(2, 0.02), 8.761_904_761_904_762e-5, 1e-17));
    }

    #[test]
    fn exact_overlap_certificate_reproduces_margin() {
        let c = exact_overlap_certificate(2, 3, 0.1).unwrap();
        assert!(close(c.margin.unwrap(), margin_exact_overlap(3, 0.1), 1e-12));
        assert!(c.holds);
        assert!(c.bound < 1.0);
    }

    #[test]
    fn one_point_certificate_reproduces_margin() {
        let c = one_point_certificate(1, 1, 0.02, 0.02).unwrap();
        assert!(close(c.margin.unwrap(), margin_one_point(1, 0.02), 1e-12));
        assert!(c.holds);
    }

    #[test]
    fn dmn_onepoint_examples() {
        let d = dmn_interval_onepoint(0, 0, 0.02, 0.02).unwrap();
        assert!(close(d.lo, 0.02 / 3.0, 1e-16) && close(d.hi, 1.0 / 36.0, 1e-16));
        let d1 = dmn_interval_onepoint(2, 1, 0.02, 0.02).unwrap();
        let d2 = dmn_interval_onepoint(2, 2, 0.02, 0.02).unwrap();
        assert!(close(d2.lo, d1.lo * 0.02, 1e-14 * d2.lo));
        assert!(dmn_interval_onepoint(0, 0, 0.02, 0.02).unwrap().contains(0.01));
        assert!(dmn_interval_onepoint(0, 3, 0.02, 0.02).unwrap().lo < 1.0 / 36.0);
        assert!(dmn_interval_onepoint(3, 0, 0.02, 0.02).unwrap().is_empty());
    }

    #[test]
    fn one_point_structure() {
        let params = OnePointParams::new(0.02, 0.02, 0.02).unwrap();
        let s = build_one_point(&params).unwrap();
        assert_eq!(s.map(3).apply(&[0.0]), vec![0.5]);
        assert_eq!(s.map(4).apply(&[1.0]), vec![0.5]);
        assert_eq!(s.map(3).ratio(), 0.02);
        for d in 0..8 {
            assert!(cover_contains(&s, &Word::new(vec![3]), d, &[0.5]).unwrap());
            assert!(cover_contains(&s, &Word::new(vec![4]), d, &[0.5]).unwrap());
        }
    }

    #[test]
    fn classify_exact_overlap_outside_dmn() {
        let params = ExactOverlapParams::new(0.07, 0.05).unwrap();
        let rep = classify_exact_overlap(&params, 4, 1e-9, 20).unwrap();
        assert!(rep.verified, "{:?}", rep.undecided);
        let rep = classify_exact_overlap(&ExactOverlapParams::new(0.05, 0.05).unwrap(), 2, 1e-6, 16).unwrap();
        assert!(!rep.verified);
        assert!(rep.undecided.contains(&(1, 1)));
    }

    #[test]
    fn classify_one_point_fast_path() {
        // q = 0.005 lies below every D_mn(0.02, 0.02) with m, n <= 2
        let params = OnePointParams::new(0.02, 0.005, 0.02).unwrap();
        for m in 0..=2 {
            for n in 0..=2 {
                assert!(!dmn_interval_onepoint(m, n, 0.02, 0.02).unwrap().contains(0.005));
            }
        }
        let rep = classify_one_point(&params, 2, 1e-9, 12).unwrap();
        assert!(rep.verified);
        assert!(rep.outcomes.iter().all(|o| o.fast_path));
    }

    #[test]
    fn classify_one_point_near_boundary_refines() {
        let (p, r) = (0.02, 0.02);
        let q = dmn_interval_onepoint(0, 0, p, r).unwrap().lo + 1e-9;
        let rep = classify_one_point(&OnePointParams::new(p, q, r).unwrap(), 0, 1e-12, 30).unwrap();
        assert!(rep.outcomes.iter().any(|o| !o.fast_path));
    }

    #[test]
    fn commuting_inclusion() {
        let params = ExactOverlapParams::new(0.05, 0.1).unwrap();
        assert_eq!(commuting_inclusion_check(&params, 50, 20, 7).unwrap(), 0);
    }

    #[test]
    fn convergents_of_known_numbers() {
        let c = convergents(std::f64::consts::PI, 1000);
        assert_eq!(c, vec![(3, 1), (22, 7), (333, 106), (355, 113)]);
        assert_eq!(convergents(1.5, 100), vec![(1, 1), (3, 2)]);
        assert_eq!(
            intermediate_fractions(std::f64::consts::PI, 120),
            vec![(1, 1), (2, 1), (3, 1), (4, 1), (7, 2), (10, 3), (13, 4), (16, 5), (19, 6), (22, 7), (25, 8), (47, 15), (69, 22), (91, 29), (113, 36), (135, 43), (157, 50), (179, 57), (201, 64), (223, 71), (245, 78), (267, 85), (289, 92), (311, 99), (333, 106), (355, 113)]
        );
    }

    #[test]
    fn exact_overlap_witnesses() {
        let seq = wsp_witness_search(&WitnessKind::ExactOverlap(ExactOverlapParams { t: 0.05, b: 0.1 }), 1e-14, 200).unwrap();
        let pairs: Vec<_> = seq.witnesses.iter().map(|w| (w.m, w.n)).collect();
        assert_eq!(&pairs[..5], &[(1, 1), (3, 4), (7, 9), (10, 13), (93, 121)]);
        assert!(!seq.reached_tol);
        assert!(seq.witnesses.windows(2).all(|w| w[1].identity_distance < w[0].identity_distance));
    }

    #[test]
    fn rational_log_ratio_rejected() {
        let t = 0.1f64.powi(2);
        let r = wsp_witness_search(&WitnessKind::ExactOverlap(ExactOverlapParams { t, b: 0.1 }), 1e-6, 50);
        assert!(matches!(r, Err(GenposError::RationalLogRatio { num: 2, den: 1, .. })));
        let r = wsp_witness_search(&WitnessKind::OnePoint(OnePointParams { p: 0.02, q: 0.01, r: 0.02 }), 1e-6, 50);
        assert!(matches!(r, Err(GenposError::RationalLogRatio { .. })));
    }

    #[test]
    fn one_point_witness_formula() {
        let params = OnePointParams::new(0.02, 0.01, 0.025).unwrap();
        let seq = wsp_witness_search(&WitnessKind::OnePoint(params), 1e-6, 60).unwrap();
        assert!(!seq.witnesses.is_empty());
        for w in &seq.witnesses {
            let pm = 0.02f64.powi(w.m as i32);
            let rn = 0.025f64.powi(w.n as i32 + 1);
            let scale = pm * 0.01 / rn;
            let offset = (rn - pm * 0.01) * (2.0 / 3.0) / (rn * 0.025);
            assert!(close(w.map_scale, scale, 1e-12 * scale.max(1.0)));
            assert!(close(w.map_offset, offset, 1e-12 * offset.abs().max(1.0)));
        }
        for (m, n) in [(0, 0), (1, 1), (3, 2)] {
            let (s, o) = one_point_composed_witness(&params, m, n).unwrap();
            let w = one_point_witness(m, n, 0.02f64.ln(), 0.01f64.ln(), 0.025f64.ln(), 0.025);
            assert!(close(s, w.map_scale, 1e-12 * s.abs().max(1.0)));
            assert!(close(o, w.map_offset, 1e-10 * o.abs().max(1.0)));
        }
    }
}
