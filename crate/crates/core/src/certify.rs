//! Dimension bounds for exceptional parameter sets.
//!
//! Every certificate echoes the constants it was computed from, and every
//! comparison is rounded against `holds`: dimensions are rounded up and
//! margins down.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{GenposError, Result};
use crate::family::FamilyDescriptor;
use crate::ifs::{address_point, euclid, word_meet, Address, RatioVector, Word};
use crate::interval::{round_down, round_up};
use crate::moran::{similarity_dimension_upper, similarity_root};

/// Constants of the Hölder / anti-Hölder hypotheses of the general position bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderData {
    pub alpha: f64,
    pub beta: f64,
    pub c0: f64,
    pub m0: f64,
    /// Hausdorff dimension of `L_1 × L_2`.
    pub dim_l1l2: f64,
    pub dim_d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    /// Upper bound on the dimension of the exceptional set.
    pub bound: f64,
    /// Dimension of the parameter domain.
    pub threshold: f64,
    pub holds: bool,
    /// Left side of the transversality margin, when the certificate has one.
    pub margin: Option<f64>,
    pub conclusion: String,
    pub inputs: BTreeMap<String, Value>,
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(GenposError::domain(field, format!("must be positive, got {v}")))
    }
}

/// `dim_H Δ <= min((β/α) dim(L_1 × L_2), dim D)`; holds when the bound is
/// strictly below `dim D`.
pub fn genpos_bound(h: &HolderData) -> Result<Certificate> {
    positive("alpha", h.alpha)?;
    positive("beta", h.beta)?;
    positive("c0", h.c0)?;
    positive("m0", h.m0)?;
    if !(h.dim_l1l2 >= 0.0) {
        return Err(GenposError::domain("dim_l1l2", "must be non-negative"));
    }
    if !(h.dim_d >= 0.0) {
        return Err(GenposError::domain("dim_d", "must be non-negative"));
    }
    let scaled = if h.alpha == h.beta {
        h.dim_l1l2
    } else {
        round_up(round_up(h.beta / h.alpha) * h.dim_l1l2)
    };
    let bound = scaled.min(h.dim_d);
    let holds = bound < h.dim_d;
    Ok(Certificate {
        kind: "general-position".into(),
        bound,
        threshold: h.dim_d,
        holds,
        margin: None,
        conclusion: if holds {
            "the exceptional parameter set has dimension below dim D".into()
        } else {
            "no reduction below dim D".into()
        },
        inputs: [
            ("alpha", json!(h.alpha)),
            ("beta", json!(h.beta)),
            ("c0", json!(h.c0)),
            ("m0", json!(h.m0)),
            ("dim_l1l2", json!(h.dim_l1l2)),
            ("dim_d", json!(h.dim_d)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
    })
}

/// Ready-made Hölder data for the three standard translation/rotation settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case")]
pub enum HolderPreset {
    /// `B ∩ zA` for `z` in a disc of radius `disc_radius`; needs `inf |A| > 0`.
    ZaRotation { inf_abs_z: f64, disc_radius: f64, dim_ab: f64 },
    /// `A` moved by `M_2 t` against an `M_1`-Lipschitz deformation of `B`.
    EscapingTranslation { m1: f64, m2: f64, n: usize, dim_ab: f64 },
    /// `F(B + t)` with `F` bi-Lipschitz with constants `l_minus <= l_plus`.
    BilipTranslation { l_minus: f64, l_plus: f64, n: usize, dim_ab: f64 },
}

pub fn holder_preset(preset: &HolderPreset) -> Result<HolderData> {
    let data = |c0, m0, dim_l1l2, dim_d| HolderData {
        alpha: 1.0,
        beta: 1.0,
        c0,
        m0,
        dim_l1l2,
        dim_d,
    };
    match *preset {
        HolderPreset::ZaRotation { inf_abs_z, disc_radius, dim_ab } => {
            if !(inf_abs_z > 0.0) {
                return Err(GenposError::Hypothesis("0 must not lie in the closure of A (inf |z| > 0)".into()));
            }
            positive("disc_radius", disc_radius)?;
            Ok(data(disc_radius, inf_abs_z, dim_ab, 2.0))
        }
        HolderPreset::EscapingTranslation { m1, m2, n, dim_ab } => {
            if !(m1 > 0.0 && m2 > m1) {
                return Err(GenposError::Hypothesis(format!("need M2 > M1 > 0, got M1={m1}, M2={m2}")));
            }
            Ok(data(m1, m2 - m1, dim_ab, n as f64))
        }
        HolderPreset::BilipTranslation { l_minus, l_plus, n, dim_ab } => {
            if !(l_minus > 0.0 && l_minus <= l_plus) {
                return Err(GenposError::Hypothesis(format!(
                    "need 0 < L- <= L+, got L-={l_minus}, L+={l_plus}"
                )));
            }
            Ok(data(l_plus, l_minus, dim_ab, n as f64))
        }
    }
}

/// `C · dist / (1 - r̄)`, rounded up.
pub fn displacement_bound(c: f64, rbar: f64, dist: f64) -> Result<f64> {
    if !(rbar > 0.0 && rbar < 1.0) {
        return Err(GenposError::domain("rbar", format!("must lie in (0,1), got {rbar}")));
    }
    positive("C", c)?;
    if !(dist >= 0.0) {
        return Err(GenposError::domain("dist", "must be non-negative"));
    }
    if dist == 0.0 {
        return Ok(0.0);
    }
    Ok(round_up(round_up(c * dist) / round_down(1.0 - rbar)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementWitness {
    pub address_prefix: Word,
    pub address_tail: usize,
    pub t: Vec<f64>,
    pub t_prime: Vec<f64>,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    pub max_ratio: f64,
    pub passed: bool,
    pub witness: Option<DisplacementWitness>,
}

/// Samples addresses and parameter pairs and compares the observed motion of
/// `π_t(α)` against the displacement bound plus the truncation error of both
/// depth-`depth` approximations.
pub fn empirical_displacement_check(
    fam: &FamilyDescriptor,
    samples: usize,
    depth: usize,
    seed: u64,
) -> Result<DisplacementReport> {
    if depth == 0 {
        return Err(GenposError::domain("depth", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = fam.map_count();
    let rbar = fam.ratios().max_ratio();
    let truncation = round_up(2.0 * rbar.powi(depth as i32) * fam.hull().diameter());
    let mut max_ratio: f64 = 0.0;
    for _ in 0..samples {
        let prefix = Word::new((0..depth).map(|_| rng.gen_range(1..=m)).collect());
        let address = Address::new(prefix, rng.gen_range(1..=m));
        let t = fam.sample_param(&mut rng);
        // every fourth sample reuses t to exercise the zero-motion case
        let t_prime = if rng.gen_ratio(1, 4) { t.clone() } else { fam.sample_param(&mut rng) };
        let (p, _) = address_point(&fam.system_at(&t)?, &address, depth)?;
        let (q, _) = address_point(&fam.system_at(&t_prime)?, &address, depth)?;
        let observed = euclid(&p, &q);
        let bound = displacement_bound(fam.motion(), rbar, euclid(&t, &t_prime))? + truncation;
        let ratio = observed / bound;
        max_ratio = max_ratio.max(ratio);
        if observed > bound {
            return Ok(DisplacementReport {
                samples,
                depth,
                seed,
                max_ratio,
                passed: false,
                witness: Some(DisplacementWitness {
                    address_prefix: address.prefix,
                    address_tail: address.tail,
                    t,
                    t_prime,
                    observed,
                    bound,
                }),
            });
        }
    }
    Ok(DisplacementReport {
        samples,
        depth,
        seed,
        max_ratio,
        passed: true,
        witness: None,
    })
}

/// Inputs for the piece-disjointness certificate of two incomparable words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessRequest {
    pub j: Word,
    pub k: Word,
    /// Anti-Lipschitz constant of `t -> S_{j,t}(x)`.
    pub cj: f64,
    /// Lipschitz constant of `t -> S_{k,t}(x)`.
    pub ck: f64,
    /// Looser replacement for `r_j`; must not be smaller than the product.
    #[serde(default)]
    pub rj_bound: Option<f64>,
    #[serde(default)]
    pub rk_bound: Option<f64>,
    /// Defaults to the number of non-degenerate axes of the parameter box.
    #[serde(default)]
    pub dim_d: Option<f64>,
}

impl DisjointnessRequest {
    pub fn new(j: Word, k: Word, cj: f64, ck: f64) -> Self {
        Self {
            j,
            k,
            cj,
            ck,
            rj_bound: None,
            rk_bound: None,
            dim_d: None,
        }
    }

    /// Takes `c_j` and `C_k` from the family's per-word motion constants.
    pub fn derived(fam: &FamilyDescriptor, j: Word, k: Word) -> Result<Self> {
        let (cj, _) = fam.word_motion(&j)?;
        let (_, ck) = fam.word_motion(&k)?;
        Ok(Self::new(j, k, cj, ck))
    }
}

/// `c_j − C_k − (r_j + r_k) C / (1 − r̄)`, rounded down.
pub fn disjointness_margin(cj: f64, ck: f64, rj: f64, rk: f64, c: f64, rbar: f64) -> f64 {
    let drift = round_up(round_up(round_up(rj + rk) * c) / round_down(1.0 - rbar));
    round_down(round_down(cj - ck) - drift)
}

fn effective_ratio(field: &str, product: f64, bound: Option<f64>) -> Result<f64> {
    match bound {
        None => Ok(product),
        Some(b) if b >= product && b.is_finite() => Ok(b),
        Some(b) => Err(GenposError::domain(
            field,
            format!("{b} is below the ratio product {product}"),
        )),
    }
}

pub fn disjointness_certificate(fam: &FamilyDescriptor, req: &DisjointnessRequest) -> Result<Certificate> {
    let m = fam.map_count();
    req.j.validate(m)?;
    req.k.validate(m)?;
    if !word_meet(&req.j, &req.k).1 {
        return Err(GenposError::Precondition(format!(
            "words {} and {} are comparable",
            req.j, req.k
        )));
    }
    positive("cj", req.cj)?;
    if !(req.ck >= 0.0) {
        return Err(GenposError::domain("ck", "must be non-negative"));
    }
    let r = fam.ratios();
    let rj = effective_ratio("rj_bound", r.word_ratio(&req.j), req.rj_bound)?;
    let rk = effective_ratio("rk_bound", r.word_ratio(&req.k), req.rk_bound)?;
    let rbar = r.max_ratio();
    let margin = disjointness_margin(req.cj, req.ck, rj, rk, fam.motion(), rbar);
    let dim_d = req.dim_d.unwrap_or_else(|| fam.default_dim_d());
    let root = similarity_root(r);
    let bound = round_up(2.0 * root.upper);
    let holds = margin > 0.0 && bound < dim_d;
    let mut inputs: BTreeMap<String, Value> = [
        ("j", json!(req.j)),
        ("k", json!(req.k)),
        ("cj", json!(req.cj)),
        ("ck", json!(req.ck)),
        ("rj", json!(rj)),
        ("rk", json!(rk)),
        ("rbar", json!(rbar)),
        ("C", json!(fam.motion())),
        ("ratios", json!(r.entries())),
        ("s_r", json!(root.s)),
        ("dim_d", json!(dim_d)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    inputs.insert("domain_lo".into(), json!(fam.domain().lo()));
    inputs.insert("domain_hi".into(), json!(fam.domain().hi()));
    Ok(Certificate {
        kind: "piece-disjointness".into(),
        bound,
        threshold: dim_d,
        holds,
        margin: Some(margin),
        conclusion: if holds {
            format!("K_{} ∩ K_{} = ∅ for almost all parameters in D", req.j, req.k)
        } else {
            "not certified".into()
        },
        inputs,
    })
}

/// Only map `m` is translated by `t ∈ R^n`: pieces `k` and `m` separate for
/// almost every `t` when `r_k + r_m + r̄ < 1` and `s_r < n/2`.
pub fn translation_bound_single(r: &RatioVector, k: usize, m: usize, n: usize) -> Result<Certificate> {
    let len = r.len();
    for (name, v) in [("k", k), ("m", m)] {
        if v == 0 || v > len {
            return Err(GenposError::domain(name, format!("must lie in 1..={len}")));
        }
    }
    if k == m {
        return Err(GenposError::Precondition("k and m must differ".into()));
    }
    if n == 0 {
        return Err(GenposError::domain("n", "must be at least 1"));
    }
    let (rk, rm, rbar) = (r.entries()[k - 1], r.entries()[m - 1], r.max_ratio());
    let sum = round_up(round_up(rk + rm) + rbar);
    let s_upper = similarity_dimension_upper(r);
    let bound = round_up(2.0 * s_upper);
    let threshold = n as f64;
    let holds = sum < 1.0 && s_upper < threshold / 2.0;
    Ok(Certificate {
        kind: "translation-single".into(),
        bound,
        threshold,
        holds,
        margin: Some(disjointness_margin(1.0, 0.0, rk, rm, 1.0, rbar)),
        conclusion: if holds {
            format!("K_{k},t ∩ K_{m},t = ∅ for almost all t ∈ R^{n}")
        } else {
            "not certified".into()
        },
        inputs: [
            ("ratios", json!(r.entries())),
            ("k", json!(k)),
            ("m", json!(m)),
            ("n", json!(n)),
            ("pair_sum", json!(sum)),
            ("s_r", json!(similarity_root(r).s)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
    })
}

/// Every map translated independently: SSC for almost every translation
/// vector when all pairwise `r_j + r_k + r̄ < 1` and `s_r < n/2`.
pub fn translation_bound_ssc(r: &RatioVector, n: usize) -> Result<Certificate> {
    if n == 0 {
        return Err(GenposError::domain("n", "must be at least 1"));
    }
    let e = r.entries();
    let rbar = r.max_ratio();
    let mut worst: f64 = 0.0;
    for a in 0..e.len() {
        for b in a + 1..e.len() {
            worst = worst.max(round_up(round_up(e[a] + e[b]) + rbar));
        }
    }
    let s_upper = similarity_dimension_upper(r);
    let threshold = n as f64;
    let holds = worst < 1.0 && s_upper < threshold / 2.0;
    let m = e.len();
    Ok(Certificate {
        kind: "translation-ssc".into(),
        bound: round_up(2.0 * s_upper),
        threshold,
        holds,
        margin: None,
        conclusion: if holds {
            format!("strong separation for almost all translation vectors in R^{}", m * n)
        } else {
            "not certified".into()
        },
        inputs: [
            ("ratios", json!(e)),
            ("n", json!(n)),
            ("max_pair_sum", json!(worst)),
            ("s_r", json!(similarity_root(r).s)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilyKind;
    use crate::interval::IBox;
    use proptest::prelude::*;

    fn holder(alpha: f64, beta: f64, dim: f64, dim_d: f64) -> HolderData {
        HolderData { alpha, beta, c0: 1.0, m0: 1.0, dim_l1l2: dim, dim_d }
    }

    #[test]
    fn genpos_bound_examples() {
        let c = genpos_bound(&holder(1.0, 1.0, 0.8, 1.0)).unwrap();
        assert_eq!(c.bound, 0.8);
        assert!(c.holds);
        let c = genpos_bound(&holder(1.0, 1.0, 2.0 * 0.4, 1.0)).unwrap();
        assert_eq!(c.bound, 0.8);
        let c = genpos_bound(&holder(1.0, 2.0, 0.3, 0.5)).unwrap();
        assert_eq!(c.bound, 0.5);
        assert!(!c.holds);
        assert!(genpos_bound(&holder(0.0, 1.0, 0.3, 0.5)).is_err());
        assert!(genpos_bound(&holder(1.0, -1.0, 0.3, 0.5)).is_err());
    }

    #[test]
    fn presets() {
        let h = holder_preset(&HolderPreset::EscapingTranslation { m1: 1.0, m2: 3.0, n: 2, dim_ab: 1.0 }).unwrap();
        assert_eq!((h.c0, h.m0, h.alpha, h.beta), (1.0, 2.0, 1.0, 1.0));
        assert!(matches!(
            holder_preset(&HolderPreset::ZaRotation { inf_abs_z: 0.0, disc_radius: 5.0, dim_ab: 1.0 }),
            Err(GenposError::Hypothesis(_))
        ));
        let h = holder_preset(&HolderPreset::BilipTranslation { l_minus: 1.0, l_plus: 1.0, n: 1, dim_ab: 0.5 }).unwrap();
        assert_eq!((h.c0, h.m0), (1.0, 1.0));
        assert!(holder_preset(&HolderPreset::EscapingTranslation { m1: 2.0, m2: 2.0, n: 1, dim_ab: 0.1 }).is_err());
        let h = holder_preset(&HolderPreset::ZaRotation { inf_abs_z: 0.5, disc_radius: 10.0, dim_ab: 1.5 }).unwrap();
        assert_eq!((h.c0, h.m0, h.dim_d), (10.0, 0.5, 2.0));
    }

    #[test]
    fn displacement_examples() {
        assert!((displacement_bound(1.0, 0.5, 0.1).unwrap() - 0.2).abs() < 1e-14);
        assert!((displacement_bound(1.0, 1.0 / 9.0, 1.0).unwrap() - 9.0 / 8.0).abs() < 1e-14);
        assert_eq!(displacement_bound(1.0, 0.5, 0.0).unwrap(), 0.0);
        assert!(displacement_bound(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn zero_net_motion_does_not_hold() {
        let fam = FamilyDescriptor::new(FamilyKind::ExactOverlap { b: 0.1 }, IBox::from_bounds(&[0.01], &[0.1])).unwrap();
        let c = disjointness_certificate(&fam, &DisjointnessRequest::new(Word::new(vec![1]), Word::new(vec![2]), 1.0, 1.0)).unwrap();
        assert!(c.margin.unwrap() < 0.0);
        assert!(!c.holds);
    }

    #[test]
    fn comparable_words_rejected() {
        let fam = FamilyDescriptor::new(FamilyKind::ExactOverlap { b: 0.1 }, IBox::from_bounds(&[0.01], &[0.1])).unwrap();
        let req = DisjointnessRequest::new(Word::new(vec![1]), Word::new(vec![1, 2]), 1.0, 0.0);
        assert!(matches!(disjointness_certificate(&fam, &req), Err(GenposError::Precondition(_))));
    }

    #[test]
    fn loose_ratio_bound_must_dominate() {
        let fam = FamilyDescriptor::new(FamilyKind::ExactOverlap { b: 0.1 }, IBox::from_bounds(&[0.01], &[0.1])).unwrap();
        let mut req = DisjointnessRequest::new(Word::new(vec![1]), Word::new(vec![2]), 1.0, 0.0);
        req.rj_bound = Some(0.05);
        assert!(disjointness_certificate(&fam, &req).is_err());
    }

    #[test]
    fn translation_single_examples() {
        let rv = |v: Vec<f64>| RatioVector::new(v).unwrap();
        let c = translation_bound_single(&rv(vec![0.1; 3]), 1, 3, 2).unwrap();
        assert!(c.holds);
        assert!((c.inputs["s_r"].as_f64().unwrap() - 3f64.ln() / 10f64.ln()).abs() < 1e-12);
        assert!(!translation_bound_single(&rv(vec![0.4, 0.4]), 1, 2, 1).unwrap().holds);
        assert!(translation_bound_single(&rv(vec![0.1, 0.1]), 1, 2, 1).unwrap().holds);
        assert!(matches!(
            translation_bound_single(&rv(vec![0.1, 0.1]), 2, 2, 1),
            Err(GenposError::Precondition(_))
        ));
    }

    #[test]
    fn translation_ssc_examples() {
        let rv = |v: Vec<f64>| RatioVector::new(v).unwrap();
        assert!(translation_bound_ssc(&rv(vec![0.1; 3]), 1).unwrap().holds);
        let c = translation_bound_ssc(&rv(vec![0.3; 3]), 1).unwrap();
        assert!(!c.holds);
        assert!((c.inputs["s_r"].as_f64().unwrap() - 0.912_489_289_393_198_4).abs() < 1e-12);
        assert!(!translation_bound_ssc(&rv(vec![0.45, 0.45]), 2).unwrap().holds);
    }

    #[test]
    fn translation_single_matches_general_certificate() {
        let half = vec![vec![0.2]];
        let base = crate::ifs::IFSystem::new(
            vec![
                crate::ifs::AffineMap::new(&half, &[0.0]).unwrap(),
                crate::ifs::AffineMap::new(&half, &[0.8]).unwrap(),
            ],
            IBox::from_bounds(&[-1.0], &[2.0]),
        )
        .unwrap();
        let fam = FamilyDescriptor::new(FamilyKind::TranslationSingle { base, index: 2 }, IBox::from_bounds(&[-0.5], &[0.5])).unwrap();
        let req = DisjointnessRequest::derived(&fam, Word::new(vec![2]), Word::new(vec![1])).unwrap();
        assert_eq!((req.cj, req.ck), (1.0, 0.0));
        let c = disjointness_certificate(&fam, &req).unwrap();
        let cor = translation_bound_single(fam.ratios(), 1, 2, 1).unwrap();
        assert_eq!(c.holds, cor.holds);
        assert!((c.margin.unwrap() - (1.0 - 0.4 / 0.8)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn scale_free_in_exponents(a in 0.1f64..4.0, b in 0.1f64..4.0, d in 0.0f64..3.0, dd in 0.0f64..3.0) {
            let c1 = genpos_bound(&holder(a, b, d, dd)).unwrap();
            let c2 = genpos_bound(&holder(2.0 * a, 2.0 * b, d, dd)).unwrap();
            prop_assert_eq!(c1.bound, c2.bound);
        }

        #[test]
        fn shrinking_ratios_preserves_holds(
            v in prop::collection::vec(0.01f64..0.4, 2..5),
            idx in 0usize..5,
            shrink in 0.1f64..0.99,
            n in 1usize..4,
        ) {
            let r = RatioVector::new(v.clone()).unwrap();
            let mut w = v.clone();
            let i = idx % w.len();
            w[i] *= shrink;
            let r2 = RatioVector::new(w).unwrap();
            if translation_bound_ssc(&r, n).unwrap().holds {
                prop_assert!(translation_bound_ssc(&r2, n).unwrap().holds);
            }
            if v.len() >= 2 && translation_bound_single(&r, 1, 2, n).unwrap().holds {
                prop_assert!(translation_bound_single(&r2, 1, 2, n).unwrap().holds);
            }
        }
    }
}
