//! Parametrized families `t -> S_t` of affine systems over a parameter box `D`.

use rand::distributions::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cases::{build_exact_overlap_unchecked, build_one_point_unchecked, EXACT_OVERLAP_MAX, ONE_POINT_MAX};
use crate::error::{GenposError, Result};
use crate::ifs::{euclid, HullDescriptor, IFSystem, RatioVector, SystemDescriptor, Word};
use crate::interval::{round_up, IBox, Interval};

/// How the parameter enters the maps.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    /// `S_{k,t}(x) = S_k(x) + t_k` for every k; parameter in `R^{m·n}`.
    TranslationAll { base: IFSystem },
    /// Only map `index` (1-based) is translated; parameter in `R^n`.
    TranslationSingle { base: IFSystem, index: usize },
    /// `{t x, b x, (x + 8)/9}` with `b` fixed and parameter `t`.
    ExactOverlap { b: f64 },
    /// The six-map one-point system with `p, r` fixed and parameter `q`.
    OnePoint { p: f64, r: f64 },
}

/// JSON form of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKindDescriptor {
    TranslationAll { system: SystemDescriptor },
    TranslationSingle { system: SystemDescriptor, index: usize },
    ExactOverlap { b: f64 },
    OnePoint { p: f64, r: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    #[serde(flatten)]
    pub kind: FamilyKindDescriptor,
    pub domain: HullDescriptor,
    /// Uniform motion constant; derived from the kind when absent.
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub motion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDescriptor {
    kind: FamilyKind,
    domain: IBox,
    motion: f64,
    ratios: RatioVector,
}

const SPOT_CHECKS: usize = 16;

impl FamilyDescriptor {
    /// Builds a family with the constants derived from its kind
    /// (`C = 1` for all four kinds) and the default ratio vector.
    pub fn new(kind: FamilyKind, domain: IBox) -> Result<Self> {
        Self::with_constants(kind, domain, None, None)
    }

    pub fn with_constants(
        kind: FamilyKind,
        domain: IBox,
        motion: Option<f64>,
        ratios: Option<RatioVector>,
    ) -> Result<Self> {
        let pdim = param_dim(&kind);
        if domain.dim() != pdim {
            return Err(GenposError::domain(
                "domain",
                format!("parameter box must have dimension {pdim}"),
            ));
        }
        check_domain(&kind, &domain)?;
        let motion = motion.unwrap_or(1.0);
        if !(motion > 0.0 && motion.is_finite()) {
            return Err(GenposError::domain("C", "must be positive"));
        }
        let ratios = match ratios {
            Some(r) => r,
            None => default_ratios(&kind, &domain)?,
        };
        let fam = Self {
            kind,
            domain,
            motion,
            ratios,
        };
        fam.spot_check(SPOT_CHECKS, 0)?;
        Ok(fam)
    }

    pub fn from_file(f: &FamilyFile) -> Result<Self> {
        let kind = match &f.kind {
            FamilyKindDescriptor::TranslationAll { system } => FamilyKind::TranslationAll {
                base: IFSystem::from_descriptor(system)?,
            },
            FamilyKindDescriptor::TranslationSingle { system, index } => FamilyKind::TranslationSingle {
                base: IFSystem::from_descriptor(system)?,
                index: *index,
            },
            FamilyKindDescriptor::ExactOverlap { b } => FamilyKind::ExactOverlap { b: *b },
            FamilyKindDescriptor::OnePoint { p, r } => FamilyKind::OnePoint { p: *p, r: *r },
        };
        if f.domain.lo.len() != f.domain.hi.len()
            || f.domain.lo.iter().zip(&f.domain.hi).any(|(l, h)| !(l <= h))
        {
            return Err(GenposError::domain("domain", "lo and hi must have equal length with lo <= hi"));
        }
        let domain = IBox::from_bounds(&f.domain.lo, &f.domain.hi);
        let ratios = f.ratios.clone().map(RatioVector::new).transpose()?;
        Self::with_constants(kind, domain, f.motion, ratios)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let f: FamilyFile =
            serde_json::from_str(json).map_err(|e| GenposError::Descriptor(e.to_string()))?;
        Self::from_file(&f)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn domain(&self) -> &IBox {
        &self.domain
    }

    /// The (S4) constant `C`.
    pub fn motion(&self) -> f64 {
        self.motion
    }

    pub fn ratios(&self) -> &RatioVector {
        &self.ratios
    }

    pub fn map_count(&self) -> usize {
        match &self.kind {
            FamilyKind::TranslationAll { base } | FamilyKind::TranslationSingle { base, .. } => base.len(),
            FamilyKind::ExactOverlap { .. } => 3,
            FamilyKind::OnePoint { .. } => 6,
        }
    }

    pub fn param_dim(&self) -> usize {
        param_dim(&self.kind)
    }

    /// Number of non-degenerate axes of the parameter box.
    pub fn default_dim_d(&self) -> f64 {
        self.domain.sides().iter().filter(|s| s.hi() > s.lo()).count() as f64
    }

    /// Hull shared by all members of the family.
    pub fn hull(&self) -> IBox {
        match &self.kind {
            FamilyKind::TranslationAll { base } | FamilyKind::TranslationSingle { base, .. } => {
                base.hull().clone()
            }
            FamilyKind::ExactOverlap { .. } | FamilyKind::OnePoint { .. } => {
                IBox::from_bounds(&[0.0], &[1.0])
            }
        }
    }

    /// The system `S_t`.
    pub fn system_at(&self, t: &[f64]) -> Result<IFSystem> {
        if t.len() != self.param_dim() {
            return Err(GenposError::domain("parameter", format!("expected {} coordinates", self.param_dim())));
        }
        match &self.kind {
            FamilyKind::TranslationAll { base } => {
                let n = base.dim();
                let maps = base
                    .maps()
                    .iter()
                    .enumerate()
                    .map(|(k, m)| translated(m, &t[k * n..(k + 1) * n]))
                    .collect::<Result<Vec<_>>>()?;
                IFSystem::new(maps, base.hull().clone())
            }
            FamilyKind::TranslationSingle { base, index } => {
                let maps = base
                    .maps()
                    .iter()
                    .enumerate()
                    .map(|(k, m)| if k + 1 == *index { translated(m, t) } else { Ok(*m) })
                    .collect::<Result<Vec<_>>>()?;
                IFSystem::new(maps, base.hull().clone())
            }
            FamilyKind::ExactOverlap { b } => {
                if !(t[0] > 0.0 && t[0] < EXACT_OVERLAP_MAX) {
                    return Err(GenposError::domain("t", "must lie in (0, 1/9)"));
                }
                build_exact_overlap_unchecked(t[0], *b)
            }
            FamilyKind::OnePoint { p, r } => {
                if !(t[0] > 0.0 && t[0] < ONE_POINT_MAX) {
                    return Err(GenposError::domain("q", "must lie in (0, 1/36)"));
                }
                build_one_point_unchecked(*p, t[0], *r)
            }
        }
    }

    /// Uniform sample from the interior of the parameter box.
    pub fn sample_param<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.domain
            .sides()
            .iter()
            .map(|s| {
                let u: f64 = Open01.sample(rng);
                s.lo() + u * (s.hi() - s.lo())
            })
            .collect()
    }

    /// Spot-checks (S3) and (S4) at `samples` random parameter pairs.
    pub fn spot_check(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hull = self.hull();
        for _ in 0..samples {
            let (t, t2) = (self.sample_param(&mut rng), self.sample_param(&mut rng));
            let (s, s2) = (self.system_at(&t)?, self.system_at(&t2)?);
            if !self.ratios.dominates(&s) {
                return Err(GenposError::domain("ratios", "ratio vector does not dominate the maps"));
            }
            let dt = euclid(&t, &t2);
            let x: Vec<f64> = hull
                .sides()
                .iter()
                .map(|side| side.lo() + rng.gen::<f64>() * (side.hi() - side.lo()))
                .collect();
            for (m, m2) in s.maps().iter().zip(s2.maps()) {
                let moved = euclid(&m.apply(&x), &m2.apply(&x));
                if moved > self.motion * dt * (1.0 + 1e-12) + 1e-15 {
                    return Err(GenposError::domain(
                        "C",
                        format!("maps move by {moved} for a parameter step of {dt}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Per-letter motion constants `(lower, upper)` with respect to the parameter,
    /// for points of the hull.
    fn letter_motion(&self, letter: usize) -> (f64, f64) {
        match &self.kind {
            FamilyKind::TranslationAll { .. } => (0.0, 1.0),
            FamilyKind::TranslationSingle { index, .. } => {
                if letter == *index {
                    (1.0, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            // |t' x - t x| <= |t' - t| on [0,1]; the lower bound vanishes at x = 0
            FamilyKind::ExactOverlap { .. } => {
                if letter == 1 {
                    (0.0, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            FamilyKind::OnePoint { .. } => {
                if letter == 3 {
                    (0.0, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }

    /// Anti-Lipschitz and Lipschitz constants of `t -> S_{w,t}(x)` over the hull,
    /// built letter by letter: for `w = a·u`,
    /// `C_w = C_a + r_a C_u` and `c_w = max(0, c_a - r_a C_u)`.
    pub fn word_motion(&self, w: &Word) -> Result<(f64, f64)> {
        w.validate(self.map_count())?;
        let mut lower = 0.0;
        let mut upper = 0.0;
        for &a in w.letters().iter().rev() {
            let (ca, cu) = self.letter_motion(a);
            let ra = self.ratios.entries()[a - 1];
            let spread = if upper == 0.0 { 0.0 } else { round_up(ra * upper) };
            lower = (ca - spread).max(0.0);
            upper = if spread == 0.0 { cu } else { round_up(cu + spread) };
        }
        Ok((lower, upper))
    }

    pub fn to_file(&self) -> FamilyFile {
        let kind = match &self.kind {
            FamilyKind::TranslationAll { base } => FamilyKindDescriptor::TranslationAll {
                system: base.to_descriptor(),
            },
            FamilyKind::TranslationSingle { base, index } => FamilyKindDescriptor::TranslationSingle {
                system: base.to_descriptor(),
                index: *index,
            },
            FamilyKind::ExactOverlap { b } => FamilyKindDescriptor::ExactOverlap { b: *b },
            FamilyKind::OnePoint { p, r } => FamilyKindDescriptor::OnePoint { p: *p, r: *r },
        };
        FamilyFile {
            kind,
            domain: HullDescriptor {
                lo: self.domain.lo(),
                hi: self.domain.hi(),
            },
            motion: Some(self.motion),
            ratios: Some(self.ratios.entries().to_vec()),
        }
    }
}

fn param_dim(kind: &FamilyKind) -> usize {
    match kind {
        FamilyKind::TranslationAll { base } => base.len() * base.dim(),
        FamilyKind::TranslationSingle { base, .. } => base.dim(),
        FamilyKind::ExactOverlap { .. } | FamilyKind::OnePoint { .. } => 1,
    }
}

fn translated(m: &crate::ifs::AffineMap, t: &[f64]) -> Result<crate::ifs::AffineMap> {
    let offset: Vec<f64> = m.offset().iter().zip(t).map(|(b, s)| b + s).collect();
    crate::ifs::AffineMap::new(&m.matrix(), &offset)?.with_ratio(m.ratio())
}

fn check_domain(kind: &FamilyKind, domain: &IBox) -> Result<()> {
    let unit_param = |name: &str, max: f64, field_max: &str| -> Result<()> {
        let s = domain.sides()[0];
        if !(s.lo() >= 0.0 && s.hi() <= max) {
            return Err(GenposError::domain(
                "domain",
                format!("{name} must range inside (0, {field_max})"),
            ));
        }
        Ok(())
    };
    match kind {
        FamilyKind::TranslationAll { base } => {
            let n = base.dim();
            for (k, m) in base.maps().iter().enumerate() {
                let shift = IBox::new(domain.sides()[k * n..(k + 1) * n].to_vec());
                check_translated_hull(base, m, &shift, k + 1)?;
            }
            Ok(())
        }
        FamilyKind::TranslationSingle { base, index } => {
            if *index == 0 || *index > base.len() {
                return Err(GenposError::domain("index", format!("must lie in 1..={}", base.len())));
            }
            check_translated_hull(base, base.map(*index), domain, *index)
        }
        FamilyKind::ExactOverlap { b } => {
            if !(*b > 0.0 && *b < EXACT_OVERLAP_MAX) {
                return Err(GenposError::domain("b", "must lie in (0, 1/9)"));
            }
            unit_param("t", EXACT_OVERLAP_MAX, "1/9")
        }
        FamilyKind::OnePoint { p, r } => {
            if !(*p > 0.0 && *p < ONE_POINT_MAX) {
                return Err(GenposError::domain("p", "must lie in (0, 1/36)"));
            }
            if !(*r > 0.0 && *r < ONE_POINT_MAX) {
                return Err(GenposError::domain("r", "must lie in (0, 1/36)"));
            }
            unit_param("q", ONE_POINT_MAX, "1/36")
        }
    }
}

/// (S2) for translation families: `S_k(V) + shift ⊆ V` for the whole shift box.
fn check_translated_hull(
    base: &IFSystem,
    m: &crate::ifs::AffineMap,
    shift: &IBox,
    index: usize,
) -> Result<()> {
    let img = m.image(base.hull());
    let moved = IBox::new(
        img.sides()
            .iter()
            .zip(shift.sides())
            .map(|(a, s)| *a + *s)
            .collect::<Vec<Interval>>(),
    );
    if base.hull().contains_box(&moved) {
        Ok(())
    } else {
        Err(GenposError::domain(
            "domain",
            format!("translated map {index} leaves the hull for some parameters"),
        ))
    }
}

fn default_ratios(kind: &FamilyKind, domain: &IBox) -> Result<RatioVector> {
    match kind {
        FamilyKind::TranslationAll { base } | FamilyKind::TranslationSingle { base, .. } => base.ratios(),
        FamilyKind::ExactOverlap { b } => {
            RatioVector::new(vec![domain.sides()[0].hi(), *b, 1.0 / 9.0])
        }
        // the third entry bounds q over the whole admissible range
        FamilyKind::OnePoint { p, r } => RatioVector::new(vec![*p, *r, ONE_POINT_MAX, *r, *r, *r]),
    }
}
