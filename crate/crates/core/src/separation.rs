//! Sound disjointness checks for attractor pieces by branch-and-bound on
//! outward-rounded hull images, and parameter sweeps built on them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GenposError, Result};
use crate::family::FamilyDescriptor;
use crate::ifs::{word_meet, IFSystem, IntervalAffine, Word};
use crate::interval::{round_down, round_up, IBox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Disjoint,
    Undecided,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Disjoint => "disjoint",
            Status::Undecided => "undecided",
        }
    }
}

/// Why a check stopped without certifying disjointness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndecidedReason {
    /// Two boxes no wider than the tolerance still touch.
    Tolerance,
    DepthCap,
    Budget,
    /// Two boxes are so close that no refinement can meet the padded gap.
    PaddedGap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationVerdict {
    pub status: Status,
    /// Certified lower bound on the distance between the pieces (disjoint only).
    pub gap: f64,
    /// Diameter of the unresolved box pair (undecided only).
    pub overlap_diameter: f64,
    /// Deepest refinement below `j` or `k` that was examined.
    pub depth_used: usize,
    pub reason: Option<UndecidedReason>,
    pub pairs_examined: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationOptions {
    pub tol: f64,
    pub max_depth: usize,
    /// Box pairs are only discarded when their distance exceeds this value.
    pub min_gap: f64,
    /// Maximum number of box pairs to examine.
    pub budget: usize,
}

impl SeparationOptions {
    pub fn new(tol: f64, max_depth: usize) -> Self {
        Self {
            tol,
            max_depth,
            min_gap: 0.0,
            budget: DEFAULT_BUDGET,
        }
    }
}

pub const DEFAULT_BUDGET: usize = 1 << 21;

struct Node {
    map: IntervalAffine,
    word: Word,
    bx: IBox,
    diam: f64,
    depth: usize,
}

impl Node {
    fn root(system: &IFSystem, word: &Word) -> Result<Self> {
        let map = system.compose_interval(word)?;
        let bx = map.image(system.hull());
        Ok(Self {
            diam: bx.diameter(),
            map,
            word: word.clone(),
            bx,
            depth: 0,
        })
    }

    fn children(&self, system: &IFSystem) -> Vec<Node> {
        (1..=system.len())
            .map(|l| {
                let map = self.map.then_inner(&system.map(l).to_interval());
                let bx = map.image(system.hull());
                Node {
                    diam: bx.diameter(),
                    map,
                    word: self.word.pushed(l),
                    bx,
                    depth: self.depth + 1,
                }
            })
            .collect()
    }
}

struct Pair {
    a: std::rc::Rc<Node>,
    b: std::rc::Rc<Node>,
    size: f64,
}

impl Pair {
    fn new(a: std::rc::Rc<Node>, b: std::rc::Rc<Node>) -> Self {
        let size = a.diam + b.diam;
        Self { a, b, size }
    }

    fn key(&self) -> (&Word, &Word) {
        if self.a.word <= self.b.word {
            (&self.a.word, &self.b.word)
        } else {
            (&self.b.word, &self.a.word)
        }
    }
}

impl PartialEq for Pair {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pair {}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pair {
    // larger pairs first, then lexicographically smaller words
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .total_cmp(&other.size)
            .then_with(|| other.key().cmp(&self.key()))
    }
}

/// Decides `K_j ∩ K_k = ∅` at a fixed system.
pub fn check_pair_disjoint(system: &IFSystem, j: &Word, k: &Word, tol: f64, max_depth: usize) -> Result<SeparationVerdict> {
    check_pair_with(system, j, k, &SeparationOptions::new(tol, max_depth))
}

/// Branch-and-bound over pairs `(S_{j·u}(V), S_{k·v}(V))`, largest pair first.
/// A pair is discarded once its boxes are more than `min_gap` apart; otherwise
/// the wider box is subdivided (both when equally wide).
pub fn check_pair_with(system: &IFSystem, j: &Word, k: &Word, opts: &SeparationOptions) -> Result<SeparationVerdict> {
    use std::rc::Rc;
    let m = system.len();
    j.validate(m)?;
    k.validate(m)?;
    if !word_meet(j, k).1 {
        return Err(GenposError::Precondition(format!("words {j} and {k} are comparable")));
    }
    if !(opts.tol > 0.0) {
        return Err(GenposError::domain("tol", "must be positive"));
    }
    if !(opts.min_gap >= 0.0) {
        return Err(GenposError::domain("min_gap", "must be non-negative"));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Pair::new(Rc::new(Node::root(system, j)?), Rc::new(Node::root(system, k)?)));
    let mut gap = f64::INFINITY;
    let mut depth_used = 0;
    let mut examined = 0;
    let undecided = |reason, overlap, depth_used, examined| SeparationVerdict {
        status: Status::Undecided,
        gap: 0.0,
        overlap_diameter: overlap,
        depth_used,
        reason: Some(reason),
        pairs_examined: examined,
    };
    while let Some(pair) = heap.pop() {
        examined += 1;
        depth_used = depth_used.max(pair.a.depth).max(pair.b.depth);
        let d = pair.a.bx.distance(&pair.b.bx);
        if d > opts.min_gap {
            gap = gap.min(d);
            continue;
        }
        let widest = pair.a.diam.max(pair.b.diam);
        // every point of one box is within min_gap of every point of the other
        if opts.min_gap > 0.0 && pair.a.bx.far_distance(&pair.b.bx) <= opts.min_gap {
            return Ok(undecided(UndecidedReason::PaddedGap, widest, depth_used, examined));
        }
        if widest <= opts.tol {
            return Ok(undecided(UndecidedReason::Tolerance, widest, depth_used, examined));
        }
        if examined >= opts.budget {
            return Ok(undecided(UndecidedReason::Budget, widest, depth_used, examined));
        }
        let open_a = pair.a.depth < opts.max_depth;
        let open_b = pair.b.depth < opts.max_depth;
        let (mut split_a, mut split_b) = match pair.a.diam.total_cmp(&pair.b.diam) {
            Ordering::Greater => (true, false),
            Ordering::Less => (false, true),
            Ordering::Equal => (true, true),
        };
        split_a &= open_a;
        split_b &= open_b;
        if !split_a && !split_b {
            split_a = open_a;
            split_b = open_b;
        }
        if !split_a && !split_b {
            return Ok(undecided(UndecidedReason::DepthCap, widest, depth_used, examined));
        }
        let side = |node: &Rc<Node>, split: bool| -> Vec<Rc<Node>> {
            if split {
                node.children(system).into_iter().map(Rc::new).collect()
            } else {
                vec![node.clone()]
            }
        };
        let left = side(&pair.a, split_a);
        let right = side(&pair.b, split_b);
        for a in &left {
            for b in &right {
                heap.push(Pair::new(a.clone(), b.clone()));
            }
        }
    }
    Ok(SeparationVerdict {
        status: Status::Disjoint,
        gap,
        overlap_diameter: 0.0,
        depth_used,
        reason: None,
        pairs_examined: examined,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub verdict: SeparationVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SscReport {
    pub holds: bool,
    /// Smallest certified gap over all pairs (disjoint pairs only).
    pub min_gap: Option<f64>,
    pub pairs: Vec<PairVerdict>,
}

/// Checks every unordered pair of first-level pieces.
pub fn check_ssc(system: &IFSystem, tol: f64, max_depth: usize) -> Result<SscReport> {
    let m = system.len();
    let mut pairs = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            let verdict = check_pair_disjoint(system, &Word::new(vec![i]), &Word::new(vec![j]), tol, max_depth)?;
            pairs.push(PairVerdict { i, j, verdict });
        }
    }
    let holds = pairs.iter().all(|p| p.verdict.status == Status::Disjoint);
    let min_gap = pairs
        .iter()
        .filter(|p| p.verdict.status == Status::Disjoint)
        .map(|p| p.verdict.gap)
        .min_by(f64::total_cmp);
    Ok(SscReport { holds, min_gap, pairs })
}

/// Whether `x` lies in the union of the boxes `S_{w·u}(V)` over all `u` of
/// length `depth`.
pub fn cover_contains(system: &IFSystem, word: &Word, depth: usize, x: &[f64]) -> Result<bool> {
    if x.len() != system.dim() {
        return Err(GenposError::domain("point", format!("expected {} coordinates", system.dim())));
    }
    fn descend(system: &IFSystem, node: &Node, depth: usize, x: &[f64]) -> bool {
        if !node.bx.contains_point(x) {
            return false;
        }
        node.depth == depth || node.children(system).iter().any(|c| descend(system, c, depth, x))
    }
    Ok(descend(system, &Node::root(system, word)?, depth, x))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Subdivisions per axis; degenerate axes get one.
    pub cells_per_axis: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub status: Status,
    /// Certified gap at the center, or the unresolved diameter.
    pub gap_or_overlap: f64,
    pub depth: usize,
    /// How far the two pieces can move apart from the center inside the cell.
    pub motion_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub grid: SweepGrid,
    pub j: Word,
    pub k: Word,
    pub cells: Vec<SweepCell>,
    pub disjoint_fraction: f64,
    /// Total volume of the undecided cells.
    pub undecided_measure: f64,
    /// Boxes covering every undecided cell; adjacent cells are merged in one dimension.
    pub exceptional_cover: Vec<CellBox>,
}

/// Reads `GENPOS_THREADS`; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("GENPOS_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(GenposError::domain("GENPOS_THREADS", format!("must be a positive integer, got {v:?}"))),
        },
    }
}

/// Uniform grid sweep over the parameter box. Each cell is checked at its
/// center with a padded gap requirement, so a disjoint cell is disjoint for
/// every parameter in it. The padding is the displacement of both pieces over
/// the cell half-diagonal `ρ`: the smaller of `2 C ρ / (1 − r̄)` and
/// `(C_j + C_k) ρ + (r_j + r_k) C ρ / (1 − r̄)`.
pub fn exceptional_set_sweep(
    fam: &FamilyDescriptor,
    j: &Word,
    k: &Word,
    cells: usize,
    tol: f64,
    max_depth: usize,
) -> Result<SweepReport> {
    exceptional_set_sweep_threads(fam, j, k, cells, tol, max_depth, threads_from_env()?)
}

pub fn exceptional_set_sweep_threads(
    fam: &FamilyDescriptor,
    j: &Word,
    k: &Word,
    cells: usize,
    tol: f64,
    max_depth: usize,
    threads: Option<usize>,
) -> Result<SweepReport> {
    if cells == 0 {
        return Err(GenposError::domain("cells", "must be at least 1"));
    }
    let m = fam.map_count();
    j.validate(m)?;
    k.validate(m)?;
    if !word_meet(j, k).1 {
        return Err(GenposError::Precondition(format!("words {j} and {k} are comparable")));
    }
    let domain = fam.domain();
    let per_axis: Vec<usize> = domain
        .sides()
        .iter()
        .map(|s| if s.hi() > s.lo() { cells } else { 1 })
        .collect();
    let total: usize = per_axis.iter().product();
    let widths: Vec<f64> = domain
        .sides()
        .iter()
        .zip(&per_axis)
        .map(|(s, &c)| (s.hi() - s.lo()) / c as f64)
        .collect();
    let rho = round_up(0.5 * round_up(widths.iter().map(|w| w * w).sum::<f64>()).sqrt());
    let motion = padding(fam, j, k, rho)?;

    let evaluate = |idx: usize| -> Result<SweepCell> {
        let mut rest = idx;
        let mut lo = Vec::with_capacity(per_axis.len());
        let mut hi = Vec::with_capacity(per_axis.len());
        for (axis, &c) in per_axis.iter().enumerate() {
            let i = rest % c;
            rest /= c;
            let s = domain.sides()[axis];
            lo.push(if i == 0 { s.lo() } else { s.lo() + i as f64 * widths[axis] });
            hi.push(if i + 1 == c { s.hi() } else { s.lo() + (i + 1) as f64 * widths[axis] });
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let system = fam.system_at(&center)?;
        let mut opts = SeparationOptions::new(tol, max_depth);
        opts.min_gap = motion;
        let v = check_pair_with(&system, j, k, &opts)?;
        Ok(SweepCell {
            lo,
            hi,
            status: v.status,
            gap_or_overlap: if v.status == Status::Disjoint { v.gap } else { v.overlap_diameter },
            depth: v.depth_used,
            motion_bound: motion,
        })
    };
    let run = || (0..total).into_par_iter().map(evaluate).collect::<Result<Vec<_>>>();
    let cells_out = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GenposError::domain("GENPOS_THREADS", e.to_string()))?
            .install(run)?,
        None => run()?,
    };

    let disjoint = cells_out.iter().filter(|c| c.status == Status::Disjoint).count();
    let volume = |c: &SweepCell| -> f64 {
        c.lo.iter()
            .zip(&c.hi)
            .map(|(a, b)| b - a)
            .filter(|w| *w > 0.0)
            .product()
    };
    let undecided_measure = cells_out
        .iter()
        .filter(|c| c.status == Status::Undecided)
        .map(volume)
        .sum();
    let mut cover: Vec<CellBox> = Vec::new();
    for c in cells_out.iter().filter(|c| c.status == Status::Undecided) {
        if let Some(last) = cover.last_mut() {
            if per_axis.len() == 1 && last.hi[0] == c.lo[0] {
                last.hi = c.hi.clone();
                continue;
            }
        }
        cover.push(CellBox {
            lo: c.lo.clone(),
            hi: c.hi.clone(),
        });
    }
    Ok(SweepReport {
        grid: SweepGrid {
            lo: domain.lo(),
            hi: domain.hi(),
            cells_per_axis: per_axis,
        },
        j: j.clone(),
        k: k.clone(),
        disjoint_fraction: disjoint as f64 / total as f64,
        undecided_measure,
        exceptional_cover: cover,
        cells: cells_out,
    })
}

fn padding(fam: &FamilyDescriptor, j: &Word, k: &Word, rho: f64) -> Result<f64> {
    let c = fam.motion();
    let r = fam.ratios();
    let shrink = round_down(1.0 - r.max_ratio());
    let uniform = round_up(round_up(2.0 * c * rho) / shrink);
    let (_, cj) = fam.word_motion(j)?;
    let (_, ck) = fam.word_motion(k)?;
    let drift = round_up(round_up(round_up(r.word_ratio(j) + r.word_ratio(k)) * round_up(c * rho)) / shrink);
    let per_word = round_up(round_up(round_up(cj + ck) * rho) + drift);
    Ok(uniform.min(per_word))
}
