//! Bracketed root finding for Moran-type dimension equations
//! `Σ c_i · b_i^s = target`.

use serde::{Deserialize, Serialize};

use crate::error::{GenposError, Result};
use crate::ifs::RatioVector;

pub const MAX_BISECTIONS: u32 = 200;
const MAX_DOUBLINGS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub base: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEquation {
    terms: Vec<Term>,
    target: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub s: f64,
    pub residual: f64,
    /// One ulp above the final bracket; safe to use in `s < threshold` tests.
    pub upper: f64,
    pub iterations: u32,
}

impl DimensionEquation {
    pub fn new(terms: Vec<Term>, target: f64) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| !(t.base > 0.0 && t.base < 1.0)) {
            return Err(GenposError::domain("terms", format!("base {} outside (0,1)", t.base)));
        }
        if !terms.iter().any(|t| t.coefficient > 0.0) {
            return Err(GenposError::domain("terms", "need a term with positive coefficient"));
        }
        if !target.is_finite() || terms.iter().any(|t| !t.coefficient.is_finite()) {
            return Err(GenposError::domain("terms", "coefficients and target must be finite"));
        }
        Ok(Self { terms, target })
    }

    /// `r_1^s + ... + r_m^s = 1`.
    pub fn moran(r: &RatioVector) -> Self {
        Self {
            terms: r
                .entries()
                .iter()
                .map(|&base| Term { coefficient: 1.0, base })
                .collect(),
            target: 1.0,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| t.coefficient * t.base.powf(s)).sum()
    }

    fn residual(&self, s: f64) -> f64 {
        self.eval(s) - self.target
    }

    /// Bisection on `[lo, hi]`, capped at [`MAX_BISECTIONS`] halvings.
    pub fn solve(&self, lo: f64, hi: f64) -> Result<Root> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(GenposError::domain("bracket", format!("[{lo}, {hi}] is not a proper interval")));
        }
        let (flo, fmid, fhi) = (self.eval(lo), self.eval(0.5 * (lo + hi)), self.eval(hi));
        let increasing = flo < fmid && fmid < fhi;
        let decreasing = flo > fmid && fmid > fhi;
        if !(increasing || decreasing) {
            return Err(GenposError::NonMonotone { lo, hi });
        }
        let (glo, ghi) = (flo - self.target, fhi - self.target);
        if glo == 0.0 {
            return Ok(self.finish(lo, lo, hi, 0));
        }
        if ghi == 0.0 {
            return Ok(self.finish(hi, lo, hi, 0));
        }
        if glo.signum() == ghi.signum() {
            return Err(GenposError::Bracket { lo, hi });
        }
        let (mut a, mut b) = (lo, hi);
        let mut iterations = 0;
        while iterations < MAX_BISECTIONS {
            let mid = a + 0.5 * (b - a);
            if mid <= a || mid >= b {
                break;
            }
            iterations += 1;
            let g = self.residual(mid);
            if g == 0.0 {
                return Ok(self.finish(mid, mid, mid, iterations));
            }
            if g.signum() == glo.signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        let s = if self.residual(a).abs() <= self.residual(b).abs() { a } else { b };
        Ok(self.finish(s, a, b, iterations))
    }

    fn finish(&self, s: f64, a: f64, b: f64, iterations: u32) -> Root {
        Root {
            s,
            residual: self.residual(s).abs(),
            upper: a.max(b).max(s).next_up(),
            iterations,
        }
    }
}

/// Root of the Moran equation; the bracket starts at `[0, 1]` and doubles its
/// upper end until the sign changes.
pub fn similarity_root(r: &RatioVector) -> Root {
    let eq = DimensionEquation::moran(r);
    let mut hi = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        if eq.eval(hi) <= 1.0 {
            break;
        }
        hi *= 2.0;
    }
    // f(0) = m >= 2 > 1 and f decreases to 0, so the bracket is valid.
    eq.solve(0.0, hi)
        .expect("Moran equation with ratios in (0,1) always has a bracketed root")
}

/// Similarity dimension `s_r`.
pub fn similarity_dimension(r: &RatioVector) -> f64 {
    similarity_root(r).s
}

/// `s_r` rounded outward by one ulp, for certificate comparisons.
pub fn similarity_dimension_upper(r: &RatioVector) -> f64 {
    similarity_root(r).upper
}

pub fn solve_dimension_equation(eq: &DimensionEquation, bracket: (f64, f64)) -> Result<Root> {
    eq.solve(bracket.0, bracket.1)
}
