//! Canonical JSON and CSV output.
//!
//! JSON objects are written with sorted keys and no whitespace; floating-point
//! numbers carry 17 significant digits so that parsing them back is exact.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::cases::{CaseReport, WitnessSequence};
use crate::error::{GenposError, Result};
use crate::separation::SweepReport;

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(x) if x.is_finite() => out.push_str(&format_real(x)),
                    _ => out.push_str("null"),
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's default map is ordered by key
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

pub fn canonical_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

/// Canonical JSON text followed by a newline.
pub fn to_canonical_json<T: Serialize>(x: &T) -> Result<String> {
    let v = serde_json::to_value(x).map_err(|e| GenposError::Descriptor(e.to_string()))?;
    let mut s = canonical_value(&v);
    s.push('\n');
    Ok(s)
}

fn join_reals(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_real(x)).collect::<Vec<_>>().join(";")
}

/// One row per cell; multi-dimensional corners are `;`-separated.
pub fn sweep_csv(rep: &SweepReport) -> String {
    let mut out = String::from("cell_lo,cell_hi,status,gap_or_overlap,depth\n");
    for c in &rep.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            join_reals(&c.lo),
            join_reals(&c.hi),
            c.status.as_str(),
            format_real(c.gap_or_overlap),
            c.depth
        );
    }
    out
}

/// Sweep summary without the per-cell rows.
pub fn sweep_summary(rep: &SweepReport) -> Value {
    serde_json::json!({
        "grid": rep.grid,
        "j": rep.j,
        "k": rep.k,
        "cells": rep.cells.len(),
        "disjoint_fraction": rep.disjoint_fraction,
        "undecided_measure": rep.undecided_measure,
        "exceptional_cover": rep.exceptional_cover,
    })
}

pub fn case_csv(rep: &CaseReport) -> String {
    let mut out = String::from("m,n,status,gap_or_overlap,depth,fast_path,undecided_pieces\n");
    for o in &rep.outcomes {
        let pieces = o
            .undecided_pieces
            .iter()
            .map(|(j, i)| format!("{j}:{i}"))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            o.m,
            o.n,
            o.status.as_str(),
            format_real(o.gap_or_overlap),
            o.depth,
            o.fast_path,
            pieces
        );
    }
    out
}

pub fn witness_csv(seq: &WitnessSequence) -> String {
    let mut out = String::from("m,n,map_scale,map_offset,identity_distance\n");
    for w in &seq.witnesses {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            w.m,
            w.n,
            format_real(w.map_scale),
            format_real(w.map_offset),
            format_real(w.identity_distance)
        );
    }
    out
}
