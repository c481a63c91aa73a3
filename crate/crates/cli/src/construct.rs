//! `construct`: cells and sequences of one level as JSON.

use std::fmt::Display;
use std::path::PathBuf;

use anyhow::{Context, Result};
use bvhomeo::construction::{a_seq, b_seq, cell_rects, s_measure, CellAddress};
use bvhomeo::{Exact, Rect2, Scalar};
use serde_json::{json, Value};

use crate::config::{Mode, RunConfig};

/// Exact values are written as rational strings (`"9/32"`), floats as numbers.
trait Encode {
    fn encode(&self) -> Value;
}

impl Encode for f64 {
    fn encode(&self) -> Value {
        json!(self)
    }
}

impl Encode for Exact {
    fn encode(&self) -> Value {
        Value::String(self.to_string())
    }
}

fn rect_json<S: Scalar + Encode>(r: &Rect2<S>) -> Value {
    json!([r.lo.x1.encode(), r.hi.x1.encode(), r.lo.x2.encode(), r.hi.x2.encode()])
}

fn cells_json<S: Scalar + Encode>(level: usize) -> Result<Value> {
    let cells = CellAddress::all(level)
        .into_iter()
        .map(|addr| {
            let (p, q) = cell_rects::<S>(&addr)?;
            Ok(json!({
                "alpha": addr.alpha.to_string(),
                "beta": addr.beta.to_string(),
                "p": rect_json(&p),
                "q": rect_json(&q),
            }))
        })
        .collect::<bvhomeo::Result<Vec<_>>>()?;
    Ok(json!({ "level": level, "rect_order": "x1_lo, x1_hi, x2_lo, x2_hi", "cells": cells }))
}

fn sequences_json<S: Scalar + Encode + Display>(level: usize) -> Result<Value> {
    let rows = (1..=level)
        .map(|k| {
            Ok(json!({
                "k": k,
                "a": a_seq::<S>(k).encode(),
                "b": b_seq::<S>(k).encode(),
                "s_measure": s_measure::<S>(k)?.encode(),
            }))
        })
        .collect::<bvhomeo::Result<Vec<_>>>()?;
    Ok(json!({ "level": level, "sequences": rows }))
}

/// Writes `cells.json` and `sequences.json` into the output directory.
pub fn run(cfg: &RunConfig, level: usize) -> Result<Vec<PathBuf>> {
    let (cells, seqs) = match cfg.mode {
        Mode::Exact => (cells_json::<Exact>(level)?, sequences_json::<Exact>(level)?),
        Mode::Float => (cells_json::<f64>(level)?, sequences_json::<f64>(level)?),
    };
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for (name, value) in [("cells.json", cells), ("sequences.json", seqs)] {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
