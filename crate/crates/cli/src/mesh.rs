//! `export-mesh`: the image of an `n × n` grid under `f_k`, as SVG and CSV.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bvhomeo::construction::{cell_rects, f_level_eval, CellAddress};
use bvhomeo::{Point2, P2};

use crate::config::RunConfig;

pub const MAX_N: usize = 1024;

fn node(n: usize, i: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / n as f64
}

/// The `2 (n + 1)` grid lines, each sampled at `min(4n, 1024) + 1` points.
fn grid_lines(n: usize) -> Vec<Vec<P2>> {
    let m = (4 * n).min(1024);
    let along = |j: usize| -1.0 + 2.0 * j as f64 / m as f64;
    let mut lines = Vec::with_capacity(2 * (n + 1));
    for i in 0..=n {
        let c = node(n, i);
        lines.push((0..=m).map(|j| Point2::new(c, along(j))).collect());
    }
    for i in 0..=n {
        let c = node(n, i);
        lines.push((0..=m).map(|j| Point2::new(along(j), c)).collect());
    }
    lines
}

fn eval(level: usize, x: &P2) -> Result<P2> {
    f_level_eval(level, x).with_context(|| format!("evaluating f_{level} at ({}, {})", x.x1, x.x2))
}

fn polyline(out: &mut String, pts: &[P2]) {
    out.push_str("    <polyline points=\"");
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        // y is flipped so that x2 points up
        let _ = write!(out, "{:.6},{:.6}", p.x1, -p.x2);
    }
    out.push_str("\"/>\n");
}

pub fn svg(level: usize, n: usize) -> Result<String> {
    let lines = grid_lines(n);
    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.05 -1.05 2.1 2.1\" width=\"800\" height=\"800\">\n",
    );
    out.push_str("  <g id=\"cells\" fill=\"none\" stroke=\"#c33\" stroke-width=\"0.001\">\n");
    for addr in CellAddress::all(level) {
        let (p, _) = cell_rects::<f64>(&addr)?;
        let _ = writeln!(
            out,
            "    <rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\"/>",
            p.lo.x1,
            -p.hi.x2,
            p.width(),
            p.height()
        );
    }
    out.push_str("  </g>\n");
    out.push_str("  <g id=\"reference\" fill=\"none\" stroke=\"#bbb\" stroke-width=\"0.002\">\n");
    for l in &lines {
        polyline(&mut out, l);
    }
    out.push_str("  </g>\n");
    out.push_str("  <g id=\"image\" fill=\"none\" stroke=\"#135\" stroke-width=\"0.002\">\n");
    for l in &lines {
        let img = l.iter().map(|x| eval(level, x)).collect::<Result<Vec<_>>>()?;
        polyline(&mut out, &img);
    }
    out.push_str("  </g>\n</svg>\n");
    Ok(out)
}

/// `x1,x2,y1,y2` for every node of the `(n + 1)²` grid.
pub fn node_csv(level: usize, n: usize) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x1", "x2", "y1", "y2"])?;
    for j in 0..=n {
        for i in 0..=n {
            let x = Point2::new(node(n, i), node(n, j));
            let y = eval(level, &x)?;
            w.write_record([x.x1, x.x2, y.x1, y.x2].map(|v| format!("{v:.17e}")))?;
        }
    }
    w.into_inner().context("flushing CSV")
}

/// Writes `mesh-k<level>-n<n>.svg` and `.csv` into the output directory.
pub fn run(cfg: &RunConfig, level: usize, n: usize) -> Result<Vec<PathBuf>> {
    if n == 0 || n > MAX_N {
        bail!("n must lie in [1, {MAX_N}], got {n}");
    }
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = format!("mesh-k{level}-n{n}");
    let svg_path = dir.join(format!("{stem}.svg"));
    std::fs::write(&svg_path, svg(level, n)?).with_context(|| format!("writing {}", svg_path.display()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv_path, node_csv(level, n)?).with_context(|| format!("writing {}", csv_path.display()))?;
    Ok(vec![svg_path, csv_path])
}
