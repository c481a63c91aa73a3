//! `verify <target>`: runs a verification suite and returns its check rows.

use anyhow::Result;
use bvhomeo::bump::Bump;
use bvhomeo::construction::{a_seq, f_level_eval};
use bvhomeo::degree::{degree_formula_check, det_equals_area_check, winding_degree, BoundaryCurve};
use bvhomeo::derivative::{tv_q_exact, tv_total, vertical_variation};
use bvhomeo::graph_measure::{boundaryless_residual, fundamental_ratio, inverse_gradient_check, FormSlot};
use bvhomeo::maps::{AnalyticMap, LevelMap, PlanarMap};
use bvhomeo::{Exact, Point2, Rect2, Scalar, SignCode, P2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Mode, RunConfig};
use crate::report::CheckRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Involution,
    Tv,
    Degree,
    DetArea,
    Inverse,
    Fundamental,
    Boundaryless,
    Witness,
    All,
}

impl Target {
    pub const SUITES: [Target; 8] = [
        Target::Involution,
        Target::Tv,
        Target::Degree,
        Target::DetArea,
        Target::Inverse,
        Target::Fundamental,
        Target::Boundaryless,
        Target::Witness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Involution => "involution",
            Target::Tv => "tv",
            Target::Degree => "degree",
            Target::DetArea => "det-area",
            Target::Inverse => "inverse",
            Target::Fundamental => "fundamental",
            Target::Boundaryless => "boundaryless",
            Target::Witness => "witness",
            Target::All => "all",
        }
    }
}

/// Level and tolerance for one run.
#[derive(Clone, Copy, Debug)]
pub struct Params {
    pub level: usize,
    pub tol: f64,
    pub mode: Mode,
    pub grid_n: usize,
}

impl Params {
    pub fn from_config(cfg: &RunConfig, level: Option<usize>, tol: Option<f64>) -> Self {
        Params {
            level: level.unwrap_or(cfg.max_level),
            tol: tol.unwrap_or(cfg.quad_tol),
            mode: cfg.mode,
            grid_n: cfg.grid_n,
        }
    }

    /// Tolerance for identity checks, which need tighter quadrature than
    /// the total-variation sums.
    fn fine_tol(&self) -> f64 {
        self.tol.min(1e-8)
    }
}

pub fn run(target: Target, p: &Params) -> Result<Vec<CheckRow>> {
    match target {
        Target::Involution => involution(p),
        Target::Tv => tv(p),
        Target::Degree => degree(p),
        Target::DetArea => det_area(p),
        Target::Inverse => inverse(p),
        Target::Fundamental => fundamental(p),
        Target::Boundaryless => boundaryless(p),
        Target::Witness => witness(p),
        Target::All => {
            let mut rows = Vec::new();
            for t in Target::SUITES {
                rows.extend(run(t, p)?);
            }
            Ok(rows)
        }
    }
}

fn random_point(r: &mut ChaCha8Rng) -> P2 {
    Point2::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

fn random_rect(r: &mut ChaCha8Rng, min_side: f64) -> Rect2<f64> {
    let mut side = || {
        let a: f64 = r.gen_range(-1.0..1.0 - min_side);
        let b: f64 = r.gen_range(a + min_side..=1.0);
        (a, b)
    };
    let (a1, b1) = side();
    let (a2, b2) = side();
    Rect2::from_bounds(a1, b1, a2, b2).expect("ordered bounds")
}

fn involution(p: &Params) -> Result<Vec<CheckRow>> {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut rows = Vec::new();
    for k in 1..=p.level {
        let row = match p.mode {
            Mode::Float => {
                let mut worst: f64 = 0.0;
                for _ in 0..10_000 {
                    let x = random_point(&mut r);
                    let z = f_level_eval(k, &f_level_eval(k, &x)?)?;
                    worst = worst.max(z.dist_inf(&x));
                }
                CheckRow::upper(format!("involution/k={k}"), "max |f_k(f_k(x)) - x|", worst, 0.0, 1e-10)
            }
            Mode::Exact => {
                let mut mismatches = 0;
                for _ in 0..1000 {
                    let mut c = || Exact::ratio(r.gen_range(-(1 << 20)..=(1 << 20)), 1 << 20);
                    let x = Point2::new(c(), c());
                    if f_level_eval(k, &f_level_eval(k, &x)?)? != x {
                        mismatches += 1;
                    }
                }
                CheckRow::equality(format!("involution/k={k}"), "#{f_k(f_k(x)) != x}", mismatches as f64, 0.0, 0.5)
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn tv(p: &Params) -> Result<Vec<CheckRow>> {
    let slack = 1e-3;
    let mut rows = Vec::new();
    for k in 1..=p.level {
        let rep = tv_total(k, p.tol, slack)?;
        let id = |s: &str| format!("tv/k={k}/{s}");
        rows.push(CheckRow::upper(id("total"), "∫_{Q_0} |Df_k| ≤ 20", rep.tv_total_fk.value, rep.total_bound, slack));
        for s in &rep.shells {
            rows.push(CheckRow::upper(
                id(&format!("shell-{}", s.j)),
                "4^j ∫_{P_j \\ Q_j} |Dg_j| ≤ 2^{4-j}",
                s.value,
                s.bound,
                slack,
            ));
        }
        rows.push(CheckRow::upper(id("q-term"), "4^k ∫_{Q_k} |Dg_k| ≤ 4", rep.q_term, rep.q_term_bound, slack));
        rows.push(CheckRow::equality(
            id("assembled"),
            "shell sum + Q term = ∫_{Q_0} |Df_k|",
            rep.assembled,
            rep.tv_total_fk.value,
            slack,
        ));
        let q_row = match p.mode {
            Mode::Exact => {
                let a = a_seq::<Exact>(k + 1);
                let want = Exact::pow2(2 - 2 * k as i32) * a.clone() * a;
                let got = tv_q_exact::<Exact>(k)?;
                let mut row = CheckRow::equality(id("q-exact"), "∫_{Q_k} |Dg_k| = 4^{1-k} a_{k+1}^2", got.to_f64(), want.to_f64(), f64::EPSILON);
                row.pass = got == want;
                row
            }
            Mode::Float => {
                let a = a_seq::<f64>(k + 1);
                CheckRow::equality(id("q-exact"), "∫_{Q_k} |Dg_k| = 4^{1-k} a_{k+1}^2", rep.tv_q.value, 4f64.powi(1 - k as i32) * a * a, 1e-9)
            }
        };
        rows.push(q_row);
    }
    Ok(rows)
}

fn degree(p: &Params) -> Result<Vec<CheckRow>> {
    let tol = p.fine_tol();
    let mut rows = Vec::new();
    let unit = Rect2::from_bounds(0.0, 1.0, 0.0, 1.0)?;
    let square = Rect2::unit_square();
    let cases = [
        (AnalyticMap::Cube, unit, Bump::square(Point2::new(0.5, 0.5), 0.3)),
        (AnalyticMap::Identity, square, Bump::new(Point2::new(-0.2, 0.3), 0.4, 0.5)),
        (AnalyticMap::ComplexSquare, square, Bump::square(Point2::new(0.2, 0.0), 0.15)),
    ];
    for (map, u, eta) in cases {
        let c = degree_formula_check(&map, &u, &eta, tol, 8)?;
        rows.push(CheckRow::equality(
            format!("degree/formula/{}", map.name()),
            "∫_U η(f) J_f = ∫ η deg(f, U, ·)",
            c.lhs,
            c.rhs,
            1e-3,
        ));
    }
    let mut r = ChaCha8Rng::seed_from_u64(6);
    for k in 1..=p.level {
        for map in [LevelMap::new(k), LevelMap::reflected(k)] {
            let (mut pos, mut total) = (0usize, 0usize);
            while total < 10_000 {
                let x = random_point(&mut r);
                if let Some(j) = map.jacobian(x) {
                    total += 1;
                    pos += usize::from(j > 0.0);
                }
            }
            rows.push(CheckRow::equality(
                format!("degree/jacobian-positive/{}", map.name()),
                "J_f > 0 a.e. (fraction of samples)",
                pos as f64 / total as f64,
                1.0,
                1e-12,
            ));
            let (mut plus, mut count) = (0usize, 0usize);
            while count < 50 {
                let rect = random_rect(&mut r, 0.05);
                let curve = BoundaryCurve::rectangle(&rect, 64);
                if let Ok(d) = winding_degree(&map, &curve, map.eval(rect.center())) {
                    count += 1;
                    plus += usize::from(d == 1);
                }
            }
            rows.push(CheckRow::equality(
                format!("degree/sense-preserving/{}", map.name()),
                "deg(f, R, f(c)) = +1 (fraction of rectangles)",
                plus as f64 / count as f64,
                1.0,
                1e-12,
            ));
        }
    }
    Ok(rows)
}

fn det_area(p: &Params) -> Result<Vec<CheckRow>> {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let mut rows = Vec::new();
    for k in 1..=p.level.min(4) {
        for i in 0..20 {
            let e = random_rect(&mut r, 0.1);
            for map in [LevelMap::new(k), LevelMap::reflected(k)] {
                let c = det_equals_area_check(&map, &e, p.grid_n, p.fine_tol())?;
                rows.push(CheckRow::equality(
                    format!("det-area/{}/rect-{i}", map.name()),
                    "Det Df(E) = |f(E)|",
                    c.det.value,
                    c.area,
                    1e-2,
                ));
            }
        }
    }
    Ok(rows)
}

fn inverse(p: &Params) -> Result<Vec<CheckRow>> {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut rows = Vec::new();
    for k in 1..=p.level.min(4) {
        for i in 0..10 {
            let u = random_rect(&mut r, 0.1);
            for map in [LevelMap::new(k), LevelMap::reflected(k)] {
                let c = inverse_gradient_check(&map, &u, p.fine_tol());
                rows.push(CheckRow::equality(
                    format!("inverse/{}/rect-{i}", map.name()),
                    "max entry |Df^{-1}(f(U)) - adj Df(U)|",
                    c.max_residual(),
                    0.0,
                    1e-2,
                ));
            }
        }
    }
    Ok(rows)
}

fn fundamental(p: &Params) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for k in 1..=p.level.min(3) {
        let map = LevelMap::new(k);
        let mut worst = f64::INFINITY;
        for j in 0..10 {
            for i in 0..10 {
                let x0 = Point2::new(-0.85 + 1.7 * i as f64 / 9.0, -0.85 + 1.7 * j as f64 / 9.0);
                for s in 3..=6 {
                    worst = worst.min(fundamental_ratio(&map, x0, 2f64.powi(-s), 32, 4)?);
                }
            }
        }
        rows.push(CheckRow::lower(
            format!("fundamental/k={k}"),
            "min |μ|(B(x,r) × B(f(x),r)) / r² ≥ 1/4 - 10%",
            worst,
            0.225,
            0.0,
        ));
    }
    Ok(rows)
}

fn boundaryless(p: &Params) -> Result<Vec<CheckRow>> {
    let eta = Bump::new(Point2::new(0.1, -0.05), 0.6, 0.55);
    let phi = Bump::new(Point2::new(-0.05, 0.1), 0.7, 0.65);
    let mut rows = Vec::new();
    for k in 1..=p.level.min(3) {
        for slot in FormSlot::ALL {
            let res = boundaryless_residual(k, &eta, &phi, slot, p.fine_tol().min(1e-9));
            rows.push(CheckRow::equality(
                format!("boundaryless/k={k}/{slot:?}").to_lowercase(),
                "⟨∂ Γ_f, ω⟩ = 0",
                res.value,
                0.0,
                1e-3,
            ));
        }
    }
    Ok(rows)
}

fn witness(p: &Params) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for k in 1..=p.level {
        let alpha = SignCode::constant(1, k)?;
        let (v, l) = vertical_variation(k, &alpha, 2000)?;
        let id = |s: &str| format!("witness/k={k}/{s}");
        rows.push(CheckRow::lower(id("V"), "V ≥ 1", v, 1.0, 0.0));
        rows.push(CheckRow::equality(id("L"), "L = 2^{2-k}", l, 2f64.powi(2 - k as i32), 1e-15));
        rows.push(CheckRow::lower(id("V/L"), "V / L ≥ 2^{k-3}", v / l, 2f64.powi(k as i32 - 3), 0.0));
    }
    Ok(rows)
}
