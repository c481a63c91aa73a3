//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, followed by
//! supplementary orientation checks.
//!
//! `f_k` reverses orientation (every piece has negative Jacobian and the
//! cell permutation reflects the quadrant order), so the criteria that
//! require a sense-preserving map are reported as `FAIL`. Those are listed
//! in `EXPECTED_RED`; for each one the suite also checks the measured
//! failure signature, and the process exits non-zero if anything else fails
//! or if a red criterion stops failing in the documented way.

use std::time::Instant;

use bvhomeo::bump::Bump;
use bvhomeo::construction::{a_seq, f_level_eval, level_params, CellAddress};
use bvhomeo::degree::{
    degree_formula_check, det_equals_area_check, winding_degree, BoundaryCurve,
};
use bvhomeo::derivative::{f_grad, tv_q_exact, tv_total, vertical_variation};
use bvhomeo::graph_measure::{
    boundaryless_residual, cantor_blowup_profile, fundamental_ratio, inverse_gradient_check,
    FormSlot,
};
use bvhomeo::maps::{AnalyticMap, LevelMap, PlanarMap};
use bvhomeo::{Exact, Point2, Rect2, Scalar, SignCode, P2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXPECTED_RED: [u32; 3] = [6, 8, 9];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    /// For expected-red criteria: whether the measured failure matches the
    /// orientation-reversal signature.
    signature_ok: Option<bool>,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point(r: &mut ChaCha8Rng) -> P2 {
    Point2::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

fn random_rect(r: &mut ChaCha8Rng, min_side: f64) -> Rect2<f64> {
    let side = |r: &mut ChaCha8Rng| {
        let a: f64 = r.gen_range(-1.0..1.0 - min_side);
        let b: f64 = r.gen_range(a + min_side..=1.0);
        (a, b)
    };
    let (a1, b1) = side(r);
    let (a2, b2) = side(r);
    Rect2::from_bounds(a1, b1, a2, b2).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut worst_total: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    let mut shell_margin = f64::INFINITY;
    for k in 1..=6 {
        let rep = tv_total(k, 1e-4, 1e-3).expect("tv report");
        pass &= rep.pass_total && rep.pass_shells;
        worst_total = worst_total.max(rep.tv_total_fk.value);
        worst_q = worst_q.max(rep.q_term);
        for s in &rep.shells {
            shell_margin = shell_margin.min(s.bound - s.value);
        }
        // the direct integral and the shell assembly are independent sums
        pass &= (rep.assembled - rep.tv_total_fk.value).abs() < 1e-3;
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    Outcome {
        id: 1,
        name: "total variation bound",
        pass,
        detail: format!(
            "max ∫|Df_k| = {worst_total:.4} (≤ 20), max Q term = {worst_q:.4} (≤ 4), \
             min shell margin = {shell_margin:.4}, {secs:.1} s"
        ),
        signature_ok: None,
    }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    for k in 1..=8 {
        let a = a_seq::<Exact>(k + 1);
        let want = Exact::pow2(2 - 2 * k as i32) * a.clone() * a;
        pass &= tv_q_exact::<Exact>(k).unwrap() == want;
    }
    let tv1 = tv_q_exact::<Exact>(1).unwrap();
    Outcome {
        id: 2,
        name: "exact Q-region integral",
        pass,
        detail: format!("k = 1..8 exact; k = 1 gives {tv1}"),
        signature_ok: None,
    }
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        for _ in 0..10_000 {
            let x = random_point(&mut r);
            let y = f_level_eval(k, &x).unwrap();
            let z = f_level_eval(k, &y).unwrap();
            worst = worst.max(z.dist_inf(&x));
        }
    }
    Outcome {
        id: 3,
        name: "involution",
        pass: worst < 1e-10,
        detail: format!("max |f_k(f_k(x)) - x|∞ = {worst:.3e} over 6 × 10^4 points"),
        signature_ok: None,
    }
}

fn random_dyadic(r: &mut ChaCha8Rng) -> Exact {
    Exact::ratio(r.gen_range(0..=1 << 20), 1 << 20)
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut checked = 0;
    let mut pass = true;
    for k in 2..=6 {
        let codes = SignCode::all(k);
        for _ in 0..1000 {
            let a = codes[r.gen_range(0..codes.len())].clone();
            let b = codes[r.gen_range(0..codes.len())].clone();
            let addr = CellAddress::new(a, b).unwrap();
            let (p, _) = bvhomeo::construction::cell_rects::<Exact>(&addr).unwrap();
            let t = random_dyadic(&mut r);
            let c = p.corners();
            let edge = r.gen_range(0..4);
            let (u, v) = (&c[edge], &c[(edge + 1) % 4]);
            let x = Point2::new(
                u.x1.clone() + t.clone() * (v.x1.clone() - u.x1.clone()),
                u.x2.clone() + t * (v.x2.clone() - u.x2.clone()),
            );
            pass &= f_level_eval(k, &x).unwrap() == f_level_eval(k - 1, &x).unwrap();
            checked += 1;
        }
    }
    Outcome {
        id: 4,
        name: "seam consistency",
        pass,
        detail: format!("{checked} exact boundary points, k = 2..6"),
        signature_ok: None,
    }
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut rows = Vec::new();
    for k in 1..=8 {
        let alpha = SignCode::constant(1, k).unwrap();
        let (v, l) = vertical_variation(k, &alpha, 2000).unwrap();
        let l_want = 2f64.powi(2 - k as i32);
        pass &= v >= 1.0 && l == l_want && v / l >= 2f64.powi(k as i32 - 3);
        rows.push(format!("k={k}: V={v:.4} L={l}"));
    }
    Outcome {
        id: 5,
        name: "non-Sobolev witness",
        pass,
        detail: rows.join(", "),
        signature_ok: None,
    }
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let (mut pos, mut neg, mut total) = (0usize, 0usize, 0usize);
    for k in 1..=6 {
        while total < 10_000 * k {
            let x = random_point(&mut r);
            if let Ok(s) = f_grad(k, &x) {
                total += 1;
                if s.jac > 0.0 {
                    pos += 1;
                } else if s.jac < 0.0 {
                    neg += 1;
                }
            }
        }
    }
    let mut degrees = Vec::new();
    for k in [2, 4, 6] {
        let map = LevelMap::new(k);
        let mut done = 0;
        while done < 50 / 3 + 1 {
            let rect = random_rect(&mut r, 0.05);
            let c = rect.center();
            let curve = BoundaryCurve::rectangle(&rect, 64);
            if let Ok(d) = winding_degree(&map, &curve, map.eval(c)) {
                degrees.push(d);
                done += 1;
            }
        }
    }
    let deg_plus = degrees.iter().filter(|&&d| d == 1).count();
    let deg_minus = degrees.iter().filter(|&&d| d == -1).count();
    Outcome {
        id: 6,
        name: "Jacobian positivity and sense preservation",
        pass: neg == 0 && pos == total && deg_plus == degrees.len(),
        detail: format!(
            "J > 0 at {pos}/{total} samples (J < 0 at {neg}); degree +1 on {deg_plus}/{}, -1 on {deg_minus}",
            degrees.len()
        ),
        signature_ok: Some(neg == total && deg_minus == degrees.len()),
    }
}

fn criterion_7() -> Outcome {
    let unit = Rect2::from_bounds(0.0, 1.0, 0.0, 1.0).unwrap();
    let square = Rect2::unit_square();
    let cases: [(AnalyticMap, Rect2<f64>, Bump); 3] = [
        (AnalyticMap::Cube, unit, Bump::square(Point2::new(0.5, 0.5), 0.3)),
        (AnalyticMap::Identity, square, Bump::new(Point2::new(-0.2, 0.3), 0.4, 0.5)),
        (AnalyticMap::ComplexSquare, square, Bump::square(Point2::new(0.2, 0.0), 0.15)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (map, u, eta) in cases {
        let c = degree_formula_check(&map, &u, &eta, 1e-8, 8).unwrap();
        pass &= c.residual < 1e-3;
        parts.push(format!("{}: residual {:.2e}", map.name(), c.residual));
    }
    Outcome {
        id: 7,
        name: "degree formula",
        pass,
        detail: parts.join(", "),
        signature_ok: None,
    }
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    let mut signature = true;
    for k in 1..=4 {
        let map = LevelMap::new(k);
        for _ in 0..20 {
            let e = random_rect(&mut r, 0.1);
            let c = det_equals_area_check(&map, &e, 2048, 1e-7).unwrap();
            worst = worst.max(c.residual);
            signature &= (c.det.value + c.area).abs() < 1e-2;
        }
    }
    Outcome {
        id: 8,
        name: "Det Df(E) = |f(E)|",
        pass: worst < 1e-2,
        detail: format!("max |Det Df_k(E) - |f_k(E)|| = {worst:.3e} over 80 rectangles"),
        signature_ok: Some(signature),
    }
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    let mut signature = true;
    for k in 1..=4 {
        let map = LevelMap::new(k);
        for _ in 0..10 {
            let u = random_rect(&mut r, 0.1);
            let c = inverse_gradient_check(&map, &u, 1e-8);
            worst = worst.max(c.max_residual());
            signature &= (0..4).all(|i| (c.lhs[i] + c.rhs[i]).abs() < 1e-2);
        }
    }
    Outcome {
        id: 9,
        name: "inverse-gradient identity",
        pass: worst < 1e-2,
        detail: format!("max adjugate-entry residual = {worst:.3e} over 40 rectangles"),
        signature_ok: Some(signature),
    }
}

fn criterion_10() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut at = (0usize, Point2::new(0.0, 0.0), 0.0);
    for k in 1..=3 {
        let map = LevelMap::new(k);
        for j in 0..10 {
            for i in 0..10 {
                let x0 = Point2::new(-0.85 + 1.7 * i as f64 / 9.0, -0.85 + 1.7 * j as f64 / 9.0);
                for s in 3..=6 {
                    let r = 2f64.powi(-s);
                    let ratio = fundamental_ratio(&map, x0, r, 32, 4).unwrap();
                    if ratio < worst {
                        worst = ratio;
                        at = (k, x0, r);
                    }
                }
            }
        }
    }
    Outcome {
        id: 10,
        name: "fundamental estimate",
        pass: worst >= 0.225,
        detail: format!(
            "min |μ|(B×B)/r² = {worst:.4} (k = {}, x0 = ({:.3}, {:.3}), r = {})",
            at.0, at.1.x1, at.1.x2, at.2
        ),
        signature_ok: None,
    }
}

fn standard_bumps() -> (Bump, Bump) {
    (
        Bump::new(Point2::new(0.1, -0.05), 0.6, 0.55),
        Bump::new(Point2::new(-0.05, 0.1), 0.7, 0.65),
    )
}

fn criterion_11() -> Outcome {
    let (eta, phi) = standard_bumps();
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        for slot in FormSlot::ALL {
            let r = boundaryless_residual(k, &eta, &phi, slot, 1e-9);
            worst = worst.max(r.value.abs());
        }
    }
    Outcome {
        id: 11,
        name: "boundaryless residual",
        pass: worst < 1e-3,
        detail: format!("max |residual| = {worst:.3e} over 4 slots, k = 1..3"),
        signature_ok: None,
    }
}

fn criterion_12() -> Outcome {
    let prof = cantor_blowup_profile(6, 1, &[1, 2, 3, 4, 5], 128, 6).unwrap();
    let m12: Vec<f64> = prof.scales.iter().map(|s| s.normalized.mu12).collect();
    let mu12: Vec<f64> = prof.scales.iter().map(|s| s.normalized.mu_up12).collect();
    let dets: Vec<f64> = prof.scales.iter().map(|s| s.kappa_det.abs()).collect();
    let non_increasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    Outcome {
        id: 12,
        name: "blow-up trend",
        pass: non_increasing(&m12) && non_increasing(&mu12),
        detail: format!(
            "normalized μ_12: [{}], μ^12: [{}], |det κ|: [{}]",
            fmt(&m12),
            fmt(&mu12),
            fmt(&dets)
        ),
        signature_ok: None,
    }
}

struct Supplement {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn supplementary() -> Vec<Supplement> {
    let mut out = Vec::new();

    // R ∘ f_k preserves orientation
    let mut r = rng(60);
    let mut ok = true;
    let mut count = 0;
    for k in 1..=6 {
        let map = LevelMap::reflected(k);
        for _ in 0..2000 {
            let x = random_point(&mut r);
            if let Some(j) = map.jacobian(x) {
                ok &= j > 0.0;
                count += 1;
            }
        }
        for _ in 0..9 {
            let rect = random_rect(&mut r, 0.05);
            let curve = BoundaryCurve::rectangle(&rect, 64);
            if let Ok(d) = winding_degree(&map, &curve, map.eval(rect.center())) {
                ok &= d == 1;
            }
        }
    }
    out.push(Supplement {
        name: "reflected map: J > 0 and degree +1",
        pass: ok,
        detail: format!("{count} Jacobian samples, 54 rectangles"),
    });

    let mut r = rng(80);
    let mut worst: f64 = 0.0;
    let mut stieltjes_gap: f64 = 0.0;
    for k in 1..=4 {
        let map = LevelMap::reflected(k);
        for _ in 0..20 {
            let e = random_rect(&mut r, 0.1);
            let c = det_equals_area_check(&map, &e, 2048, 1e-7).unwrap();
            worst = worst.max(c.residual);
            stieltjes_gap = stieltjes_gap.max((c.stieltjes - c.det.value).abs());
        }
    }
    out.push(Supplement {
        name: "reflected map: Det D(Rf)(E) = |Rf(E)|",
        pass: worst < 1e-2 && stieltjes_gap < 1e-4,
        detail: format!("max residual {worst:.3e}; Stieltjes oracle gap {stieltjes_gap:.2e}"),
    });

    let mut r = rng(90);
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        let map = LevelMap::reflected(k);
        for _ in 0..10 {
            let u = random_rect(&mut r, 0.1);
            worst = worst.max(inverse_gradient_check(&map, &u, 1e-8).max_residual());
        }
    }
    out.push(Supplement {
        name: "reflected map: D(Rf)^{-1}(Rf(U)) = adj D(Rf)(U)",
        pass: worst < 1e-2,
        detail: format!("max residual {worst:.3e}"),
    });

    // ⟨Det Df_3, φ⟩ = -∫ φ(f_3(y)) dy, and + for the reflected map
    let phi = Bump::new(Point2::new(0.15, -0.1), 0.5, 0.45);
    let dj = bvhomeo::degree::distributional_jacobian(&LevelMap::new(3), &phi, 1e-9).value;
    let djr = bvhomeo::degree::distributional_jacobian(&LevelMap::reflected(3), &phi, 1e-9).value;
    let pull = bvhomeo::degree::pullback_integral(&LevelMap::new(3), &phi, 1e-9).value;
    out.push(Supplement {
        name: "distributional Jacobian of f_3 equals -∫φ∘f_3",
        pass: (dj + pull).abs() < 1e-3 && (djr - pull).abs() < 1e-3,
        detail: format!("⟨Det Df_3, φ⟩ = {dj:.6}, ⟨Det D(Rf_3), φ⟩ = {djr:.6}, ∫φ∘f_3 = {pull:.6}"),
    });

    let lp = level_params::<Exact>(4).unwrap();
    out.push(Supplement {
        name: "|S_4| = 9/32",
        pass: bvhomeo::construction::s_measure::<Exact>(4).unwrap() == Exact::ratio(9, 32)
            && lp.b_k == Exact::ratio(1, 8),
        detail: format!("a_4 = {}, b_4 = {}", lp.a_k, lp.b_k),
    });
    out
}

fn main() {
    let criteria: [fn() -> Outcome; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut unexpected = Vec::new();
    for run in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = match o.signature_ok {
            Some(true) if !o.pass => " [expected: orientation-reversing map]",
            Some(false) => " [failure signature not as documented]",
            _ => "",
        };
        println!("{tag} criterion {:>2} ({}): {}{note}", o.id, o.name, o.detail);
        let red_ok = EXPECTED_RED.contains(&o.id) && !o.pass && o.signature_ok == Some(true);
        if !o.pass && !red_ok {
            unexpected.push(o.id);
        }
        if o.pass && EXPECTED_RED.contains(&o.id) {
            unexpected.push(o.id);
        }
    }
    for s in supplementary() {
        let tag = if s.pass { "PASS" } else { "FAIL" };
        println!("{tag} supplementary ({}): {}", s.name, s.detail);
        if !s.pass {
            unexpected.push(0);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
