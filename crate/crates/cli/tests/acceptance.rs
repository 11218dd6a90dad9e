//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use jensen_core::functions::{convexity_probe, random_max_affine, standard_suite};
use jensen_core::zoo::{self, Platonic};
use jensen_core::{
    affine_worst_case, centroid_gap, chebyshev_center, cone_bound_check, insphere_bound_check, jensen_gap,
    jensen_verdict, maxaffine_search, mean_over_body, mean_over_boundary, mean_over_segment, suite_for, ConvexFunc,
    Method, Point, Polytope, QuadratureRequest, SearchConfig, Shape, Verdict,
};
use nalgebra::{dmatrix, dvector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! require {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn req() -> QuadratureRequest {
    QuadratureRequest::default()
}

fn triangle_counterexample() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("report.json");
    let code = jensen_cli::run_cli(["jensen", "check", "zoo:triangle-T", "--out", out.to_str().unwrap()]);
    require!(code == 1, "exit code {code}, expected 1");
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let entry = report["entries"]
        .as_array()
        .and_then(|es| es.iter().find(|e| e["function"]["kind"] == "coordproj" && e["function"]["i"] == 1 && e["function"]["sign"] == 1.0))
        .ok_or("no coordproj(1,+1) entry")?;
    let r = &entry["result"];
    let body = r["bodyMean"]["value"].as_f64().ok_or("bodyMean")?;
    let boundary = r["boundaryMean"]["value"].as_f64().ok_or("boundaryMean")?;
    let gap = r["gap"].as_f64().ok_or("gap")?;
    require!(r["bodyMean"]["method"] == "exact", "body mean method {}", r["bodyMean"]["method"]);
    require!((body - 1.0 / 3.0).abs() < 1e-12, "body mean {body}");
    require!((boundary - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-12, "boundary mean {boundary}");
    require!((gap + 0.0404401).abs() < 1e-7, "gap {gap}");
    require!(r["verdict"] == "violated", "verdict {}", r["verdict"]);
    Ok(format!("bodyMean {body:.15}, boundaryMean {boundary:.15}, gap {gap:.7}, exit 1"))
}

fn centroid_gaps() -> Outcome {
    let t = Shape::Polytope(zoo::triangle_t());
    let (_, worst) = affine_worst_case(&t);
    let g = centroid_gap(&t);
    require!((g - 0.0404401).abs() < 1e-7, "triangle centroid gap {g}");
    require!((g - worst).abs() < 1e-10, "centroid gap {g} vs affine worst case {worst}");
    let mut shapes: Vec<(String, Shape)> = Vec::new();
    for n in 2..=4 {
        shapes.push((format!("cube:{n}"), zoo::by_name(&format!("cube:{n}")).unwrap()));
    }
    for n in 2..=5 {
        shapes.push((format!("ball:{n}"), zoo::by_name(&format!("ball:{n}")).unwrap()));
    }
    for k in 3..=9 {
        shapes.push((format!("polygon {k}"), Shape::Polytope(zoo::make_regular_polygon(k, 1.0).unwrap())));
    }
    for s in Platonic::ALL {
        shapes.push((s.name().to_string(), Shape::Polytope(zoo::make_platonic(s, 1.0).unwrap())));
    }
    let mut max_gap: f64 = 0.0;
    for (name, s) in &shapes {
        let g = centroid_gap(s);
        require!(g < 1e-8, "{name}: centroid gap {g}");
        max_gap = max_gap.max(g);
    }
    Ok(format!("triangle gap {g:.10} = worst affine {worst:.10}; {} symmetric shapes, max gap {max_gap:.1e}", shapes.len()))
}

fn parallelotopes() -> Outcome {
    let mut checked = 0;
    let mut worst_bound: f64 = 0.0;
    for n in [2, 3, 4] {
        for seed in 0..25 {
            let shape = Shape::Parallelotope(zoo::random_parallelotope(n, seed).unwrap());
            let report = jensen_verdict(&shape, &suite_for(&shape, seed), &req()).map_err(|e| e.to_string())?;
            for e in &report.entries {
                let r = &e.result;
                require!(r.verdict != Verdict::Violated, "n={n} seed={seed} {}: violated, gap {}", e.function, r.gap);
                require!(r.gap >= -r.gap_error_bound, "n={n} seed={seed} {}: gap {}", e.function, r.gap);
                require!(r.gap_error_bound <= 1e-4, "n={n} seed={seed} {}: bound {}", e.function, r.gap_error_bound);
                worst_bound = worst_bound.max(r.gap_error_bound);
                checked += 1;
            }
        }
    }
    Ok(format!("75 parallelotopes, {checked} (shape, function) pairs, no violations, max errorBound {worst_bound:.1e}"))
}

fn balls() -> Outcome {
    let mut min_det: f64 = f64::INFINITY;
    for n in [2, 3] {
        let shape = zoo::by_name(&format!("ball:{n}")).unwrap();
        let report = jensen_verdict(&shape, &suite_for(&shape, 0), &req()).map_err(|e| e.to_string())?;
        for e in &report.entries {
            let r = &e.result;
            require!(r.body_mean.method != Method::MonteCarlo, "n={n} {}: Monte Carlo used", e.function);
            require!(r.gap >= -1e-6, "n={n} {}: gap {}", e.function, r.gap);
            min_det = min_det.min(r.gap);
        }
    }
    let mc_req = QuadratureRequest { max_mc_samples: 1 << 18, ..req() };
    let mut worst_z: f64 = f64::NEG_INFINITY;
    for n in [4, 5] {
        let shape = zoo::by_name(&format!("ball:{n}")).unwrap();
        let report = jensen_verdict(&shape, &suite_for(&shape, 0), &mc_req).map_err(|e| e.to_string())?;
        for e in &report.entries {
            let r = &e.result;
            // Reported bounds are three standard errors.
            let stderr = ((r.body_mean.error_bound / 3.0).powi(2) + (r.boundary_mean.error_bound / 3.0).powi(2)).sqrt();
            require!(r.gap >= -3.0 * stderr, "n={n} {}: gap {} below -3 x {stderr}", e.function, r.gap);
            if stderr > 0.0 {
                worst_z = worst_z.max(-r.gap / stderr);
            }
        }
    }
    let mut worst_identity: f64 = 0.0;
    for n in 2..=10 {
        let b = Shape::Ball(zoo::make_ball(n, Point::zeros(n), 1.0).unwrap());
        let res = jensen_core::checker::identity_residuals(&b, None);
        require!(res[0].1 <= 1e-12, "n={n}: identity residual {}", res[0].1);
        worst_identity = worst_identity.max(res[0].1);
    }
    Ok(format!(
        "n=2,3 min gap {min_det:.3e}; n=4,5 worst gap/stderr {worst_z:.2}; n|B_n| = |S| residual {worst_identity:.1e}"
    ))
}

fn cones() -> Outcome {
    let mut pairs = 0;
    let mut worst_affine: f64 = 0.0;
    let mut worst_volume: f64 = 0.0;
    for n in [2, 3] {
        for seed in 0..50 {
            let cone = zoo::random_cone(n, seed).unwrap();
            let hull = cone.hull();
            let rel = (hull.volume() - cone.height() * cone.base_measure() / n as f64).abs() / hull.volume();
            worst_volume = worst_volume.max(rel);
            let shape = Shape::Cone(cone.clone());
            for f in suite_for(&shape, seed) {
                let b = cone_bound_check(&cone, &f, &req()).map_err(|e| e.to_string())?;
                require!(b.holds, "n={n} seed={seed} {f}: lhs {} > rhs {} + {}", b.lhs.value, b.rhs, b.error_bound);
                if f.as_affine(n).is_some() {
                    let d = (b.lhs.value - b.rhs).abs();
                    require!(d <= 1e-9, "n={n} seed={seed} {f}: affine |lhs - rhs| = {d}");
                    worst_affine = worst_affine.max(d);
                }
                pairs += 1;
            }
        }
    }
    let hand = zoo::make_cone(&[dvector![-1.0, 0.0], dvector![1.0, 0.0]], dvector![0.0, 1.0]).unwrap();
    let f = ConvexFunc::quad_form(dmatrix![1.0, 0.0], Point::zeros(2), 0.0).unwrap();
    let b = cone_bound_check(&hand, &f, &req()).map_err(|e| e.to_string())?;
    require!((b.lhs.value - 1.0 / 6.0).abs() <= 1e-9, "hand case lhs {}", b.lhs.value);
    require!((b.rhs - 2.0 / 9.0).abs() <= 1e-12, "hand case rhs {}", b.rhs);
    Ok(format!(
        "100 cones, {pairs} pairs hold; affine max |lhs-rhs| {worst_affine:.1e}; hand case lhs {:.12} rhs {:.12}; (worst cone volume residual {worst_volume:.1e})",
        b.lhs.value, b.rhs
    ))
}

fn tangent_polytopes() -> Vec<Polytope> {
    let mut out = Vec::new();
    for n in [2, 3] {
        for seed in 0..25u64 {
            out.push(zoo::random_tangent_polytope(n, n + 1 + seed as usize % 4, seed).unwrap());
        }
    }
    out
}

fn volume_identities() -> Outcome {
    let mut worst_cone: f64 = 0.0;
    for n in [2, 3] {
        for seed in 0..50 {
            let c = zoo::random_cone(n, seed).unwrap();
            let v = c.hull().volume();
            worst_cone = worst_cone.max((v - c.height() * c.base_measure() / n as f64).abs() / v);
        }
    }
    require!(worst_cone <= 1e-9, "cone volume residual {worst_cone}");
    let mut worst_tangent: f64 = 0.0;
    for p in tangent_polytopes() {
        let ins = chebyshev_center(&p).map_err(|e| e.to_string())?;
        require!(ins.tangent_to_all, "generated polytope is not tangent");
        let v = p.volume();
        worst_tangent = worst_tangent.max((v - ins.radius / p.dim() as f64 * p.surface_measure()).abs() / v);
    }
    require!(worst_tangent <= 1e-9, "tangent polytope residual {worst_tangent}");
    Ok(format!("cone |G| = H|base|/n residual {worst_cone:.1e}; 50 tangent |W| = (r/n)|dW| residual {worst_tangent:.1e}"))
}

fn insphere_bounds() -> Outcome {
    let mut pairs = 0;
    let mut margin_t: f64 = f64::INFINITY;
    let mut margin_c: f64 = f64::INFINITY;
    for (i, p) in tangent_polytopes().iter().enumerate() {
        let shape = Shape::Polytope(p.clone());
        for f in suite_for(&shape, i as u64) {
            let b = insphere_bound_check(p, &f, &req()).map_err(|e| e.to_string())?;
            require!(b.holds_theorem, "polytope {i} {f}: {} > {} + {}", b.lhs.value, b.rhs_theorem, b.error_theorem);
            require!(b.holds_corollary, "polytope {i} {f}: {} > {} + {}", b.lhs.value, b.rhs_corollary, b.error_corollary);
            margin_t = margin_t.min(b.rhs_theorem - b.lhs.value);
            margin_c = margin_c.min(b.rhs_corollary - b.lhs.value);
            pairs += 1;
        }
    }
    Ok(format!("50 tangent polytopes, {pairs} pairs; min rhs-lhs: theorem {margin_t:.1e}, corollary {margin_c:.1e}"))
}

fn regular_bodies() -> Outcome {
    let mut bodies: Vec<(String, Polytope)> =
        Platonic::ALL.iter().map(|s| (s.name().to_string(), zoo::make_platonic(*s, 1.0).unwrap())).collect();
    bodies.extend((3..=12).map(|k| (format!("polygon {k}"), zoo::make_regular_polygon(k, 1.0).unwrap())));
    for (name, p) in &bodies {
        let ins = chebyshev_center(p).map_err(|e| e.to_string())?;
        require!(ins.tangent_to_all, "{name}: not tangent");
        let d = (&ins.center - p.boundary_centroid()).norm();
        require!(d < 1e-8, "{name}: |s - m| = {d}");
        let shape = Shape::Polytope(p.clone());
        let report = jensen_verdict(&shape, &suite_for(&shape, 0), &req()).map_err(|e| e.to_string())?;
        let v = report.count(Verdict::Violated) + report.count(Verdict::Inconclusive);
        require!(v == 0, "{name}: {v} violated or inconclusive suite members");
    }
    Ok(format!("{} bodies tangent, centers coincide, zero violations", bodies.len()))
}

fn search_sanity() -> Outcome {
    let t = Shape::Polytope(zoo::triangle_t());
    let cfg = SearchConfig { pieces: 1, restarts: 8, budget: 10_000, ..Default::default() };
    let res = maxaffine_search(&t, &cfg).map_err(|e| e.to_string())?;
    let v = res.certified_violation();
    require!(v >= 0.0384, "triangle certified violation {v}");
    require!(res.certificate.verdict == Verdict::Violated, "certificate verdict {}", res.certificate.verdict);
    let cube = Shape::Polytope(zoo::make_platonic(Platonic::Cube, 1.0).unwrap());
    let cfg = SearchConfig { pieces: 4, restarts: 8, budget: 10_000, ..Default::default() };
    let res = maxaffine_search(&cube, &cfg).map_err(|e| e.to_string())?;
    let w = res.certified_violation();
    let e = res.certificate.gap_error_bound;
    require!(w <= 3.0 * e, "cube certified violation {w} exceeds 3 x {e}");
    Ok(format!("triangle k=1 certified {v:.6}; cube k=4 certified {w:.1e} <= 3 x {e:.1e}"))
}

fn quadrature_oracles() -> Outcome {
    let square = Polytope::from_vertices(&[dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![1.0, 1.0], dvector![0.0, 1.0]])
        .unwrap();
    let shape = Shape::Polytope(square);
    let f = ConvexFunc::squared_norm(2);
    let body = mean_over_body(&shape, &f, &req()).map_err(|e| e.to_string())?.value;
    let boundary = mean_over_boundary(&shape, &f, &req()).map_err(|e| e.to_string())?.value;
    require!((body - 2.0 / 3.0).abs() <= 1e-10, "square body mean {body}");
    require!((boundary - 5.0 / 6.0).abs() <= 1e-10, "square boundary mean {boundary}");
    let g = jensen_gap(&shape, &f, &req()).map_err(|e| e.to_string())?;
    require!(g.verdict == Verdict::Holds, "square verdict {}", g.verdict);

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000u64 {
        let n = 2 + (trial % 3) as usize;
        let anchor = Point::zeros(n);
        let f = if trial % 2 == 0 {
            random_max_affine(n, rng.random_range(1..6), &anchor, 1.0, &mut rng)
        } else {
            let suite = standard_suite(n, &anchor, 1.0, trial);
            suite[rng.random_range(0..suite.len())].clone()
        };
        let a = Point::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
        let b = Point::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
        let e = mean_over_segment(&f, &a, &b, &req()).map_err(|e| e.to_string())?;
        let mid = f.eval(&((&a + &b) * 0.5));
        let chord = 0.5 * (f.eval(&a) + f.eval(&b));
        let slack = e.error_bound + 1e-12 * (1.0 + chord.abs());
        require!(mid <= e.value + slack && e.value <= chord + slack, "trial {trial} {f}: {mid} <= {} <= {chord}", e.value);
    }

    let mut probed = 0;
    for n in 2..=4 {
        let lo = Point::from_element(n, -2.0);
        let hi = Point::from_element(n, 2.0);
        for (j, f) in standard_suite(n, &Point::zeros(n), 1.0, 0).iter().enumerate() {
            let out = convexity_probe(f, &lo, &hi, 10_000, j as u64);
            require!(out.passed(), "n={n} {f}: {out:?}");
            probed += 1;
        }
    }
    Ok(format!("square means {body:.12}/{boundary:.12}; 1000 segment sandwiches hold; {probed} suite functions pass 10^4 triples"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("triangle counterexample via CLI", triangle_counterexample),
        ("centroid gap and affine worst case", centroid_gaps),
        ("parallelotopes hold on the suite", parallelotopes),
        ("balls hold on the suite", balls),
        ("cone apex bound", cones),
        ("volume identities", volume_identities),
        ("inscribed-ball bounds on tangent polytopes", insphere_bounds),
        ("regular polygons and Platonic solids", regular_bodies),
        ("max-affine search sanity", search_sanity),
        ("quadrature oracles", quadrature_oracles),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
