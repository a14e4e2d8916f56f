//! Acceptance suite: eleven end-to-end criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so that every line is printed even when
//! all criteria pass; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rho_maximal::dini::{dini_condition_check, DiniOptions, DiniVerdict};
use rho_maximal::domain::{
    cz_decomposition, find_containing_dyadic, BoundaryPolicy, Cube, CubeFamily, Domain, DomainSpec, FunctionSpec,
    SampledFunction, ShiftedDyadicGrids,
};
use rho_maximal::harness::{run_experiment, standard_battery, sufficient_sigma, Experiment, ExperimentConfig, Verdict};
use rho_maximal::maximal::{char_ball_bounds_check, hl_maximal, pointwise_power_bound_check, sandwich_constants};
use rho_maximal::orlicz::{holder_check, luxemburg_average};
use rho_maximal::radius::{critical_covering, overlap_profile, CriticalRadius};
use rho_maximal::weights::{a1_rho_constant, ap_rho_constant, WeightSpec};
use rho_maximal::young::{log_ladder, GrowthFunction, GrowthPair, YoungFunction};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_function(dom: Domain, r: &mut ChaCha8Rng) -> SampledFunction {
    let values = (0..dom.len())
        .map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..2.0) })
        .collect();
    SampledFunction::from_values(dom, values).unwrap()
}

/// Cube with random center and half-side, kept inside the box.
fn random_cube(dom: &Domain, r: &mut ChaCha8Rng, min_half: f64, max_half: f64) -> Cube {
    let l = dom.half_width();
    let s = r.gen_range(min_half..max_half);
    let c: Vec<f64> = (0..dom.dim()).map(|_| r.gen_range(-l + s..l - s)).collect();
    Cube::new(&c, s).unwrap()
}

fn c1_orlicz_kernel() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let dom = if case % 2 == 0 { Domain::new(1, 4.0, 256).unwrap() } else { Domain::new(2, 4.0, 64).unwrap() };
        let f = random_function(dom, &mut r);
        let q = random_cube(&dom, &mut r, 0.2, 1.5);
        let p = [1.5, 2.0, 3.0][case % 3];
        let eta = YoungFunction::power(p).unwrap();
        let got = luxemburg_average(&f, &q, &eta);
        // Oracle: direct sum over the grid points inside the half-open cube.
        let d = dom.dim();
        let mut sum = 0.0;
        for i in 0..dom.len() {
            let x = dom.point(i);
            if (0..d).all(|a| x[a] >= q.lower(a) && x[a] < q.upper(a)) {
                sum += f.values()[i].abs().powf(p);
            }
        }
        let want = (sum * dom.cell_measure() / q.measure()).powf(1.0 / p);
        worst = worst.max((got - want).abs() / want);
    }
    let t = start.elapsed();
    outcome(worst <= 1e-8 && t < Duration::from_secs(10), format!("max rel. error {worst:.2e} over 100 cubes in {t:.2?}"))
}

fn c2_duality() -> Outcome {
    let ts = log_ladder(1e-3, 1e3, 64);
    let mut sandwich_ok = true;
    let mut extreme = (f64::INFINITY, 0.0f64);
    let phis = [YoungFunction::power(2.0).unwrap(), YoungFunction::power(3.0).unwrap(), YoungFunction::plog(2.0, 1.0).unwrap()];
    for phi in &phis {
        let dual = phi.complementary().unwrap();
        for &t in &ts {
            let v = phi.inverse(t).unwrap() * dual.inverse(t).unwrap() / t;
            extreme = (extreme.0.min(v), extreme.1.max(v));
            // Equality at 2t is exact for power(2); allow rounding only.
            sandwich_ok &= (0.5 * (1.0 - 1e-12)..=2.0 * (1.0 + 1e-12)).contains(&v);
        }
    }
    let mut r = rng(2);
    let dom = Domain::new(1, 4.0, 128).unwrap();
    let mut max_ratio = 0.0f64;
    for case in 0..1000 {
        let f = random_function(dom, &mut r);
        let g = random_function(dom, &mut r);
        let q = random_cube(&dom, &mut r, 0.1, 2.0);
        let rep = holder_check(&f, &g, &q, &phis[case % 3]).unwrap();
        max_ratio = max_ratio.max(rep.ratio);
    }
    outcome(
        sandwich_ok && max_ratio <= 1.0,
        format!(
            "Φ⁻¹Φ̃⁻¹/t in [{:.4}, {:.17}]; max Hölder ratio {max_ratio:.4} over 1000 cases",
            extreme.0, extreme.1
        ),
    )
}

fn c3_dini() -> Outcome {
    let start = Instant::now();
    let opts = DiniOptions::default();
    let id = YoungFunction::power(1.0).unwrap();
    let r3 = dini_condition_check(&GrowthPair::lebesgue(3.0).unwrap(), &id, &opts).unwrap();
    let r2 = dini_condition_check(&GrowthPair::lebesgue(2.0).unwrap(), &id, &opts).unwrap();
    let g = GrowthFunction::power(1.0, 2.0).unwrap();
    let bad = dini_condition_check(&GrowthPair::new(g.clone(), g).unwrap(), &YoungFunction::power(3.0).unwrap(), &opts).unwrap();
    let c3 = r3.constant.unwrap_or(f64::NAN);
    let c2 = r2.constant.unwrap_or(f64::NAN);
    let target = 2f64.powf(-1.0 / 3.0);
    let t = start.elapsed();
    outcome(
        (c3 / target - 1.0).abs() <= 0.05
            && (c2 - 1.0).abs() <= 0.05
            && bad.verdict == DiniVerdict::Fail
            && bad.converged.iter().any(|c| !c)
            && t < Duration::from_secs(30),
        format!("C(p=3) = {c3:.4} (target {target:.4}), C(p=2) = {c2:.4}, η=t^p verdict {:?}, {t:.2?}", bad.verdict),
    )
}

/// Maximal dyadic descendants with average above λ, by enumerating every
/// dyadic level and checking all ancestors with direct sums.
fn brute_cz(f: &SampledFunction, top: &Cube, lambda: f64) -> BTreeSet<(i64, i64)> {
    let dom = f.domain();
    let h = dom.h();
    let avg = |lo: f64, side: f64| {
        let mut s = 0.0;
        for i in 0..dom.len() {
            let x = dom.point(i)[0];
            if x >= lo && x < lo + side {
                s += f.values()[i].abs();
            }
        }
        s * h / side
    };
    let mut out = BTreeSet::new();
    let levels = (top.side() / h).log2().round() as u32;
    for k in 1..=levels {
        let side = top.side() / f64::from(1u32 << k);
        for j in 0..(1u32 << k) {
            let lo = top.lower(0) + f64::from(j) * side;
            if avg(lo, side) <= lambda {
                continue;
            }
            let maximal = (1..k).all(|m| {
                let aside = top.side() / f64::from(1u32 << m);
                let alo = top.lower(0) + ((lo - top.lower(0)) / aside).floor() * aside;
                avg(alo, aside) <= lambda
            });
            if maximal {
                out.insert(((lo / h).round() as i64, (side / h).round() as i64));
            }
        }
    }
    out
}

fn c4_geometry() -> Outcome {
    let mut r = rng(4);
    let mut ok = 0;
    let mut worst = 0.0f64;
    for case in 0..10_000 {
        let d = 1 + case % 2;
        let grids = ShiftedDyadicGrids::new(d).unwrap();
        let c: Vec<f64> = (0..d).map(|_| r.gen_range(-50.0..50.0)).collect();
        let half = 10f64.powf(r.gen_range(-3.0..3.0));
        let q = Cube::new(&c, half).unwrap();
        if let Ok((_, q0)) = find_containing_dyadic(&grids, &q) {
            let ratio = q0.side() / q.side();
            worst = worst.max(ratio);
            if q0.contains_cube(&q, 1e-12) && ratio <= 3.0 * (1.0 + 1e-12) {
                ok += 1;
            }
        }
    }
    let dom = Domain::new(1, 4.0, 64).unwrap();
    let eta = YoungFunction::power(1.0).unwrap();
    let top = dom.bounding_cube();
    let mut cz_ok = true;
    let mut counts = Vec::new();
    for seed in 0..5 {
        let mut rr = rng(40 + seed);
        let f = random_function(dom, &mut rr).map(|v| v * v * v);
        let lambda = 2.0 * f.mean_abs(&top);
        let got: BTreeSet<(i64, i64)> = cz_decomposition(&f, &top, lambda, &eta)
            .unwrap()
            .iter()
            .map(|q| ((q.lower(0) / dom.h()).round() as i64, (q.side() / dom.h()).round() as i64))
            .collect();
        let want = brute_cz(&f, &top, lambda);
        counts.push(want.len());
        cz_ok &= got == want;
    }
    outcome(
        ok == 10_000 && cz_ok,
        format!("{ok}/10000 containing cubes (max side ratio {worst:.3}); CZ sets equal brute force: {cz_ok} (sizes {counts:?})"),
    )
}

fn c5_pointwise_bound() -> Outcome {
    let rho = CriticalRadius::inverse_power(1.0).unwrap();
    let mut violations = 0;
    let mut points = 0;
    let mut max_ratio = 0.0f64;
    for spec in [DomainSpec { d: 1, l: 8.0, n: 256 }, DomainSpec { d: 2, l: 8.0, n: 64 }] {
        let dom = spec.build().unwrap();
        let family = CubeFamily::new(dom, BoundaryPolicy::ZeroExtend);
        for f in standard_battery(&spec, 10, 5) {
            let f = f.build(dom).unwrap();
            let rep = pointwise_power_bound_check(&f, 4.0, 2.0, 2.0, 2.0, 1.0, &rho, &family).unwrap();
            violations += rep.violations;
            points += rep.points;
            max_ratio = max_ratio.max(rep.max_ratio);
        }
    }
    outcome(violations == 0, format!("{violations} violations at {points} points; max lhs/rhs {max_ratio:.4}"))
}

fn c6_rho() -> Outcome {
    let rho = CriticalRadius::inverse_power(1.0).unwrap().with_constants(1.0, 1.0).unwrap();
    let mut r = rng(6);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let x = [r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0)];
        let y = [r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0)];
        for (a, b) in [(x, y), (y, x)] {
            let (lo, up) = rho.pair_slack(&a, &b, 1.0, 1.0);
            worst = worst.min(lo).min(up);
        }
    }
    let valid = worst >= 1.0 - 1e-12;
    let dom = Domain::new(2, 8.0, 64).unwrap();
    let cov = critical_covering(&rho, &dom);
    let covers = cov.covers_all();
    let prof = overlap_profile(&cov, &[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
    let monotone = prof.counts.windows(2).all(|w| w[0] <= w[1]);
    outcome(
        valid && covers && monotone && prof.n1.is_finite(),
        format!(
            "min slack {worst:.4} over 1000 pairs (both orders); {} cubes cover all: {covers}; counts {:?}, N1 = {:.3}",
            cov.len(),
            prof.counts,
            prof.n1
        ),
    )
}

fn c7_weak_type() -> Outcome {
    let start = Instant::now();
    // L = 4 keeps the cells well below the smallest critical radius.
    let mut cfg = ExperimentConfig::new(DomainSpec { d: 1, l: 4.0, n: 256 });
    cfg.battery.random = 20;
    cfg.weights = vec![WeightSpec::Power { delta: 0.5 }];
    cfg.theta = 0.0;
    let rep = run_experiment(Experiment::WeakType, &cfg).unwrap();
    let sigma = rep.parameters["sigma"];
    let n1 = rep.parameters["N1"];
    let expected = sufficient_sigma(0.0, 1.0, n1, 0.25).unwrap();
    let t = start.elapsed();
    let sups: Vec<String> = rep.levels.iter().map(|l| format!("N={}: {:.4}", l.n, l.sup_ratio)).collect();
    outcome(
        rep.verdict == Verdict::BoundedStable && sigma == expected && t < Duration::from_secs(300),
        format!("σ = {sigma:.4} (N1 = {n1:.3}); sup ratios {sups:?}; drift {:.3}; {:?}; {t:.2?}", rep.drift, rep.verdict),
    )
}

/// Battery shared by the strong-type and necessity runs: the standard
/// random draws plus a steep spike concentrating at grid scale.
fn strong_battery() -> Vec<FunctionSpec> {
    vec![FunctionSpec::PowerSpike {
        center: vec![0.3],
        alpha: 2.0,
        cutoff: 1.0,
        amplitude: 1.0,
    }]
}

fn c8_strong_type() -> Outcome {
    let mut verdicts = Vec::new();
    let mut ok = true;
    for w in [WeightSpec::Constant { value: 1.0 }, WeightSpec::Power { delta: 0.5 }] {
        let mut cfg = ExperimentConfig::new(DomainSpec { d: 1, l: 8.0, n: 256 });
        cfg.battery.functions = strong_battery();
        cfg.weights = vec![w];
        cfg.p = Some(2.0);
        cfg.q = Some(1.0);
        let rep = run_experiment(Experiment::StrongType, &cfg).unwrap();
        ok &= rep.verdict == Verdict::BoundedStable;
        verdicts.push(format!("{:?} (drift {:.3})", rep.verdict, rep.drift));
    }
    let mut cfg = ExperimentConfig::new(DomainSpec { d: 1, l: 8.0, n: 256 });
    cfg.battery.functions = strong_battery();
    cfg.eta = Some(rho_maximal::young::YoungSpec::Power { p: 4.0, scale: None });
    cfg.a = Some(rho_maximal::young::GrowthSpec::Power { coeff: 1.0, exponent: 1.0 });
    cfg.b = cfg.a.clone();
    cfg.override_dini = true;
    let probe = run_experiment(Experiment::ModularFs, &cfg).unwrap();
    let grows = probe.growth >= 0.25;
    outcome(
        ok && grows,
        format!("strong type {verdicts:?}; necessity probe growth {:.1}% under N→2N", 100.0 * probe.growth),
    )
}

fn c9_weights() -> Outcome {
    let rho = CriticalRadius::inverse_power(1.0).unwrap();
    let dom = Domain::new(1, 8.0, 256).unwrap();
    let fam = |d: Domain| CubeFamily::new(d, BoundaryPolicy::Inside);
    let one = ap_rho_constant(&SampledFunction::constant(dom, 1.0), 2.0, 0.0, &rho, &fam(dom)).unwrap().constant;
    let spec = WeightSpec::Power { delta: 1.0 };
    let a1 = |d: Domain, theta: f64| a1_rho_constant(&spec.build(d).unwrap(), theta, &rho, &fam(d)).unwrap().constant;
    let d16 = Domain::new(1, 16.0, 512).unwrap();
    let (base, refined) = (a1(d16, 4.0), a1(d16.refined(2).unwrap(), 4.0));
    let stable = (refined - base).abs() <= 0.2 * base;
    let growth = a1(d16, 0.0) / a1(Domain::new(1, 4.0, 128).unwrap(), 0.0);
    outcome(
        one == 1.0 && stable && growth >= 2.0,
        format!(
            "A_2(1) = {one}; A_1 at θ=4: {base:.4} → {refined:.4} under N→2N; θ=0 growth L=4→16: {growth:.3}×"
        ),
    )
}

fn c10_operator_algebra() -> Outcome {
    let mut r = rng(10);
    let dom = Domain::new(1, 4.0, 32).unwrap();
    let family = CubeFamily::new(dom, BoundaryPolicy::ZeroExtend);
    let rho = CriticalRadius::inverse_power(1.0).unwrap();
    let mut violations = 0usize;
    let tol = 1e-12;
    for _ in 0..50 {
        let f = random_function(dom, &mut r);
        let g = random_function(dom, &mut r);
        let c = r.gen_range(0.1..10.0);
        let (s1, s2) = (r.gen_range(0.0..2.0), r.gen_range(2.0..6.0));
        let m = |h: &SampledFunction, s: f64| hl_maximal(h, s, &rho, &family).unwrap();
        let mf = m(&f, s1);
        let mg = m(&g, s1);
        let mfg = m(&f.zip_with(&g, |a, b| a + b).unwrap(), s1);
        let mcf = m(&f.scale(-c), s1);
        let mf2 = m(&f, s2);
        // Oracle: every member cube, direct sums over its grid points.
        let mut brute = vec![0.0f64; dom.len()];
        for q in family.members() {
            let mut s = 0.0;
            for i in 0..dom.len() {
                if q.cube.contains_point(&dom.point(i)[..1]) {
                    s += f.values()[i].abs();
                }
            }
            let damp = (1.0 + q.cube.radius() / rho.eval(q.cube.center())).powf(-s1);
            let v = damp * s * dom.cell_measure() / q.cube.measure();
            for i in 0..dom.len() {
                if q.cube.contains_point(&dom.point(i)[..1]) {
                    brute[i] = brute[i].max(v);
                }
            }
        }
        for i in 0..dom.len() {
            let scale = mf.values()[i].max(1e-300);
            violations += usize::from(mfg.values()[i] > (mf.values()[i] + mg.values()[i]) * (1.0 + tol));
            violations += usize::from((mcf.values()[i] - c * mf.values()[i]).abs() > tol * c * scale);
            violations += usize::from(mf2.values()[i] > mf.values()[i] * (1.0 + tol));
            violations += usize::from((brute[i] - mf.values()[i]).abs() > tol * scale);
        }
    }
    outcome(violations == 0, format!("{violations} violations over 50 random pairs × 32 points × 4 properties"))
}

fn c11_sandwich_and_decay() -> Outcome {
    // Decay of centered maximals of a critical-ball indicator (ρ ≡ 1).
    let dom = Domain::new(1, 128.0, 1024).unwrap();
    let rho = CriticalRadius::constant(1.0).unwrap();
    let radii: Vec<f64> = (1..=1024).map(|k| k as f64 * dom.h()).collect();
    let points: Vec<usize> = [16.0, 22.0, 32.0, 45.0, 64.0].iter().map(|&x| dom.nearest_index(&[x]).unwrap()).collect();
    let sigma = 1.0;
    let p = 2.0;
    let phi = YoungFunction::power(p).unwrap();
    let rep = char_ball_bounds_check(&dom, &[0.0], sigma, &rho, &phi, &points, &radii).unwrap();
    let n = 1.0;
    let want_c = n + sigma;
    let want_phi = n / p + sigma;
    let slope_ok = (rep.centered_decay / want_c - 1.0).abs() <= 0.1 && (rep.centered_phi_decay / want_phi - 1.0).abs() <= 0.1;
    // The bound shapes bracket the observed decay.
    let bracket_ok = rep.centered_decay <= rep.lower_decay * 1.1
        && rep.centered_phi_decay >= rep.upper_decay * 0.9
        && rep.lower_constant > 0.0
        && rep.upper_constant.is_finite();
    // Centered/uncentered sandwich: constants positive, finite and stable.
    let spec = DomainSpec { d: 1, l: 8.0, n: 128 };
    let rho = CriticalRadius::inverse_power(1.0).unwrap();
    let id = YoungFunction::power(1.0).unwrap();
    let mut sandwich_ok = true;
    let mut worst_change = 0.0f64;
    for f in standard_battery(&spec, 10, 11) {
        let mut consts = Vec::new();
        for k in [1, 2] {
            let dom = spec.build().unwrap().refined(k).unwrap();
            let family = CubeFamily::new(dom, BoundaryPolicy::ZeroExtend);
            let radii: Vec<f64> = (1..=dom.cells()).map(|j| j as f64 * dom.h()).collect();
            let s = sandwich_constants(&f.build(dom).unwrap(), &id, sigma, &rho, &family, &radii).unwrap();
            sandwich_ok &= s.c1 > 0.0 && s.c1.is_finite() && s.c2 > 0.0 && s.c2.is_finite();
            consts.push((s.c1, s.c2));
        }
        let change = ((consts[1].0 / consts[0].0 - 1.0).abs()).max((consts[1].1 / consts[0].1 - 1.0).abs());
        worst_change = worst_change.max(change);
    }
    sandwich_ok &= worst_change <= 0.15;
    outcome(
        slope_ok && bracket_ok && sandwich_ok,
        format!(
            "decay {:.3} (pred. {want_c}), φ-decay {:.3} (pred. {want_phi}); bound decays {:.3}/{:.3}; sandwich constants change ≤ {:.1}% under N→2N",
            rep.centered_decay,
            rep.centered_phi_decay,
            rep.lower_decay,
            rep.upper_decay,
            100.0 * worst_change
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Orlicz kernel", c1_orlicz_kernel),
        ("Duality", c2_duality),
        ("Dini checker", c3_dini),
        ("Geometry", c4_geometry),
        ("Pointwise power bound", c5_pointwise_bound),
        ("ρ machinery", c6_rho),
        ("Weak type", c7_weak_type),
        ("Strong type", c8_strong_type),
        ("Weights", c9_weights),
        ("Operator algebra", c10_operator_algebra),
        ("Centered/uncentered and decay", c11_sandwich_and_decay),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {:>2} {:<32} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
