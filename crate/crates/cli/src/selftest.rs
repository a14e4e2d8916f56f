//! Closed-form oracle suite: small, deterministic, a few seconds at most.

use std::path::Path;

use rho_maximal::dini::{dini_condition_check, DiniOptions, DiniVerdict};
use rho_maximal::domain::{find_containing_dyadic, BoundaryPolicy, Cube, CubeFamily, Domain, SampledFunction, ShiftedDyadicGrids};
use rho_maximal::harness::sufficient_sigma;
use rho_maximal::maximal::hl_maximal;
use rho_maximal::orlicz::luxemburg_average;
use rho_maximal::radius::CriticalRadius;
use rho_maximal::weights::ap_rho_constant;
use rho_maximal::young::{log_ladder, GrowthFunction, GrowthPair, YoungFunction};
use rho_maximal::Result;
use serde_json::json;

use crate::{write_output, Outcome};

type Check = (&'static str, fn() -> Result<(bool, String)>);

const CHECKS: [Check; 7] = [
    ("luxemburg_power_average", luxemburg),
    ("inverse_sandwich", sandwich),
    ("dini_constants", dini),
    ("sufficient_sigma", sigma),
    ("ap_constant_weight", ap_one),
    ("hl_brute_force", hl_brute),
    ("containing_dyadic", dyadic),
];

pub fn run(output: &Path) -> Outcome {
    let mut rows = Vec::new();
    let mut all = true;
    for (name, check) in CHECKS {
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("selftest {name:<26} {}  {detail}", if pass { "PASS" } else { "FAIL" });
        all &= pass;
        rows.push(json!({"check": name, "pass": pass, "detail": detail}));
    }
    write_output(output, "selftest.json", &(serde_json::to_string_pretty(&json!({"checks": rows, "pass": all})).expect("json") + "\n"))?;
    Ok(all)
}

fn luxemburg() -> Result<(bool, String)> {
    let dom = Domain::new(1, 2.0, 128)?;
    let f = SampledFunction::from_fn(dom, |x| x[0] * x[0] + 0.5)?;
    let mut worst = 0.0f64;
    for (p, c, s) in [(1.5, -0.5, 0.7), (2.0, 0.3, 1.2), (3.0, 0.0, 1.9)] {
        let q = Cube::new(&[c], s)?;
        let got = luxemburg_average(&f, &q, &YoungFunction::power(p)?);
        let mut sum = 0.0;
        for i in 0..dom.len() {
            if q.contains_point(&dom.point(i)[..1]) {
                sum += f.values()[i].powf(p);
            }
        }
        let want = (sum * dom.cell_measure() / q.measure()).powf(1.0 / p);
        worst = worst.max((got - want).abs() / want);
    }
    Ok((worst <= 1e-8, format!("max rel. error {worst:.2e}")))
}

fn sandwich() -> Result<(bool, String)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for phi in [YoungFunction::power(2.0)?, YoungFunction::power(3.0)?, YoungFunction::plog(2.0, 1.0)?] {
        let dual = phi.complementary()?;
        for t in log_ladder(1e-3, 1e3, 64) {
            let v = phi.inverse(t)? * dual.inverse(t)? / t;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok((lo >= 0.5 && hi <= 2.0 * (1.0 + 1e-12), format!("ratio in [{lo:.6}, {hi:.6}]")))
}

fn dini() -> Result<(bool, String)> {
    let opts = DiniOptions::default();
    let id = YoungFunction::power(1.0)?;
    let c3 = dini_condition_check(&GrowthPair::lebesgue(3.0)?, &id, &opts)?.constant.unwrap_or(f64::NAN);
    let c2 = dini_condition_check(&GrowthPair::lebesgue(2.0)?, &id, &opts)?.constant.unwrap_or(f64::NAN);
    let g = GrowthFunction::power(1.0, 1.0)?;
    let bad = dini_condition_check(&GrowthPair::new(g.clone(), g)?, &YoungFunction::power(2.0)?, &opts)?;
    let target = 2f64.powf(-1.0 / 3.0);
    let pass = (c3 / target - 1.0).abs() <= 0.05 && (c2 - 1.0).abs() <= 0.05 && bad.verdict == DiniVerdict::Fail;
    Ok((pass, format!("C = {c3:.4} (want {target:.4}), {c2:.4} (want 1), divergent case {:?}", bad.verdict)))
}

fn sigma() -> Result<(bool, String)> {
    let a = sufficient_sigma(0.0, 1.0, 1.0, 0.25)?;
    let b = sufficient_sigma(2.0, 1.0, 2.0, 0.4)?;
    let pass = (a - 4.0).abs() < 1e-5 && (b - 10.0).abs() < 1e-5 && sufficient_sigma(0.0, 1.0, 1.0, 0.5).is_err();
    Ok((pass, format!("σ = {a:.6}, {b:.6}")))
}

fn ap_one() -> Result<(bool, String)> {
    let dom = Domain::new(1, 4.0, 64)?;
    let rho = CriticalRadius::inverse_power(1.0)?;
    let family = CubeFamily::new(dom, BoundaryPolicy::Inside);
    let c = ap_rho_constant(&SampledFunction::constant(dom, 1.0), 2.0, 0.0, &rho, &family)?.constant;
    Ok((c == 1.0, format!("constant {c}")))
}

fn hl_brute() -> Result<(bool, String)> {
    let dom = Domain::new(1, 2.0, 16)?;
    let f = SampledFunction::from_fn(dom, |x| (3.0 * x[0]).sin().abs())?;
    let rho = CriticalRadius::inverse_power(1.0)?;
    let family = CubeFamily::new(dom, BoundaryPolicy::ZeroExtend);
    let sigma = 1.5;
    let m = hl_maximal(&f, sigma, &rho, &family)?;
    let mut brute = vec![0.0f64; dom.len()];
    for q in family.members() {
        let inside: Vec<usize> = (0..dom.len()).filter(|&i| q.cube.contains_point(&dom.point(i)[..1])).collect();
        let avg = inside.iter().map(|&i| f.values()[i]).sum::<f64>() * dom.cell_measure() / q.cube.measure();
        let v = (1.0 + q.cube.radius() / rho.eval(q.cube.center())).powf(-sigma) * avg;
        for i in inside {
            brute[i] = brute[i].max(v);
        }
    }
    let worst = brute.iter().zip(m.values()).map(|(b, v)| (b - v).abs() / b.max(1e-300)).fold(0.0, f64::max);
    Ok((worst <= 1e-12, format!("max rel. difference {worst:.2e}")))
}

fn dyadic() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut ok = true;
    for d in 1..=2 {
        let grids = ShiftedDyadicGrids::new(d)?;
        for k in 0..100 {
            let t = k as f64;
            let c: Vec<f64> = (0..d).map(|a| 37.0 * ((t + 1.0) * (a as f64 + 1.3)).sin()).collect();
            let q = Cube::new(&c, 10f64.powf((0.37 * t).sin() * 3.0))?;
            let (_, q0) = find_containing_dyadic(&grids, &q)?;
            let r = q0.side() / q.side();
            worst = worst.max(r);
            ok &= q0.contains_cube(&q, 1e-12) && r <= 3.0 * (1.0 + 1e-12);
        }
    }
    Ok((ok, format!("200 cubes, max side ratio {worst:.4}")))
}
