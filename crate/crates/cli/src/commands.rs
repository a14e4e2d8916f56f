use std::fmt::Write as _;

use rho_maximal::dini::{dini_condition_check, DiniVerdict};
use rho_maximal::domain::{BoundaryPolicy, CubeFamily, Domain};
use rho_maximal::harness::{fmt17, run_experiment, Experiment, Verdict};
use rho_maximal::maximal::{OperatorKind, OperatorSpec};
use rho_maximal::radius::{critical_covering, overlap_profile};
use rho_maximal::weights::{a1_rho_constant, ap_rho_constant, stability};
use rho_maximal::young::GrowthPair;
use serde_json::json;

use crate::{load_config, write_output, Common, Failure, Outcome};

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn missing(name: &str) -> Failure {
    Failure::Usage(format!("config field `{name}` is required for this command"))
}

pub fn experiment(common: &Common, name: &str) -> Outcome {
    let cfg = load_config(common)?;
    let exp = Experiment::from_name(name).expect("known experiment");
    let report = run_experiment(exp, &cfg)?;
    write_output(&common.output, &format!("{name}.json"), &(report.to_json() + "\n"))?;
    write_output(&common.output, &format!("{name}.csv"), &report.to_csv())?;
    let levels: Vec<String> = report.levels.iter().map(|l| format!("N={}: {:.6}", l.n, l.sup_ratio)).collect();
    println!("{name}: {} (sup ratio {}; drift {:.4})", report.verdict.as_str(), levels.join(", "), report.drift);
    for note in &report.notes {
        println!("  note: {note}");
    }
    Ok(report.verdict != Verdict::Fail)
}

pub fn dini_check(common: &Common) -> Outcome {
    let cfg = load_config(common)?;
    let a = cfg.a.as_ref().ok_or_else(|| missing("a"))?.build()?;
    let b = cfg.b.as_ref().ok_or_else(|| missing("b"))?.build()?;
    let eta = cfg.eta.as_ref().ok_or_else(|| missing("eta"))?.build()?;
    let report = dini_condition_check(&GrowthPair::new(a, b)?, &eta, &cfg.dini)?;
    write_output(&common.output, "dini_check.json", &pretty(&report))?;
    match report.constant {
        Some(c) => println!("dini-check: {:?}, C = {c:.6}", report.verdict),
        None => println!("dini-check: {:?}, no constant in [{}, {}]", report.verdict, report.c_min, report.c_max),
    }
    Ok(report.verdict == DiniVerdict::Pass)
}

pub fn maximal_eval(common: &Common) -> Outcome {
    let cfg = load_config(common)?;
    let dom: Domain = cfg.domain.build()?;
    let rho = cfg.rho.build()?;
    let family = CubeFamily::new(dom, cfg.policy);
    let op = cfg.operator.clone().unwrap_or_else(|| OperatorSpec {
        kind: if cfg.eta.is_some() { OperatorKind::Orlicz } else { OperatorKind::Hl },
        sigma: cfg.sigma.unwrap_or(0.0),
        eta: cfg.eta.clone(),
        region: None,
        radii: None,
    });
    let d = dom.dim();
    let mut csv = String::from("function,index");
    for a in 0..d {
        let _ = write!(csv, ",x{}", a + 1);
    }
    csv.push_str(",f,value\n");
    let mut summary = Vec::new();
    for (i, spec) in cfg.battery().iter().enumerate() {
        let f = spec.build(dom)?;
        let m = op.evaluate(&f, &rho, &family)?;
        for (k, (fv, mv)) in f.values().iter().zip(m.values()).enumerate() {
            let x = dom.point(k);
            let _ = write!(csv, "f{i},{k}");
            for c in &x[..d] {
                let _ = write!(csv, ",{}", fmt17(*c));
            }
            let _ = writeln!(csv, ",{},{}", fmt17(*fv), fmt17(*mv));
        }
        let max = m.values().iter().copied().fold(0.0, f64::max);
        let mean = m.values().iter().sum::<f64>() / m.values().len() as f64;
        summary.push(json!({"function": format!("f{i}"), "spec": spec, "max": max, "mean": mean}));
    }
    let report = json!({"operator": op, "domain": cfg.domain, "functions": summary});
    write_output(&common.output, "maximal_eval.json", &pretty(&report))?;
    write_output(&common.output, "maximal_eval.csv", &csv)?;
    println!("maximal-eval: {} functions on {} points", summary.len(), dom.len());
    Ok(true)
}

pub fn weights_estimate(common: &Common) -> Outcome {
    let cfg = load_config(common)?;
    let dom = cfg.domain.build()?;
    let rho = cfg.rho.build()?;
    let p = cfg.p.unwrap_or(1.0);
    let theta = cfg.theta;
    let constant = |spec: &rho_maximal::weights::WeightSpec, d: &Domain| {
        let w = spec.build(*d)?;
        let family = CubeFamily::new(*d, BoundaryPolicy::Inside);
        if p > 1.0 {
            ap_rho_constant(&w, p, theta, &rho, &family)
        } else {
            a1_rho_constant(&w, theta, &rho, &family)
        }
    };
    let mut rows = Vec::new();
    let mut csv = String::from("weight,p,theta,constant,refined,widened,finite\n");
    let mut all_finite = true;
    for (j, spec) in cfg.weights.iter().enumerate() {
        let report = constant(spec, &dom)?;
        let stab = stability(&dom, &cfg.finiteness, |d| Ok(constant(spec, d)?.constant))?;
        all_finite &= stab.finite;
        let _ = writeln!(
            csv,
            "w{j},{},{},{},{},{},{}",
            fmt17(p),
            fmt17(theta),
            fmt17(report.constant),
            fmt17(stab.refined),
            fmt17(stab.widened),
            stab.finite
        );
        println!(
            "weights-estimate: w{j} constant {:.6} (refined {:.6}, widened {:.6}) {}",
            report.constant,
            stab.refined,
            stab.widened,
            if stab.finite { "finite" } else { "not finite" }
        );
        rows.push(json!({"weight": spec, "report": report, "stability": stab}));
    }
    write_output(&common.output, "weights_estimate.json", &pretty(&json!({"p": p, "theta": theta, "weights": rows})))?;
    write_output(&common.output, "weights_estimate.csv", &csv)?;
    Ok(all_finite)
}

pub fn covering(common: &Common) -> Outcome {
    let cfg = load_config(common)?;
    let dom = cfg.domain.build()?;
    let rho = cfg.rho.build()?;
    let cov = critical_covering(&rho, &dom);
    let profile = overlap_profile(&cov, &cfg.sigma_rule.dilations)?;
    let covers = cov.covers_all();
    let d = dom.dim();
    let mut csv = String::from("cube");
    for a in 0..d {
        let _ = write!(csv, ",x{}", a + 1);
    }
    csv.push_str(",radius\n");
    for (j, (&c, &r)) in cov.centers.iter().zip(&cov.radii).enumerate() {
        let _ = write!(csv, "{j}");
        for x in &dom.point(c)[..d] {
            let _ = write!(csv, ",{}", fmt17(*x));
        }
        let _ = writeln!(csv, ",{}", fmt17(r));
    }
    let report = json!({"cubes": cov.len(), "covers_all": covers, "overlap": profile});
    write_output(&common.output, "covering.json", &pretty(&report))?;
    write_output(&common.output, "covering.csv", &csv)?;
    println!(
        "covering: {} cubes, covers all points: {covers}, overlap counts {:?}, N1 = {:.4}",
        cov.len(),
        profile.counts,
        profile.n1
    );
    Ok(covers)
}

/// At most this many grid points enter the pairwise check.
const RHO_SAMPLE: usize = 512;

pub fn validate_rho(common: &Common) -> Outcome {
    let cfg = load_config(common)?;
    let dom = cfg.domain.build()?;
    let rho = cfg.rho.build()?;
    let stride = dom.len().div_ceil(RHO_SAMPLE);
    let points: Vec<Vec<f64>> = (0..dom.len()).step_by(stride).map(|i| dom.point(i)[..dom.dim()].to_vec()).collect();
    let v = rho.validate(&points)?;
    let report = json!({"rho": cfg.rho, "c0": rho.c0(), "n0": rho.n0(), "points": points.len(), "validation": v});
    write_output(&common.output, "validate_rho.json", &pretty(&report))?;
    println!(
        "validate-rho: {} (slack {:.6}, {} pairs, C0 = {}, N0 = {})",
        if v.ok { "ok" } else { "violated" },
        v.slack,
        v.pairs_checked,
        rho.c0(),
        rho.n0()
    );
    Ok(v.ok)
}
