//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gkp::{oracle_check_parallel, simulate_parallel};
use gkp_core::error_model::{p_no_error, shift_distribution, ShiftAmplitude, DEFAULT_RESOLUTION};
use gkp_core::montecarlo::{lower_bound_from, RunConfig};
use gkp_core::oracle::{OracleConfig, ShiftSampling};
use gkp_core::shift::Quadrature;
use gkp_core::states::{mean_photons_crude, mean_photons_exact, misid_probability_exact};
use gkp_core::{LogicalLabel, StateParams, CORRECTABLE_SHIFT, SQRT_PI};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, elapsed: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, format!("{what} took {elapsed:.2?}, limit {limit:?}"))
}

fn sym(d: f64) -> StateParams {
    StateParams::symmetric(d).expect("valid width")
}

/// Runs the CLI binary and returns its JSON outputs with the wall time.
fn cli(args: &[&str]) -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gkp")).args(args).output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()));
    }
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok((v["outputs"].clone(), elapsed))
}

fn num(v: &Value, key: &str) -> Result<f64, String> {
    v[key].as_f64().ok_or_else(|| format!("missing number {key}"))
}

fn misid_anchors() -> Outcome {
    let mut parts = Vec::new();
    for (d, lo, hi) in [("0.5", 0.005, 0.02), ("0.25", 2e-7, 5e-6)] {
        let (out, t) = cli(&["misid", "--delta", d])?;
        let exact = num(&out, "exact")?;
        check((lo..=hi).contains(&exact), format!("Δ={d}: {exact:e} outside [{lo:e}, {hi:e}]"))?;
        within(Duration::from_secs(1), t, &format!("misid Δ={d}"))?;
        parts.push(format!("Δ={d}: {exact:.4e} in {t:.2?}"));
    }
    Ok(parts.join("; "))
}

fn quality_inversion() -> Outcome {
    let mut parts = Vec::new();
    for (target, want) in [("0.9", 0.214), ("0.99", 0.149)] {
        let (out, t) = cli(&["find-delta", "--target", target])?;
        let delta = num(&out, "delta")?;
        check((delta - want).abs() <= 0.003, format!("target {target}: Δ={delta}, want {want} ± 0.003"))?;
        within(Duration::from_secs(30), t, &format!("find-delta {target}"))?;
        parts.push(format!("{target} → {delta:.5} in {t:.2?}"));
    }
    Ok(parts.join("; "))
}

fn photon_budget() -> Outcome {
    let mut parts = Vec::new();
    for (target, want, tol) in [("0.9", 10.4, 0.3), ("0.99", 22.1, 0.6)] {
        let (out, _) = cli(&["find-delta", "--target", target])?;
        let delta = num(&out, "delta")?;
        let n = mean_photons_exact(sym(delta), LogicalLabel::Zero).map_err(|e| e.to_string())?;
        check((n - want).abs() <= tol, format!("Δ={delta}: ⟨n⟩={n}, want {want} ± {tol}"))?;
        parts.push(format!("Δ={delta:.4}: ⟨n⟩={n:.3}"));
    }
    for (d, k) in [(0.214, 0.214), (0.149, 0.149), (0.2, 0.35), (0.5, 0.1)] {
        let p = StateParams::new(d, k).map_err(|e| e.to_string())?;
        let crude = mean_photons_crude(p);
        let formula = 1.0 / (4.0 * d * d) + 1.0 / (4.0 * k * k);
        check(crude == formula, format!("crude({d}, {k}) = {crude}, formula {formula}"))?;
    }
    parts.push("crude formula exact".into());
    Ok(parts.join("; "))
}

fn threshold_tightness() -> Outcome {
    let (inside, t_in) = cli(&["verify-bound", "--t-over-threshold", "0.999", "--rounds", "50"])?;
    check(inside["safe"] == true, "0.999·threshold reported unsafe")?;
    let (outside, t_out) = cli(&["verify-bound", "--t-over-threshold", "1.02", "--rounds", "50"])?;
    check(outside["safe"] == false, "1.02·threshold reported safe")?;
    let witness = &outside["witness"];
    check(witness.is_object(), "no witness for 1.02·threshold")?;
    let sum = num(witness, "failing_sum")?;
    check(sum.abs() >= 0.5 * SQRT_PI, format!("witness sum {sum} does not cross √π/2"))?;
    within(Duration::from_secs(10), t_in, "verify-bound 0.999")?;
    within(Duration::from_secs(10), t_out, "verify-bound 1.02")?;
    Ok(format!(
        "0.999 safe in {t_in:.2?}; 1.02 unsafe in {t_out:.2?}, round {} {} sum {sum:.4}",
        witness["failing_round"], witness["failing_quadrature"]
    ))
}

fn completeness() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [0.15, 0.25, 0.5] {
        for label in [LogicalLabel::Zero, LogicalLabel::One] {
            let dist =
                shift_distribution(sym(d), label, DEFAULT_RESOLUTION, DEFAULT_RESOLUTION).map_err(|e| e.to_string())?;
            let err = (dist.total_mass() - 1.0).abs();
            check(err <= 1e-6, format!("Δ={d} {label:?}: mass {}", dist.total_mass()))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("max |mass - 1| = {worst:.2e}"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let config = OracleConfig::new(sym(0.25), 1024).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (quadrature, seed) in [(Quadrature::X, 1), (Quadrature::P, 2)] {
        let report = oracle_check_parallel(&config, quadrature, ShiftSampling::SuccessBranch, 28, seed)
            .map_err(|e| e.to_string())?;
        let ratio = report.max_corrected_error / report.dx;
        check(report.compared >= 20, format!("{quadrature:?}: only {} off-boundary trials", report.compared))?;
        check(ratio < 3.0, format!("{quadrature:?}: residual error {ratio:.2} dx"))?;
        check(
            report.flip_agreements == report.compared,
            format!("{quadrature:?}: flips agree on {}/{}", report.flip_agreements, report.compared),
        )?;
        parts.push(format!(
            "{quadrature:?} {} trials, max error {ratio:.3} dx, flips {}/{}",
            report.compared, report.flip_agreements, report.compared
        ));
    }
    within(Duration::from_secs(300), start.elapsed(), "oracle comparison")?;
    parts.push(format!("{:.1?}", start.elapsed()));
    Ok(parts.join("; "))
}

fn monte_carlo() -> Outcome {
    let params = sym(0.214);
    let dist0 = shift_distribution(params, LogicalLabel::Zero, DEFAULT_RESOLUTION, DEFAULT_RESOLUTION / 2)
        .map_err(|e| e.to_string())?;
    let dist_plus = dist0.transposed();
    let config = RunConfig::new(params, 1, 10_000, gkp::cli::DEFAULT_SEED).map_err(|e| e.to_string())?;
    let first = simulate_parallel(config, &dist0, &dist_plus).map_err(|e| e.to_string())?;
    let again = simulate_parallel(config, &dist0, &dist_plus).map_err(|e| e.to_string())?;
    let bits = |s: &gkp_core::RunStats| serde_json::to_string(s).expect("serializable");
    check(first == again && bits(&first) == bits(&again), "rerun differs")?;

    let n = first.trials as f64;
    let no_flip = 1.0 - first.any_flip_trials as f64 / n;
    let bound = 0.9f64.powi(3);
    let sigma = (bound * (1.0 - bound) / n).sqrt();
    check(no_flip >= bound - 4.0 * sigma, format!("no-flip rate {no_flip} < {bound} - 4·{sigma:.4}"))?;
    let own = lower_bound_from(
        p_no_error(params, LogicalLabel::Zero, CORRECTABLE_SHIFT).map_err(|e| e.to_string())?,
        config.states_consumed(),
    );
    Ok(format!(
        "no-flip {no_flip:.4} ≥ {:.4} (0.9³ - 4σ); bound at Δ itself {own:.4}; rerun identical",
        bound - 4.0 * sigma
    ))
}

fn symmetry_and_monotonicity() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [0.15, 0.2, 0.25, 0.3, 0.5] {
        let amp = ShiftAmplitude::new(sym(d), LogicalLabel::Zero);
        for i in 0..64 {
            for j in 0..32 {
                let u = -SQRT_PI + (i as f64 + 0.5) * 2.0 * SQRT_PI / 64.0;
                let v = -0.5 * SQRT_PI + (j as f64 + 0.5) * SQRT_PI / 32.0;
                let p = amp.density(u, v);
                worst = worst.max((amp.density(-u, v) - p).abs()).max((amp.density(u, -v) - p).abs());
            }
        }
    }
    check(worst < 1e-8, format!("P(u,v) asymmetry {worst:e}"))?;

    let mut prev = f64::INFINITY;
    for i in 0..=40 {
        let d = 0.1 + 0.01 * i as f64;
        let p = p_no_error(sym(d), LogicalLabel::Zero, CORRECTABLE_SHIFT).map_err(|e| e.to_string())?;
        check(p < prev, format!("p_no_error not decreasing at Δ={d}: {p} ≥ {prev}"))?;
        prev = p;
    }

    for k in [None, Some(0.3)] {
        let mut prev = 0.0;
        for i in 0..=8 {
            let d = 0.1 + 0.05 * i as f64;
            let params = StateParams::new(d, k.unwrap_or(d)).map_err(|e| e.to_string())?;
            let m = misid_probability_exact(params, LogicalLabel::Zero).map_err(|e| e.to_string())?;
            check(m > prev, format!("misid not increasing at Δ={d}, k={k:?}: {m} ≤ {prev}"))?;
            prev = m;
        }
    }
    Ok(format!("asymmetry {worst:.1e}; p_no_error decreasing on 41 widths; misid increasing on 9 widths"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("misidentification anchors", misid_anchors),
        ("quality inversion", quality_inversion),
        ("photon budget", photon_budget),
        ("threshold tightness", threshold_tightness),
        ("basis completeness", completeness),
        ("oracle equivalence", oracle_equivalence),
        ("Monte Carlo consistency", monte_carlo),
        ("symmetry and monotonicity", symmetry_and_monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("AC{} PASS {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("AC{} FAIL {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
