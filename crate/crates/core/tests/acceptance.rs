//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::fs;
use std::io::Write;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use harper_phase::fidelity::fidelity;
use harper_phase::model::{Boundary, FibonacciApproximant, ModelPoint};
use harper_phase::scaling::{scaling_report, ScalingOptions, ScalingResult, SizeGroup, Transition};
use harper_phase::scan::{boundary_locate, Fixed};
use harper_phase::spectrum::{ground_state, solve};
use harper_phase::verify::{
    anchor_labels, entropy_limit_deviations, fs_oracle_deviation, gauge_deviation,
    noncritical_points, zero_bond_violations, ANCHORS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// 1
const FS_POINTS: usize = 20;
const FS_M: u32 = 9;
const FS_DQ: f64 = 1e-4;
const FS_REL_TOL: f64 = 0.01;
const FS_RUNTIME: Duration = Duration::from_secs(60);
// 2
const MMT_SIZES: [u32; 6] = [9, 10, 12, 13, 15, 16];
const OTHER_ALPHA: (f64, f64) = (1.7, 2.3);
const OTHER_BETA: (f64, f64) = (-2.4, -1.6);
const OTHER_NU: (f64, f64) = (0.85, 1.15);
const RESIDUE_ALPHA: f64 = 4.9371;
const RESIDUE_BETA: f64 = -1.5022;
const RESIDUE_NU: f64 = 2.4718;
const ALPHA_NU_REL: f64 = 0.15;
const BETA_REL: f64 = 0.20;
// 3
const MIT_SIZES: [u32; 7] = [9, 10, 11, 12, 13, 14, 15];
const RATIO: (f64, f64) = (1.8, 2.2);
// 4, 5
const SWEEP_M: u32 = 15;
const SWEEP_STEP: f64 = 0.01;
const HARPER_TOL: f64 = 0.02;
const MMT_LINE_TOL: f64 = 0.02;
const III_II_TOL: f64 = 0.03;
// 7
const UNIFORM_TOL: f64 = 1e-12;
const RING_TOL: f64 = 1e-6;
// 9
const IDENTITY_TOL: f64 = 1e-12;
const GAUGE_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

fn rel_band(target: f64, rel: f64) -> (f64, f64) {
    let a = target * (1.0 - rel);
    let b = target * (1.0 + rel);
    (a.min(b), a.max(b))
}

fn point(lambda: f64, mu: f64, m: u32) -> ModelPoint {
    ModelPoint::new(lambda, mu, FibonacciApproximant::new(m).unwrap()).unwrap()
}

fn fs_oracle() -> Outcome {
    let start = Instant::now();
    let (dev, detail) = fs_oracle_deviation(2024, FS_M, FS_POINTS, FS_DQ).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        pass: dev <= FS_REL_TOL && elapsed < FS_RUNTIME,
        detail: format!(
            "max relative deviation {dev:.3e} (tol {FS_REL_TOL}), {detail}, {:.1} s (limit {} s)",
            elapsed.as_secs_f64(),
            FS_RUNTIME.as_secs()
        ),
    }
}

fn group(results: &[ScalingResult], g: SizeGroup) -> &ScalingResult {
    results.iter().find(|r| r.group == g).expect("group fitted")
}

fn describe(r: &ScalingResult) -> String {
    let sizes: Vec<String> = r.rows.iter().map(|row| row.size.to_string()).collect();
    format!(
        "{} N={{{}}}: alpha={:.4} beta={:.4} nu={:.2}",
        r.group.name(),
        sizes.join(","),
        r.alpha,
        r.beta,
        r.nu
    )
}

fn mmt_exponents(mmt: &[ScalingResult]) -> Outcome {
    let other = group(mmt, SizeGroup::Other);
    let residue = group(mmt, SizeGroup::ResidueOne);
    let checks = [
        ("alpha", other.alpha, OTHER_ALPHA),
        ("beta", other.beta, OTHER_BETA),
        ("nu", other.nu, OTHER_NU),
        ("alpha'", residue.alpha, rel_band(RESIDUE_ALPHA, ALPHA_NU_REL)),
        ("beta'", residue.beta, rel_band(RESIDUE_BETA, BETA_REL)),
        ("nu'", residue.nu, rel_band(RESIDUE_NU, ALPHA_NU_REL)),
    ];
    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, x, band)| !within(*x, *band))
        .map(|(n, x, band)| format!("{n}={x:.4} outside [{:.4}, {:.4}]", band.0, band.1))
        .collect();
    Outcome {
        pass: failed.is_empty(),
        detail: format!(
            "{}; {}{}",
            describe(other),
            describe(residue),
            if failed.is_empty() { String::new() } else { format!("; {}", failed.join(", ")) }
        ),
    }
}

fn universal_ratio(mmt: &[ScalingResult]) -> Outcome {
    let options = ScalingOptions::default();
    let mit = scaling_report(Transition::MetalInsulatorI, &MIT_SIZES, &options).unwrap();
    let all: Vec<(&str, f64)> = [
        ("mmt m!=3l+1", group(mmt, SizeGroup::Other).alpha_over_nu()),
        ("mmt m=3l+1", group(mmt, SizeGroup::ResidueOne).alpha_over_nu()),
        ("mit (2,0.5)", group(&mit, SizeGroup::All).alpha_over_nu()),
    ]
    .into();
    Outcome {
        pass: all.iter().all(|(_, r)| within(*r, RATIO)),
        detail: format!(
            "alpha/nu {} in [{}, {}]; mit alpha={:.4} nu={:.2}",
            all.iter().map(|(n, r)| format!("{n}: {r:.4}")).collect::<Vec<_>>().join(", "),
            RATIO.0,
            RATIO.1,
            group(&mit, SizeGroup::All).alpha,
            group(&mit, SizeGroup::All).nu,
        ),
    }
}

fn locate(fix: Fixed, window: (f64, f64)) -> f64 {
    boundary_locate(fix, window, SWEEP_STEP, SWEEP_M, 0.0, Boundary::Open)
        .unwrap()
        .location
}

fn harper_boundary() -> Outcome {
    let at = locate(Fixed::Mu(0.0), (1.5, 2.5));
    Outcome {
        pass: (at - 2.0).abs() <= HARPER_TOL,
        detail: format!("mu=0 sweep lambda in [1.5, 2.5]: {at:.2} (2.00 ± {HARPER_TOL})"),
    }
}

fn triangulation() -> Outcome {
    let a = locate(Fixed::Lambda(1.0), (0.5, 1.5));
    let b = locate(Fixed::Lambda(3.0), (1.0, 2.0));
    Outcome {
        pass: (a - 1.0).abs() <= MMT_LINE_TOL && (b - 1.5).abs() <= III_II_TOL,
        detail: format!(
            "lambda=1: mu={a:.2} (1.00 ± {MMT_LINE_TOL}); lambda=3: mu={b:.2} (1.50 ± {III_II_TOL})"
        ),
    }
}

fn anchors() -> Outcome {
    let labels = anchor_labels(SWEEP_M).unwrap();
    let mut wrong = Vec::new();
    let mut all = Vec::new();
    for (((l, m), e, got), (_, want)) in labels.iter().zip(ANCHORS.iter()) {
        all.push(format!("({l},{m})->{got}"));
        if got != want {
            wrong.push(format!("({l},{m}) <E_v>={e:.3} got {got} want {want}"));
        }
    }
    Outcome {
        pass: wrong.is_empty(),
        detail: if wrong.is_empty() { all.join(" ") } else { wrong.join("; ") },
    }
}

fn entropy_limits() -> Outcome {
    let (delta, uniform, ring) = entropy_limit_deviations(SWEEP_M).unwrap();
    Outcome {
        pass: delta == 0.0 && uniform <= UNIFORM_TOL && ring <= RING_TOL,
        detail: format!(
            "delta {delta:e} (exact 0), uniform {uniform:.1e} (tol {UNIFORM_TOL:e}), \
             free ring N=987 {ring:.1e} (tol {RING_TOL:e})"
        ),
    }
}

fn zero_bond() -> Outcome {
    let bad = zero_bond_violations().unwrap();
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "m in [2, 17], mu in {0.5, 1, 1.5}: broken bond only at mu=1, m=3l+1, site (N-1)/2".into()
        } else {
            bad.join("; ")
        },
    }
}

fn fidelity_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts = noncritical_points(&mut rng, 6);
    let mut identity = 0.0f64;
    let mut asymmetric = 0;
    let mut gauge = 0.0f64;
    for (i, w) in pts.windows(2).enumerate() {
        let a = point(w[0].0, w[0].1, FS_M);
        let b = point(w[1].0, w[1].1, FS_M);
        let ga = ground_state(&solve(&a).unwrap()).unwrap();
        let gb = ground_state(&solve(&b).unwrap()).unwrap();
        identity = identity.max((fidelity(&ga, &ga).unwrap() - 1.0).abs());
        if fidelity(&ga, &gb).unwrap().to_bits() != fidelity(&gb, &ga).unwrap().to_bits() {
            asymmetric += 1;
        }
        gauge = gauge.max(gauge_deviation(&a, i as u64).unwrap());
    }
    Outcome {
        pass: identity <= IDENTITY_TOL && asymmetric == 0 && gauge <= GAUGE_TOL,
        detail: format!(
            "|F(p,p)-1| {identity:.1e} (tol {IDENTITY_TOL:e}), asymmetric pairs {asymmetric}, \
             gauge {gauge:.1e} (tol {GAUGE_TOL:e})"
        ),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("map.conf");
    fs::write(&cfg, "m = 12\ngrid = 21x11\nref = 1.0, 0.5\n").unwrap();
    let mut outputs = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "4")] {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_harper-phase"))
            .args(["fidelity-map", "--config", cfg.to_str().unwrap(), "--threads", threads])
            .args(["--out", path.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&path).unwrap());
    }
    Outcome {
        pass: outputs[0] == outputs[1] && !outputs[0].is_empty(),
        detail: format!("two runs, {} bytes each, byte-identical: {}", outputs[0].len(), outputs[0] == outputs[1]),
    }
}

fn report(index: usize, name: &str, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = run();
    println!(
        "{} criterion {index:>2} {name}: {} [{:.1} s]",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.detail,
        start.elapsed().as_secs_f64()
    );
    std::io::stdout().flush().unwrap();
    outcome.pass
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results = Vec::new();
    results.push(report(1, "fs oracle equivalence", fs_oracle));
    let mut mmt = Vec::new();
    results.push(report(2, "mmt exponents", || {
        mmt = scaling_report(Transition::MetalMetal, &MMT_SIZES, &ScalingOptions::default()).unwrap();
        mmt_exponents(&mmt)
    }));
    results.push(report(3, "universal ratio", || universal_ratio(&mmt)));
    results.push(report(4, "harper-limit boundary", harper_boundary));
    results.push(report(5, "boundary triangulation", triangulation));
    results.push(report(6, "anchor classification", anchors));
    results.push(report(7, "entropy limits", entropy_limits));
    results.push(report(8, "zero-bond law", zero_bond));
    results.push(report(9, "fidelity identity and symmetry", fidelity_identities));
    results.push(report(10, "determinism", determinism));
    let passed = results.iter().filter(|&&p| p).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.0} s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
