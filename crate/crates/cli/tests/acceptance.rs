//! Acceptance suite: one pass/fail line per criterion, then a single
//! assertion that all of them passed.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use biframe_core::generators::MatrixGenerator;
use biframe_core::linalg::{penrose_residuals, penrose_scale, pinv, projector, range_basis};
use biframe_core::{ComplexMatrix, ToleranceProfile};
use serde_json::Value;

const GAMMA_TOL: f64 = 1e-12;
const BOUNDS_TOL: f64 = 1e-10;
const WITNESS_OVERLAP: f64 = 0.999;
const WITNESS_FORM_TOL: f64 = 1e-10;
const K_NORM_TOL: f64 = 1e-12;
const IDEMPOTENT_TOL: f64 = 1e-9;
const PENROSE_TOL: f64 = 1e-10;
const SUITE_SECONDS: f64 = 15.0;

const SUITES: [&str; 11] = [
    "t2.1", "t2.2", "t2.3-phi", "t2.3-proj", "t2.4", "p2.1", "p2.2", "l2.1", "t1.3", "p1.4",
    "finite-sr",
];

fn fixture(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    p.to_str().unwrap().to_string()
}

fn biframe(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_biframe"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn biframe_json(args: &[&str]) -> (i32, Value) {
    let (code, text) = biframe(args);
    (code, serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gamma_example() -> Check {
    let (code, v) = biframe_json(&["classify", &fixture("rank-one-rows.json")]);
    let g = num(&v["gamma"]);
    ensure(code == 0 && close(g, 3f64.sqrt(), GAMMA_TOL), format!("gamma = {g}"))
}

fn diag_phase_example() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    for z in ["0", "1", "2.5"] {
        let (code, v) = biframe_json(&[
            "bounds",
            &fixture(&format!("diag-phase-pair-z{z}.json")),
            "--k",
            &fixture("diag-3-1-1.json"),
        ]);
        let (a, b) = (num(&v["alpha_opt"]), num(&v["beta_opt"]));
        ok &= code == 0 && close(a, 1.0 / 9.0, BOUNDS_TOL) && close(b, 1.0, BOUNDS_TOL);
        notes.push(format!("z={z}: ({a:.12}, {b:.12})"));
    }
    ensure(ok, notes.join("; "))
}

fn inner_inverse_example() -> Check {
    let pair = fixture("inner-inverse-pair.json");
    let k = fixture("inner-inverse-k.json");
    let (vcode, v) = biframe_json(&["verify", &pair, "--k", &k, "--alpha", "0.5", "--beta", "2"]);
    let (tcode, t) = biframe_json(&[
        "transform", "--kind", "kl", &pair, "--k", &k, "--l", &fixture("inner-inverse-l.json"),
    ]);
    let (a, b) = (num(&t["report"]["alpha_opt"]), num(&t["report"]["beta_opt"]));
    ensure(
        vcode == 0
            && v["verdict"] == "holds"
            && tcode == 0
            && close(a, 0.5, BOUNDS_TOL)
            && close(b, 1.0, BOUNDS_TOL),
        format!("claimed (1/2, 2): {}; after KL: ({a:.12}, {b:.12})", v["verdict"]),
    )
}

fn cancelling_pair_example() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    for r in [3, 6] {
        let kfile = fixture(&format!("cancelling-k-r{r}.json"));
        let (code, v) = biframe_json(&["bounds", &fixture(&format!("cancelling-pair-r{r}.json")), "--k", &kfile]);
        let w = &v["witness"];
        let overlap = num(&w["vector"][0][0]).hypot(num(&w["vector"][0][1]));
        let form = num(&w["form_value"]);
        let wk = num(&w["k_norm_sq"]);
        // ||K^H e1||^2 read straight off the K file
        let kv: Value = serde_json::from_str(&std::fs::read_to_string(&kfile).unwrap()).unwrap();
        let ke1: f64 = kv["data"][0]
            .as_array()
            .unwrap()
            .iter()
            .map(|z| num(&z[0]).powi(2) + num(&z[1]).powi(2))
            .sum();
        ok &= code == 1
            && overlap > WITNESS_OVERLAP
            && form <= WITNESS_FORM_TOL
            && close(ke1, 2.0, K_NORM_TOL)
            && close(wk, 2.0, K_NORM_TOL);
        notes.push(format!(
            "r={r}: exit {code}, |<w,e1>| = {overlap:.15}, form = {form:.1e}, ||K^H w||^2 = {wk}"
        ));
    }
    ensure(ok, notes.join("; "))
}

fn intro_pair_example() -> Check {
    let pair = fixture("intro-pair.json");
    let (bcode, b) = biframe_json(&["bounds", &pair]);
    let (lo, hi) = (num(&b["alpha_opt"]), num(&b["beta_opt"]));
    let s = 2f64.sqrt();
    let (vcode, v) = biframe_json(&["verify", &pair, "--alpha", "0.5", "--beta", "3"]);
    let margin = num(&v["margin"]);
    ensure(
        bcode == 0
            && close(lo, 2.0 - s, BOUNDS_TOL)
            && close(hi, 2.0 + s, BOUNDS_TOL)
            && vcode == 1
            && v["side"] == "upper"
            && close(margin, 2.0 + s - 3.0, BOUNDS_TOL),
        format!(
            "bounds ({lo:.12}, {hi:.12}); claimed beta = 3 violated on the {} side by {margin:.12}",
            v["side"]
        ),
    )
}

fn truncated_shift_example() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    let k = fixture("lower-shift-16.json");
    for a in ["0", "1"] {
        let pair = fixture(&format!("shift-pair-16-a{a}.json"));
        let (code, v) = biframe_json(&["bounds", &pair, "--k", &k]);
        let (lo, hi) = (num(&v["alpha_opt"]), num(&v["beta_opt"]));
        let claimed = format!("{}", 0.5f64.sqrt());
        let (vcode, verdict) = biframe_json(&["verify", &pair, "--k", &k, "--alpha", &claimed, "--beta", "1"]);
        ok &= code == 0 && close(lo, 1.0, BOUNDS_TOL) && close(hi, 1.0, BOUNDS_TOL) && vcode == 0;
        notes.push(format!("a={a}: ({lo:.12}, {hi:.12}), claimed (1/sqrt2, 1): {}", verdict["verdict"]));
    }
    ensure(ok, notes.join("; "))
}

fn truncated_ep_example() -> Check {
    let (code, v) = biframe_json(&["classify", &fixture("ep-truncated-8.json")]);
    ensure(code == 0 && v["ep"] == true, format!("ep = {}", v["ep"]))
}

fn idempotent_identity() -> Check {
    let tol = ToleranceProfile::default();
    let mut worst: f64 = 0.0;
    for s in 0..100u64 {
        let mut g = MatrixGenerator::new(1000 + s);
        let n = g.index(3, 8);
        let r = g.index(1, n);
        let t = g.idempotent(n, r).map_err(|e| e.to_string())?;
        let p = pinv(&t, &tol).map_err(|e| e.to_string())?;
        let pr_adj = projector(&range_basis(&t.adjoint(), &tol).map_err(|e| e.to_string())?);
        let pr = projector(&range_basis(&t, &tol).map_err(|e| e.to_string())?);
        worst = worst.max(p.distance(&(&pr_adj * &pr)));
    }
    ensure(worst <= IDEMPOTENT_TOL, format!("max ||T^+ - P P|| = {worst:.2e} over 100 idempotents"))
}

fn theorem_suites() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    for dim in ["6", "12"] {
        for id in SUITES {
            let start = Instant::now();
            let (code, v) = biframe_json(&[
                "check-theorems", "--theorem", id, "--trials", "200", "--dim", dim, "--seed", "2024", "--parallel",
            ]);
            let secs = start.elapsed().as_secs_f64();
            let fails = v["failures"].as_array().map_or(usize::MAX, |f| f.len());
            let suite_ok = code == 0 && fails == 0 && secs < SUITE_SECONDS;
            ok &= suite_ok;
            if !suite_ok {
                notes.push(format!("{id}@{dim}: {fails} failures, {secs:.1}s"));
            } else {
                notes.push(format!("{id}@{dim} {secs:.1}s"));
            }
        }
    }
    ensure(ok, notes.join(", "))
}

fn penrose_property() -> Check {
    let tol = ToleranceProfile::default();
    let mut worst: f64 = 0.0;
    for s in 0..500u64 {
        let mut g = MatrixGenerator::new(50_000 + s);
        let (m, n) = if s % 2 == 0 {
            let n = g.index(1, 8);
            (n, n)
        } else {
            (g.index(1, 8), g.index(1, 8))
        };
        let r = g.index(0, m.min(n));
        let a: ComplexMatrix = g.with_rank(m, n, r).map_err(|e| e.to_string())?;
        let x = pinv(&a, &tol).map_err(|e| e.to_string())?;
        let scale = penrose_scale(&a, &x);
        for res in penrose_residuals(&a, &x) {
            worst = worst.max(res / scale);
        }
    }
    ensure(worst <= PENROSE_TOL, format!("max residual / scale = {worst:.2e} over 500 matrices"))
}

fn strip_elapsed(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap_or(Value::Null);
    if let Some(obj) = v.as_object_mut() {
        obj.remove("elapsed_ms");
    }
    v
}

fn determinism() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for id in ["t2.1", "t2.4", "finite-sr"] {
        let base = ["check-theorems", "--theorem", id, "--trials", "40", "--dim", "6", "--seed", "99"];
        let runs: Vec<String> = (0..4)
            .map(|i| {
                let mut args = base.to_vec();
                if i >= 2 {
                    args.push("--parallel");
                }
                biframe(&args).1
            })
            .collect();
        let failures: Vec<String> = runs
            .iter()
            .map(|t| strip_elapsed(t)["failures"].to_string())
            .collect();
        let reports: Vec<Value> = runs.iter().map(|t| strip_elapsed(t)).collect();
        let same = failures.windows(2).all(|w| w[0] == w[1]) && reports.windows(2).all(|w| w[0] == w[1]);
        ok &= same && reports[0] != Value::Null;
        notes.push(format!("{id}: {}", if same { "identical" } else { "differs" }));
    }
    ensure(ok, notes.join(", "))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<Criterion> = vec![
        ("reduced minimum modulus of the rank-one rows operator", gamma_example),
        ("diagonal phase pair against diag(3,1,1)", diag_phase_example),
        ("inner-inverse transform example", inner_inverse_example),
        ("cancelling pair is not a K-biframe", cancelling_pair_example),
        ("introductory pair bounds and the claimed beta = 3", intro_pair_example),
        ("truncated shift pair", truncated_shift_example),
        ("truncated EP operator", truncated_ep_example),
        ("idempotent pseudoinverse identity", idempotent_identity),
        ("theorem suites at dims 6 and 12", theorem_suites),
        ("Penrose residuals", penrose_property),
        ("check-theorems determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
