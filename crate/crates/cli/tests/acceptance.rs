//! Acceptance criteria. Each runs under a pinned time limit and prints one
//! PASS/FAIL line; the process fails if any criterion does. Pass criterion
//! numbers as arguments to run a subset.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use qlf_cli::commands::report_code;
use qlf_core::fieldtower::{FieldTower, TowerElement};
use qlf_core::forms::{quasi_pfister, QuasilinearForm};
use qlf_core::laws::{
    check_law, gen_anisotropic_form, random_element, random_poly, run_law, summarize, trial_rng, GenConfig,
    Instance, InstanceRecord, LawId, LawReport, SuiteConfig, TrialRecord, Verdict,
};
use qlf_core::polyring::PrimeModulus;
use qlf_core::splitting::{splitting_tower, TowerCaps};
use qlf_core::text::{parse_element, parse_form};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

const fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        name: "quasi-Pfister patterns",
        limit: Duration::from_secs(20),
        run: quasi_pfister_patterns,
    },
    Criterion {
        id: 2,
        name: "defect index vs brute force",
        limit: minutes(1),
        run: defect_index_brute_force,
    },
    Criterion {
        id: 3,
        name: "MULT_INDEX_CONSISTENCY",
        limit: minutes(5),
        run: mult_index_consistency,
    },
    Criterion {
        id: 4,
        name: "law suite at p = 2",
        limit: minutes(30),
        run: law_suite,
    },
    Criterion {
        id: 5,
        name: "FIRST_COMPARISON",
        limit: minutes(15),
        run: first_comparison,
    },
    Criterion {
        id: 6,
        name: "FUNCTORIALITY",
        limit: minutes(30),
        run: functoriality,
    },
    Criterion {
        id: 7,
        name: "COMPRESSIBILITY",
        limit: minutes(15),
        run: compressibility,
    },
    Criterion {
        id: 8,
        name: "MAX_SPLITTING_QPN family",
        limit: minutes(15),
        run: max_splitting_family,
    },
    Criterion {
        id: 9,
        name: "field-layer algebra",
        limit: minutes(2),
        run: field_layer,
    },
    Criterion {
        id: 10,
        name: "CLI goldens and exit codes",
        limit: minutes(1),
        run: cli_goldens,
    },
];

const SEED: u64 = 20_240_601;

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in CRITERIA
        .iter()
        .filter(|c| selected.is_empty() || selected.contains(&c.id))
    {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > c.limit => Err(format!("took {elapsed:.1?}, limit {:?}", c.limit)),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {:>2}  {tag}  {:<28} {:>8.1}s (limit {:>4}s)  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        if outcome.is_err() {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn field(p: u32, vars: &[&str]) -> Arc<FieldTower> {
    FieldTower::new(PrimeModulus::new(p).unwrap(), vars).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(gen: GenConfig, trials: u64) -> SuiteConfig {
    SuiteConfig {
        gen,
        trials,
        caps: TowerCaps::default(),
    }
}

/// Run one law; any failure is an error carrying the first failing record.
fn run_clean(law: LawId, gen: GenConfig, trials: u64) -> Result<LawReport, String> {
    let records = run_law(law, &suite(gen, trials)).map_err(|e| e.to_string())?;
    let report = summarize(law, &records);
    if let Some(f) = report.failures.first() {
        return Err(format!(
            "{law}: {} failures; first: {}",
            report.failures.len(),
            serde_json::to_string(f).unwrap()
        ));
    }
    Ok(report)
}

fn counts(r: &LawReport) -> String {
    format!(
        "{} pass/{} vacuous/{} skipped/{} candidates",
        r.passes,
        r.vacuous,
        r.skipped,
        r.candidates.len()
    )
}

/// (p, variables, form, pattern, indices)
type PatternCase = (
    u32,
    &'static [&'static str],
    &'static str,
    &'static [usize],
    &'static [usize],
);

fn quasi_pfister_patterns() -> Outcome {
    let cases: [PatternCase; 2] = [
        (2, &["t", "u"], "<<t, u>>", &[4, 2, 1], &[2, 1]),
        (3, &["t"], "<<t>>", &[3, 1], &[2]),
    ];
    let mut out = Vec::new();
    for (p, vars, src, pattern, indices) in cases {
        let start = Instant::now();
        let form = parse_form(&field(p, vars), src).map_err(|e| e.to_string())?;
        let (_, rep) = splitting_tower(&form, TowerCaps::default()).map_err(|e| e.to_string())?;
        ensure(rep.pattern == pattern && rep.indices == indices, || {
            format!(
                "{src} at p = {p}: pattern {:?}, indices {:?}",
                rep.pattern, rep.indices
            )
        })?;
        ensure(start.elapsed() < Duration::from_secs(10), || {
            format!("{src} took {:?}", start.elapsed())
        })?;
        out.push(format!("p={p} {src} -> {:?}", rep.pattern));
    }
    Ok(out.join(", "))
}

/// F_2[t] polynomials as bit masks (bit i = coefficient of t^i).
fn clmul(a: u32, b: u32) -> u32 {
    (0..16)
        .filter(|i| b >> i & 1 == 1)
        .fold(0, |acc, i| acc ^ (a << i))
}

/// Rank over F_2(t) of vectors in F_2[t]^3, for rank at most 3.
fn f2t_rank(vectors: &[[u32; 3]]) -> usize {
    let cross = |x: &[u32; 3], y: &[u32; 3]| {
        [
            clmul(x[1], y[2]) ^ clmul(x[2], y[1]),
            clmul(x[2], y[0]) ^ clmul(x[0], y[2]),
            clmul(x[0], y[1]) ^ clmul(x[1], y[0]),
        ]
    };
    let mut basis: Vec<[u32; 3]> = Vec::new();
    for v in vectors {
        let independent = match basis.len() {
            0 => v.iter().any(|&c| c != 0),
            1 => cross(&basis[0], v).iter().any(|&c| c != 0),
            2 => {
                let n = cross(&basis[0], &basis[1]);
                (0..3).fold(0, |acc, i| acc ^ clmul(n[i], v[i])) != 0
            }
            _ => false,
        };
        if independent {
            basis.push(*v);
        }
    }
    basis.len()
}

fn defect_index_brute_force() -> Outcome {
    let k = field(2, &["t"]);
    let render = |f: u32| -> String {
        let terms: Vec<String> = (0..3)
            .filter(|i| f >> i & 1 == 1)
            .map(|i| format!("t^{i}"))
            .collect();
        terms.join(" + ")
    };
    let mut forms = 0;
    let mut by_index = [0usize; 4];
    for f1 in 1u32..8 {
        for f2 in 1u32..8 {
            for f3 in 1u32..8 {
                let f = [f1, f2, f3];
                let mut solutions = Vec::new();
                for x in 0u32..4096 {
                    let xs = [x & 15, x >> 4 & 15, x >> 8 & 15];
                    let value = (0..3).fold(0, |acc, i| acc ^ clmul(clmul(xs[i], xs[i]), f[i]));
                    if value == 0 && x != 0 {
                        solutions.push(xs);
                    }
                }
                let oracle = f2t_rank(&solutions);
                let src = format!("{}, {}, {}", render(f1), render(f2), render(f3));
                let form = parse_form(&k, &src).map_err(|e| e.to_string())?;
                ensure(form.defect_index() == oracle, || {
                    format!(
                        "<{src}>: defect_index {} vs brute force {oracle}",
                        form.defect_index()
                    )
                })?;
                forms += 1;
                by_index[oracle] += 1;
            }
        }
    }
    Ok(format!("{forms} forms agree; i0 = 0/1/2/3 for {by_index:?}"))
}

fn mult_index_consistency() -> Outcome {
    let two = run_clean(
        LawId::MultIndexConsistency,
        GenConfig {
            p: 2,
            vars: 2,
            dim_min: 2,
            dim_max: 4,
            max_degree: 1,
            max_terms: 3,
            seed: SEED,
        },
        100,
    )?;
    let three = run_clean(
        LawId::MultIndexConsistency,
        GenConfig {
            p: 3,
            vars: 1,
            dim_min: 2,
            dim_max: 4,
            max_degree: 1,
            max_terms: 3,
            seed: SEED,
        },
        50,
    )?;
    Ok(format!("p=2: {}; p=3: {}", counts(&two), counts(&three)))
}

const SUITE_LAWS: [LawId; 15] = [
    LawId::HoffmannBound,
    LawId::I1Dichotomy,
    LawId::MonotoneIndices,
    LawId::OuterExcellent,
    LawId::PfisterSp,
    LawId::QpnEquiv,
    LawId::I2GeMin,
    LawId::I1Comparison,
    LawId::SecondComparison,
    LawId::DivisibilityEquiv,
    LawId::NeighbourSsp,
    LawId::SubformTrichotomy,
    LawId::ScalarInvariance,
    LawId::TranscendentalStability,
    LawId::NdegFunctoriality,
];

fn law_suite() -> Outcome {
    let mut totals = [0u64; 4];
    for vars in [2, 3] {
        let gen = GenConfig {
            p: 2,
            vars,
            dim_min: 2,
            dim_max: 5,
            max_degree: 2,
            max_terms: 3,
            seed: SEED,
        };
        for law in SUITE_LAWS {
            let r = run_clean(law, gen.clone(), 100).map_err(|e| format!("{vars} vars: {e}"))?;
            for (t, n) in totals
                .iter_mut()
                .zip([r.passes, r.vacuous, r.skipped, r.candidates.len() as u64])
            {
                *t += n;
            }
        }
    }
    Ok(format!(
        "3000 trials: {} pass/{} vacuous/{} skipped/{} candidates",
        totals[0], totals[1], totals[2], totals[3]
    ))
}

fn first_comparison() -> Outcome {
    let gen = GenConfig {
        p: 2,
        vars: 3,
        dim_min: 2,
        dim_max: 5,
        max_degree: 2,
        max_terms: 3,
        seed: SEED,
    };
    let r = run_clean(LawId::FirstComparison, gen, 25)?;
    ensure(r.passes == 25, || {
        format!(
            "only {} of 25 trials reached a non-neighbour: {}",
            r.passes,
            counts(&r)
        )
    })?;
    Ok(counts(&r))
}

fn functoriality() -> Outcome {
    let two = run_clean(
        LawId::Functoriality,
        GenConfig {
            p: 2,
            vars: 3,
            dim_min: 2,
            dim_max: 5,
            max_degree: 2,
            max_terms: 3,
            seed: SEED,
        },
        25,
    )?;
    let three = run_clean(
        LawId::Functoriality,
        GenConfig {
            p: 3,
            vars: 2,
            dim_min: 2,
            dim_max: 4,
            max_degree: 2,
            max_terms: 3,
            seed: SEED,
        },
        25,
    )?;
    Ok(format!("p=2: {}; p=3: {}", counts(&two), counts(&three)))
}

fn compressibility() -> Outcome {
    let gen = GenConfig {
        p: 2,
        vars: 3,
        dim_min: 2,
        dim_max: 5,
        max_degree: 2,
        max_terms: 3,
        seed: SEED,
    };
    Ok(counts(&run_clean(LawId::Compressibility, gen, 25)?))
}

/// Half random anisotropic forms, half scaled subforms of 3-fold
/// quasi-Pfister forms (neighbours by construction), all of dimension 6 to 8.
fn max_splitting_family() -> Outcome {
    let config = GenConfig {
        p: 2,
        vars: 4,
        dim_min: 6,
        dim_max: 8,
        max_degree: 2,
        max_terms: 3,
        seed: SEED,
    };
    let k = config.base_field().map_err(|e| e.to_string())?;
    let mut family: Vec<QuasilinearForm> = Vec::new();
    let mut trial = 0;
    while family.len() < 25 {
        if let Some(phi) = gen_anisotropic_form(&config, trial, 64).map_err(|e| e.to_string())? {
            if (6..=8).contains(&phi.dim()) {
                family.push(phi);
            }
        }
        trial += 1;
        ensure(trial < 1000, || {
            "could not draw 25 anisotropic forms of dimension 6..8".into()
        })?;
    }
    let mut rng = trial_rng(SEED, 0, 8);
    while family.len() < 50 {
        let gens: Vec<TowerElement> = (0..3).map(|_| random_poly(&k, 4, 1, 2, &mut rng)).collect();
        let pi = quasi_pfister(&k, &gens).map_err(|e| e.to_string())?;
        if !pi.is_anisotropic() {
            continue;
        }
        let mut coeffs = pi.coeffs();
        coeffs.shuffle(&mut rng);
        coeffs.truncate(rng.gen_range(6..=8));
        let c = random_poly(&k, 4, 1, 2, &mut rng);
        family.push(
            QuasilinearForm::new(&coeffs)
                .unwrap()
                .scale(&c)
                .map_err(|e| e.to_string())?,
        );
    }
    let mut tally = [0usize; 3];
    for phi in &family {
        match check_law(
            LawId::MaxSplittingQpn,
            &Instance::new(phi.clone()),
            TowerCaps::default(),
        ) {
            Verdict::Pass => tally[0] += 1,
            Verdict::Vacuous(_) => tally[1] += 1,
            Verdict::Skipped(_) => tally[2] += 1,
            other => return Err(format!("{}: {other:?}", phi.render())),
        }
    }
    ensure(tally[0] >= 25, || {
        format!("only {} maximal-splitting instances", tally[0])
    })?;
    Ok(format!(
        "50 forms: {} maximal and neighbours, {} not maximal, {} skipped",
        tally[0], tally[1], tally[2]
    ))
}

fn tower_shape(p: u32, vars: &[&str], roots: &[(&str, &str)]) -> Arc<FieldTower> {
    let mut tower = field(p, vars);
    for (name, radicand) in roots {
        let a = parse_element(&tower, radicand).unwrap();
        tower = tower.adjoin_pth_root(&a, name).unwrap();
    }
    tower
}

fn field_layer() -> Outcome {
    let shapes = [
        tower_shape(2, &["t"], &[]),
        tower_shape(2, &["t", "u"], &[("r", "t")]),
        tower_shape(2, &["t", "u", "v"], &[("r", "t"), ("s", "u + r*v")]),
        tower_shape(3, &["t", "u"], &[("r", "t")]),
        tower_shape(3, &["t", "u", "v"], &[("r", "t"), ("s", "u + r*v")]),
        tower_shape(5, &["t", "u"], &[("r", "t*u + 1")]),
    ];
    for (s, k) in shapes.iter().enumerate() {
        let zero = k.zero();
        let one = k.one();
        for i in 0..1000u64 {
            let mut rng = trial_rng(SEED, i, 9 + s as u64);
            let [a, b, c] = [(); 3].map(|_| random_element(k, 2, 2, 3, &mut rng));
            let fail = |what: &str| format!("shape {s}, triple {i}: {what} (a = {a}, b = {b}, c = {c})");
            let add = |x: &TowerElement, y: &TowerElement| x.add(y).unwrap();
            let mul = |x: &TowerElement, y: &TowerElement| x.mul(y).unwrap();
            ensure(add(&a, &b) == add(&b, &a), || fail("a + b = b + a"))?;
            ensure(mul(&a, &b) == mul(&b, &a), || fail("ab = ba"))?;
            ensure(add(&add(&a, &b), &c) == add(&a, &add(&b, &c)), || {
                fail("(a + b) + c")
            })?;
            ensure(mul(&mul(&a, &b), &c) == mul(&a, &mul(&b, &c)), || fail("(ab)c"))?;
            ensure(mul(&a, &add(&b, &c)) == add(&mul(&a, &b), &mul(&a, &c)), || {
                fail("a(b + c)")
            })?;
            ensure(add(&a, &zero) == a && mul(&a, &one) == a, || fail("identities"))?;
            ensure(a.sub(&a).unwrap().is_zero(), || fail("a - a"))?;
            ensure(
                mul(&a, &b).frobenius() == mul(&a.frobenius(), &b.frobenius()),
                || fail("(ab)^p"),
            )?;
            ensure(
                add(&a, &b).frobenius() == add(&a.frobenius(), &b.frobenius()),
                || fail("(a + b)^p"),
            )?;
            for x in [&a, &b] {
                if !x.is_zero() {
                    ensure(mul(x, &x.inv().unwrap()).is_one(), || fail("x inv(x)"))?;
                }
            }
        }
    }
    Ok(format!("{} tower shapes x 1000 triples", shapes.len()))
}

fn qlf(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qlf"))
        .args(args)
        .output()
        .expect("qlf runs");
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn cli_goldens() -> Outcome {
    let examples: [(&[&str], &str, &[&str]); 3] = [
        (
            &["invariants", "--p", "2", "--vars", "t,u", "--form", "1,t,u"],
            "invariants_1_t_u.json",
            &[
                r#""dim":3"#,
                r#""i0":0"#,
                r#""ndeg":4"#,
                r#""height":2"#,
                r#""pattern":[3,2,1]"#,
                r#""qpn":true"#,
                r#""maximal":true"#,
            ],
        ),
        (
            &["invariants", "--p", "2", "--vars", "t,u", "--form", "<<t,u>>"],
            "invariants_pfister_t_u.json",
            &[r#""pattern":[4,2,1]"#, r#""indices":[2,1]"#],
        ),
        (
            &[
                "check",
                "HOFFMANN_BOUND",
                "--p",
                "2",
                "--vars",
                "t,u",
                "--form",
                "1,t,u",
            ],
            "check_hoffmann_1_t_u.json",
            &[r#""passes":1"#, r#""failures":[]"#],
        ),
    ];
    for (args, file, pairs) in examples {
        let (code, stdout) = qlf(args);
        ensure(code == Some(0), || format!("{args:?} exited with {code:?}"))?;
        ensure(stdout == golden(file), || {
            format!("{args:?} differs from {file}: {stdout}")
        })?;
        let mut from = 0;
        for pair in pairs {
            let at = stdout[from..]
                .find(pair)
                .ok_or_else(|| format!("{args:?}: `{pair}` missing or out of order"))?;
            from += at + pair.len();
        }
    }
    let (code, _) = qlf(&["invariants", "--p", "4", "--vars", "t", "--form", "1,t"]);
    ensure(code == Some(2), || format!("--p 4 exited with {code:?}"))?;
    let (code, _) = qlf(&[
        "invariants",
        "--p",
        "2",
        "--vars",
        "t,u,v",
        "--form",
        "1,t,u,v",
        "--max-vars",
        "4",
    ]);
    ensure(code == Some(3), || format!("resource cap exited with {code:?}"))?;
    // No input makes an asserted law fail, so exit code 1 is checked on the
    // report-to-exit-code mapping the binary uses.
    let mut report = LawReport::new(LawId::HoffmannBound);
    report.record(TrialRecord {
        law: LawId::HoffmannBound,
        seed: 0,
        trial: 0,
        verdict: Verdict::Failure("synthetic".into()),
        instance: InstanceRecord {
            tower: "p = 2\nvars = t\n".into(),
            form: vec!["1".into(), "t".into()],
            radicands: vec![],
            scalar: None,
            choice: 0,
            partner: None,
        },
    });
    ensure(report_code(&[report]) == 1, || {
        "failing report does not map to exit code 1".into()
    })?;
    Ok("3 examples byte-identical; exit codes 0/2/3 from the binary, 1 from the report mapping".into())
}
