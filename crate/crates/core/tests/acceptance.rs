//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! single `criterion N: PASS|FAIL` line (visible with `--nocapture`, and in
//! the failure output otherwise).

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use annkh::cli::{run, Env, Output};
use annkh::complex::{check_square_zero, Label};
use annkh::experiments::{
    conjecture1_scan, conjecture2_check, conjecture2_scan, random_braids, separate_pair, Verdict,
};
use annkh::invariants::{annular_spread, representatives_in_grading, sl2_decompose, Sl2Term};
use annkh::linalg::in_span;
use annkh::reduce::wk_from_oracle;
use annkh::{
    build_complex, graded_euler, homology_over_field, specialize, spectral_annular_kh, staircase_decompose, BraidWord,
    Differential, FrobeniusSpec, GradedDims, LaurentPoly3, Monomial, PivotOrder, Rational, Specialization, Style,
    Trigrading, Var, DEFAULT_LIMIT,
};

fn criterion(n: u32, description: &str, body: impl FnOnce() -> Result<String, String>) {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = started.elapsed().as_secs_f64();
    let (ok, detail) = match outcome {
        Ok(Ok(detail)) => (true, detail),
        Ok(Err(msg)) => (false, msg),
        Err(panic) => (
            false,
            panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()),
        ),
    };
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} - {description} [{elapsed:.2} s] {detail}");
    assert!(ok, "criterion {n} failed: {detail}");
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli(args: &[&str]) -> Output {
    let mut full = vec!["annkh"];
    full.extend_from_slice(args);
    run(full, &Env::default())
}

fn cli_line(args: &[&str], budget: Duration) -> Result<String, String> {
    let started = Instant::now();
    let out = cli(args);
    let elapsed = started.elapsed();
    ensure(out.code == 0, format!("exit {}: {}", out.code, out.stderr))?;
    ensure(elapsed < budget, format!("took {elapsed:?}"))?;
    Ok(out.stdout.trim_end().to_string())
}

fn br(s: usize, l: &[i64]) -> BraidWord {
    BraidWord::new(s, l.to_vec()).unwrap()
}

/// Polynomial from `(coeff, t, q, z)` terms.
fn poly(terms: &[(i64, i32, i32, i32)]) -> LaurentPoly3 {
    let mut p = LaurentPoly3::zero();
    for &(c, t, q, z) in terms {
        p.add_term(Monomial::new(q, t, z), Rational::from_integer(c));
    }
    p
}

/// Terms shared by both 8_12 braids.
const E_8_12_COMMON: &[(i64, i32, i32, i32)] = &[
    (1, 3, 7, 1),
    (1, 2, 3, -1),
    (3, 2, 5, 1),
    (3, 1, 1, -1),
    (2, 1, 3, 1),
    (3, 0, 1, 1),
    (3, 0, -1, -1),
    (2, -1, -3, -1),
    (3, -1, -1, 1),
    (3, -2, -5, -1),
    (1, -2, -3, 1),
    (1, -3, -7, -1),
];

fn e_8_12a() -> LaurentPoly3 {
    let mut terms = E_8_12_COMMON.to_vec();
    terms.extend([(1, 4, 9, 1), (1, 3, 5, -1), (1, -3, -5, 1), (1, -4, -9, -1)]);
    poly(&terms)
}

fn e_8_12b() -> LaurentPoly3 {
    let mut terms = E_8_12_COMMON.to_vec();
    terms.extend([(1, 4, 9, 3), (1, 3, 5, 1), (1, -3, -5, -1), (1, -4, -9, -3)]);
    poly(&terms)
}

#[test]
fn criterion_01_trefoil_khovanov() {
    criterion(1, "kh 3_1 matches the four-term Poincare polynomial", || {
        let line = cli_line(&["kh", "3_1"], Duration::from_secs(1))?;
        ensure(line == "1/q^3+1/q+1/(q^9 t^3)+1/(q^5 t^2)", format!("got {line:?}"))?;
        Ok(line)
    });
}

#[test]
fn criterion_02_trefoil_annular() {
    criterion(
        2,
        "kh 3_1 --differential annular matches the six-term polynomial",
        || {
            let line = cli_line(&["kh", "3_1", "--differential", "annular"], Duration::from_secs(1))?;
            ensure(
                line == "1/q^5+1/q^3+1/q+1/(q^9 t^3)+1/(q^5 t^2)+1/(q^5 t)",
                format!("got {line:?}"),
            )?;
            Ok(line)
        },
    );
}

#[test]
fn criterion_03_trefoil_sl2() {
    criterion(3, "sl2 3_1 gives three V[0] and one V[2]", || {
        let line = cli_line(&["sl2", "3_1"], Duration::from_secs(1))?;
        ensure(
            line == "V[0]/(q^9 t^3)+V[0]/(q^5 t^2)+V[0]/(q^5 t)+V[2]/q^3",
            format!("got {line:?}"),
        )?;
        let s = sl2_decompose(&BraidWord::named("3_1").unwrap(), DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        let term = |hw, i, jk| Sl2Term {
            highest_weight: hw,
            i,
            jk,
            multiplicity: 1,
        };
        let expected = vec![term(0, -3, -9), term(0, -2, -5), term(0, -1, -5), term(2, 0, -3)];
        ensure(s.terms == expected, format!("terms {:?}", s.terms))?;
        Ok(line)
    });
}

#[test]
fn criterion_04_8_12_separation() {
    criterion(
        4,
        "8_12 braids: reference E-polynomials, z-regraded difference, equal at z=1",
        || {
            let budget = Duration::from_secs(600);
            let a = BraidWord::named("8_12a").unwrap();
            let b = BraidWord::named("8_12b").unwrap();
            for (braid, reference) in [(&a, e_8_12a()), (&b, e_8_12b())] {
                let started = Instant::now();
                let out = spectral_annular_kh(braid, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
                ensure(started.elapsed() < budget, "too slow")?;
                ensure(
                    out.e_poly == reference,
                    format!("{braid}: got {}", out.e_poly.format(Style::Text)),
                )?;
                ensure(
                    out.e_poly.total() == Rational::from_integer(30),
                    "total dimension is not 30",
                )?;
            }
            let cmp = separate_pair(&a, &b, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
            ensure(
                cmp.e_polys_differ && cmp.z1_equal && cmp.z_regrading_only,
                "comparison flags",
            )?;
            ensure(cmp.only_in_a.len() == 4 && cmp.only_in_b.len() == 4, "difference size")?;
            // the highlighted monomials are among the differences
            for (p, m) in [
                (&cmp.only_in_a, Monomial::new(5, 3, -1)),
                (&cmp.only_in_a, Monomial::new(-5, -3, 1)),
                (&cmp.only_in_b, Monomial::new(5, 3, 1)),
                (&cmp.only_in_b, Monomial::new(-5, -3, -1)),
            ] {
                ensure(!p.coeff(&m).is_zero(), format!("{m:?} missing from the difference"))?;
            }
            let cli_a = cli_line(&["spectral", "8_12a"], budget)?;
            ensure(cli_a.starts_with('(') && cli_a.contains(") E"), "spectral output shape")?;
            Ok(format!(
                "only in a: {}; only in b: {}",
                cmp.only_in_a.format(Style::Text),
                cmp.only_in_b.format(Style::Text)
            ))
        },
    );
}

#[test]
fn criterion_05_figure_eight_spreads() {
    criterion(
        5,
        "annular spreads of 4_1 and its positive stabilizations are 2, 2, 4",
        || {
            let f8 = br(3, &[-1, 2, -1, 2]);
            let expected_e = [
                // (coeff, t, q, z)
                vec![
                    (1, 2, 5, 1),
                    (1, -2, -5, -1),
                    (1, 1, 1, -1),
                    (1, -1, -1, 1),
                    (1, 0, 1, 1),
                    (1, 0, -1, -1),
                ],
                vec![
                    (1, 2, 5, 0),
                    (1, -2, -5, -2),
                    (1, 1, 1, 0),
                    (1, -1, -1, 0),
                    (1, 0, 1, 0),
                    (1, 0, -1, -2),
                ],
                vec![
                    (1, 2, 5, 1),
                    (1, -2, -5, -3),
                    (1, 1, 1, -1),
                    (1, -1, -1, -1),
                    (1, 0, 1, -1),
                    (1, 0, -1, -3),
                ],
            ];
            let mut spreads = Vec::new();
            for (signs, terms) in [vec![], vec![1], vec![1, 1]].iter().zip(&expected_e) {
                let b = f8.stabilize(signs).map_err(|e| e.to_string())?;
                let out = spectral_annular_kh(&b, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
                ensure(
                    out.e_poly == poly(terms),
                    format!("{b}: {}", out.e_poly.format(Style::Text)),
                )?;
                spreads.push(annular_spread(&out.e_poly));
            }
            ensure(spreads == vec![2, 2, 4], format!("spreads {spreads:?}"))?;
            Ok(format!("{spreads:?}"))
        },
    );
}

#[test]
fn criterion_06_stabilization() {
    criterion(6, "stabilize 3_1 by (-1, 1)", || {
        let line = cli_line(&["stabilize", "3_1", "--signs", "-1,1"], Duration::from_secs(1))?;
        ensure(line == "BR[4,{-1,-1,-1,-2,3}]", format!("got {line:?}"))?;
        Ok(line)
    });
}

#[test]
fn criterion_07_stabilized_unknot() {
    criterion(7, "stabilized unknot (-1,-1,1,-1): two classes at z^1 and z^3", || {
        let signs = [-1, -1, 1, -1];
        let by_stabilization = br(1, &[]).stabilize(&signs).map_err(|e| e.to_string())?;
        let literal = annkh::experiments::stabilized_unknot(&signs).map_err(|e| e.to_string())?;
        let mut notes = Vec::new();
        for b in [by_stabilization, literal] {
            let out = spectral_annular_kh(&b, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
            let w0 = &out.e_poly;
            ensure(w0.total() == Rational::from_integer(2), "W0 has two classes")?;
            let zs: BTreeSet<i32> = w0.terms().map(|(m, _)| m.z).collect();
            ensure(zs == BTreeSet::from([1, 3]), format!("{b}: z-exponents {zs:?}"))?;
            ensure(
                w0.forget_variable(Var::Z) == LaurentPoly3::parse("q + 1/q").unwrap(),
                "W0 at z = 1 is not q + 1/q",
            )?;
            let printed = LaurentPoly3::parse("q z + q^3 z^3").unwrap();
            notes.push(format!(
                "{b}: W0 = {}{}",
                w0.format(Style::Text),
                if *w0 == printed {
                    String::new()
                } else {
                    " (q-degrees differ from the printed q z + q^3 z^3, which is not q + 1/q at z = 1)".into()
                }
            ));
        }
        Ok(notes.join("; "))
    });
}

#[test]
fn criterion_08_representatives() {
    criterion(8, "trefoil (-1,-5) annular: 3 basis vectors, one class", || {
        let b = BraidWord::named("3_1").unwrap();
        let r =
            representatives_in_grading(&b, -1, -5, Differential::Annular, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        ensure(r.basis.len() == 3, format!("basis size {}", r.basis.len()))?;
        ensure(r.vectors.len() == 1, format!("rank {}", r.vectors.len()))?;
        ensure(
            r.basis.iter().all(|v| v.generator.labeling.get(0) == Label::Minus),
            "basis labels",
        )?;

        // boundaries landing in this grading
        let c = build_complex(&b, &FrobeniusSpec::khovanov(), DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        let fc = specialize(&c, Specialization::BetaZero).map_err(|e| e.to_string())?;
        let index: Vec<usize> = r
            .basis
            .iter()
            .map(|v| c.generator_index(v.generator.vertex, v.generator.labeling))
            .collect();
        let mut image: std::collections::BTreeMap<usize, Vec<Rational>> = Default::default();
        for (s, t, a) in &fc.entries {
            if let Some(p) = index.iter().position(|x| x == t) {
                image.entry(*s).or_insert_with(|| vec![Rational::zero(); 3])[p] += a;
            }
        }
        let image: Vec<Vec<Rational>> = image.into_values().collect();
        let rep = &r.vectors[0];
        ensure(!in_span(&image, rep), "representative is a boundary")?;
        // the all-ones vector represents the same class
        let ones = vec![Rational::one(); 3];
        let mut with_rep = image.clone();
        with_rep.push(rep.clone());
        ensure(!in_span(&image, &ones) && in_span(&with_rep, &ones), "span check")?;
        Ok(format!("representative {rep:?}"))
    });
}

#[test]
fn criterion_09_property_suite() {
    criterion(
        9,
        "fuzz: d^2, monomiality, oracle, specializations, Euler, mirror, pivots",
        || {
            let braids = random_braids(40, 4, 6, 20_240_601);
            for b in &braids {
                let ctx = |what: &str| format!("{b}: {what}");
                let c = build_complex(b, &FrobeniusSpec::khovanov(), DEFAULT_LIMIT).map_err(|e| e.to_string())?;
                check_square_zero(c.len(), c.entries.iter().map(|e| (e.source, e.target, &e.coeff)))
                    .map_err(|e| ctx(&e.to_string()))?;
                for e in &c.entries {
                    let (s, t) = (c.generators[e.source].grading, c.generators[e.target].grading);
                    let dk = s.k - t.k;
                    ensure(
                        t.i == s.i + 1 && t.j == s.j && dk >= 0 && dk % 2 == 0,
                        ctx("entry is not a monomial of the right degree"),
                    )?;
                }

                let d = staircase_decompose(&c, PivotOrder::MinFill).map_err(|e| ctx(&e.to_string()))?;
                let oracle = wk_from_oracle(&c, d.max_k().max(2)).map_err(|e| ctx(&e.to_string()))?;
                for (k, w) in oracle.iter().enumerate() {
                    ensure(
                        d.wk_dims(k as u32) == *w,
                        ctx(&format!("W_{k} differs from the oracle")),
                    )?;
                }

                let beta_one = homology_over_field(&specialize(&c, Specialization::BetaOne).unwrap(), false)
                    .map_err(|e| ctx(&e.to_string()))?;
                ensure(beta_one.dims == d.beta_one_dims(), ctx("beta = 1 dims"))?;
                let beta_zero = homology_over_field(&specialize(&c, Specialization::BetaZero).unwrap(), false)
                    .map_err(|e| ctx(&e.to_string()))?;
                ensure(beta_zero.dims == d.beta_zero_dims(), ctx("beta = 0 dims"))?;

                let kh = beta_one.dims.to_poly();
                let euler = graded_euler(b, DEFAULT_LIMIT).map_err(|e| ctx(&e.to_string()))?;
                ensure(
                    euler == kh.eval_var(Var::T, &Rational::from_integer(-1)),
                    ctx("Euler characteristic"),
                )?;

                let m = build_complex(&b.mirror(), &FrobeniusSpec::khovanov(), DEFAULT_LIMIT).unwrap();
                let mirrored = homology_over_field(&specialize(&m, Specialization::BetaZero).unwrap(), false)
                    .map_err(|e| ctx(&e.to_string()))?;
                let mut dual = GradedDims::new();
                for (g, n) in beta_zero.dims.iter() {
                    dual.add(Trigrading::new(-g.i, -g.j, -g.k), *n);
                }
                ensure(mirrored.dims == dual, ctx("mirror duality"))?;

                for seed in 0..3 {
                    let other = staircase_decompose(&c, PivotOrder::Seeded(seed)).unwrap();
                    ensure(other == d, ctx("pivot order changed the decomposition"))?;
                }
            }
            Ok(format!("{} braids", braids.len()))
        },
    );
}

#[test]
fn criterion_10_lee() {
    criterion(
        10,
        "Lee homology ranks 2 (trefoil) and 4 (two-component unlink)",
        || {
            let t = cli_line(
                &["kh", "3_1", "--differential", "full", "--frobenius", "lee"],
                Duration::from_secs(5),
            )?;
            let u = cli_line(&["kh", "2:", "--frobenius", "lee"], Duration::from_secs(5))?;
            let rank = |s: &str| LaurentPoly3::parse(s).map(|p| p.total());
            ensure(rank(&t) == Ok(Rational::from_integer(2)), format!("trefoil {t:?}"))?;
            ensure(rank(&u) == Ok(Rational::from_integer(4)), format!("unlink {u:?}"))?;
            Ok(format!("{t}, {u}"))
        },
    );
}

#[test]
fn criterion_11_conjecture_harnesses() {
    criterion(11, "conjecture harnesses complete with deterministic reports", || {
        let c1 = conjecture1_scan(5, 3, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        ensure(
            c1 == conjecture1_scan(5, 3, DEFAULT_LIMIT).unwrap(),
            "conjecture 1 report changed",
        )?;
        ensure(
            c1.count(Verdict::Unexpected) == 0,
            "engine invariant failed in conjecture 1",
        )?;
        let c2 = conjecture2_scan(30, 4, 6, 3, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        ensure(
            c2 == conjecture2_scan(30, 4, 6, 3, DEFAULT_LIMIT).unwrap(),
            "conjecture 2 report changed",
        )?;
        ensure(c2.count(Verdict::Unexpected) == 0, "engine failure in conjecture 2")?;
        let table: Vec<BraidWord> = ["3_1", "8_12a"].iter().map(|n| BraidWord::named(n).unwrap()).collect();
        let t = conjecture2_check(&table, 0, DEFAULT_LIMIT);
        ensure(t.count(Verdict::Unexpected) == 0, "engine failure on table braids")?;
        let cli1 = cli(&["experiment", "conjecture1", "--max-length", "3", "--json"]);
        let cli2 = cli(&["experiment", "conjecture1", "--max-length", "3", "--json"]);
        ensure(
            cli1.code == 0 && cli1.stdout == cli2.stdout,
            "CLI report not reproducible",
        )?;
        Ok(format!("{} | {} | {}", c1.summary(), c2.summary(), t.summary()))
    });
}
