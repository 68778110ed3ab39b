//! Acceptance gate: eight criteria at their stated tolerances, one status line
//! each. Lines go straight to stderr so they appear even when output is
//! captured.

use std::cmp::Ordering;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use fredholm_lab::chern::chern_odd_circle;
use fredholm_lab::circle::FourierSymbol;
use fredholm_lab::fredholm::{
    calderon_index, index_by_winding, toeplitz_index_by_stabilization, IndexValue, StabilizationConfig,
};
use fredholm_lab::groups::{
    free_hilbert, free_hilbert_commutator, group_toeplitz_index, parse_word, word_equal, FreeHilbertSigns, GroupBall,
    GroupTag, GroupWord, OrderOracle,
};
use fredholm_lab::linalg::{eigenvalues, operator_pnorm, pseudo_inverse, CMatrix, Certainty, PNormContext, C64};
use fredholm_lab::schur::{f_operator as schur_f, schur_pairing_table};
use fredholm_lab::snumbers::{approx_numbers, lq_norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Singular values from the eigenvalues of T*T, independent of any SVD.
fn singular_values_by_gram(t: &CMatrix) -> Vec<f64> {
    let gram = &t.adjoint() * t;
    let mut s: Vec<f64> = eigenvalues(&gram)
        .unwrap()
        .iter()
        .map(|l| l.re.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.truncate(t.rows().min(t.cols()));
    s
}

fn toeplitz_routes() -> Outcome {
    let start = Instant::now();
    for k in -5i64..=5 {
        let f = FourierSymbol::z_power(k);
        let by_winding = index_by_winding(&f).map_err(err)?.index;
        // margin 2(|k| + 1), threshold 1e-6
        let config = StabilizationConfig::for_symbol(k.unsigned_abs() as usize, 1);
        ensure(
            config.boundary_margin == 2 * (k.unsigned_abs() as usize + 1) && config.mass_threshold == 1e-6,
            || format!("unexpected configuration {config:?}"),
        )?;
        let by_sections = toeplitz_index_by_stabilization(&f, &[32, 64, 128], &config)
            .map_err(err)?
            .index;
        ensure(
            by_winding == IndexValue::Stable(-k) && by_sections == IndexValue::Stable(-k),
            || {
                format!(
                    "z^{k}: winding route {by_winding}, section route {by_sections}, expected {}",
                    -k
                )
            },
        )?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "index of z^k is -k on both routes for k = -5..5 ({elapsed:.2?})"
    ))
}

/// tr(F [F, M_{z^-k}] [F, M_{z^k}]) computed on dense matrices over [-l, l],
/// summing only columns whose images stay inside the window.
fn dense_chern_trace(k: i64) -> f64 {
    let l = 4 * k + 4;
    let size = (2 * l + 1) as usize;
    let freq = |i: usize| i as i64 - l;
    let f = CMatrix::from_real_diagonal(
        &(0..size)
            .map(|i| if freq(i) >= 0 { 1.0 } else { -1.0 })
            .collect::<Vec<_>>(),
    );
    let shift = |by: i64| {
        CMatrix::from_fn(size, size, |i, j| {
            if freq(i) == freq(j) + by {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let (u, u_inv) = (shift(k), shift(-k));
    let du = &(&f * &u) - &(&u * &f);
    let du_inv = &(&f * &u_inv) - &(&u_inv * &f);
    let product = &(&f * &du_inv) * &du;
    (0..size)
        .filter(|&i| freq(i).abs() <= l - k)
        .map(|i| product.get(i, i).re)
        .sum()
}

fn chern_identity() -> Outcome {
    let mut traces = Vec::new();
    for k in 1i64..=3 {
        let eval = chern_odd_circle(&FourierSymbol::z_power(k), 1).map_err(err)?;
        let oracle = dense_chern_trace(k);
        ensure((oracle - 4.0 * k as f64).abs() < 1e-12, || {
            format!("dense oracle gave {oracle} for k = {k}")
        })?;
        ensure((eval.raw_trace - C64::new(oracle, 0.0)).norm() < 1e-10, || {
            format!("k = {k}: raw trace {} against {oracle}", eval.raw_trace)
        })?;
        ensure((eval.predicted_index - C64::new(-k as f64, 0.0)).norm() < 1e-10, || {
            format!("k = {k}: predicted index {}", eval.predicted_index)
        })?;
        traces.push(eval.raw_trace.re);
    }
    Ok(format!("-tr(F du^-1 du)/4 = -k for k = 1..3; traces {traces:?}"))
}

fn calderon_zero_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut deficient, mut worst) = (0, 0.0f64);
    for trial in 0..100 {
        let size = rng.gen_range(1..=20);
        let rank = if trial % 3 == 0 { rng.gen_range(0..size) } else { size };
        let t = if rank == 0 {
            CMatrix::zeros(size, size)
        } else {
            &CMatrix::random(size, rank, &mut rng) * &CMatrix::random(rank, size, &mut rng)
        };
        deficient += usize::from(rank < size);
        let r = pseudo_inverse(&t, 1e-8).map_err(err)?;
        for n in 1..=3 {
            let rep = calderon_index(&t, &r, n, 0.1).map_err(err)?;
            let gap = (rep.lhs_trace - rep.rhs_trace).norm();
            worst = worst.max(gap);
            ensure(gap <= 1e-8 && rep.index == Some(0), || {
                format!("trial {trial} (size {size}, rank {rank}, n = {n}): difference {gap:e}")
            })?;
        }
    }
    Ok(format!(
        "100 matrices ({deficient} rank-deficient), n = 1..3, largest |difference| {worst:.1e}"
    ))
}

fn snumber_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let two = PNormContext::new(2.0).map_err(err)?;
    for trial in 0..50 {
        let (m, n) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let rank = rng.gen_range(1..=m.min(n));
        let t = &CMatrix::random(m, rank, &mut rng) * &CMatrix::random(rank, n, &mut rng);
        let a = approx_numbers(&t, &two).map_err(err)?;
        let oracle = singular_values_by_gram(&t);
        let scale = oracle[0];
        ensure(a.certainty == Certainty::Exact, || {
            format!("trial {trial}: p = 2 sequence not exact")
        })?;
        // axiom 1
        ensure((a.nth(1) - oracle[0]).abs() <= 1e-8 * scale, || {
            format!("trial {trial}: a_1 = {} but the norm is {}", a.nth(1), oracle[0])
        })?;
        for (k, (x, y)) in a.values.iter().zip(&oracle).enumerate() {
            ensure((x - y).abs() <= 1e-6 * scale, || {
                format!("trial {trial}: a_{} = {x}, oracle {y}", k + 1)
            })?;
        }
        // axiom 4: exact zeros past the rank, ones for the identity
        for k in 1..=a.len() {
            ensure((a.nth(k) == 0.0) == (k > rank), || {
                format!("trial {trial}: a_{k} = {} at rank {rank}", a.nth(k))
            })?;
        }
        let id = approx_numbers(&CMatrix::identity(m), &two).map_err(err)?;
        ensure(id.values.iter().all(|&x| x == 1.0), || {
            format!("identity numbers {:?}", id.values)
        })?;
        // axiom 3: a_k(RST) ≤ ‖R‖ a_k(S) ‖T‖
        let (r, s) = (CMatrix::random(m, m, &mut rng), CMatrix::random(m, m, &mut rng));
        let rst = approx_numbers(&(&(&r * &s) * &t), &two).map_err(err)?;
        let sn = approx_numbers(&s, &two).map_err(err)?;
        let bound = singular_values_by_gram(&r)[0] * scale;
        for k in 1..=rst.len() {
            ensure(rst.nth(k) <= bound * sn.nth(k) + 1e-6 * bound * sn.nth(1), || {
                format!("trial {trial}: ideal inequality fails at k = {k}")
            })?;
        }
        // composition with C = 1: ‖ST‖_r ≤ ‖S‖_p ‖T‖_q, 1/r = 1/p + 1/q
        let u = CMatrix::random(n, rng.gen_range(1..=8), &mut rng);
        let (p, q) = ([0.5, 1.0, 2.0, 4.0][trial % 4], [1.0, 2.0, 3.0][trial % 3]);
        let rr = 1.0 / (1.0 / p + 1.0 / q);
        let schatten = |x: &CMatrix, e: f64| lq_norm(&singular_values_by_gram(x), e).unwrap();
        let lhs = lq_norm(&approx_numbers(&(&t * &u), &two).map_err(err)?.values, rr).map_err(err)?;
        let rhs = schatten(&t, p) * schatten(&u, q);
        ensure(lhs <= rhs * (1.0 + 1e-8), || {
            format!("trial {trial}: ‖TU‖_{rr} = {lhs} > {rhs}")
        })?;
    }
    for trial in 0..50 {
        let t = CMatrix::random(rng.gen_range(1..=10), rng.gen_range(1..=10), &mut rng);
        let column_sum = (0..t.cols())
            .map(|j| (0..t.rows()).map(|i| t.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let row_sum = (0..t.rows())
            .map(|i| (0..t.cols()).map(|j| t.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        for (p, exact) in [(1.0, column_sum), (f64::INFINITY, row_sum)] {
            let ctx = PNormContext::new(p).map_err(err)?.with_seed(trial);
            let a1 = approx_numbers(&t, &ctx).map_err(err)?.nth(1);
            let norm = operator_pnorm(&t, &ctx).map_err(err)?;
            ensure(norm.certainty == Certainty::Exact && a1 == norm.value, || {
                format!("trial {trial}, p = {p}: a_1 = {a1}, norm {:?}", norm)
            })?;
            ensure((a1 - exact).abs() <= 1e-12 * exact, || {
                format!("trial {trial}, p = {p}: {a1} vs {exact}")
            })?;
        }
    }
    Ok("axioms 1, 3, 4 and composition on 50 p = 2 instances; a_1 = exact norm on 50 instances at p = 1, inf".into())
}

fn schur_pairing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [3, 5, 8] {
        let rows = schur_pairing_table(n, 20, 100 + n as u64).map_err(err)?;
        ensure(rows.len() == 20 && rows.iter().all(|r| r.index == 0), || {
            format!(
                "n = {n}: indices {:?}",
                rows.iter().map(|r| r.index).collect::<Vec<_>>()
            )
        })?;
        for _ in 0..20 {
            let x = CMatrix::random(n, n, &mut rng);
            ensure(schur_f(&schur_f(&x).map_err(err)?).map_err(err)? == x, || {
                format!("n = {n}: F² ≠ Id")
            })?;
        }
    }
    Ok("index 0 for 20 random invertible a at n = 3, 5, 8; F² = Id exactly".into())
}

fn pick<'a>(elements: &'a [GroupWord], rng: &mut ChaCha8Rng) -> &'a GroupWord {
    &elements[rng.gen_range(0..elements.len())]
}

fn ordered_groups() -> Outcome {
    let oracle = OrderOracle::new(GroupTag::Z).map_err(err)?;
    for k in -5i64..=5 {
        let g = GroupWord::from_vector(GroupTag::Z, &[k]).map_err(err)?;
        let combinatorial = group_toeplitz_index(&oracle, &g, &[8, 10, 12])
            .map_err(err)?
            .report
            .index;
        let circle = index_by_winding(&FourierSymbol::z_power(k)).map_err(err)?.index;
        ensure(combinatorial == circle, || {
            format!("k = {k}: group {combinatorial}, circle {circle}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sizes = Vec::new();
    for group in [GroupTag::Z, GroupTag::ZdLex(2), GroupTag::B3] {
        let oracle = OrderOracle::new(group).map_err(err)?;
        let ball = GroupBall::build(group, 4).map_err(err)?;
        let elements = ball.elements();
        sizes.push(elements.len());
        for (i, s) in elements.iter().enumerate() {
            for t in &elements[i..] {
                let st = oracle.compare(s, t).map_err(err)?;
                ensure(oracle.compare(t, s).map_err(err)? == st.reverse(), || {
                    format!("{group}: {s}, {t} not antisymmetric")
                })?;
                ensure((st == Ordering::Equal) == word_equal(s, t).map_err(err)?, || {
                    format!("{group}: {s}, {t} not total")
                })?;
            }
        }
        for _ in 0..500 {
            let (r, s, t) = (
                pick(elements, &mut rng),
                pick(elements, &mut rng),
                pick(elements, &mut rng),
            );
            let translated = oracle
                .compare(&r.mul(s).map_err(err)?, &r.mul(t).map_err(err)?)
                .map_err(err)?;
            ensure(oracle.compare(s, t).map_err(err)? == translated, || {
                format!("{group}: not left invariant at {r}, {s}, {t}")
            })?;
        }
        let positive: Vec<GroupWord> = elements
            .iter()
            .filter(|s| oracle.sign(s).map(|x| x > 0).unwrap_or(false))
            .cloned()
            .collect();
        for _ in 0..500 {
            let (s, t) = (pick(&positive, &mut rng), pick(&positive, &mut rng));
            ensure(oracle.sign(&s.mul(t).map_err(err)?).map_err(err)? == 1, || {
                format!("{group}: cone not closed at {s}, {t}")
            })?;
        }
    }
    Ok(format!(
        "Z index = -winding for k = -5..5; order suite on balls of sizes {sizes:?}"
    ))
}

fn braid_evidence() -> Outcome {
    let start = Instant::now();
    let oracle = OrderOracle::new(GroupTag::B3).map_err(err)?;
    let mut lines = Vec::new();
    for (text, k) in [("s1", 1i64), ("s1^-1", -1), ("s1^2", 2), ("s1^-2", -2)] {
        let g = parse_word(GroupTag::B3, text).map_err(err)?;
        // an Err here would mean handle reduction and Burau disagreed
        let r = group_toeplitz_index(&oracle, &g, &[3, 4, 5, 6]).map_err(err)?;
        let table: Vec<String> = r
            .report
            .evidence
            .iter()
            .map(|e| format!("r{}:{}/{}", e.scale, e.kernel_dim, e.cokernel_dim))
            .collect();
        lines.push(format!(
            "{text}: {} (claimed {}), ker/coker {}, {} words checked",
            r.report.index,
            -k,
            table.join(" "),
            r.words_cross_checked
        ));
        ensure(r.words_cross_checked > 0, || {
            format!("{text}: no word was cross-checked")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "reduction and Burau agree on every word ({elapsed:.2?}); {}",
        lines.join("; ")
    ))
}

fn free_hilbert_transform() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let group = GroupTag::FreeGroup(3);
    let ball = GroupBall::build(group, 4).map_err(err)?;
    let probes: Vec<GroupWord> = ["g1", "g2^-1", "g3", "g1 g2", "g2^-1 g3 g1"]
        .iter()
        .map(|t| parse_word(group, t))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mut ranks = Vec::new();
    for pattern in 0..8 {
        let signs = FreeHilbertSigns::random(3, &mut rng);
        let h = free_hilbert(&signs, &ball).map_err(err)?;
        for (s, x) in ball.elements().iter().zip(&h) {
            ensure(s.is_empty() || x * x == 1, || {
                format!("pattern {pattern}: H² ≠ Id at {s}")
            })?;
        }
        let mut pattern_ranks = Vec::new();
        for t in &probes {
            let report = free_hilbert_commutator(&signs, &ball, t).map_err(err)?;
            let m = report.matrix.to_cmatrix();
            let zero = C64::new(0.0, 0.0);
            let monomial = (0..m.cols()).all(|j| (0..m.rows()).filter(|&i| m.get(i, j) != zero).count() <= 1)
                && (0..m.rows()).all(|i| (0..m.cols()).filter(|&j| m.get(i, j) != zero).count() <= 1);
            ensure(monomial, || {
                format!("pattern {pattern}, t = {t}: commutator is not monomial")
            })?;
            pattern_ranks.push(report.rank);
        }
        ranks.push(format!("{signs}: {pattern_ranks:?}"));
    }
    Ok(format!(
        "H² = Id off e at radius 4 over F3; monomial commutators; ranks {}",
        ranks.join(", ")
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 toeplitz index by winding and by sections", toeplitz_routes),
        ("2 odd Chern pairing equals the index", chern_identity),
        ("3 trace formula zero law", calderon_zero_law),
        ("4 s-number axioms", snumber_axioms),
        ("5 Schur pairing vanishes", schur_pairing),
        ("6 ordered groups", ordered_groups),
        ("7 B3 evidence run", braid_evidence),
        ("8 free Hilbert transform", free_hilbert_transform),
    ];
    let mut failed = Vec::new();
    let mut stderr = std::io::stderr();
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let line = match &outcome {
            Ok(detail) => format!("[PASS] criterion {name}: {detail}"),
            Err(reason) => format!("[FAIL] criterion {name}: {reason}"),
        };
        writeln!(stderr, "{line}").unwrap();
        if outcome.is_err() {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
