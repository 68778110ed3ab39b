use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::render::{Outcome, Status, Table};
use super::{
    ChernArgs, Command, EdgesArg, FreeHilbertArgs, GroupIndexArgs, RouteArg, SchurArgs, Settings, SnumbersArgs,
    ToeplitzArgs,
};
use crate::chern::chern_odd_circle;
use crate::circle::FourierSymbol;
use crate::error::{Error, Result};
use crate::fredholm::{
    index_by_winding, routes_agree, toeplitz_index_by_stabilization, Edges, IndexReport, IndexValue,
    StabilizationConfig,
};
use crate::groups::{
    free_hilbert, free_hilbert_commutator, group_toeplitz_index, parse_word, FreeHilbertSigns, GroupBall, GroupTag,
    OrderOracle,
};
use crate::linalg::{operator_pnorm, CMatrix, PNormContext};
use crate::schur::{f_operator, schur_pairing_table};
use crate::snumbers::{approx_numbers, lq_norm, weyl_eigenvalue_check, weyl_numbers_estimate};

pub(super) fn dispatch(command: &Command, settings: &Settings) -> Result<Outcome> {
    let parameters = serde_json::to_value(command)?;
    let mut outcome = match command {
        Command::ToeplitzIndex(a) => toeplitz_index(a, settings)?,
        Command::Chern(a) => chern(a)?,
        Command::Schur(a) => schur(a, settings)?,
        Command::GroupIndex(a) => group_index(a)?,
        Command::Snumbers(a) => snumbers(a, settings)?,
        Command::FreeHilbert(a) => free_hilbert_cmd(a, settings)?,
        Command::Selftest => selftest(settings),
    };
    outcome.parameters = if parameters.is_null() { json!({}) } else { parameters };
    Ok(outcome)
}

fn outcome(command: &'static str, result: Value, status: Status, table: Table, summary: Vec<String>) -> Outcome {
    Outcome {
        command,
        parameters: Value::Null,
        result,
        status,
        table,
        summary,
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.6e}")
}

fn evidence_rows(table: &mut Table, label: &str, report: &IndexReport) {
    for e in &report.evidence {
        table.push(vec![
            label.to_string(),
            e.scale.to_string(),
            e.kernel_dim.to_string(),
            e.cokernel_dim.to_string(),
            e.raw_kernel_dim.to_string(),
            e.raw_cokernel_dim.to_string(),
            e.index().to_string(),
        ]);
    }
}

fn toeplitz_index(a: &ToeplitzArgs, settings: &Settings) -> Result<Outcome> {
    let f: FourierSymbol = a.symbol.parse()?;
    if a.routes.is_empty() {
        return Err(Error::invalid("at least one route is required"));
    }
    let mut reports = Vec::new();
    let mut result = serde_json::Map::new();
    result.insert("symbol".into(), serde_json::to_value(&f)?);
    let mut table = Table::new(&[
        "route",
        "scale",
        "kernel",
        "cokernel",
        "raw_kernel",
        "raw_cokernel",
        "index",
    ]);
    let mut summary = Vec::new();
    let mut routes = a.routes.clone();
    routes.dedup();
    for route in routes {
        let report = match route {
            RouteArg::Winding => {
                let r = index_by_winding(&f)?;
                let w = r.winding.expect("winding route records its winding number");
                table.push(vec![
                    "winding".into(),
                    w.samples.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    r.index.to_string(),
                ]);
                summary.push(format!(
                    "winding {} (min |f| = {:.3e}), index {}",
                    w.winding, w.min_modulus, r.index
                ));
                result.insert("winding".into(), serde_json::to_value(&r)?);
                r
            }
            RouteArg::Stabilize => {
                let bw = f.bandwidth();
                let mut config = StabilizationConfig::for_symbol(bw, bw);
                config.boundary_margin = a.margin.unwrap_or(config.boundary_margin);
                config.rank_tolerance = settings.rank_tolerance;
                config.mass_threshold = settings.mass_threshold;
                config.edges = match a.edges {
                    EdgesArg::Leading => Edges::Leading,
                    EdgesArg::Trailing => Edges::Trailing,
                    EdgesArg::Both => Edges::Both,
                };
                let r = toeplitz_index_by_stabilization(&f, &a.scales, &config)?;
                evidence_rows(&mut table, "stabilize", &r);
                summary.push(format!(
                    "finite sections (margin {}), index {}",
                    config.boundary_margin, r.index
                ));
                result.insert("stabilization".into(), serde_json::to_value(&r)?);
                r
            }
        };
        reports.push(report);
    }
    let agree = routes_agree(&reports);
    result.insert("agree".into(), agree.into());
    result.insert(
        "index".into(),
        serde_json::to_value(if agree {
            reports[0].index
        } else {
            IndexValue::NonStabilizing
        })?,
    );
    let status = if reports.iter().any(|r| r.index == IndexValue::NonStabilizing) {
        Status::NonStabilizing("finite-section counts did not settle over the last three scales".into())
    } else if !agree {
        let values: Vec<String> = reports.iter().map(|r| format!("{} = {}", r.route, r.index)).collect();
        Status::Disagreement(format!("routes disagree: {}", values.join(", ")))
    } else {
        Status::Ok
    };
    Ok(outcome("toeplitz-index", Value::Object(result), status, table, summary))
}

fn chern(a: &ChernArgs) -> Result<Outcome> {
    let u: FourierSymbol = a.u.parse()?;
    if a.n % 2 == 0 {
        return Err(Error::invalid(format!(
            "the circle carries an odd module; n = {} must be odd",
            a.n
        )));
    }
    let eval = chern_odd_circle(&u, a.n)?;
    let winding = index_by_winding(&u)?;
    let status = match (eval.nearest_integer, winding.index) {
        (Some(c), IndexValue::Stable(w)) if c == w => Status::Ok,
        (c, w) => Status::Disagreement(format!(
            "Chern pairing {} against winding index {w}",
            c.map_or("non-integral".to_string(), |c| c.to_string())
        )),
    };
    let mut table = Table::new(&[
        "n",
        "raw_trace_re",
        "raw_trace_im",
        "normalization",
        "predicted_re",
        "predicted_im",
        "nearest_integer",
        "winding_index",
    ]);
    table.push(vec![
        a.n.to_string(),
        fmt_f64(eval.raw_trace.re),
        fmt_f64(eval.raw_trace.im),
        fmt_f64(eval.normalization),
        fmt_f64(eval.predicted_index.re),
        fmt_f64(eval.predicted_index.im),
        eval.nearest_integer.map_or(String::new(), |c| c.to_string()),
        winding.index.to_string(),
    ]);
    let summary = vec![format!(
        "tr(F (du^-1 du)^N) = {:.12}, predicted index {:.12}",
        eval.raw_trace.re, eval.predicted_index.re
    )];
    let result = json!({
        "evaluation": eval,
        "winding_index": winding.index,
    });
    Ok(outcome("chern", result, status, table, summary))
}

fn schur(a: &SchurArgs, settings: &Settings) -> Result<Outcome> {
    if a.trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let rows = schur_pairing_table(a.n, a.trials, settings.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let x = CMatrix::random(a.n, a.n, &mut rng);
    let f_squared_is_identity = f_operator(&f_operator(&x)?)? == x;
    let mut table = Table::new(&["trial", "n", "condition", "rank", "kernel", "cokernel", "index"]);
    for r in &rows {
        table.push(vec![
            r.trial.to_string(),
            r.n.to_string(),
            fmt_f64(r.condition_number),
            r.rank.to_string(),
            r.kernel_dim.to_string(),
            r.cokernel_dim.to_string(),
            r.index.to_string(),
        ]);
    }
    let nonzero: Vec<usize> = rows.iter().filter(|r| r.index != 0).map(|r| r.trial).collect();
    let status = if !f_squared_is_identity {
        Status::Disagreement("F² differs from the identity".into())
    } else if !nonzero.is_empty() {
        Status::Disagreement(format!("nonzero index in trials {nonzero:?}"))
    } else {
        Status::Ok
    };
    let summary = vec![format!(
        "{} trials at n = {}: all indices zero = {}, F² = Id = {f_squared_is_identity}",
        rows.len(),
        a.n,
        nonzero.is_empty()
    )];
    let result = json!({
        "f_squared_is_identity": f_squared_is_identity,
        "all_zero": nonzero.is_empty(),
        "rows": rows,
    });
    Ok(outcome("schur", result, status, table, summary))
}

fn group_index(a: &GroupIndexArgs) -> Result<Outcome> {
    let group: GroupTag = a.group.parse()?;
    let g = parse_word(group, &a.element)?;
    let mut oracle = OrderOracle::new(group)?;
    if let Some(b) = a.budget {
        oracle = oracle.with_budget(b);
    }
    let report = group_toeplitz_index(&oracle, &g, &a.radii)?;
    let mut table = Table::new(&["radius", "ball_size", "kernel", "cokernel", "index"]);
    for (e, &(_, size)) in report.report.evidence.iter().zip(&report.ball_sizes) {
        table.push(vec![
            e.scale.to_string(),
            size.to_string(),
            e.kernel_dim.to_string(),
            e.cokernel_dim.to_string(),
            e.index().to_string(),
        ]);
    }
    let status = match (report.report.index, a.expect) {
        (IndexValue::NonStabilizing, _) => {
            Status::NonStabilizing(format!("counts for `{g}` change across the last three radii"))
        }
        (IndexValue::Stable(v), Some(x)) if v != x => Status::Disagreement(format!("index {v}, expected {x}")),
        _ => Status::Ok,
    };
    let mut summary = vec![format!("{group} element `{g}`: index {}", report.report.index)];
    if group == GroupTag::B3 {
        summary.push(format!(
            "{} words cross-checked against the Burau matrix",
            report.words_cross_checked
        ));
    }
    let result = json!({
        "index": report.report.index,
        "expected": a.expect,
        "report": report,
    });
    Ok(outcome("group-index", result, status, table, summary))
}

fn parse_exponent(text: &str) -> Result<f64> {
    let p = match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        other => other
            .parse()
            .map_err(|_| Error::Parse(format!("p = `{text}` is neither a number nor `inf`")))?,
    };
    PNormContext::new(p)?;
    Ok(p)
}

fn exponent_label(p: f64) -> String {
    if p == f64::INFINITY {
        "inf".into()
    } else {
        p.to_string()
    }
}

fn snumbers(a: &SnumbersArgs, settings: &Settings) -> Result<Outcome> {
    let t = super::read_matrix(&a.matrix)?;
    let p = parse_exponent(&a.p)?;
    if !(a.q > 0.0) {
        return Err(Error::invalid(format!("q = {} must be positive", a.q)));
    }
    let ctx = PNormContext::new(p)?.with_seed(settings.seed);
    let approx = approx_numbers(&t, &ctx)?;
    let norm = operator_pnorm(&t, &ctx)?;
    let sqapp = lq_norm(&approx.values, a.q)?;
    let weyl = weyl_numbers_estimate(&t, &ctx, a.weyl_samples.max(1))?;
    let weyl_check = if t.is_square() {
        Some(weyl_eigenvalue_check(&t, a.q, &ctx)?)
    } else {
        None
    };
    let mut table = Table::new(&["n", "approximation_number", "weyl_lower_bound"]);
    for (i, x) in approx.values.iter().enumerate() {
        table.push(vec![
            (i + 1).to_string(),
            fmt_f64(*x),
            weyl.values.get(i).map_or(String::new(), |w| fmt_f64(*w)),
        ]);
    }
    let summary = vec![
        format!("{}x{} matrix on l^{}", t.rows(), t.cols(), exponent_label(p)),
        format!(
            "operator norm {} ({:?}), S^{}_app norm {}",
            fmt_f64(norm.value),
            norm.certainty,
            a.q,
            fmt_f64(sqapp)
        ),
    ];
    let result = json!({
        "p": exponent_label(p),
        "q": a.q,
        "shape": [t.rows(), t.cols()],
        "operator_norm": norm,
        "approximation_numbers": { "values": approx.values, "certainty": approx.certainty },
        "sqapp_norm": sqapp,
        "weyl_numbers": { "values": weyl.values, "certainty": weyl.certainty },
        "weyl_eigenvalue_check": weyl_check,
    });
    Ok(outcome("snumbers", result, Status::Ok, table, summary))
}

fn free_hilbert_cmd(a: &FreeHilbertArgs, settings: &Settings) -> Result<Outcome> {
    let signs = match (&a.signs, a.random_signs) {
        (Some(s), _) => s.parse::<FreeHilbertSigns>()?,
        (None, Some(k)) if k > 0 => FreeHilbertSigns::random(k, &mut ChaCha8Rng::seed_from_u64(settings.seed)),
        _ => return Err(Error::invalid("give --signs or a positive --random-signs")),
    };
    let group = GroupTag::FreeGroup(signs.generators());
    let t = parse_word(group, &a.t)?;
    let ball = GroupBall::build(group, a.radius)?;
    let h = free_hilbert(&signs, &ball)?;
    let h_squared_identity_off_e = h[1..].iter().all(|x| x * x == 1) && h[0] == 0;
    let report = free_hilbert_commutator(&signs, &ball, &t)?;
    let monomial = report.matrix.is_monomial();
    let mut table = Table::new(&["coefficient", "count"]);
    for (k, count) in &report.coefficients {
        table.push(vec![k.to_string(), count.to_string()]);
    }
    let status = if h_squared_identity_off_e && monomial {
        Status::Ok
    } else {
        Status::Disagreement("H² or the monomial structure failed".into())
    };
    let summary = vec![
        format!(
            "signs {signs} on the radius-{} ball of {group} ({} elements)",
            a.radius,
            ball.len()
        ),
        format!(
            "H² = Id off e: {h_squared_identity_off_e}; commutator with `{t}` monomial: {monomial}, rank {}",
            report.rank
        ),
    ];
    let result = json!({
        "signs": signs,
        "ball_size": ball.len(),
        "h_squared_identity_off_e": h_squared_identity_off_e,
        "monomial": monomial,
        "commutator": report,
    });
    Ok(outcome("free-hilbert", result, status, table, summary))
}

fn selftest(settings: &Settings) -> Outcome {
    let checks = crate::selftest::run(settings.seed);
    let mut table = Table::new(&["check", "passed", "detail"]);
    for c in &checks {
        table.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let status = if failed.is_empty() {
        Status::Ok
    } else {
        Status::Disagreement(format!("failed: {}", failed.join(", ")))
    };
    let summary = vec![format!(
        "{} of {} checks passed",
        checks.len() - failed.len(),
        checks.len()
    )];
    let result = json!({ "passed": failed.is_empty(), "checks": checks });
    outcome("selftest", result, status, table, summary)
}
