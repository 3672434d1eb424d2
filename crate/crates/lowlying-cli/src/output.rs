//! CSV rendering. Numbers use Rust's shortest round-trip formatting, which is
//! locale independent; absent values are empty cells.

use crate::commands::ReportData;

struct Table {
    notes: Vec<String>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn table(data: &ReportData) -> Table {
    let mut notes = Vec::new();
    let (header, rows): (Vec<&'static str>, Vec<Vec<String>>) = match data {
        ReportData::Kloosterman(rows) => (
            vec!["m", "n", "c", "value", "weil_bound"],
            rows.iter()
                .map(|r| vec![r.m.to_string(), r.n.to_string(), r.c.to_string(), num(r.value), num(r.weil_bound)])
                .collect(),
        ),
        ReportData::TwistedSum(rows) => (
            vec!["n", "c", "enumerated", "closed_form", "agrees"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.c.to_string(),
                        num(r.enumerated),
                        r.closed_form.to_string(),
                        r.agrees.to_string(),
                    ]
                })
                .collect(),
        ),
        ReportData::BesselCheck(rows) => (
            vec!["L", "x", "lhs", "rhs", "residual", "series"],
            rows.iter()
                .map(|r| {
                    let series = match r.kind {
                        lowlying::specfun::SeriesKind::Residue(a) => format!("residue-{a}"),
                        lowlying::specfun::SeriesKind::Alternating => "alternating".to_owned(),
                    };
                    vec![num(r.l), num(r.x), num(r.lhs), num(r.rhs), num(r.residual), series]
                })
                .collect(),
        ),
        ReportData::Eigen(forms) => (
            vec!["form", "k", "sign", "l1_sym2", "n", "lambda"],
            forms
                .iter()
                .enumerate()
                .flat_map(|(i, f)| {
                    f.lambdas.iter().enumerate().map(move |(j, l)| {
                        vec![i.to_string(), f.k.to_string(), f.sign.to_string(), num(f.l1_sym2), (j + 1).to_string(), num(*l)]
                    })
                })
                .collect(),
        ),
        ReportData::Petersson(rows) => (
            vec!["k_or_N", "m", "n", "lhs", "rhs", "residual", "truncation_bound", "cmax"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.k_or_n.to_string(),
                        r.m.to_string(),
                        r.n.to_string(),
                        opt(r.lhs),
                        num(r.rhs),
                        opt(r.residual),
                        num(r.truncation_bound),
                        r.cmax.to_string(),
                    ]
                })
                .collect(),
        ),
        ReportData::Density(r) => (
            vec!["family", "phi", "class", "route", "mass", "arch", "diag", "lambda_p", "lambda_p2", "higher", "total", "prediction"],
            vec![vec![
                r.family.clone(),
                r.testfn.clone(),
                r.class.to_string(),
                format!("{:?}", r.route).to_lowercase(),
                num(r.mass),
                num(r.terms.arch),
                num(r.terms.diag),
                num(r.terms.lambda_p),
                num(r.terms.lambda_p2),
                num(r.terms.higher),
                num(r.statistic),
                num(r.prediction),
            ]],
        ),
        ReportData::Hyp4(t) => {
            if let Some(fit) = &t.fit {
                notes.push(format!(
                    "fit exponent={} sigma={} intercept={} rms_residual={} points={}",
                    num(fit.exponent),
                    num(fit.sigma),
                    num(fit.intercept),
                    num(fit.rms_residual),
                    fit.points
                ));
            }
            (
                vec!["X", "re", "im", "modulus", "running_max", "abel_re", "abel_im"],
                (0..t.grid.len())
                    .map(|i| {
                        vec![
                            num(t.grid[i]),
                            num(t.re[i]),
                            num(t.im[i]),
                            num(t.values[i]),
                            num(t.running_max[i]),
                            opt(t.abel_re.get(i).copied()),
                            opt(t.abel_im.get(i).copied()),
                        ]
                    })
                    .collect(),
            )
        }
        ReportData::Predict(p) => (
            vec!["class", "value", "space", "fourier", "discrepancy"],
            vec![vec![p.class.to_string(), num(p.value()), num(p.space), num(p.fourier), num(p.discrepancy())]],
        ),
        ReportData::Rmt(r) => {
            let h = &r.histogram;
            notes.push(format!(
                "samples={} max_residual={} forced_one={}/{}",
                h.samples,
                num(r.max_residual),
                r.forced_one,
                r.odd_samples
            ));
            (
                vec!["bin_lo", "bin_hi", "empirical", "predicted", "stderr"],
                (0..h.density.len())
                    .map(|i| vec![num(h.edges[i]), num(h.edges[i + 1]), num(h.density[i]), num(h.predicted[i]), num(h.stderr[i])])
                    .collect(),
            )
        }
        ReportData::Extremal(rows) => (
            vec!["class", "radius", "grid", "alpha", "closed_form", "residual", "closed_form_residual", "extrapolated"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.class.to_string(),
                        num(r.radius),
                        r.grid.to_string(),
                        num(r.alpha),
                        opt(r.closed_form),
                        num(r.residual),
                        opt(r.closed_form_residual),
                        opt(r.extrapolated),
                    ]
                })
                .collect(),
        ),
        ReportData::Nonvanishing(rows) => (
            vec!["class", "alpha_source", "proportion_bound", "order_bound"],
            rows.iter()
                .map(|r| {
                    let class = serde_json::to_value(r.class).unwrap().as_str().unwrap_or_default().to_owned();
                    vec![class, r.alpha.to_string(), opt(r.result.proportion_bound), opt(r.result.order_bound)]
                })
                .collect(),
        ),
    };
    Table { notes, header, rows }
}

/// Quote a cell when it holds a separator, quote or line break.
fn cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// `# ` lines (the header record and any notes), then the CSV table.
pub fn render_csv(header_record: &str, data: &ReportData) -> String {
    let t = table(data);
    let mut out = format!("# {header_record}\n");
    for n in &t.notes {
        out.push_str(&format!("# {n}\n"));
    }
    out.push_str(&t.header.join(","));
    out.push('\n');
    for r in &t.rows {
        let cells: Vec<String> = r.iter().map(|c| cell(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
