//! Report records and their json, csv and markdown renderings. Numbers are exact
//! strings; `--approx` adds decimal hints next to irrational values.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use seshadri_core::exact::QuadraticNumber;
use seshadri_core::region::{AuditReport, Certificate, Refutation};
use seshadri_core::search::PairRecord;
use seshadri_core::thresholds::{Classification, CoverageReport, VerdictKind};

use crate::config::Format;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallPairReport {
    pub class: String,
    pub t: i64,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargeRReport {
    pub linear_bound_holds: bool,
    pub slope: String,
    pub offset: String,
    pub small_pairs: Vec<SmallPairReport>,
    pub small_pairs_negative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairsReport {
    pub r: i64,
    pub mu0: String,
    pub all_pass: bool,
    pub pairs: Vec<PairRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub large_r: Option<LargeRReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionResult {
    pub certificate: Option<Certificate>,
    pub refutation: Option<Refutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionReport {
    pub r: i64,
    pub t0: i64,
    pub status: String,
    pub depth: Option<u32>,
    pub leaves: Option<usize>,
    pub certificate_file: Option<String>,
    pub refutation: Option<Refutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub class: String,
    pub t: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub r: i64,
    pub mu: String,
    pub verdict: String,
    pub witness: Option<Witness>,
    pub mu0: String,
    pub below_threshold: bool,
    pub self_intersection: String,
    pub self_intersection_is_square: bool,
    pub sqrt_self_intersection: Option<String>,
    pub conditional_on_conjecture: bool,
}

impl From<&Classification> for ClassifyReport {
    fn from(c: &Classification) -> Self {
        let (verdict, witness, root) = match &c.verdict {
            VerdictKind::RationalWithWitness { class, t } => (
                "RationalWithWitness",
                Some(Witness {
                    class: class.to_string(),
                    t: *t,
                }),
                None,
            ),
            VerdictKind::RationalSqrt { root } => ("RationalSqrt", None, Some(root.to_string())),
            VerdictKind::ConditionallyIrrational => ("ConditionallyIrrational", None, None),
        };
        Self {
            r: c.r,
            mu: c.mu.to_string(),
            verdict: verdict.to_string(),
            witness,
            mu0: c.mu0.to_string(),
            below_threshold: c.below_threshold,
            self_intersection: c.self_intersection.to_string(),
            self_intersection_is_square: c.self_intersection_is_square,
            sqrt_self_intersection: root,
            conditional_on_conjecture: c.conditional_on_conjecture,
        }
    }
}

fn approx(s: &str) -> String {
    s.parse::<QuadraticNumber>()
        .map(|q| q.approx(6))
        .unwrap_or_default()
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 fields")
}

fn markdown(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out.push_str(&format!(
        "|{}\n",
        header.iter().map(|_| "---|").collect::<String>()
    ));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn outcome_name(p: &PairRecord) -> String {
    match serde_json::to_value(p.outcome) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

/// Pair reports. `five_column` keeps exactly the columns C, t, M, Delta, mu_-.
pub fn render_pairs(
    reports: &[PairsReport],
    format: Format,
    approx_hints: bool,
    five_column: bool,
) -> String {
    match format {
        Format::Json => {
            let mut value = serde_json::to_value(reports).expect("reports serialize");
            if approx_hints {
                for report in value.as_array_mut().into_iter().flatten() {
                    for pair in report["pairs"].as_array_mut().into_iter().flatten() {
                        let hint = pair["mu_minus"].as_str().map(approx);
                        pair["mu_minus_approx"] = hint.map(Value::String).unwrap_or(Value::Null);
                    }
                }
            }
            json(&value)
        }
        Format::Csv => {
            let mut header = vec!["r", "class", "t", "M", "delta", "mu_minus"];
            if approx_hints {
                header.push("mu_minus_approx");
            }
            header.push("outcome");
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|rep| {
                    rep.pairs.iter().map(move |p| {
                        let mu = p.mu_minus.clone().unwrap_or_default();
                        let mut row = vec![rep.r.to_string(), p.class.clone(), p.t.to_string()];
                        row.extend([p.total.to_string(), p.delta.to_string(), mu.clone()]);
                        if approx_hints {
                            row.push(p.mu_minus.as_deref().map(approx).unwrap_or_default());
                        }
                        row.push(outcome_name(p));
                        row
                    })
                })
                .collect();
            csv(&header, &rows)
        }
        Format::Markdown => {
            let mut out = String::new();
            for rep in reports {
                let mut header = vec!["C", "t", "M", "Δ", "μ₋"];
                if approx_hints {
                    header.push("μ₋ ≈");
                }
                if !five_column {
                    header.push("outcome");
                }
                let rows: Vec<Vec<String>> = rep
                    .pairs
                    .iter()
                    .map(|p| {
                        let mu = p.mu_minus.clone().unwrap_or_default();
                        let mut row = vec![p.class.clone(), p.t.to_string(), p.total.to_string()];
                        row.extend([p.delta.to_string(), mu]);
                        if approx_hints {
                            row.push(p.mu_minus.as_deref().map(approx).unwrap_or_default());
                        }
                        if !five_column {
                            row.push(outcome_name(p));
                        }
                        row
                    })
                    .collect();
                out.push_str(&format!("### r = {} (mu0 = {})\n\n", rep.r, rep.mu0));
                out.push_str(&markdown(&header, &rows));
                if let Some(large) = &rep.large_r {
                    out.push_str(&format!(
                        "\nlinear bound: {} (slope {}, offset {}); small pairs negative: {}\n",
                        large.linear_bound_holds, large.slope, large.offset, large.small_pairs_negative
                    ));
                }
                if !five_column {
                    out.push_str(&format!("\nall pass: {}\n", rep.all_pass));
                }
                out.push('\n');
            }
            out
        }
    }
}

fn key_values(format: Format, value: &impl Serialize, pairs: Vec<(&str, String)>) -> String {
    match format {
        Format::Json => json(value),
        Format::Csv => csv(
            &pairs.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
            &[pairs.iter().map(|(_, v)| v.clone()).collect()],
        ),
        Format::Markdown => markdown(
            &["field", "value"],
            &pairs
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), v])
                .collect::<Vec<_>>(),
        ),
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn render_region(report: &RegionReport, format: Format) -> String {
    let witness = report
        .refutation
        .as_ref()
        .map(|x| format!("Q({}, {}) in {} at mu = {}", x.m_bar, report.t0, x.q, x.mu))
        .unwrap_or_default();
    key_values(
        format,
        report,
        vec![
            ("r", report.r.to_string()),
            ("t0", report.t0.to_string()),
            ("status", report.status.clone()),
            ("depth", opt(&report.depth)),
            ("leaves", opt(&report.leaves)),
            ("certificate_file", opt(&report.certificate_file)),
            ("refutation", witness),
        ],
    )
}

pub fn render_classify(report: &ClassifyReport, format: Format, approx_hints: bool) -> String {
    let mut fields = vec![
        ("r", report.r.to_string()),
        ("mu", report.mu.clone()),
        ("verdict", report.verdict.clone()),
        (
            "witness",
            report
                .witness
                .as_ref()
                .map(|w| format!("{} t={}", w.class, w.t))
                .unwrap_or_default(),
        ),
        ("mu0", report.mu0.clone()),
        ("below_threshold", report.below_threshold.to_string()),
        ("self_intersection", report.self_intersection.clone()),
        (
            "self_intersection_is_square",
            report.self_intersection_is_square.to_string(),
        ),
        ("sqrt_self_intersection", opt(&report.sqrt_self_intersection)),
        (
            "conditional_on_conjecture",
            report.conditional_on_conjecture.to_string(),
        ),
    ];
    if approx_hints {
        fields.push(("mu0_approx", approx(&report.mu0)));
    }
    if approx_hints && format == Format::Json {
        let mut value = serde_json::to_value(report).expect("reports serialize");
        value["mu0_approx"] = Value::String(approx(&report.mu0));
        return json(&value);
    }
    key_values(format, report, fields)
}

pub fn render_coverage(reports: &[CoverageReport], format: Format) -> String {
    match format {
        Format::Json => json(&reports),
        _ => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|rep| {
                    let links = rep.chain.iter().map(move |l| {
                        vec![
                            rep.r.to_string(),
                            l.class.to_string(),
                            l.t.to_string(),
                            l.interval.to_string(),
                            String::new(),
                        ]
                    });
                    let gaps = rep.gaps.iter().map(move |g| {
                        vec![
                            rep.r.to_string(),
                            String::new(),
                            String::new(),
                            String::new(),
                            g.clone(),
                        ]
                    });
                    links.chain(gaps)
                })
                .collect();
            let header = ["r", "class", "t", "interval", "gap"];
            let summary: String = reports
                .iter()
                .map(|rep| {
                    let target = rep
                        .target
                        .as_ref()
                        .map(ToString::to_string)
                        .unwrap_or_else(|| "none".into());
                    format!("r = {}: target {}, covered {}\n", rep.r, target, rep.covered)
                })
                .collect();
            match format {
                Format::Csv => csv(&header, &rows),
                _ => format!("{}\n{summary}", markdown(&header, &rows)),
            }
        }
    }
}

pub fn render_audit(report: &AuditReport, format: Format) -> String {
    key_values(
        format,
        report,
        vec![
            ("r", report.r.to_string()),
            ("t0", report.t0.to_string()),
            ("valid", report.valid.to_string()),
            ("leaves", report.leaves.to_string()),
            ("depth", report.depth.to_string()),
            ("problems", report.problems.join("; ")),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_classes() {
        let text = csv(&["class", "t"], &[vec!["(4;2,1^11)".into(), "1".into()]]);
        assert_eq!(text, "class,t\n\"(4;2,1^11)\",1\n");
    }

    #[test]
    fn markdown_shape() {
        let table = markdown(&["a", "b"], &[vec!["1".into(), "2".into()]]);
        assert_eq!(table, "| a | b |\n|---|---|\n| 1 | 2 |\n");
    }
}
