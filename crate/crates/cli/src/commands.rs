use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seshadri_core::exact::{parse_rational, QuadraticNumber};
use seshadri_core::region::{
    audit_certificate, large_r_coefficients, verify_large_r, verify_t_bound, BranchConfig, Certificate,
    TBoundOutcome,
};
use seshadri_core::search::{verify_no_counterexample, PairRecord};
use seshadri_core::surface::{rationality_roots, CurveClass};
use seshadri_core::thresholds::{classify, threshold, verify_coverage};
use seshadri_core::Error;

use crate::cache::{cached, config_hash, Cache};
use crate::config::RunConfig;
use crate::error::{CliError, Status};
use crate::report::{
    render_audit, render_classify, render_coverage, render_pairs, render_region, ClassifyReport,
    LargeRReport, PairsReport, RegionReport, RegionResult, SmallPairReport,
};

/// What a command prints and how the process exits.
#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub status: Status,
}

impl Output {
    fn new(stdout: String, status: Status) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            status,
        }
    }
}

/// Small-degree pairs whose `Delta` must be negative once `r >= 20`.
pub const SMALL_PAIRS: [(&str, i64); 5] = [
    ("(2;1^5)", 1),
    ("(3;1^9)", 1),
    ("(4;1^14)", 1),
    ("(3;1^8)", 2),
    ("(4;1^13)", 2),
];

fn cache_of(cfg: &RunConfig) -> Option<Cache> {
    cfg.cache_dir.as_deref().map(Cache::new)
}

/// Runs `f` for every `r` of the configured range on a pool of `parallelism`
/// threads; results keep the order of `r`.
fn per_r<T, F>(cfg: &RunConfig, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(i64) -> Result<T, CliError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CliError::failure(format!("thread pool: {e}")))?;
    let rs = cfg.range().values();
    pool.install(|| rs.par_iter().map(|&r| f(r)).collect::<Vec<_>>())
        .into_iter()
        .collect()
}

fn parse_mu0(text: Option<&str>) -> Result<Option<QuadraticNumber>, CliError> {
    text.map(|s| {
        s.parse::<QuadraticNumber>()
            .map_err(|e| CliError::usage(format!("--mu0: {e}")))
    })
    .transpose()
}

fn require_min_r(cfg: &RunConfig, min: i64) -> Result<(), CliError> {
    if cfg.r_min < min {
        return Err(Error::UnsupportedR(cfg.r_min).into());
    }
    Ok(())
}

fn pairs_report(r: i64, mu0: &QuadraticNumber) -> Result<PairsReport, CliError> {
    let report = verify_no_counterexample(r as usize, mu0)?;
    Ok(PairsReport {
        r,
        mu0: mu0.to_string(),
        all_pass: report.all_pass,
        pairs: report.pairs.iter().map(|(p, v)| PairRecord::new(p, v)).collect(),
        large_r: None,
    })
}

fn large_r_report(r: i64) -> Result<LargeRReport, CliError> {
    let (slope, offset) = large_r_coefficients(r as u64);
    let small_pairs = SMALL_PAIRS
        .iter()
        .map(|&(text, t)| {
            let class = CurveClass::parse_with_width(text, r as usize)?;
            Ok(SmallPairReport {
                class: text.to_string(),
                t,
                delta: rationality_roots(&class, t).0,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(LargeRReport {
        linear_bound_holds: verify_large_r(r)?,
        slope: slope.to_string(),
        offset: offset.to_string(),
        small_pairs_negative: small_pairs.iter().all(|p| p.delta < 0),
        small_pairs,
    })
}

fn mu0_for(r: i64, probe: &Option<QuadraticNumber>) -> Result<QuadraticNumber, CliError> {
    match probe {
        Some(m) => Ok(m.clone()),
        None => Ok(threshold(r)?.mu0),
    }
}

fn collect_pairs(
    cfg: &RunConfig,
    mu0: Option<&str>,
    with_large_r: bool,
) -> Result<Vec<PairsReport>, CliError> {
    require_min_r(cfg, 10)?;
    let probe = parse_mu0(mu0)?;
    let cache = cache_of(cfg);
    let command = if with_large_r { "verify" } else { "pairs" };
    per_r(cfg, |r| {
        let mu0 = mu0_for(r, &probe)?;
        let hash = config_hash(&[("mu0", mu0.to_string())]);
        cached(cache.as_ref(), command, r, &hash, || {
            let mut report = pairs_report(r, &mu0)?;
            if with_large_r && r >= 20 {
                let large = large_r_report(r)?;
                report.all_pass &= large.linear_bound_holds && large.small_pairs_negative;
                report.large_r = Some(large);
            }
            Ok(report)
        })
    })
}

pub fn table(cfg: &RunConfig, mu0: Option<&str>) -> Result<Output, CliError> {
    let reports = collect_pairs(cfg, mu0, false)?;
    let text = render_pairs(&reports, cfg.output_format, cfg.approx, true);
    Ok(Output::new(text, Status::Pass))
}

pub fn enumerate(cfg: &RunConfig, mu0: Option<&str>) -> Result<Output, CliError> {
    let reports = collect_pairs(cfg, mu0, false)?;
    let text = render_pairs(&reports, cfg.output_format, cfg.approx, false);
    Ok(Output::new(text, Status::Pass))
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

pub fn verify(cfg: &RunConfig, mu0: Option<&str>) -> Result<Output, CliError> {
    let reports = collect_pairs(cfg, mu0, true)?;
    if let Some(dir) = &cfg.out_dir {
        for rep in &reports {
            write_json(dir, &format!("verify-r{}.json", rep.r), rep)?;
        }
    }
    let mut stderr = String::new();
    for rep in &reports {
        for p in rep.pairs.iter().filter(|p| !p.outcome.passes()) {
            stderr.push_str(&format!(
                "counterexample at r = {}: {} t = {} M = {} delta = {} mu_minus = {} < mu0 = {}\n",
                rep.r,
                p.class,
                p.t,
                p.total,
                p.delta,
                p.mu_minus.as_deref().unwrap_or("-"),
                rep.mu0
            ));
        }
        if let Some(large) = &rep.large_r {
            if !large.linear_bound_holds {
                stderr.push_str(&format!("linear bound fails at r = {}\n", rep.r));
            }
            for p in large.small_pairs.iter().filter(|p| p.delta >= 0) {
                stderr.push_str(&format!(
                    "r = {}: {} t = {} has delta = {}\n",
                    rep.r, p.class, p.t, p.delta
                ));
            }
        }
    }
    let status = if reports.iter().all(|r| r.all_pass) {
        Status::Pass
    } else {
        Status::Failure
    };
    Ok(Output {
        stdout: render_pairs(&reports, cfg.output_format, cfg.approx, false),
        stderr,
        status,
    })
}

pub fn region(cfg: &RunConfig, r: i64, t0: i64) -> Result<Output, CliError> {
    let branch = BranchConfig {
        max_depth: cfg.bisection_depth,
        sqrt_width_exponent: cfg.sqrt_width_exponent,
    };
    let hash = config_hash(&[
        ("t0", t0.to_string()),
        ("depth", branch.max_depth.to_string()),
        ("sqrt_width_exponent", branch.sqrt_width_exponent.to_string()),
    ]);
    let cache = cache_of(cfg);
    let result = cached(cache.as_ref(), &format!("region-t{t0}"), r, &hash, || {
        Ok(match verify_t_bound(r, t0, &branch)? {
            TBoundOutcome::Certified(c) => RegionResult {
                certificate: Some(c),
                refutation: None,
            },
            TBoundOutcome::Refuted(x) => RegionResult {
                certificate: None,
                refutation: Some(x),
            },
        })
    })?;
    let mut report = RegionReport {
        r,
        t0,
        status: "refuted".into(),
        depth: None,
        leaves: None,
        certificate_file: None,
        refutation: result.refutation.clone(),
    };
    if let Some(cert) = &result.certificate {
        let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let path = write_json(&dir, &format!("certificate-r{r}-t{t0}.json"), cert)?;
        report.status = "certified".into();
        report.depth = Some(cert.root.depth());
        report.leaves = Some(cert.root.leaves());
        report.certificate_file = Some(path.display().to_string());
    }
    let status = if result.certificate.is_some() {
        Status::Pass
    } else {
        Status::Failure
    };
    Ok(Output::new(render_region(&report, cfg.output_format), status))
}

pub fn classify_cmd(cfg: &RunConfig, r: i64, mu: &str) -> Result<Output, CliError> {
    let mu = parse_rational(mu).map_err(|e| CliError::usage(format!("--mu: {e}")))?;
    let report = ClassifyReport::from(&classify(r, &mu)?);
    Ok(Output::new(
        render_classify(&report, cfg.output_format, cfg.approx),
        Status::Pass,
    ))
}

pub fn coverage(cfg: &RunConfig) -> Result<Output, CliError> {
    require_min_r(cfg, 1)?;
    let reports = per_r(cfg, |r| Ok(verify_coverage(r)))?;
    let status = if reports.iter().any(|r| r.target.is_none()) {
        Status::Inconclusive
    } else if reports.iter().all(|r| r.covered) {
        Status::Pass
    } else {
        Status::Failure
    };
    Ok(Output::new(render_coverage(&reports, cfg.output_format), status))
}

pub fn audit(cfg: &RunConfig, path: &Path) -> Result<Output, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let cert: Certificate = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{} is not a certificate: {e}", path.display())))?;
    let report = audit_certificate(&cert)?;
    let status = if report.valid {
        Status::Pass
    } else {
        Status::Failure
    };
    Ok(Output::new(render_audit(&report, cfg.output_format), status))
}
