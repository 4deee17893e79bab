//! The three subcommands as plain functions returning reports.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};

use crate::checks::{self, Outcome, Theorem};
use crate::problem::{parse_file, resolve, Problem};
use crate::report::{Body, CorpusBody, CorpusReport, Report, Timing};

/// Flag and environment overrides shared by all subcommands.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub env_tol: Option<f64>,
    pub unitize: Option<bool>,
}

fn input_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn load(path: &Path, ov: Overrides) -> Result<Problem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_file(&text)?;
    resolve(file, ov.tol, ov.env_tol, ov.unitize)
}

fn body(problem: &Problem, input: &str, command: &str, theorem: Option<Theorem>, out: Outcome) -> Body {
    Body {
        input: input.into(),
        kind: problem.file.kind.as_str().into(),
        command: command.into(),
        theorem: theorem.map(|t| t.tag().into()),
        tol: problem.settings.tol,
        dims: out.dims,
        verdicts: out.verdicts,
        witnesses: out.witnesses,
        notes: out.notes,
        error: None,
    }
}

fn error_body(input: &str, kind: &str, command: &str, theorem: Option<Theorem>, tol: f64, err: &anyhow::Error) -> Body {
    Body {
        input: input.into(),
        kind: kind.into(),
        command: command.into(),
        theorem: theorem.map(|t| t.tag().into()),
        tol,
        error: Some(format!("{err:#}")),
        ..Body::default()
    }
}

pub fn derivations(problem: &Problem, input: &str) -> Result<Report> {
    let start = Instant::now();
    let out = checks::derivations(problem)?;
    Ok(Report {
        comparable: body(problem, input, "derivations", None, out),
        timing: Timing {
            wall_ms: vec![("derivations".into(), ms(start))],
        },
    })
}

/// Fails (rather than reporting) when the theorem's hypotheses are not met.
pub fn check(problem: &Problem, input: &str, theorem: Theorem) -> Result<Report> {
    let start = Instant::now();
    let out = checks::check(problem, theorem)?;
    Ok(Report {
        comparable: body(problem, input, "check", Some(theorem), out),
        timing: Timing {
            wall_ms: vec![(theorem.tag().into(), ms(start))],
        },
    })
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Every `*.json` file in `dir` (sorted by name): `derivations` plus every
/// theorem whose hypotheses hold. Unreadable files become error entries.
pub fn corpus(dir: &Path, ov: Overrides) -> Result<CorpusReport> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut c = CorpusBody {
        directory: input_name(dir),
        files: paths.len(),
        ..CorpusBody::default()
    };
    let mut timing = Timing::default();
    let default_tol = ov.tol.or(ov.env_tol).unwrap_or(trolab_core::DEFAULT_TOL);
    for path in &paths {
        let name = input_name(path);
        let start = Instant::now();
        let mut bodies = Vec::new();
        match load(path, ov) {
            Err(e) => bodies.push(error_body(&name, "unknown", "load", None, default_tol, &e)),
            Ok(problem) => {
                let kind = problem.file.kind.as_str();
                let tol = problem.settings.tol;
                bodies.push(match derivations(&problem, &name) {
                    Ok(r) => r.comparable,
                    Err(e) => error_body(&name, kind, "derivations", None, tol, &e),
                });
                for t in Theorem::ALL {
                    if !t.applies_to(&problem.input) {
                        continue;
                    }
                    bodies.push(match check(&problem, &name, t) {
                        Ok(r) => r.comparable,
                        Err(e) => error_body(&name, kind, "check", Some(t), tol, &e),
                    });
                }
            }
        }
        timing.wall_ms.push((name, ms(start)));
        let ok = bodies.iter().all(Body::passed);
        if ok {
            c.passed += 1;
        } else {
            c.failed += 1;
        }
        for b in &bodies {
            let good = b.verdicts.iter().filter(|v| v.pass).count();
            c.verdicts_passed += good;
            c.verdicts_failed += b.verdicts.len() - good + usize::from(b.error.is_some());
        }
        c.reports.extend(bodies);
    }
    Ok(CorpusReport { comparable: c, timing })
}
