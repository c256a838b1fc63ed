//! Scenario execution for the CLI: parallel check dispatch with
//! deterministic report assembly, and point-wise evaluation.

use conetheta::jordan::AlgebraElement;
use conetheta::report::{
    CheckRecord, EvaluationRecord, EvaluationReport, ReportMeta, VerificationReport,
};
use conetheta::suite::run_check_kind;
use conetheta::theta::theta_eval;
use rayon::prelude::*;

use crate::scenario::Scenario;

/// Runs the scenario's checks, up to `jobs` kinds concurrently; the report
/// order is fixed by the check list, not by thread timing.
pub fn verify_scenario(scn: &Scenario, jobs: usize) -> VerificationReport {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool builds");
    let mut indexed: Vec<(usize, Vec<CheckRecord>)> = pool.install(|| {
        scn.spec
            .checks
            .par_iter()
            .enumerate()
            .map(|(i, &kind)| {
                let records = match run_check_kind(&scn.rep, &scn.lat, &scn.spec, kind) {
                    Ok(checks) => checks.iter().map(CheckRecord::from_check).collect(),
                    Err(e) => vec![CheckRecord::from_error(kind.name(), &e)],
                };
                (i, records)
            })
            .collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    let records = indexed.into_iter().flat_map(|(_, r)| r).collect();
    let meta = ReportMeta::new(&scn.name, scn.spec.seed, scn.rep.sigma_convention());
    VerificationReport::new(meta, records)
}

/// Evaluates the scenario's explicit points (or seeded samples when none are
/// given); per-point domain errors are recorded, not fatal.
pub fn eval_scenario(scn: &Scenario, tol: f64) -> EvaluationReport {
    let mut points = scn.eval_points.clone();
    if points.is_empty() {
        let mut sampler = conetheta::sampling::PointSampler::<f64>::new(scn.spec.seed);
        for _ in 0..scn.spec.points.min(8) {
            points.push((sampler.tube_point(&scn.rep), sampler.u_point(&scn.rep)));
        }
    }
    let desc = scn.rep.algebra().cloned();
    let evaluations = points
        .iter()
        .map(|(z, u)| {
            let zs: Vec<[f64; 2]> = z.iter().map(|c| [c.re, c.im]).collect();
            let us: Vec<[f64; 2]> = u.iter().map(|c| [c.re, c.im]).collect();
            let result = match &desc {
                Some(d) => AlgebraElement::new(d.clone(), z.clone())
                    .and_then(|ze| theta_eval(&scn.rep, &scn.lat, &ze, u, tol)),
                None => conetheta::theta::theta_eval_coords(&scn.rep, &scn.lat, z, u, tol),
            };
            match result {
                Ok(eval) => EvaluationRecord {
                    z: zs,
                    u: us,
                    value: Some([eval.value.re, eval.value.im]),
                    tail_bound: Some(format!("{:e}", eval.tail_bound)),
                    points_summed: eval.points_summed as u64,
                    radius: eval.radius_used,
                    error: None,
                },
                Err(e) => EvaluationRecord {
                    z: zs,
                    u: us,
                    value: None,
                    tail_bound: None,
                    points_summed: 0,
                    radius: 0.0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    EvaluationReport {
        meta: ReportMeta::new(&scn.name, scn.spec.seed, scn.rep.sigma_convention()),
        tolerance: format!("{tol:e}"),
        evaluations,
    }
}

/// CSV rendering of an evaluation report.
pub fn eval_to_csv(report: &EvaluationReport) -> String {
    let mut out =
        String::from("scenario,value_re,value_im,tail_bound,points_summed,radius,error\n");
    for e in &report.evaluations {
        let (re, im) = match e.value {
            Some([re, im]) => (format!("{re:e}"), format!("{im:e}")),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            report.meta.scenario,
            re,
            im,
            e.tail_bound.clone().unwrap_or_default(),
            e.points_summed,
            e.radius,
            e.error.clone().unwrap_or_default()
        ));
    }
    out
}
