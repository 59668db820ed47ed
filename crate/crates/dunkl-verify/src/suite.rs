//! Suite runner: build each configured context once, fan the selected
//! checks out over a thread pool, and collect the report rows in a
//! deterministic order (job order, then registry order).

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use dunkl_core::root_system::{
    DunklContext, Family, MultiplicityFunction, RootSystem, RootSystemError,
};

use crate::checks::{self, SuiteEnv};
use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{summarize, Report, Summary};
use crate::testfn::FunctionSpec;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("job {job} ({family}): {source}")]
    Context {
        job: usize,
        family: String,
        source: RootSystemError,
    },
}

pub struct SuiteOutcome {
    pub reports: Vec<Report>,
    pub lines: Vec<String>,
    pub summary: Summary,
    pub elapsed: Duration,
}

struct JobRuntime {
    ctx: DunklContext,
    functions: Vec<FunctionSpec>,
    check_indices: Vec<usize>,
}

/// Build the job's context with exact rational multiplicities (a single
/// entry broadcasts across orbits, mirroring the float constructor).
pub fn build_context(
    family: &str,
    rank: Option<usize>,
    k: &[String],
) -> Result<DunklContext, RootSystemError> {
    let fam = Family::parse(family, rank)?;
    let system = RootSystem::build(&fam)?;
    let strs: Vec<&str> = if k.len() == 1 && system.num_orbits() > 1 {
        vec![k[0].as_str(); system.num_orbits()]
    } else {
        k.iter().map(String::as_str).collect()
    };
    let mult = MultiplicityFunction::parse(&strs)?;
    DunklContext::new(system, mult)
}

pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteOutcome, SuiteError> {
    cfg.validate()?;
    let started = Instant::now();
    let registry = checks::builtin_checks();
    let id_to_index: Vec<&'static str> = registry.iter().map(|c| c.id()).collect();

    let mut jobs: Vec<JobRuntime> = Vec::with_capacity(cfg.jobs.len());
    for (j, job) in cfg.jobs.iter().enumerate() {
        let ctx =
            build_context(&job.family, job.rank, &job.k).map_err(|source| SuiteError::Context {
                job: j,
                family: job.family.clone(),
                source,
            })?;
        let check_indices: Vec<usize> = job
            .resolved_checks()
            .iter()
            .map(|id| {
                id_to_index
                    .iter()
                    .position(|known| known == id)
                    .expect("validated ids resolve")
            })
            .collect();
        jobs.push(JobRuntime {
            ctx,
            functions: job.functions.clone().unwrap_or_default(),
            check_indices,
        });
    }

    let units: Vec<(usize, usize)> = jobs
        .iter()
        .enumerate()
        .flat_map(|(j, job)| job.check_indices.iter().map(move |&c| (j, c)))
        .collect();

    let levels = cfg.levels.to_levels();
    let nested: Vec<Vec<Report>> = units
        .par_iter()
        .map(|&(j, c)| {
            let job = &jobs[j];
            let env = SuiteEnv {
                ctx: &job.ctx,
                levels,
                seed: cfg.seed,
                job_index: j,
                functions: &job.functions,
            };
            let check = &registry[c];
            let t0 = Instant::now();
            let rows = check.run(&env);
            eprintln!(
                "[timing] {} / {}: {} rows in {:.1} ms",
                job.ctx.descriptor(),
                check.id(),
                rows.len(),
                t0.elapsed().as_secs_f64() * 1e3
            );
            rows
        })
        .collect();

    let reports: Vec<Report> = nested.into_iter().flatten().collect();
    let lines: Vec<String> = reports.iter().map(Report::to_json_line).collect();
    let summary = summarize(&reports);
    Ok(SuiteOutcome {
        reports,
        lines,
        summary,
        elapsed: started.elapsed(),
    })
}
