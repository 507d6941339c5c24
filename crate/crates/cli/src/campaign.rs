//! Resolving a campaign, building its jobs and running them in parallel.

use std::path::{Path, PathBuf};

use nctori::bsp::{
    semiclassical_scan, verify_abstract_bsp, verify_borderline_bsp, verify_clr, verify_lt, verify_sobolev,
    SchrodingerInstance, ANCHOR_ABSTRACT_BSP, ANCHOR_BORDERLINE_BSP, ANCHOR_CLR, ANCHOR_LT, ANCHOR_SOBOLEV,
};
use nctori::cwikel::{
    verify_cwikel_bounds, verify_hs_equality, verify_majorization, CwikelInstance, Regime, ANCHOR_CWIKEL_STRONG,
    ANCHOR_HS,
};
use nctori::lattice::{verify_nu0, ANCHOR_NU0};
use nctori::sampling::{self, rng};
use nctori::{CheckRecord, Error, Status, Tally, ThetaMatrix};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    load_instances, CampaignConfig, GeneratorSpec, InstanceBatch, InstanceSource, Nu0Instance, PairInstance,
    SobolevInstance, Suite,
};
use crate::error::{CliError, CliResult};

pub const DEFAULT_COUNT: usize = 10;
pub const DEFAULT_OUT: &str = "nctori-report";

/// `(p, q)` pairs cycled through by generated Schrödinger corpora.
const REGIMES: [(f64, f64); 3] = [(0.5, 1.0), (1.0, 2.0), (2.0, 2.0)];

/// Exponents and regimes exercised on every generated Cwikel pair.
const CWIKEL_CASES: [(f64, Regime); 6] = [
    (2.0, Regime::Plus),
    (3.0, Regime::Plus),
    (4.0, Regime::Plus),
    (0.5, Regime::Minus),
    (1.0, Regime::Minus),
    (1.5, Regime::Minus),
];

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub suite: Suite,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub generator: Option<GeneratorSpec>,
    pub files: Vec<(Suite, PathBuf)>,
    pub out: PathBuf,
}

impl Campaign {
    /// Without a config file the campaign is a default generated corpus.
    pub fn resolve(suite: Suite, o: &Overrides) -> CliResult<Self> {
        let (cfg, base) = match &o.config {
            Some(path) => (
                CampaignConfig::load(path)?,
                path.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (
                CampaignConfig {
                    generator: Some(GeneratorSpec::default()),
                    ..CampaignConfig::default()
                },
                PathBuf::new(),
            ),
        };
        let mut generator = cfg.generator;
        if let Some(count) = o.count {
            generator.get_or_insert_with(GeneratorSpec::default).count = Some(count);
        }
        let seed = o.seed.or(cfg.seed);
        if generator.is_some() && seed.is_none() {
            return Err(CliError::Usage(
                "a seed is required for generated corpora (--seed or \"seed\")".into(),
            ));
        }
        let tolerance = o.tol.or(cfg.tolerance);
        if let Some(t) = tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!(
                    "tolerance must be positive and finite, got {t}"
                )));
            }
        }
        let mut files = Vec::new();
        for src in cfg.instances {
            match src {
                InstanceSource::Path(p) if suite == Suite::All => {
                    return Err(CliError::Usage(format!(
                        "instance file {} needs a \"suite\" tag when running all suites",
                        p.display()
                    )))
                }
                InstanceSource::Path(p) => files.push((suite, base.join(p))),
                InstanceSource::Tagged {
                    suite: Suite::All,
                    path,
                } => {
                    return Err(CliError::Usage(format!(
                        "instance file {} is tagged with \"all\"",
                        path.display()
                    )))
                }
                InstanceSource::Tagged { suite: s, path } => {
                    if suite == Suite::All || s == suite {
                        files.push((s, base.join(path)));
                    }
                }
            }
        }
        let out = o
            .out
            .clone()
            .or(cfg.out.map(|p| base.join(p)))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        Ok(Campaign {
            suite,
            seed,
            tolerance,
            generator,
            files,
            out,
        })
    }
}

#[derive(Debug, Clone)]
enum Work {
    Abstract(SchrodingerInstance),
    Borderline(SchrodingerInstance),
    Clr(SchrodingerInstance),
    Lt(SchrodingerInstance, Vec<f64>),
    Sobolev(SobolevInstance),
    Cwikel(CwikelInstance),
    Pair(PairInstance),
    Nu0(Nu0Instance),
}

/// One unit of parallel work with the place it came from.
#[derive(Debug, Clone)]
struct Job {
    id: String,
    origin: PathBuf,
    index: usize,
    work: Work,
}

const DEFAULT_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];

impl Job {
    fn anchor(&self) -> &'static str {
        match self.work {
            Work::Abstract(_) => ANCHOR_ABSTRACT_BSP,
            Work::Borderline(_) => ANCHOR_BORDERLINE_BSP,
            Work::Clr(_) => ANCHOR_CLR,
            Work::Lt(..) => ANCHOR_LT,
            Work::Sobolev(_) => ANCHOR_SOBOLEV,
            Work::Cwikel(_) => ANCHOR_CWIKEL_STRONG,
            Work::Pair(_) => ANCHOR_HS,
            Work::Nu0(_) => ANCHOR_NU0,
        }
    }

    fn run(&self, tol: Option<f64>) -> nctori::Result<Vec<CheckRecord>> {
        let id = self.id.as_str();
        let tight = tol.unwrap_or(1e-12);
        Ok(match &self.work {
            Work::Abstract(inst) => verify_abstract_bsp(id, inst)?.records,
            Work::Borderline(inst) => verify_borderline_bsp(id, inst, tol.unwrap_or(1e-9))?.records,
            Work::Clr(inst) => {
                let mut out = verify_clr(id, inst, tight)?.records;
                if !inst.h_grid.is_empty() {
                    out.extend(semiclassical_scan(id, inst, tight)?.records);
                }
                out
            }
            Work::Lt(inst, gammas) => {
                let mut out = Vec::new();
                for &g in gammas {
                    out.extend(verify_lt(id, inst, g, tight)?.records);
                }
                out
            }
            Work::Sobolev(s) => verify_sobolev(id, &s.family, s.k_tau, tight)?.records,
            Work::Cwikel(inst) => verify_cwikel_bounds(id, inst, tight)?,
            Work::Pair(p) => vec![
                verify_hs_equality(id, &p.x, &p.g)?,
                verify_majorization(id, &p.x, &p.g)?,
            ],
            Work::Nu0(q) => vec![verify_nu0(id, q.n, q.lambda_max)?],
        })
    }
}

/// Failures of the numerics rather than of the input.
fn is_numerical(e: &Error) -> bool {
    matches!(
        e,
        Error::NoConvergence { .. } | Error::NonFinite { .. } | Error::NonFiniteSpectralValue { .. }
    )
}

fn generated_jobs(suite: Suite, seed: u64, g: &GeneratorSpec) -> Vec<Job> {
    let count = g.count.unwrap_or(DEFAULT_COUNT);
    let origin = PathBuf::from(format!("<generated {suite} corpus>"));
    let job = |id: String, index: usize, work: Work| Job {
        id,
        origin: origin.clone(),
        index,
        work,
    };
    if suite == Suite::Nu0 {
        let n = g.n.unwrap_or(2);
        let lambda_max = g.lambda_max.unwrap_or(1e4);
        return vec![job(format!("nu0/n={n}"), 0, Work::Nu0(Nu0Instance { n, lambda_max }))];
    }
    let mut jobs = Vec::new();
    for i in 0..count {
        let mut r = rng(seed, (suite.index() << 32) | i as u64);
        let n = g.n.unwrap_or(if suite == Suite::Sobolev { 3 } else { 2 });
        let theta = sampling::random_theta(&mut r, n);
        let gen_id = format!("{suite}/gen/{i}");
        match suite {
            Suite::Bsp | Suite::Borderline => {
                let scale = r.gen_range(0.5..2.0);
                let v = sampling::random_nonpositive(&mut r, &theta, g.radius.unwrap_or(1), scale);
                let (k_op, k_tau) = (g.k_op.unwrap_or(3), g.k_tau.unwrap_or(3));
                if suite == Suite::Bsp {
                    let inst = SchrodingerInstance::new(v, 1.0, 2.0, k_op, k_tau).expect("generated instance is valid");
                    jobs.push(job(gen_id, i, Work::Abstract(inst)));
                } else {
                    let (p, q) = REGIMES[i % REGIMES.len()];
                    let inst = SchrodingerInstance::new(v, p, q, k_op, k_tau).expect("generated instance is valid");
                    jobs.push(job(format!("{gen_id}/p={p}"), i, Work::Borderline(inst)));
                }
            }
            Suite::Clr | Suite::Lt => {
                let scale = r.gen_range(1.0..6.0);
                let shift = r.gen_range(-2.0..0.5);
                let v = sampling::random_self_adjoint(&mut r, &theta, g.radius.unwrap_or(2), scale, shift);
                let (k_op, k_tau) = (g.k_op.unwrap_or(6), g.k_tau.unwrap_or(6));
                if suite == Suite::Clr {
                    let (p, q) = REGIMES[i % REGIMES.len()];
                    let inst = SchrodingerInstance::new(v, p, q, k_op, k_tau).expect("generated instance is valid");
                    jobs.push(job(format!("{gen_id}/p={p}"), i, Work::Clr(inst)));
                } else {
                    let inst = SchrodingerInstance::new(v, 2.0, 2.0, k_op, k_tau).expect("generated instance is valid");
                    let gammas = g.gammas.clone().unwrap_or_else(|| DEFAULT_GAMMAS.to_vec());
                    jobs.push(job(gen_id, i, Work::Lt(inst, gammas)));
                }
            }
            Suite::Sobolev => {
                let th = if i % 2 == 0 { theta } else { ThetaMatrix::zero(n) };
                let size = 1 + i % 5;
                let family = sampling::random_orthonormal_family(&mut r, &th, g.radius.unwrap_or(1), size);
                let k_tau = g.k_tau.unwrap_or(3);
                jobs.push(job(gen_id, i, Work::Sobolev(SobolevInstance { family, k_tau })));
            }
            Suite::Cwikel | Suite::Majorization => {
                let x = sampling::random_element(&mut r, &theta, g.radius.unwrap_or(2));
                let sym = sampling::random_symbol(&mut r, n, g.symbol_radius.unwrap_or(3));
                if suite == Suite::Majorization {
                    jobs.push(job(gen_id, i, Work::Pair(PairInstance { x, g: sym })));
                    continue;
                }
                for (p, regime) in CWIKEL_CASES {
                    let inst = CwikelInstance {
                        x: x.clone(),
                        g: sym.clone(),
                        p,
                        regime,
                        k_tau: g.k_tau.unwrap_or(6),
                    };
                    jobs.push(job(gen_id.clone(), i, Work::Cwikel(inst)));
                }
            }
            Suite::Nu0 | Suite::All => unreachable!("handled above"),
        }
    }
    jobs
}

fn file_jobs(suite: Suite, path: &Path) -> CliResult<Vec<Job>> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let job = |index: usize, work: Work| Job {
        id: format!("{suite}/{stem}/{index}"),
        origin: path.to_path_buf(),
        index,
        work,
    };
    Ok(match load_instances(suite, path)? {
        InstanceBatch::Schrodinger(v) => v
            .into_iter()
            .enumerate()
            .map(|(i, inst)| {
                let work = match suite {
                    Suite::Bsp => Work::Abstract(inst),
                    Suite::Borderline => Work::Borderline(inst),
                    Suite::Clr => Work::Clr(inst),
                    _ => Work::Lt(inst, DEFAULT_GAMMAS.to_vec()),
                };
                job(i, work)
            })
            .collect(),
        InstanceBatch::Cwikel(v) => v
            .into_iter()
            .enumerate()
            .map(|(i, x)| job(i, Work::Cwikel(x)))
            .collect(),
        InstanceBatch::Pair(v) => v.into_iter().enumerate().map(|(i, x)| job(i, Work::Pair(x))).collect(),
        InstanceBatch::Sobolev(v) => v
            .into_iter()
            .enumerate()
            .map(|(i, x)| job(i, Work::Sobolev(x)))
            .collect(),
        InstanceBatch::Nu0(v) => v.into_iter().enumerate().map(|(i, x)| job(i, Work::Nu0(x))).collect(),
    })
}

/// Full machine-readable output of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub tally: Tally,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn has_failures(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Fail)
    }
}

/// Runs every job; instances execute in parallel, records keep job order.
pub fn run(c: &Campaign) -> CliResult<VerificationReport> {
    let mut jobs = Vec::new();
    for s in c.suite.expand() {
        if let (Some(g), Some(seed)) = (&c.generator, c.seed) {
            jobs.extend(generated_jobs(s, seed, g));
        }
        for (fs, path) in &c.files {
            if *fs == s {
                jobs.extend(file_jobs(s, path)?);
            }
        }
    }
    let results: Vec<nctori::Result<Vec<CheckRecord>>> = jobs.par_iter().map(|j| j.run(c.tolerance)).collect();
    let mut records = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        match res {
            Ok(r) => records.extend(r),
            Err(e) if is_numerical(&e) => {
                let mut rec = CheckRecord::equal(job.id.clone(), job.anchor(), f64::NAN, f64::NAN, 0.0);
                rec.status = Status::Inconclusive;
                rec.set("reason", e.to_string());
                records.push(rec);
            }
            Err(e) => {
                return Err(CliError::Instance {
                    path: job.origin.clone(),
                    index: job.index,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(VerificationReport {
        suite: c.suite,
        seed: c.seed,
        tolerance: c.tolerance,
        tally: Tally::of(&records),
        records,
    })
}
