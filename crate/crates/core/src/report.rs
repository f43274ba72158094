//! Bound computation orchestration: one entry point per method, uniform
//! reports, the bound-chain guard, and a JSON-lines result cache.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::str::FromStr;

use num::{BigUint, ToPrimitive};
use sha2::{Digest, Sha256};

use crate::bounds;
use crate::error::{Error, Result};
use crate::scheme::HammingScheme;
use crate::sdp::{self, SolveStatus, SolverConfig};
use crate::terwilliger::{build_laurent_sdp, build_schrijver_sdp};

pub const SCHEMA_ID: &str = "orthobound.bound_report.v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable naming the cache file (JSON lines, append-only).
pub const CACHE_ENV: &str = "ORTHOBOUND_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lower,
    Ratio,
    Delsarte,
    Schrijver,
    Laurent,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Lower,
        Method::Ratio,
        Method::Delsarte,
        Method::Schrijver,
        Method::Laurent,
    ];

    pub fn is_upper_bound(&self) -> bool {
        !matches!(self, Method::Lower)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Lower => "lower",
            Method::Ratio => "ratio",
            Method::Delsarte => "delsarte",
            Method::Schrijver => "schrijver",
            Method::Laurent => "laurent",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Method::Lower),
            "ratio" => Ok(Method::Ratio),
            "delsarte" => Ok(Method::Delsarte),
            "schrijver" => Ok(Method::Schrijver),
            "laurent" => Ok(Method::Laurent),
            other => Err(Error::invalid(format!(
                "unknown method {other}; expected lower|ratio|delsarte|schrijver|laurent"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    /// Worst block minimum eigenvalue of the returned iterate (0 for exact
    /// methods).
    pub min_block_eig: f64,
}

/// One computed bound, serializable as a JSON-lines record.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BoundReport {
    pub schema: String,
    pub n: u32,
    pub method: Method,
    pub forbidden: Vec<u32>,
    /// Numeric bound value (full precision in JSON).
    pub value: f64,
    /// Exact value as a decimal/rational string, when the method is exact.
    pub value_exact: Option<String>,
    /// Largest admissible stable-set size implied by the bound: multiples
    /// of 4 in distance-n/2 mode, plain floor otherwise. None for lower
    /// bounds (the value itself is attained).
    pub integer_refinement: Option<u64>,
    pub status: String,
    pub residuals: Residuals,
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub config_hash: String,
    pub tool_version: String,
}

impl BoundReport {
    /// Upper-bound methods must print a value at least the known lower
    /// bound; a violation means the result cannot be trusted.
    fn check_chain(&self) -> Result<()> {
        if !self.method.is_upper_bound() || !omega_mode(self.n, &self.forbidden) {
            return Ok(());
        }
        let lower = bounds::lower_bound_size(self.n)?
            .to_f64()
            .unwrap_or(f64::INFINITY);
        let slack = 1e-6 * self.value.abs().max(1.0);
        if self.value + slack < lower {
            return Err(Error::ChainViolation(format!(
                "{} bound {} for n={} falls below the constructed stable set {}",
                self.method, self.value, self.n, lower
            )));
        }
        Ok(())
    }
}

/// True when the instance is the distance-n/2 graph on {0,1}^n.
pub fn omega_mode(n: u32, forbidden: &[u32]) -> bool {
    n % 4 == 0 && n > 0 && forbidden == [n / 2]
}

/// Default forbidden set for an n: the single middle distance.
pub fn default_forbidden(n: u32) -> Result<BTreeSet<u32>> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::invalid(format!(
            "n={n} is not a multiple of 4; pass an explicit forbidden set for code mode"
        )));
    }
    Ok([n / 2].into_iter().collect())
}

/// Hash of everything that determines a solver answer, for cache keys.
pub fn config_hash(n: u32, method: Method, forbidden: &BTreeSet<u32>, cfg: &SolverConfig) -> String {
    let mut h = Sha256::new();
    let canon = format!(
        "v={TOOL_VERSION};n={n};method={method};forbidden={:?};tol={:e};feas={:e};iters={};damp={:e};prec={};equil={}",
        forbidden, cfg.tolerance, cfg.feasibility_tol, cfg.max_iterations, cfg.step_damping,
        cfg.precision, cfg.equilibrate
    );
    h.update(canon.as_bytes());
    let digest = h.finalize();
    let mut out = String::new();
    for b in digest.iter().take(8) {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn mult4_floor(v: u64) -> u64 {
    v - v % 4
}

/// Integer refinement of a numeric upper bound. `rel_slack` absorbs the
/// solver's accuracy so a value like 2303.99999 refines to 2304 rather than
/// 2300; enlarging an upper bound before flooring keeps it a valid bound.
fn refinement_for(n: u32, forbidden: &[u32], value: f64, rel_slack: f64) -> Result<u64> {
    let adjusted = value + value.abs() * rel_slack.max(0.0);
    if omega_mode(n, forbidden) {
        bounds::integer_refinement(adjusted)
    } else {
        if !adjusted.is_finite() || adjusted < 0.0 {
            return Err(Error::invalid("refinement needs a finite bound"));
        }
        Ok(adjusted.floor() as u64)
    }
}

/// Computes one bound. `forbidden = None` selects the distance-n/2 default.
pub fn compute_bound(
    n: u32,
    method: Method,
    forbidden: Option<&BTreeSet<u32>>,
    cfg: &SolverConfig,
) -> Result<BoundReport> {
    let forbidden: BTreeSet<u32> = match forbidden {
        Some(f) => f.clone(),
        None => default_forbidden(n)?,
    };
    let fvec: Vec<u32> = forbidden.iter().copied().collect();
    let hash = config_hash(n, method, &forbidden, cfg);
    let t0 = std::time::Instant::now();

    let report = match method {
        Method::Lower => {
            if !omega_mode(n, &fvec) {
                return Err(Error::invalid(
                    "the stable-set lower bound is defined for the distance-n/2 graph only",
                ));
            }
            let size = bounds::lower_bound_size(n)?;
            let value = size.to_f64().unwrap();
            BoundReport {
                schema: SCHEMA_ID.into(),
                n,
                method,
                forbidden: fvec.clone(),
                value,
                value_exact: Some(size.to_string()),
                integer_refinement: Some(size.to_u64().ok_or_else(|| {
                    Error::limit("lower bound exceeds u64")
                })?),
                status: "exact".into(),
                residuals: Residuals::default(),
                iterations: 0,
                wall_time_ms: ms(t0),
                config_hash: hash,
                tool_version: TOOL_VERSION.into(),
            }
        }
        Method::Ratio => {
            if !omega_mode(n, &fvec) {
                return Err(Error::invalid(
                    "the ratio bound shortcut is defined for the distance-n/2 graph only",
                ));
            }
            let rb = bounds::ratio_bound_omega(n)?;
            let floor = rb.floor().to_integer();
            let floor_u = floor
                .to_u64()
                .ok_or_else(|| Error::limit("ratio bound exceeds u64"))?;
            BoundReport {
                schema: SCHEMA_ID.into(),
                n,
                method,
                forbidden: fvec.clone(),
                value: rb.to_f64().unwrap(),
                value_exact: Some(format!("{rb}")),
                integer_refinement: Some(mult4_floor(floor_u)),
                status: "exact".into(),
                residuals: Residuals::default(),
                iterations: 0,
                wall_time_ms: ms(t0),
                config_hash: hash,
                tool_version: TOOL_VERSION.into(),
            }
        }
        Method::Delsarte => {
            let scheme = HammingScheme::new(n as u64, 2)?;
            let (value, cert) = bounds::delsarte_lp(&scheme, &forbidden, cfg)?;
            let status = if cert.exact.is_some() {
                format!("{} (certified exact)", cert.solve_status)
            } else {
                format!("{} (numeric only)", cert.solve_status)
            };
            solver_guard(cert.solve_status)?;
            BoundReport {
                schema: SCHEMA_ID.into(),
                n,
                method,
                forbidden: fvec.clone(),
                value,
                value_exact: cert
                    .exact
                    .as_ref()
                    .map(|e| e.objective.to_string()),
                integer_refinement: Some(refinement_for(n, &fvec, value, 1e-6)?),
                status,
                residuals: Residuals {
                    primal: (-cert.min_w).max(0.0),
                    dual: (-cert.min_qtw).max(0.0),
                    gap: 0.0,
                    min_block_eig: cert.min_w.min(cert.min_qtw),
                },
                iterations: 0,
                wall_time_ms: ms(t0),
                config_hash: hash,
                tool_version: TOOL_VERSION.into(),
            }
        }
        Method::Schrijver | Method::Laurent => {
            let (problem, _model) = match method {
                Method::Schrijver => build_schrijver_sdp(n, &forbidden)?,
                _ => build_laurent_sdp(n, &forbidden)?,
            };
            let sol = sdp::solve(&problem, cfg)?;
            solver_guard(sol.status)?;
            let min_eig = sol
                .block_min_eigs
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let rel_slack = 1e-6_f64
                .max(10.0 * sol.duality_gap)
                .max(10.0 * sol.primal_residual);
            BoundReport {
                schema: SCHEMA_ID.into(),
                n,
                method,
                forbidden: fvec.clone(),
                value: sol.objective,
                value_exact: None,
                integer_refinement: Some(refinement_for(n, &fvec, sol.objective, rel_slack)?),
                status: sol.status.to_string(),
                residuals: Residuals {
                    primal: sol.primal_residual,
                    dual: sol.dual_residual,
                    gap: sol.duality_gap,
                    min_block_eig: min_eig,
                },
                iterations: sol.iterations,
                wall_time_ms: ms(t0),
                config_hash: hash,
                tool_version: TOOL_VERSION.into(),
            }
        }
    };
    report.check_chain()?;
    Ok(report)
}

/// Statuses that must not silently pass for a printed bound.
fn solver_guard(status: SolveStatus) -> Result<()> {
    match status {
        SolveStatus::Optimal | SolveStatus::NearOptimal => Ok(()),
        SolveStatus::MaxIterations => Err(Error::Solver(
            "iteration limit reached before convergence".into(),
        )),
        SolveStatus::NumericalFailure => Err(Error::Solver("numerical failure".into())),
    }
}

fn ms(t0: std::time::Instant) -> f64 {
    t0.elapsed().as_secs_f64() * 1e3
}

/// χ lower bound from the full-space size and a stable-set upper bound.
pub fn chromatic_bound_from(n: u32, alpha_upper: u64) -> Result<u64> {
    let v = BigUint::from(2u32).pow(n);
    let chi = bounds::chromatic_lower_bound(&v, &BigUint::from(alpha_upper))?;
    chi.to_u64()
        .ok_or_else(|| Error::limit("chromatic bound exceeds u64"))
}

/// Admissible stable-set sizes between the constructed lower bound and a
/// refined upper bound: the multiples of 4 in [lower, upper].
pub fn admissible_values(lower: u64, upper_refined: u64) -> Vec<u64> {
    if upper_refined < lower {
        return Vec::new();
    }
    (lower..=upper_refined).step_by(4).collect()
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

/// Looks up a cached report by exact key match; None when the cache is
/// disabled, missing, or has no matching record.
pub fn cache_lookup(
    n: u32,
    method: Method,
    forbidden: &BTreeSet<u32>,
    cfg: &SolverConfig,
) -> Option<BoundReport> {
    let path = std::env::var(CACHE_ENV).ok()?;
    let text = std::fs::read_to_string(path).ok()?;
    let hash = config_hash(n, method, forbidden, cfg);
    let fvec: Vec<u32> = forbidden.iter().copied().collect();
    let mut hit = None;
    for line in text.lines() {
        if let Ok(rec) = serde_json::from_str::<BoundReport>(line) {
            if rec.schema == SCHEMA_ID
                && rec.n == n
                && rec.method == method
                && rec.forbidden == fvec
                && rec.config_hash == hash
                && rec.tool_version == TOOL_VERSION
            {
                hit = Some(rec); // last matching record wins
            }
        }
    }
    hit
}

/// Appends a report to the cache file when the cache is enabled.
pub fn cache_store(report: &BoundReport) -> Result<()> {
    let Ok(path) = std::env::var(CACHE_ENV) else {
        return Ok(());
    };
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let line = serde_json::to_string(report)
        .map_err(|e| Error::Format(format!("serialize report: {e}")))?;
    writeln!(f, "{line}")?;
    Ok(())
}
