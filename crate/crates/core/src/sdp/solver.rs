//! Infeasible-start primal-dual path-following solver with Mehrotra
//! predictor-corrector steps and HKM scaling.
//!
//! The problem solved is the LMI form
//!
//! ```text
//!   maximize   b·x
//!   subject to S(x) = F_0 + Σ_m x_m F_m ⪰ 0   (block diagonal)
//! ```
//!
//! with the partner problem `min ⟨F_0, X⟩ s.t. ⟨F_m, X⟩ = -b_m, X ⪰ 0`.
//! The duality gap is `⟨X, S⟩ ≥ 0`. Each iteration factors the slack
//! blocks, assembles the Schur complement `B[m][k] = tr(F_m X F_k S⁻¹)`
//! (symmetric positive definite for linearly independent constraints),
//! and takes damped steps to stay inside the cone.
//!
//! Diagonal blocks carry ordinary linear inequalities and use the same
//! formulas componentwise, which keeps LPs on the identical code path.

use super::linalg::Mat;
use super::problem::{BlockKind, SdpProblem};
use super::real::{Dd, Real};
use crate::error::{Error, Result};

/// Floating-point width used inside the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Double,
    Extended,
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Double => write!(f, "double"),
            Precision::Extended => write!(f, "extended"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative duality-gap target.
    pub tolerance: f64,
    /// Primal/dual feasibility residual target.
    pub feasibility_tol: f64,
    pub max_iterations: usize,
    /// Fraction-to-boundary damping factor, in (0, 1).
    pub step_damping: f64,
    pub precision: Precision,
    /// Ruiz-style variable equilibration before solving.
    pub equilibrate: bool,
    pub verbose: bool,
    /// Wall-clock budget; the iteration stops at the best iterate found
    /// once exceeded. Does not affect runs that finish within the budget.
    pub time_limit: Option<std::time::Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-8,
            feasibility_tol: 1e-8,
            max_iterations: 200,
            step_damping: 0.98,
            precision: Precision::Double,
            equilibrate: true,
            verbose: false,
            time_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !(self.step_damping > 0.0 && self.step_damping < 1.0) {
            return Err(Error::invalid("step damping must lie in (0, 1)"));
        }
        if !(self.feasibility_tol > 0.0) {
            return Err(Error::invalid("feasibility tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    MaxIterations,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::NearOptimal => "near_optimal",
            SolveStatus::MaxIterations => "max_iter",
            SolveStatus::NumericalFailure => "numerical_failure",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    /// b·x + offset at the returned iterate.
    pub objective: f64,
    /// ⟨F_0, X⟩ + offset for the partner iterate (upper side of the gap).
    pub primal_objective: f64,
    pub x: Vec<f64>,
    /// Min eigenvalue of each block of F(x), recomputed from scratch.
    pub block_min_eigs: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Relative objective gap at the returned iterate.
    pub duality_gap: f64,
    pub iterations: usize,
    pub wall_time: std::time::Duration,
    /// Search-direction scaling used by the implementation.
    pub scaling: &'static str,
    pub precision: Precision,
    pub message: String,
}

/// Outcome of the core iteration before recertification.
struct IterateOutcome {
    x: Vec<f64>,
    dual_obj: f64,
    primal_obj: f64,
    gap: f64,
    pres: f64,
    dres: f64,
    iterations: usize,
    converged: bool,
    message: String,
}

/// Solves the LMI problem. Deterministic for fixed (problem, config).
pub fn solve(problem: &SdpProblem, config: &SolverConfig) -> Result<Solution> {
    let t0 = std::time::Instant::now();
    config.validate()?;
    problem.validate()?;
    if problem.num_blocks() == 0 {
        return Err(Error::invalid("problem has no blocks"));
    }

    if problem.num_vars() == 0 {
        return Ok(certify_constant_problem(problem, config, t0));
    }

    // Variable equilibration and objective normalization (computed in f64,
    // applied inside the typed core).
    let d = if config.equilibrate {
        ruiz_scales(problem)
    } else {
        vec![1.0; problem.num_vars()]
    };
    let beta = problem
        .objective
        .iter()
        .zip(&d)
        .map(|(b, dm)| (b * dm).abs())
        .fold(1.0_f64, f64::max);

    let outcome = match config.precision {
        Precision::Double => iterate::<f64>(problem, config, &d, beta),
        Precision::Extended => iterate::<Dd>(problem, config, &d, beta),
    };

    let mut sol = recertify(problem, config, outcome);
    sol.wall_time = t0.elapsed();
    Ok(sol)
}

/// Problems with no free variables reduce to a feasibility check of F_0.
fn certify_constant_problem(
    problem: &SdpProblem,
    config: &SolverConfig,
    t0: std::time::Instant,
) -> Solution {
    let x: Vec<f64> = Vec::new();
    let (eigs, worst) = block_eigs(problem, &x);
    let feasible = worst >= -config.feasibility_tol;
    Solution {
        status: if feasible {
            SolveStatus::Optimal
        } else {
            SolveStatus::NumericalFailure
        },
        objective: problem.objective_offset,
        primal_objective: problem.objective_offset,
        x,
        block_min_eigs: eigs,
        primal_residual: 0.0,
        dual_residual: 0.0,
        duality_gap: 0.0,
        iterations: 0,
        wall_time: t0.elapsed(),
        scaling: "hkm",
        precision: config.precision,
        message: if feasible {
            "constant problem; F_0 feasible".into()
        } else {
            "constant problem; F_0 infeasible".into()
        },
    }
}

/// Min eigenvalue per block of F(x), plus the worst one scaled for reporting.
fn block_eigs(problem: &SdpProblem, x: &[f64]) -> (Vec<f64>, f64) {
    let mut eigs = Vec::with_capacity(problem.num_blocks());
    let mut worst = f64::INFINITY;
    for b in 0..problem.num_blocks() {
        let rows = problem.eval_block(b, x);
        let me = match problem.blocks[b] {
            BlockKind::Diag(_) => rows
                .iter()
                .enumerate()
                .map(|(i, r)| r[i])
                .fold(f64::INFINITY, f64::min),
            BlockKind::Dense(_) => {
                super::linalg::min_eigenvalue(&rows).unwrap_or(f64::NEG_INFINITY)
            }
        };
        let scale = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(1.0_f64, |m, v| m.max(v.abs()));
        worst = worst.min(me / scale);
        eigs.push(me);
    }
    (eigs, worst)
}

/// Rebuilds certificates from the returned iterate and assigns the status.
fn recertify(problem: &SdpProblem, config: &SolverConfig, out: IterateOutcome) -> Solution {
    let (eigs, worst_rel) = block_eigs(problem, &out.x);
    // status = optimal certifies per-block min eigenvalue >= -feasibility
    // target (relative to the block scale) at the reported assignment.
    let feas_ok = worst_rel >= -config.feasibility_tol;
    let loosen = 1e3;
    let status = if out.converged
        && feas_ok
        && out.gap <= config.tolerance
        && out.pres <= config.feasibility_tol
        && out.dres <= config.feasibility_tol
    {
        SolveStatus::Optimal
    } else if out.gap <= loosen * config.tolerance.max(1e-9)
        && out.pres <= loosen * config.feasibility_tol
        && out.dres <= loosen * config.feasibility_tol
        && worst_rel >= -loosen * config.feasibility_tol
    {
        SolveStatus::NearOptimal
    } else if out.iterations >= config.max_iterations {
        SolveStatus::MaxIterations
    } else {
        SolveStatus::NumericalFailure
    };
    Solution {
        status,
        objective: out.dual_obj + problem.objective_offset,
        primal_objective: out.primal_obj + problem.objective_offset,
        x: out.x,
        block_min_eigs: eigs,
        primal_residual: out.pres,
        dual_residual: out.dres,
        duality_gap: out.gap,
        iterations: out.iterations,
        wall_time: std::time::Duration::ZERO,
        scaling: "hkm",
        precision: config.precision,
        message: out.message,
    }
}

/// Ruiz-style equilibration over variables: balances max |coefficient|.
fn ruiz_scales(problem: &SdpProblem) -> Vec<f64> {
    let m = problem.num_vars();
    let mut d = vec![1.0_f64; m];
    for _ in 0..4 {
        let mut mx = vec![0.0_f64; m];
        for blk in 0..problem.num_blocks() {
            for (var, mat) in &problem.coeffs[blk] {
                for &(_, _, v) in &mat.entries {
                    mx[*var] = mx[*var].max((v * d[*var]).abs());
                }
            }
        }
        for i in 0..m {
            if mx[i] > 0.0 {
                d[i] /= mx[i].sqrt();
            }
        }
    }
    d
}

// ---------------------------------------------------------------------------
// Typed iteration core
// ---------------------------------------------------------------------------

struct DenseData<R> {
    size: usize,
    f0: Mat<R>,
    /// (variable, entries (i <= j, coeff)), with scaling applied.
    vars: Vec<(usize, Vec<(u32, u32, R)>)>,
}

struct DiagData<R> {
    size: usize,
    f0: Vec<R>,
    vars: Vec<(usize, Vec<(usize, R)>)>,
    /// position -> (variable, coeff) incidence, for Schur assembly.
    touch: Vec<Vec<(usize, R)>>,
}

struct DenseState<R> {
    x: Mat<R>,
    s: Mat<R>,
    rd: Mat<R>,
    sinv: Mat<R>,
    lx: Mat<R>,
    ls: Mat<R>,
    dx: Mat<R>,
    ds: Mat<R>,
    dx_aff: Mat<R>,
    ds_aff: Mat<R>,
}

struct DiagState<R> {
    x: Vec<R>,
    s: Vec<R>,
    rd: Vec<R>,
    dx: Vec<R>,
    ds: Vec<R>,
    dx_aff: Vec<R>,
    ds_aff: Vec<R>,
}

/// tr(A·M) for sparse symmetric A (entries i <= j) against dense M.
#[inline]
fn sparse_trace_dot<R: Real>(entries: &[(u32, u32, R)], m: &Mat<R>) -> R {
    let mut s = R::zero();
    for &(p, q, c) in entries {
        let (p, q) = (p as usize, q as usize);
        s += c * m.at(q, p);
        if p != q {
            s += c * m.at(p, q);
        }
    }
    s
}

#[inline]
fn add_sparse<R: Real>(m: &mut Mat<R>, entries: &[(u32, u32, R)], w: R) {
    for &(p, q, c) in entries {
        let (p, q) = (p as usize, q as usize);
        m.add_at(p, q, w * c);
        if p != q {
            m.add_at(q, p, w * c);
        }
    }
}

fn iterate<R: Real>(
    problem: &SdpProblem,
    config: &SolverConfig,
    dscale: &[f64],
    beta: f64,
) -> IterateOutcome {
    let nvars = problem.num_vars();
    let nu: f64 = problem.total_dim() as f64;

    // ---- scaled data ----
    let bhat: Vec<R> = problem
        .objective
        .iter()
        .zip(dscale)
        .map(|(b, dm)| R::from_f64(b * dm / beta))
        .collect();
    let bmax = bhat
        .iter()
        .map(|v| v.abs().to_f64())
        .fold(0.0_f64, f64::max);

    let mut dense: Vec<DenseData<R>> = Vec::new();
    let mut diag: Vec<DiagData<R>> = Vec::new();
    for blk in 0..problem.num_blocks() {
        match problem.blocks[blk] {
            BlockKind::Dense(sz) => {
                let mut f0 = Mat::zeros(sz);
                for &(i, j, v) in &problem.f0[blk].entries {
                    let (i, j) = (i as usize, j as usize);
                    f0.set(i, j, R::from_f64(v));
                    if i != j {
                        f0.set(j, i, R::from_f64(v));
                    }
                }
                let vars = problem.coeffs[blk]
                    .iter()
                    .map(|(var, m)| {
                        let sc = dscale[*var];
                        (
                            *var,
                            m.entries
                                .iter()
                                .map(|&(i, j, v)| (i, j, R::from_f64(v * sc)))
                                .collect(),
                        )
                    })
                    .collect();
                dense.push(DenseData { size: sz, f0, vars });
            }
            BlockKind::Diag(sz) => {
                let mut f0 = vec![R::zero(); sz];
                for &(i, _, v) in &problem.f0[blk].entries {
                    f0[i as usize] += R::from_f64(v);
                }
                let mut touch: Vec<Vec<(usize, R)>> = vec![Vec::new(); sz];
                let vars: Vec<(usize, Vec<(usize, R)>)> = problem.coeffs[blk]
                    .iter()
                    .map(|(var, m)| {
                        let sc = dscale[*var];
                        let list: Vec<(usize, R)> = m
                            .entries
                            .iter()
                            .map(|&(i, _, v)| (i as usize, R::from_f64(v * sc)))
                            .collect();
                        for &(p, c) in &list {
                            touch[p].push((*var, c));
                        }
                        (*var, list)
                    })
                    .collect();
                diag.push(DiagData {
                    size: sz,
                    f0,
                    vars,
                    touch,
                });
            }
        }
    }

    // Data norms for initialization and residual scaling.
    let mut f0_max = 1.0_f64;
    let mut fm_frob_max = 1.0_f64;
    let mut ratio_max: f64 = 0.0;
    {
        let mut fm_frob = vec![0.0_f64; nvars];
        for dd in &dense {
            f0_max = f0_max.max(dd.f0.max_abs());
            for (var, e) in &dd.vars {
                for &(p, q, c) in e {
                    let c2 = c.to_f64() * c.to_f64();
                    fm_frob[*var] += if p == q { c2 } else { 2.0 * c2 };
                }
            }
        }
        for dg in &diag {
            for v in &dg.f0 {
                f0_max = f0_max.max(v.abs().to_f64());
            }
            for (var, e) in &dg.vars {
                for &(_, c) in e {
                    fm_frob[*var] += c.to_f64() * c.to_f64();
                }
            }
        }
        for m in 0..nvars {
            let fr = fm_frob[m].sqrt();
            fm_frob_max = fm_frob_max.max(fr);
            ratio_max = ratio_max.max((1.0 + bhat[m].abs().to_f64()) / (1.0 + fr));
        }
    }

    let xi = 10.0_f64.max(nu.sqrt()).max(nu.sqrt() * ratio_max);
    let eta = 10.0_f64.max(nu.sqrt()).max(f0_max.max(fm_frob_max));

    // ---- state ----
    let mut x = vec![R::zero(); nvars];
    let mut dstates: Vec<DenseState<R>> = dense
        .iter()
        .map(|dd| DenseState {
            x: Mat::scaled_identity(dd.size, R::from_f64(xi)),
            s: Mat::scaled_identity(dd.size, R::from_f64(eta)),
            rd: Mat::zeros(dd.size),
            sinv: Mat::zeros(dd.size),
            lx: Mat::zeros(dd.size),
            ls: Mat::zeros(dd.size),
            dx: Mat::zeros(dd.size),
            ds: Mat::zeros(dd.size),
            dx_aff: Mat::zeros(dd.size),
            ds_aff: Mat::zeros(dd.size),
        })
        .collect();
    let mut gstates: Vec<DiagState<R>> = diag
        .iter()
        .map(|dg| DiagState {
            x: vec![R::from_f64(xi); dg.size],
            s: vec![R::from_f64(eta); dg.size],
            rd: vec![R::zero(); dg.size],
            dx: vec![R::zero(); dg.size],
            ds: vec![R::zero(); dg.size],
            dx_aff: vec![R::zero(); dg.size],
            ds_aff: vec![R::zero(); dg.size],
        })
        .collect();

    let descale_x = |x: &[R]| -> Vec<f64> {
        x.iter()
            .zip(dscale)
            .map(|(v, dm)| v.to_f64() * dm)
            .collect()
    };

    let mut best: Option<(f64, IterateOutcome)> = None;
    let mut message = String::new();
    let mut iters_done = 0usize;
    let mut stall = 0usize;
    let t_start = std::time::Instant::now();

    for iter in 0..config.max_iterations {
        iters_done = iter;
        if let Some(limit) = config.time_limit {
            if t_start.elapsed() > limit {
                message = "time limit reached; returning best iterate".into();
                break;
            }
        }

        // ---- residuals, objectives, gap ----
        let mut dual_obj = R::zero();
        for m in 0..nvars {
            dual_obj += bhat[m] * x[m];
        }
        let mut primal_obj = R::zero();
        let mut compl = R::zero();
        let mut dres: f64 = 0.0;
        for (dd, st) in dense.iter().zip(dstates.iter_mut()) {
            st.rd = dd.f0.clone();
            for (var, e) in &dd.vars {
                add_sparse(&mut st.rd, e, x[*var]);
            }
            st.rd.axpy(-R::one(), &st.s);
            dres = dres.max(st.rd.max_abs());
            primal_obj += dd.f0.dot(&st.x);
            compl += st.x.dot(&st.s);
        }
        for (dg, st) in diag.iter().zip(gstates.iter_mut()) {
            for p in 0..dg.size {
                st.rd[p] = dg.f0[p] - st.s[p];
            }
            for (var, e) in &dg.vars {
                for &(p, c) in e {
                    st.rd[p] += c * x[*var];
                }
            }
            for p in 0..dg.size {
                dres = dres.max(st.rd[p].abs().to_f64());
                primal_obj += dg.f0[p] * st.x[p];
                compl += st.x[p] * st.s[p];
            }
        }
        let mut rp = vec![R::zero(); nvars];
        for m in 0..nvars {
            rp[m] = -bhat[m];
        }
        for (dd, st) in dense.iter().zip(dstates.iter()) {
            for (var, e) in &dd.vars {
                rp[*var] -= sparse_trace_dot(e, &st.x);
            }
        }
        for (dg, st) in diag.iter().zip(gstates.iter()) {
            for (var, e) in &dg.vars {
                for &(p, c) in e {
                    rp[*var] -= c * st.x[p];
                }
            }
        }
        let pres = rp
            .iter()
            .map(|v| v.abs().to_f64())
            .fold(0.0_f64, f64::max)
            / (1.0 + bmax);
        let dres = dres / (1.0 + f0_max);
        let d_obj = dual_obj.to_f64();
        let p_obj = primal_obj.to_f64();
        let gap = (p_obj - d_obj).abs() / (1.0 + p_obj.abs() + d_obj.abs());
        let mu = compl.to_f64() / nu;

        if config.verbose {
            eprintln!(
                "iter {iter:3}  gap {gap:9.2e}  pres {pres:9.2e}  dres {dres:9.2e}  mu {mu:9.2e}  obj {:.10e}",
                beta * d_obj
            );
        }

        let metric = gap.max(pres).max(dres);
        let snapshot = |msg: String, converged: bool| IterateOutcome {
            x: descale_x(&x),
            dual_obj: beta * d_obj,
            primal_obj: beta * p_obj,
            gap,
            pres,
            dres,
            iterations: iter,
            converged,
            message: msg,
        };
        let improved = match &best {
            Some((bm, _)) => metric < *bm,
            None => true,
        };
        if improved {
            best = Some((metric, snapshot(String::new(), false)));
            stall = 0;
        } else {
            stall += 1;
        }

        if gap <= config.tolerance
            && pres <= config.feasibility_tol
            && dres <= config.feasibility_tol
        {
            return snapshot("converged".into(), true);
        }
        if stall > 20 {
            message = "stalled; returning best iterate".into();
            break;
        }
        if !mu.is_finite() || !gap.is_finite() {
            message = "iterate diverged".into();
            break;
        }

        // ---- factor S and X, form S⁻¹ ----
        let mut factor_failed = false;
        for st in dstates.iter_mut() {
            match st.s.cholesky() {
                Ok(l) => {
                    st.sinv = Mat::spd_inverse_from_chol(&l);
                    st.ls = l;
                }
                Err(_) => {
                    factor_failed = true;
                    break;
                }
            }
            match st.x.cholesky() {
                Ok(l) => st.lx = l,
                Err(_) => {
                    factor_failed = true;
                    break;
                }
            }
        }
        if factor_failed {
            message = "slack factorization failed; returning best iterate".into();
            break;
        }

        // ---- Schur complement and static right-hand-side pieces ----
        let mut a_vec = vec![R::zero(); nvars]; // tr(F_m S⁻¹)
        let mut t_vec = vec![R::zero(); nvars]; // tr(F_m X R_d S⁻¹)
        let mut schur = Mat::<R>::zeros(nvars);
        for (dd, st) in dense.iter().zip(dstates.iter()) {
            let g = st.x.matmul(&st.rd).matmul(&st.sinv);
            for (var, e) in &dd.vars {
                a_vec[*var] += sparse_trace_dot(e, &st.sinv);
                t_vec[*var] += sparse_trace_dot(e, &g);
            }
            // H_m = S⁻¹ F_m X, assembled from rank-one pieces; B[m][k] = ⟨F_k, H_m⟩.
            let mut h = Mat::<R>::zeros(dd.size);
            for (ia, (m, em)) in dd.vars.iter().enumerate() {
                h.fill_zero();
                for &(p, q, c) in em {
                    let (p, q) = (p as usize, q as usize);
                    let (srow, xrow) = (
                        &st.sinv.a[p * dd.size..(p + 1) * dd.size],
                        &st.x.a[q * dd.size..(q + 1) * dd.size],
                    );
                    h.add_outer(c, srow, xrow);
                    if p != q {
                        let (srow, xrow) = (
                            &st.sinv.a[q * dd.size..(q + 1) * dd.size],
                            &st.x.a[p * dd.size..(p + 1) * dd.size],
                        );
                        h.add_outer(c, srow, xrow);
                    }
                }
                for (k, ek) in dd.vars.iter().take(ia + 1) {
                    let v = sparse_trace_dot(ek, &h);
                    schur.add_at(*m, *k, v);
                    if m != k {
                        schur.add_at(*k, *m, v);
                    }
                }
            }
        }
        for (dg, st) in diag.iter().zip(gstates.iter()) {
            for (var, e) in &dg.vars {
                for &(p, c) in e {
                    a_vec[*var] += c / st.s[p];
                    t_vec[*var] += c * st.x[p] * st.rd[p] / st.s[p];
                }
            }
            for p in 0..dg.size {
                let w = st.x[p] / st.s[p];
                let list = &dg.touch[p];
                for (ia, &(m, cm)) in list.iter().enumerate() {
                    for &(k, ck) in list.iter().take(ia + 1) {
                        let v = cm * ck * w;
                        schur.add_at(m, k, v);
                        if m != k {
                            schur.add_at(k, m, v);
                        }
                    }
                }
            }
        }

        // Factor the Schur matrix with escalating ridge regularization.
        let mut ridge = 0.0_f64;
        let lschur = loop {
            let mut s = schur.clone();
            if ridge > 0.0 {
                let r = R::from_f64(ridge);
                for i in 0..nvars {
                    s.add_at(i, i, r);
                }
            }
            match s.cholesky() {
                Ok(l) => break Some(l),
                Err(_) => {
                    let base = schur.trace().to_f64().abs() / nvars as f64 + 1.0;
                    ridge = if ridge == 0.0 { 1e-14 * base } else { ridge * 100.0 };
                    if ridge > 1e-2 * base {
                        break None;
                    }
                }
            }
        };
        let lschur = match lschur {
            Some(l) => l,
            None => {
                message = "schur factorization failed; returning best iterate".into();
                break;
            }
        };
        let solve_schur = |rhs: &[R]| -> Vec<R> {
            let y = lschur.solve_lower(rhs);
            lschur.solve_lower_transpose(&y)
        };

        // ---- predictor (affine scaling direction, sigma = 0) ----
        let mut rhs = vec![R::zero(); nvars];
        for m in 0..nvars {
            rhs[m] = bhat[m] - t_vec[m];
        }
        let dx_aff = solve_schur(&rhs);
        compute_directions(
            &dense, &diag, &mut dstates, &mut gstates, &dx_aff, 0.0, mu, false,
        );
        for st in dstates.iter_mut() {
            st.dx_aff = st.dx.clone();
            st.ds_aff = st.ds.clone();
        }
        for st in gstates.iter_mut() {
            st.dx_aff = st.dx.clone();
            st.ds_aff = st.ds.clone();
        }
        let (ap_aff, ad_aff) = step_lengths(&mut dstates, &mut gstates, config.step_damping);

        // mu after the affine step, then Mehrotra's sigma heuristic.
        let mut compl_aff = R::zero();
        let (apr, adr) = (R::from_f64(ap_aff), R::from_f64(ad_aff));
        for st in dstates.iter() {
            compl_aff += st.x.dot(&st.s)
                + apr * st.dx_aff.dot(&st.s)
                + adr * st.x.dot(&st.ds_aff)
                + apr * adr * st.dx_aff.dot(&st.ds_aff);
        }
        for st in gstates.iter() {
            for p in 0..st.x.len() {
                compl_aff += (st.x[p] + apr * st.dx_aff[p]) * (st.s[p] + adr * st.ds_aff[p]);
            }
        }
        let mu_aff = (compl_aff.to_f64() / nu).max(0.0);
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-10, 1.0);

        // ---- corrector ----
        let mut c_vec = vec![R::zero(); nvars];
        for (dd, st) in dense.iter().zip(dstates.iter()) {
            let mut u = st.dx_aff.matmul(&st.ds_aff).matmul(&st.sinv);
            u.symmetrize();
            for (var, e) in &dd.vars {
                c_vec[*var] += sparse_trace_dot(e, &u);
            }
        }
        for (dg, st) in diag.iter().zip(gstates.iter()) {
            for (var, e) in &dg.vars {
                for &(p, c) in e {
                    c_vec[*var] += c * st.dx_aff[p] * st.ds_aff[p] / st.s[p];
                }
            }
        }
        let smu = R::from_f64(sigma * mu);
        for m in 0..nvars {
            rhs[m] = bhat[m] + smu * a_vec[m] - t_vec[m] - c_vec[m];
        }
        let dx_corr = solve_schur(&rhs);
        compute_directions(
            &dense, &diag, &mut dstates, &mut gstates, &dx_corr, sigma, mu, true,
        );
        let (ap, ad) = step_lengths(&mut dstates, &mut gstates, config.step_damping);

        // ---- update ----
        let (apr, adr) = (R::from_f64(ap), R::from_f64(ad));
        for m in 0..nvars {
            x[m] += adr * dx_corr[m];
        }
        for st in dstates.iter_mut() {
            st.x.axpy(apr, &st.dx);
            st.x.symmetrize();
            st.s.axpy(adr, &st.ds);
            st.s.symmetrize();
        }
        for st in gstates.iter_mut() {
            for p in 0..st.x.len() {
                st.x[p] += apr * st.dx[p];
                st.s[p] += adr * st.ds[p];
            }
        }
        if ap < 1e-10 && ad < 1e-10 {
            message = "step length collapsed; returning best iterate".into();
            break;
        }
    }

    let (_, mut out) = best.unwrap_or_else(|| {
        (
            f64::INFINITY,
            IterateOutcome {
                x: descale_x(&x),
                dual_obj: 0.0,
                primal_obj: 0.0,
                gap: f64::INFINITY,
                pres: f64::INFINITY,
                dres: f64::INFINITY,
                iterations: iters_done,
                converged: false,
                message: String::new(),
            },
        )
    });
    out.iterations = iters_done;
    if out.message.is_empty() {
        out.message = if message.is_empty() {
            "max iterations reached".into()
        } else {
            message
        };
    }
    out
}

/// Computes (ΔX, ΔS) for every block given the variable direction Δx:
/// ΔS = R_d + Σ Δx_m F_m and ΔX = σμS⁻¹ − X − H(X ΔS S⁻¹) [− corrector].
fn compute_directions<R: Real>(
    dense: &[DenseData<R>],
    diag: &[DiagData<R>],
    dstates: &mut [DenseState<R>],
    gstates: &mut [DiagState<R>],
    dx_var: &[R],
    sigma: f64,
    mu: f64,
    corrector: bool,
) {
    let smu = R::from_f64(sigma * mu);
    for (dd, st) in dense.iter().zip(dstates.iter_mut()) {
        st.ds = st.rd.clone();
        for (var, e) in &dd.vars {
            add_sparse(&mut st.ds, e, dx_var[*var]);
        }
        // ΔX = σμ S⁻¹ − X − sym(X ΔS S⁻¹) [− sym(ΔX_aff ΔS_aff S⁻¹)]
        let mut dx = st.sinv.clone();
        dx.scale(smu);
        dx.axpy(-R::one(), &st.x);
        let mut t = st.x.matmul(&st.ds).matmul(&st.sinv);
        t.symmetrize();
        dx.axpy(-R::one(), &t);
        if corrector {
            let mut u = st.dx_aff.matmul(&st.ds_aff).matmul(&st.sinv);
            u.symmetrize();
            dx.axpy(-R::one(), &u);
        }
        st.dx = dx;
    }
    for (dg, st) in diag.iter().zip(gstates.iter_mut()) {
        for p in 0..dg.size {
            st.ds[p] = st.rd[p];
        }
        for (var, e) in &dg.vars {
            for &(p, c) in e {
                st.ds[p] += c * dx_var[*var];
            }
        }
        for p in 0..dg.size {
            let mut v = smu / st.s[p] - st.x[p] - st.x[p] * st.ds[p] / st.s[p];
            if corrector {
                v -= st.dx_aff[p] * st.ds_aff[p] / st.s[p];
            }
            st.dx[p] = v;
        }
    }
}

/// Fraction-to-boundary step lengths for (X, ΔX) and (S, ΔS).
fn step_lengths<R: Real>(
    dstates: &mut [DenseState<R>],
    gstates: &mut [DiagState<R>],
    damping: f64,
) -> (f64, f64) {
    let mut ap = 1.0_f64;
    let mut ad = 1.0_f64;
    for st in dstates.iter() {
        if let Some(a) = max_step_dense(&st.lx, &st.dx) {
            ap = ap.min(damping * a);
        }
        if let Some(a) = max_step_dense(&st.ls, &st.ds) {
            ad = ad.min(damping * a);
        }
    }
    for st in gstates.iter() {
        for p in 0..st.x.len() {
            let dxp = st.dx[p].to_f64();
            if dxp < 0.0 {
                ap = ap.min(damping * (-st.x[p].to_f64() / dxp));
            }
            let dsp = st.ds[p].to_f64();
            if dsp < 0.0 {
                ad = ad.min(damping * (-st.s[p].to_f64() / dsp));
            }
        }
    }
    (ap.max(0.0), ad.max(0.0))
}

/// Largest α with M + αΔ ⪰ 0, via λ_min(L⁻¹ Δ L⁻ᵀ) for M = LLᵀ.
/// Returns None when the direction never leaves the cone.
fn max_step_dense<R: Real>(l: &Mat<R>, delta: &Mat<R>) -> Option<f64> {
    let n = l.n;
    // A1 = L⁻¹ Δ (column solves), then W = A1 L⁻ᵀ via row solves.
    let mut a1 = Mat::<R>::zeros(n);
    let mut col = vec![R::zero(); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = delta.at(i, j);
        }
        let y = l.solve_lower(&col);
        for i in 0..n {
            a1.set(i, j, y[i]);
        }
    }
    let mut w = Mat::<R>::zeros(n);
    for i in 0..n {
        let row: Vec<R> = (0..n).map(|j| a1.at(i, j)).collect();
        let y = l.solve_lower(&row);
        for j in 0..n {
            w.set(i, j, y[j]);
        }
    }
    w.symmetrize();
    let eigs = super::linalg::sym_eigenvalues(&w).ok()?;
    let lmin = eigs[0].to_f64();
    if lmin >= 0.0 {
        None
    } else {
        Some(-1.0 / lmin)
    }
}

impl<R: Real> Mat<R> {
    /// self += c · u vᵀ
    pub fn add_outer(&mut self, c: R, u: &[R], v: &[R]) {
        let n = self.n;
        for i in 0..n {
            let cu = c * u[i];
            if cu.to_f64() == 0.0 {
                continue;
            }
            let row = &mut self.a[i * n..(i + 1) * n];
            for j in 0..n {
                row[j] += cu * v[j];
            }
        }
    }
}
