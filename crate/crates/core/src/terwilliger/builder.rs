//! Assembly of the two semidefinite relaxations in reduced block form.
//!
//! Both relaxations share the orbit variable structure and the bound
//! constraints; they differ in the normalization of the {0,0,0} orbit, the
//! objective, and the shape of the complement-family constraint:
//!
//! * `schrijver`: x_{0,0,0} substituted to 1, objective Σ C(n,i)·x^0_{i,0},
//!   both families as plain PSD blocks;
//! * `laurent`: x_{0,0,0} stays a variable, objective 2^n·x_{0,0,0}, and the
//!   k = 0 complement block is bordered by the vector with entries
//!   √C(n,i)·(x_{0,0,0} - x^0_{0,i}) under the scalar 1 - x_{0,0,0}.
//!
//! Orbits whose distance multiset meets the forbidden set are forced to
//! zero and never become variables. Block rows with no structural entries
//! (for instance weight n/2 in the moment family when n/2 is forbidden)
//! are compressed away so the slack blocks stay nondegenerate.

use std::collections::BTreeSet;

use num::ToPrimitive;

use super::blocks::{reduced_block_templates, Family, ReducedBlock};
use super::OrbitTable;
use crate::error::{Error, Result};
use crate::scheme::binomial;
use crate::sdp::problem::{BlockKind, SdpProblem};

/// Problem construction limit.
pub const BUILDER_MAX_N: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Schrijver,
    Laurent,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flavor::Schrijver => write!(f, "schrijver"),
            Flavor::Laurent => write!(f, "laurent"),
        }
    }
}

/// Interpretation of the x^t_{i,j} ≤ x^0_{i,0} bound family over orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperBoundMode {
    /// One bound per orbit against the pair orbit of the representative's
    /// distance d = i+j-2t (the largest multiset element).
    RepresentativeDistance,
    /// Bounds against the pair orbits of every distinct multiset element,
    /// the reading in which the inequality is imposed for every member.
    AllMultisetElements,
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub upper_bounds: UpperBoundMode,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            upper_bounds: UpperBoundMode::RepresentativeDistance,
        }
    }
}

/// Mapping between orbit space and solver variables for a built problem.
#[derive(Debug, Clone)]
pub struct OrbitModel {
    pub n: u32,
    pub flavor: Flavor,
    pub forbidden: BTreeSet<u32>,
    pub table: OrbitTable,
    pub forced: Vec<bool>,
    pub var_of_orbit: Vec<Option<usize>>,
    pub orbit_of_var: Vec<usize>,
}

impl OrbitModel {
    /// Expands a solver solution vector into a full orbit assignment
    /// (forced orbits at zero, the substituted unit orbit at one).
    pub fn assignment_from_solution(&self, x: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.table.len()];
        for (o, v) in self.var_of_orbit.iter().enumerate() {
            match v {
                Some(m) => full[o] = x[*m],
                None => {
                    if !self.forced[o] && o == self.table.unit_orbit() {
                        full[o] = 1.0;
                    }
                }
            }
        }
        full
    }
}

fn forbidden_label(forbidden: &BTreeSet<u32>) -> String {
    if forbidden.is_empty() {
        return "none".into();
    }
    forbidden
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn validate_inputs(n: u32, forbidden: &BTreeSet<u32>) -> Result<()> {
    if n == 0 || n > BUILDER_MAX_N {
        return Err(Error::limit(format!(
            "builder accepts 1 <= n <= {BUILDER_MAX_N}, got {n}"
        )));
    }
    if forbidden.contains(&0) {
        return Err(Error::invalid(
            "forbidden distance 0 would exclude every code",
        ));
    }
    if let Some(d) = forbidden.iter().find(|&&d| d > n) {
        return Err(Error::invalid(format!(
            "forbidden distance {d} exceeds n={n}"
        )));
    }
    Ok(())
}

/// The relaxation with x_{0,0,0} = 1 and objective Σ_i C(n,i)·x^0_{i,0}.
pub fn build_schrijver_sdp(
    n: u32,
    forbidden: &BTreeSet<u32>,
) -> Result<(SdpProblem, OrbitModel)> {
    build(n, forbidden, Flavor::Schrijver, &BuildOptions::default())
}

/// The refinement with objective 2^n·x_{0,0,0} and the bordered block.
pub fn build_laurent_sdp(n: u32, forbidden: &BTreeSet<u32>) -> Result<(SdpProblem, OrbitModel)> {
    build(n, forbidden, Flavor::Laurent, &BuildOptions::default())
}

/// Full-control build entry.
pub fn build(
    n: u32,
    forbidden: &BTreeSet<u32>,
    flavor: Flavor,
    options: &BuildOptions,
) -> Result<(SdpProblem, OrbitModel)> {
    validate_inputs(n, forbidden)?;
    let table = OrbitTable::new(n);
    let unit = table.unit_orbit();

    let forced: Vec<bool> = table
        .orbits
        .iter()
        .map(|o| {
            let (a, b, c) = o.rep.multiset();
            forbidden.contains(&a) || forbidden.contains(&b) || forbidden.contains(&c)
        })
        .collect();

    let mut var_of_orbit: Vec<Option<usize>> = vec![None; table.len()];
    let mut orbit_of_var: Vec<usize> = Vec::new();
    for o in 0..table.len() {
        if forced[o] {
            continue;
        }
        if flavor == Flavor::Schrijver && o == unit {
            continue; // substituted to 1
        }
        var_of_orbit[o] = Some(orbit_of_var.len());
        orbit_of_var.push(o);
    }
    let nvars = orbit_of_var.len();

    let mut problem = SdpProblem::new(
        format!("{flavor} n={n} forbidden={}", forbidden_label(forbidden)),
        nvars,
    );

    // ---- objective ----
    match flavor {
        Flavor::Schrijver => {
            for i in 0..=n {
                let o = table.pair_orbit(i)?;
                if forced[o] {
                    continue;
                }
                let c = binomial(n as u64, i as i64).to_f64().unwrap();
                match var_of_orbit[o] {
                    Some(m) => problem.objective[m] += c,
                    None => problem.objective_offset += c, // the unit orbit (i = 0)
                }
            }
        }
        Flavor::Laurent => {
            let m = var_of_orbit[unit].expect("unit orbit is always a variable here");
            problem.objective[m] = (n as f64).exp2();
        }
    }

    // ---- PSD families ----
    let moment = reduced_block_templates(&table, Family::Moment)?;
    let complement = reduced_block_templates(&table, Family::Complement)?;
    for blk in &moment {
        add_reduced_block(&mut problem, blk, &forced, &var_of_orbit, unit, flavor, 0);
    }
    for blk in &complement {
        let bordered = flavor == Flavor::Laurent && blk.k == 0;
        let shift = usize::from(bordered);
        let idx = add_reduced_block(&mut problem, blk, &forced, &var_of_orbit, unit, flavor, shift);
        if bordered {
            // Border row 0: scalar 1 - x_unit and entries √C(n,i)·(x_unit - x^0_{0,i}).
            let mu = var_of_orbit[unit].expect("unit orbit variable");
            problem.add_f0(idx, 0, 0, 1.0);
            problem.add_coeff(idx, mu, 0, 0, -1.0);
            for i in 1..=n {
                let po = table.pair_orbit(i)?;
                let norm = binomial(n as u64, i as i64).to_f64().unwrap().sqrt();
                problem.add_coeff(idx, mu, 0, (i + 1) as usize, norm);
                if let Some(mp) = var_of_orbit[po] {
                    problem.add_coeff(idx, mp, 0, (i + 1) as usize, -norm);
                }
                // forced pair orbits contribute x^0_{0,i} = 0: nothing to add
            }
        }
    }

    // ---- bounds: 0 <= x_O and x_O <= x_{pair(d)} as one diagonal block ----
    let mut rows: Vec<(Option<f64>, Vec<(usize, f64)>)> = Vec::new();
    for m in 0..nvars {
        rows.push((None, vec![(m, 1.0)]));
    }
    for m in 0..nvars {
        let o = orbit_of_var[m];
        let (a, b, c) = table.orbits[o].rep.multiset();
        let mut targets: Vec<u32> = match options.upper_bounds {
            UpperBoundMode::RepresentativeDistance => vec![c],
            UpperBoundMode::AllMultisetElements => vec![a, b, c],
        };
        targets.sort_unstable();
        targets.dedup();
        for d in targets {
            let po = table.pair_orbit(d)?;
            if po == o || forced[po] {
                continue;
            }
            match var_of_orbit[po] {
                Some(mp) => rows.push((None, vec![(mp, 1.0), (m, -1.0)])),
                None => rows.push((Some(1.0), vec![(m, -1.0)])), // x_O <= x_unit = 1
            }
        }
    }
    if !rows.is_empty() {
        let blk = problem.add_block(BlockKind::Diag(rows.len()));
        for (p, (f0, coeffs)) in rows.iter().enumerate() {
            if let Some(v) = f0 {
                problem.add_f0(blk, p, p, *v);
            }
            for (m, c) in coeffs {
                problem.add_coeff(blk, *m, p, p, *c);
            }
        }
    }

    problem.normalize();
    compress_dense_blocks(&mut problem);
    problem.normalize();
    problem.validate()?;

    let model = OrbitModel {
        n,
        flavor,
        forbidden: forbidden.clone(),
        table,
        forced,
        var_of_orbit,
        orbit_of_var,
    };
    Ok((problem, model))
}

/// Adds one reduced template block to the problem, mapping orbits to
/// variables, dropping forced orbits, and folding the substituted unit
/// orbit into F_0. Returns the block index.
fn add_reduced_block(
    problem: &mut SdpProblem,
    blk: &ReducedBlock,
    forced: &[bool],
    var_of_orbit: &[Option<usize>],
    unit: usize,
    flavor: Flavor,
    index_shift: usize,
) -> usize {
    let idx = problem.add_block(BlockKind::Dense(blk.size + index_shift));
    for &(r, c, orbit, coeff) in &blk.entries {
        if forced[orbit] {
            continue;
        }
        let (r, c) = (r + index_shift, c + index_shift);
        match var_of_orbit[orbit] {
            Some(m) => problem.add_coeff(idx, m, r, c, coeff),
            None => {
                debug_assert!(orbit == unit && flavor == Flavor::Schrijver);
                problem.add_f0(idx, r, c, coeff);
            }
        }
    }
    idx
}

/// Removes structurally empty rows/columns of dense blocks and drops dense
/// blocks with no entries at all.
fn compress_dense_blocks(problem: &mut SdpProblem) {
    for b in 0..problem.num_blocks() {
        let size = match problem.blocks[b] {
            BlockKind::Dense(s) => s,
            BlockKind::Diag(_) => continue,
        };
        let mut used = vec![false; size];
        for &(i, j, _) in &problem.f0[b].entries {
            used[i as usize] = true;
            used[j as usize] = true;
        }
        for (_, m) in &problem.coeffs[b] {
            for &(i, j, _) in &m.entries {
                used[i as usize] = true;
                used[j as usize] = true;
            }
        }
        let count = used.iter().filter(|&&u| u).count();
        if count == size {
            continue;
        }
        let mut remap = vec![usize::MAX; size];
        let mut next = 0usize;
        for (i, &u) in used.iter().enumerate() {
            if u {
                remap[i] = next;
                next += 1;
            }
        }
        problem.blocks[b] = BlockKind::Dense(count);
        for e in problem.f0[b].entries.iter_mut() {
            e.0 = remap[e.0 as usize] as u32;
            e.1 = remap[e.1 as usize] as u32;
        }
        for (_, m) in problem.coeffs[b].iter_mut() {
            for e in m.entries.iter_mut() {
                e.0 = remap[e.0 as usize] as u32;
                e.1 = remap[e.1 as usize] as u32;
            }
        }
    }
    // Drop empty dense blocks (possible when every orbit of a block is forced).
    let keep: Vec<bool> = (0..problem.num_blocks())
        .map(|b| {
            problem.blocks[b].size() > 0
                && (!problem.f0[b].is_empty() || !problem.coeffs[b].is_empty())
        })
        .collect();
    if keep.iter().all(|&k| k) {
        return;
    }
    let mut blocks = Vec::new();
    let mut f0 = Vec::new();
    let mut coeffs = Vec::new();
    for b in 0..problem.num_blocks() {
        if keep[b] {
            blocks.push(problem.blocks[b]);
            f0.push(std::mem::take(&mut problem.f0[b]));
            coeffs.push(std::mem::take(&mut problem.coeffs[b]));
        }
    }
    problem.blocks = blocks;
    problem.f0 = f0;
    problem.coeffs = coeffs;
}
