//! Explicit 2^n-sized matrices and the oracles that pin the block
//! diagonalization to them.
//!
//! Everything here is oracle-scale machinery: it builds the actual matrices
//! the reduced blocks stand in for, computes their full spectra, and checks
//! that the reduced spectra (with isotypic multiplicities) reproduce them.
//! The solver path is only trusted after these oracles pass.

use num::ToPrimitive;

use super::blocks::Family;
use super::OrbitTable;
use crate::error::{Error, Result};
use crate::scheme::binomial;
use crate::sdp::linalg::{sym_eigenvalues, Mat};

/// Explicit-matrix construction limit (2^n × 2^n, sparse or dense).
pub const EXPLICIT_MAX_N: u32 = 14;
/// Full-spectrum oracle limit.
pub const ORACLE_MAX_N: u32 = 10;

/// Sparse 0-1 matrix over the 2^n word space.
#[derive(Debug, Clone)]
pub struct SparseZeroOne {
    pub size: usize,
    /// (row word, column word) positions of the ones.
    pub ones: Vec<(u32, u32)>,
}

/// Builds M^t_{i,j} explicitly: entry (X, Y) = 1 iff |X| = i, |Y| = j,
/// d_H(X, Y) = i + j - 2t.
pub fn build_m(n: u32, i: u32, j: u32, t: u32) -> Result<SparseZeroOne> {
    if n > EXPLICIT_MAX_N {
        return Err(Error::limit(format!(
            "explicit matrices are capped at n={EXPLICIT_MAX_N}, got {n}"
        )));
    }
    super::TripleIndex::new(n, i, j, t)?;
    let size = 1usize << n;
    let d = i + j - 2 * t;
    let mut ones = Vec::new();
    for x in 0..size as u32 {
        if x.count_ones() != i {
            continue;
        }
        for y in 0..size as u32 {
            if y.count_ones() == j && (x ^ y).count_ones() == d {
                ones.push((x, y));
            }
        }
    }
    Ok(SparseZeroOne { size, ones })
}

/// Dense Σ c(i,j,t)·M^t_{i,j} over all valid triples, for an arbitrary
/// per-triple coefficient function.
pub fn explicit_matrix_from_fn(n: u32, coeff: impl Fn(u32, u32, u32) -> f64) -> Mat<f64> {
    let size = 1usize << n;
    let mut m = Mat::<f64>::zeros(size);
    for x in 0..size as u32 {
        let i = x.count_ones();
        for y in 0..size as u32 {
            let j = y.count_ones();
            let d = (x ^ y).count_ones();
            // t is determined by (i, j, d); the pair (X, Y) realizes it.
            let t = (i + j - d) / 2;
            m.set(x as usize, y as usize, coeff(i, j, t));
        }
    }
    m
}

/// Dense Σ x_orbit M for one family at an orbit assignment.
pub fn explicit_family_matrix(n: u32, x: &[f64], family: Family) -> Result<Mat<f64>> {
    if n > ORACLE_MAX_N {
        return Err(Error::limit(format!(
            "explicit family matrices are capped at n={ORACLE_MAX_N}, got {n}"
        )));
    }
    let table = OrbitTable::new(n);
    if x.len() != table.len() {
        return Err(Error::invalid(format!(
            "assignment covers {} orbits; expected {}",
            x.len(),
            table.len()
        )));
    }
    Ok(match family {
        Family::Moment => {
            explicit_matrix_from_fn(n, |i, j, t| x[table.orbit_of(i, j, t).unwrap()])
        }
        Family::Complement => explicit_matrix_from_fn(n, |i, j, t| {
            let d = i + j - 2 * t;
            x[table.pair_orbit(d).unwrap()] - x[table.orbit_of(i, j, t).unwrap()]
        }),
    })
}

/// Isotypic multiplicity of block k: C(n,k) - C(n,k-1).
pub fn block_multiplicity(n: u32, k: u32) -> usize {
    let a = binomial(n as u64, k as i64).to_usize().unwrap();
    let b = if k == 0 {
        0
    } else {
        binomial(n as u64, k as i64 - 1).to_usize().unwrap()
    };
    a - b
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct OracleReport {
    pub n: u32,
    pub family: &'static str,
    /// Max |λ_explicit - λ_reduced| over the sorted spectra.
    pub max_spectral_discrepancy: f64,
    pub explicit_min_eig: f64,
    pub reduced_min_eig: f64,
    /// PSD verdicts agree at the given tolerance.
    pub psd_agree: bool,
    pub tolerance: f64,
}

fn spectra_report(
    n: u32,
    family: &'static str,
    explicit: &Mat<f64>,
    reduced: &[Vec<Vec<f64>>],
    extra: Option<Vec<f64>>,
    tolerance: f64,
) -> Result<OracleReport> {
    let mut full = sym_eigenvalues(explicit)?;
    let mut union: Vec<f64> = extra.unwrap_or_default();
    for (k, blk) in reduced.iter().enumerate() {
        let sz = blk.len();
        let mut m = Mat::<f64>::zeros(sz);
        for r in 0..sz {
            for c in 0..sz {
                m.set(r, c, blk[r][c]);
            }
        }
        let eigs = sym_eigenvalues(&m)?;
        let mult = block_multiplicity(n, k as u32);
        for e in eigs {
            for _ in 0..mult {
                union.push(e);
            }
        }
    }
    if union.len() != full.len() {
        return Err(Error::invalid(format!(
            "spectrum size mismatch: explicit {} vs reduced {}",
            full.len(),
            union.len()
        )));
    }
    full.sort_by(|a, b| a.partial_cmp(b).unwrap());
    union.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_disc = full
        .iter()
        .zip(&union)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let explicit_min = full[0];
    let reduced_min = union[0];
    let psd_agree = (explicit_min >= -tolerance) == (reduced_min >= -tolerance)
        || (explicit_min - reduced_min).abs() <= tolerance;
    Ok(OracleReport {
        n,
        family,
        max_spectral_discrepancy: max_disc,
        explicit_min_eig: explicit_min,
        reduced_min_eig: reduced_min,
        psd_agree,
        tolerance,
    })
}

/// Compares the explicit Σ x M (or the complement family) against the
/// multiplicity-weighted union of reduced-block spectra.
pub fn psd_equivalence_oracle(n: u32, x: &[f64], family: Family) -> Result<OracleReport> {
    let explicit = explicit_family_matrix(n, x, family)?;
    let reduced = super::blocks::reduce_blocks(n, x, family)?;
    let name = match family {
        Family::Moment => "moment",
        Family::Complement => "complement",
    };
    spectra_report(n, name, &explicit, &reduced, None, 1e-7)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BorderedOracleReport {
    pub inner: OracleReport,
}

/// Bordered variant: compares the explicit (2^n + 1)-sized matrix
///
/// ```text
///   [ 1 - x_unit   cᵀ ]          c_X = x_unit - x_{orbit(0,|X|,0)}
///   [ c            Σ (x^0_{d,0} - x^t_{i,j}) M^t_{i,j} ]
/// ```
///
/// against the reduced form, where the border attaches only to the k = 0
/// block with entries √C(n,i)·(x_unit - x^0_{0,i}).
pub fn bordered_equivalence_oracle(n: u32, x: &[f64]) -> Result<BorderedOracleReport> {
    if n > ORACLE_MAX_N {
        return Err(Error::limit(format!(
            "bordered oracle capped at n={ORACLE_MAX_N}, got {n}"
        )));
    }
    let table = OrbitTable::new(n);
    if x.len() != table.len() {
        return Err(Error::invalid("assignment size mismatch"));
    }
    let x_unit = x[table.unit_orbit()];
    let size = 1usize << n;

    // Explicit bordered matrix, border index 0.
    let inner = explicit_family_matrix(n, x, Family::Complement)?;
    let mut big = Mat::<f64>::zeros(size + 1);
    big.set(0, 0, 1.0 - x_unit);
    for w in 0..size as u32 {
        let i = w.count_ones();
        let c = x_unit - x[table.pair_orbit(i).unwrap()];
        big.set(0, (w + 1) as usize, c);
        big.set((w + 1) as usize, 0, c);
    }
    for r in 0..size {
        for c in 0..size {
            big.set(r + 1, c + 1, inner.at(r, c));
        }
    }

    // Reduced: bordered k = 0 block plus plain k >= 1 blocks.
    let reduced = super::blocks::reduce_blocks(n, x, Family::Complement)?;
    let mut b0 = Mat::<f64>::zeros(reduced[0].len() + 1);
    b0.set(0, 0, 1.0 - x_unit);
    for i in 0..=n {
        let norm = binomial(n as u64, i as i64).to_f64().unwrap().sqrt();
        let c = norm * (x_unit - x[table.pair_orbit(i).unwrap()]);
        b0.set(0, (i + 1) as usize, c);
        b0.set((i + 1) as usize, 0, c);
    }
    for r in 0..reduced[0].len() {
        for c in 0..reduced[0].len() {
            b0.set(r + 1, c + 1, reduced[0][r][c]);
        }
    }
    let b0_eigs = sym_eigenvalues(&b0)?;
    let rest: Vec<Vec<Vec<f64>>> = reduced[1..].to_vec();
    // Reuse the spectra comparison with the k >= 1 blocks shifted by one in
    // multiplicity index: block index k corresponds to reduced[k].
    let mut union: Vec<f64> = b0_eigs;
    for (k, blk) in rest.iter().enumerate() {
        let sz = blk.len();
        let mut m = Mat::<f64>::zeros(sz);
        for r in 0..sz {
            for c in 0..sz {
                m.set(r, c, blk[r][c]);
            }
        }
        let eigs = sym_eigenvalues(&m)?;
        let mult = block_multiplicity(n, (k + 1) as u32);
        for e in eigs {
            for _ in 0..mult {
                union.push(e);
            }
        }
    }
    let mut full = sym_eigenvalues(&big)?;
    if union.len() != full.len() {
        return Err(Error::invalid("bordered spectrum size mismatch"));
    }
    full.sort_by(|a, b| a.partial_cmp(b).unwrap());
    union.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_disc = full
        .iter()
        .zip(&union)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let tolerance = 1e-7;
    let psd_agree = (full[0] >= -tolerance) == (union[0] >= -tolerance)
        || (full[0] - union[0]).abs() <= tolerance;
    Ok(BorderedOracleReport {
        inner: OracleReport {
            n,
            family: "bordered",
            max_spectral_discrepancy: max_disc,
            explicit_min_eig: full[0],
            reduced_min_eig: union[0],
            psd_agree,
            tolerance,
        },
    })
}
