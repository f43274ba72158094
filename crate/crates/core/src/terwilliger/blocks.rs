//! Reduced-block coefficients for the algebra spanned by the M^t_{i,j}.
//!
//! For each k = 0..⌊n/2⌋ the invariant matrix Σ x^t_{i,j} M^t_{i,j} acts on
//! an isotypic component through the (n-2k+1)-sized block
//!
//! ```text
//!   B_k[i, j] = s_{ik} s_{jk} Σ_t β^{n,k}_{i,j,t} x^t_{i,j},
//!   i, j ∈ {k, …, n-k},   s_{ik} = C(n-2k, i-k)^{-1/2},
//! ```
//!
//! and the full 2^n spectrum is the union of the block spectra, block k
//! repeated C(n,k) - C(n,k-1) times. The β coefficients are exact integers;
//! the sign convention and the diagonal scaling are validated against
//! explicit matrices by the oracles in `explicit`.

use num::{BigInt, ToPrimitive, Zero};

use super::OrbitTable;
use crate::error::{Error, Result};
use crate::scheme::binomial_int;

/// Which of the two PSD families the coefficients belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Σ x^t_{i,j} M^t_{i,j}
    Moment,
    /// Σ (x^0_{i+j-2t,0} - x^t_{i,j}) M^t_{i,j}
    Complement,
}

/// β^{n,k}_{i,j,t} = Σ_u (-1)^{u-t} C(u,t) C(n-2k, u-k) C(n-k-u, i-u) C(n-k-u, j-u).
///
/// Exact integer; zero whenever the triple is not realizable.
pub fn block_coefficient(n: u32, k: u32, i: u32, j: u32, t: u32) -> Result<BigInt> {
    if 2 * k > n {
        return Err(Error::invalid(format!("block index k={k} above n/2")));
    }
    if i < k || j < k || i > n - k || j > n - k {
        return Err(Error::invalid(format!(
            "weights (i={i}, j={j}) outside block range [{k}, {}]",
            n - k
        )));
    }
    let (n_, k_, i_, j_, t_) = (n as i64, k as i64, i as i64, j as i64, t as i64);
    let mut sum = BigInt::zero();
    for u in k_.max(t_)..=i_.min(j_) {
        let term = binomial_int(u as u64, t_)
            * binomial_int((n_ - 2 * k_) as u64, u - k_)
            * binomial_int((n_ - k_ - u) as u64, i_ - u)
            * binomial_int((n_ - k_ - u) as u64, j_ - u);
        if term.is_zero() {
            continue;
        }
        if (u - t_) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// s_{ik}·s_{jk} with s_{ik} = C(n-2k, i-k)^{-1/2}; the diagonal case
/// divides by the binomial directly so entries like β_{i,i,i}·s² = 1 stay
/// exact in floating point.
fn pair_scale(n: u32, k: u32, i: u32, j: u32) -> f64 {
    let bi = binomial_int((n - 2 * k) as u64, (i - k) as i64)
        .to_f64()
        .unwrap();
    if i == j {
        return 1.0 / bi;
    }
    let bj = binomial_int((n - 2 * k) as u64, (j - k) as i64)
        .to_f64()
        .unwrap();
    1.0 / (bi.sqrt() * bj.sqrt())
}

/// Evaluates the reduced blocks for an arbitrary per-triple coefficient
/// function (must be symmetric in i and j for a symmetric result).
pub fn reduced_blocks_from_fn(
    n: u32,
    coeff: impl Fn(u32, u32, u32) -> f64,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut out = Vec::new();
    for k in 0..=(n / 2) {
        let size = (n - 2 * k + 1) as usize;
        let mut rows = vec![vec![0.0; size]; size];
        for i in k..=(n - k) {
            for j in i..=(n - k) {
                let scale = pair_scale(n, k, i, j);
                let mut upper = 0.0;
                let mut lower = 0.0;
                for t in 0..=i.min(j) {
                    if i + j - t > n {
                        continue;
                    }
                    let beta = block_coefficient(n, k, i, j, t)?;
                    if beta.is_zero() {
                        continue;
                    }
                    let b = beta.to_f64().unwrap();
                    upper += b * coeff(i, j, t);
                    if i != j {
                        lower += b * coeff(j, i, t);
                    }
                }
                let (r, c) = ((i - k) as usize, (j - k) as usize);
                rows[r][c] += scale * upper;
                if r != c {
                    rows[c][r] += scale * lower;
                }
            }
        }
        out.push(rows);
    }
    Ok(out)
}

/// One symbolic reduced block over orbit variables, used by the SDP builders.
#[derive(Debug, Clone)]
pub struct ReducedBlock {
    pub k: u32,
    /// Block order n - 2k + 1.
    pub size: usize,
    /// (row, col, orbit, coefficient) with row <= col, block-local indices.
    pub entries: Vec<(usize, usize, usize, f64)>,
}

/// Symbolic reduced blocks of the requested family over orbit variables.
///
/// For `Family::Complement`, each triple contributes +coeff to the orbit of
/// (d, 0, 0) with d = i+j-2t and -coeff to its own orbit.
pub fn reduced_block_templates(table: &OrbitTable, family: Family) -> Result<Vec<ReducedBlock>> {
    let n = table.n;
    let mut out = Vec::new();
    for k in 0..=(n / 2) {
        let size = (n - 2 * k + 1) as usize;
        let mut entries = Vec::new();
        for i in k..=(n - k) {
            for j in i..=(n - k) {
                let scale = pair_scale(n, k, i, j);
                for t in 0..=i.min(j) {
                    if i + j - t > n {
                        continue;
                    }
                    let beta = block_coefficient(n, k, i, j, t)?;
                    if beta.is_zero() {
                        continue;
                    }
                    let coeff = beta.to_f64().unwrap() * scale;
                    let row = (i - k) as usize;
                    let col = (j - k) as usize;
                    let orbit = table.orbit_of(i, j, t)?;
                    match family {
                        Family::Moment => entries.push((row, col, orbit, coeff)),
                        Family::Complement => {
                            let d = i + j - 2 * t;
                            entries.push((row, col, table.pair_orbit(d)?, coeff));
                            entries.push((row, col, orbit, -coeff));
                        }
                    }
                }
            }
        }
        out.push(ReducedBlock { k, size, entries });
    }
    Ok(out)
}

/// Evaluates the reduced blocks of a family at an assignment over orbits.
/// Returns one dense symmetric matrix per k.
pub fn reduce_blocks(n: u32, x: &[f64], family: Family) -> Result<Vec<Vec<Vec<f64>>>> {
    let table = OrbitTable::new(n);
    if x.len() != table.len() {
        return Err(Error::invalid(format!(
            "assignment covers {} orbits; expected {}",
            x.len(),
            table.len()
        )));
    }
    match family {
        Family::Moment => {
            reduced_blocks_from_fn(n, |i, j, t| x[table.orbit_of(i, j, t).unwrap()])
        }
        Family::Complement => reduced_blocks_from_fn(n, |i, j, t| {
            let d = i + j - 2 * t;
            x[table.pair_orbit(d).unwrap()] - x[table.orbit_of(i, j, t).unwrap()]
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    #[test]
    fn beta_collapses_to_one_at_origin() {
        // k = i = j = t = 0: single u = 0 term equal to 1.
        for n in 1..=8 {
            assert_eq!(block_coefficient(n, 0, 0, 0, 0).unwrap(), BigInt::one());
        }
    }

    #[test]
    fn beta_vanishes_on_unrealizable_triples() {
        // t beyond min(i,j) or i+j-t > n must give a zero coefficient.
        for n in 2..=8u32 {
            for k in 0..=(n / 2) {
                for i in k..=(n - k) {
                    for j in k..=(n - k) {
                        for t in 0..=(i.min(j) + 1) {
                            let valid = t <= i.min(j) && i + j - t <= n;
                            if !valid {
                                let beta = block_coefficient(n, k, i, j, t).unwrap();
                                assert!(
                                    beta.is_zero(),
                                    "expected 0 at n={n} k={k} i={i} j={j} t={t}, got {beta}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn beta_range_rejections() {
        assert!(block_coefficient(6, 4, 4, 4, 4).is_err()); // k > n/2
        assert!(block_coefficient(6, 2, 1, 3, 1).is_err()); // i < k
        assert!(block_coefficient(6, 2, 3, 5, 2).is_err()); // j > n-k
    }

    #[test]
    fn beta_identity_triple_matches_binomial() {
        // β^{n,k}_{i,i,i} = C(n-2k, i-k): with the s-scaling this maps the
        // per-triple identity assignment to identity blocks.
        for n in 2..=9u32 {
            for k in 0..=(n / 2) {
                for i in k..=(n - k) {
                    assert_eq!(
                        block_coefficient(n, k, i, i, i).unwrap(),
                        binomial_int((n - 2 * k) as u64, (i - k) as i64)
                    );
                }
            }
        }
    }

    #[test]
    fn identity_triple_assignment_gives_identity_blocks() {
        // x^t_{i,j} = δ_{ij} δ_{ti}
        let n = 8;
        let blocks =
            reduced_blocks_from_fn(n, |i, j, t| if i == j && t == i { 1.0 } else { 0.0 })
                .unwrap();
        for blk in &blocks {
            for (r, row) in blk.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-12, "entry ({r},{c}) = {v}");
                }
            }
        }
    }

    #[test]
    fn reduce_blocks_zero_assignment() {
        let table = OrbitTable::new(6);
        let x = vec![0.0; table.len()];
        for blocks in [
            reduce_blocks(6, &x, Family::Moment).unwrap(),
            reduce_blocks(6, &x, Family::Complement).unwrap(),
        ] {
            for blk in blocks {
                for row in blk {
                    assert!(row.iter().all(|&v| v == 0.0));
                }
            }
        }
    }

    #[test]
    fn orbit_and_fn_paths_agree() {
        let n = 6;
        let table = OrbitTable::new(n);
        let x: Vec<f64> = (0..table.len()).map(|i| 0.1 + 0.03 * i as f64).collect();
        let a = reduce_blocks(n, &x, Family::Moment).unwrap();
        let b = reduced_blocks_from_fn(n, |i, j, t| x[table.orbit_of(i, j, t).unwrap()]).unwrap();
        assert_eq!(a, b);
    }
}
