//! Non-SDP bounds: the explicit stable-set construction, the spectral ratio
//! bound, the distance-distribution LP, its exact witness, the equality
//! identity behind them, and integer refinements.
//!
//! Everything except the LP solve itself is exact big-integer/big-rational
//! arithmetic; the LP value is certified after the fact by rounding the
//! solver point to rationals and re-checking feasibility exactly.

use std::collections::BTreeSet;

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scheme::{
    binomial, binomial_int, double_factorial, factorial, krawtchouk, HammingScheme,
};
use crate::sdp::{self, BlockKind, SdpProblem, SolveStatus, SolverConfig};

/// Pair-check budget for exhaustive stable-set verification.
pub const DEFAULT_VERIFY_BUDGET: u64 = 50_000_000;
/// Vertex-listing budget (number of words) for explicit certificates.
pub const DEFAULT_LISTING_BUDGET: u64 = 1 << 21;

// ---------------------------------------------------------------------------
// Stable-set construction
// ---------------------------------------------------------------------------

/// An explicit stable set in the distance-n/2 graph on {0,1}^n.
#[derive(Debug, Clone)]
pub struct StableSetCertificate {
    pub n: u32,
    /// Base weight parity: the seed component holds weights ε, ε+2, …, n/4-1.
    pub epsilon: u32,
    pub vertices: Vec<u64>,
    pub size: BigUint,
    /// True when the pairwise distance check ran at construction time.
    pub verified: bool,
}

/// Seed weights ε, ε+2, …, n/4-1 with 1-ε = (n/4) mod 2.
fn seed_weights(n: u32) -> (u32, Vec<u32>) {
    let eps = 1 - ((n / 4) % 2);
    let top = n / 4;
    let ws = (eps..top).step_by(2).collect();
    (eps, ws)
}

/// Size of the construction: 4·Σ_{i=ε}^{⌊n/8⌋} C(n, 2i-ε).
pub fn lower_bound_size(n: u32) -> Result<BigUint> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::invalid(format!(
            "stable-set construction requires n ≡ 0 (mod 4), got {n}"
        )));
    }
    let (eps, ws) = seed_weights(n);
    let mut sum = BigUint::zero();
    for w in &ws {
        sum += binomial(n as u64, *w as i64);
    }
    // Index form: weights 2i-ε for i = ε..⌊n/8⌋ coincide with the list above.
    debug_assert_eq!(
        ws,
        (eps..=n / 8).map(|i| 2 * i - eps).collect::<Vec<_>>()
    );
    Ok(sum * BigUint::from(4u32))
}

/// Iterates all n-bit words of a given weight in increasing order.
fn words_of_weight(n: u32, w: u32) -> Vec<u64> {
    if w == 0 {
        return vec![0];
    }
    if w > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let limit: u64 = 1u64 << n;
    let mut v: u64 = (1u64 << w) - 1;
    while v < limit {
        out.push(v);
        // Gosper's hack: next word with the same popcount.
        let t = v | (v.wrapping_sub(1));
        let next = t.wrapping_add(1)
            | (((!t & (!t).wrapping_neg()).wrapping_sub(1)) >> (v.trailing_zeros() + 1));
        if next <= v {
            break;
        }
        v = next;
    }
    out
}

/// Builds the explicit stable set: seed weights in one parity class, their
/// bit-wise complements, and the image of both under flipping bit 0 (which
/// maps the construction into the other parity class isometrically).
///
/// Verification is mandatory for n ≤ 16 and otherwise runs when the number
/// of vertex pairs fits the budget.
pub fn lower_bound_set(n: u32) -> Result<StableSetCertificate> {
    lower_bound_set_with_budget(n, DEFAULT_LISTING_BUDGET, DEFAULT_VERIFY_BUDGET)
}

pub fn lower_bound_set_with_budget(
    n: u32,
    listing_budget: u64,
    verify_budget: u64,
) -> Result<StableSetCertificate> {
    let size = lower_bound_size(n)?;
    if n > 63 {
        return Err(Error::limit(format!("explicit vertex listing needs n <= 63, got {n}")));
    }
    let size_u64 = size
        .to_u64()
        .ok_or_else(|| Error::limit("certificate size exceeds u64"))?;
    if size_u64 > listing_budget {
        return Err(Error::limit(format!(
            "explicit listing of {size_u64} vertices exceeds the budget {listing_budget}; \
             size-only mode is available via lower_bound_size"
        )));
    }
    let (eps, ws) = seed_weights(n);
    let mask: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut vertices = Vec::with_capacity(size_u64 as usize);
    for w in &ws {
        vertices.extend(words_of_weight(n, *w));
    }
    let seed_len = vertices.len();
    for idx in 0..seed_len {
        vertices.push(!vertices[idx] & mask); // complements
    }
    let both = vertices.len();
    for idx in 0..both {
        vertices.push(vertices[idx] ^ 1); // mirrored into the other component
    }
    vertices.sort_unstable();
    vertices.dedup();
    if BigUint::from(vertices.len() as u64) != size {
        return Err(Error::invalid(format!(
            "constructed {} vertices but the size formula gives {size}",
            vertices.len()
        )));
    }

    let pairs = size_u64.saturating_mul(size_u64.saturating_sub(1)) / 2;
    let must_verify = n <= 16;
    let mut verified = false;
    if must_verify || pairs <= verify_budget {
        verify_no_pair_at_distance(&vertices, n / 2)?;
        verified = true;
    }
    Ok(StableSetCertificate {
        n,
        epsilon: eps,
        vertices,
        size,
        verified,
    })
}

/// Exhaustive pairwise check: no two vertices at Hamming distance `d`.
pub fn verify_no_pair_at_distance(vertices: &[u64], d: u32) -> Result<()> {
    for (i, &x) in vertices.iter().enumerate() {
        for &y in &vertices[i + 1..] {
            if (x ^ y).count_ones() == d {
                return Err(Error::invalid(format!(
                    "vertices {x:#b} and {y:#b} are at forbidden distance {d}"
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Ratio bound
// ---------------------------------------------------------------------------

/// |V| / (1 - k/λ_min) as an exact rational; requires λ_min < 0.
pub fn ratio_bound(v: &BigUint, k: &BigUint, lambda_min: &BigInt) -> Result<BigRational> {
    if !lambda_min.is_negative() {
        return Err(Error::invalid(
            "ratio bound requires a negative least eigenvalue",
        ));
    }
    let v = BigInt::from_biguint(Sign::Plus, v.clone());
    let k = BigInt::from_biguint(Sign::Plus, k.clone());
    // v / (1 - k/λ) = v·λ / (λ - k)
    Ok(BigRational::new(&v * lambda_min, lambda_min - &k))
}

/// The ratio bound for the distance-n/2 graph on {0,1}^n; equals 2^n/n.
pub fn ratio_bound_omega(n: u32) -> Result<BigRational> {
    let sp = crate::scheme::omega_spectrum(n as u64)?;
    let v = BigUint::from(2u32).pow(n);
    let rb = ratio_bound(&v, &sp.degree, &sp.lambda_min)?;
    let direct = BigRational::new(
        BigInt::from_biguint(Sign::Plus, v),
        BigInt::from(n),
    );
    if rb != direct {
        return Err(Error::invalid(
            "ratio bound does not simplify to 2^n/n; spectrum data inconsistent",
        ));
    }
    Ok(rb)
}

// ---------------------------------------------------------------------------
// Distance-distribution LP
// ---------------------------------------------------------------------------

/// Certificate for the LP max 1ᵀw s.t. w ≥ 0, Qᵀw ≥ 0, w_0 = 1,
/// w_j = 0 on the forbidden set.
#[derive(Debug, Clone)]
pub struct DelsarteCertificate {
    /// Full distribution vector (w_0 = 1 included), numeric.
    pub w: Vec<f64>,
    /// 1ᵀw at the solver point.
    pub objective: f64,
    /// min_j w_j (≥ 0 up to tolerance).
    pub min_w: f64,
    /// min_i (Qᵀw)_i (≥ 0 up to tolerance).
    pub min_qtw: f64,
    pub solve_status: SolveStatus,
    /// Exactly re-verified rational distribution, when rounding succeeded.
    pub exact: Option<ExactDistribution>,
}

#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub w: Vec<BigRational>,
    pub objective: BigRational,
}

/// Solves the LP through the block-diagonal solver (1×1 blocks), then tries
/// to certify the returned point exactly by rounding to small rationals.
/// Failure of exact certification downgrades `exact` to None; it never
/// alters the numeric value.
pub fn delsarte_lp(
    scheme: &HammingScheme,
    forbidden: &BTreeSet<u32>,
    config: &SolverConfig,
) -> Result<(f64, DelsarteCertificate)> {
    let n = scheme.n as u32;
    if forbidden.contains(&0) || forbidden.iter().any(|&d| d > n) {
        return Err(Error::invalid("forbidden set must lie inside 1..=n"));
    }
    let dim = scheme.dim();
    let free: Vec<u32> = (1..=n).filter(|j| !forbidden.contains(j)).collect();
    let nvars = free.len();

    let mut p = SdpProblem::new(
        format!("delsarte n={n} q={} forbidden={forbidden:?}", scheme.q),
        nvars,
    );
    p.objective = vec![1.0; nvars];
    p.objective_offset = 1.0; // w_0 = 1 contributes to 1ᵀw
    let blk = p.add_block(BlockKind::Diag(dim + nvars));
    // rows 0..dim: (Qᵀw)_i = Q_{0i} + Σ_j Q_{ji} w_j >= 0
    for i in 0..dim {
        let q0i = scheme.q_mat.at(0, i).to_f64().unwrap();
        p.add_f0(blk, i, i, q0i);
        for (m, &j) in free.iter().enumerate() {
            let qji = scheme.q_mat.at(j as usize, i).to_f64().unwrap();
            if qji != 0.0 {
                p.add_coeff(blk, m, i, i, qji);
            }
        }
    }
    // rows dim..dim+nvars: w_j >= 0
    for m in 0..nvars {
        p.add_coeff(blk, m, dim + m, dim + m, 1.0);
    }
    p.normalize();

    let sol = sdp::solve(&p, config)?;
    let mut w = vec![0.0; dim];
    w[0] = 1.0;
    for (m, &j) in free.iter().enumerate() {
        w[j as usize] = sol.x[m];
    }
    let objective: f64 = 1.0 + sol.x.iter().sum::<f64>();
    let min_w = w.iter().copied().fold(f64::INFINITY, f64::min);
    let min_qtw = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| scheme.q_mat.at(j, i).to_f64().unwrap() * w[j])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);

    let exact = certify_exact(scheme, forbidden, &w);
    let cert = DelsarteCertificate {
        w,
        objective,
        min_w,
        min_qtw,
        solve_status: sol.status,
        exact,
    };
    Ok((objective, cert))
}

/// Best rational approximation with bounded denominator (continued
/// fractions with semiconvergent clamping).
pub fn approx_rational(x: f64, max_den: u64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    let neg = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    let cap = BigInt::from(max_den);
    for _ in 0..64 {
        let a = x.floor();
        let ab = BigInt::from(a as i64);
        let p2 = &ab * &p1 + &p0;
        let q2 = &ab * &q1 + &q0;
        if q2 > cap {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    let r = BigRational::new(p1, q1.max(BigInt::one()));
    if neg {
        -r
    } else {
        r
    }
}

/// Rounds w to rationals (denominators ≤ 10^6) and re-checks feasibility
/// exactly; tries coarser denominators first so active constraints snap.
fn certify_exact(
    scheme: &HammingScheme,
    forbidden: &BTreeSet<u32>,
    w: &[f64],
) -> Option<ExactDistribution> {
    let dim = scheme.dim();
    for max_den in [1u64, 6, 60, 5040, 1_000_000] {
        let wr: Vec<BigRational> = w.iter().map(|&x| approx_rational(x, max_den)).collect();
        if wr[0] != BigRational::one() {
            continue;
        }
        if forbidden.iter().any(|&j| !wr[j as usize].is_zero()) {
            continue;
        }
        if wr.iter().any(|x| x.is_negative()) {
            continue;
        }
        let mut ok = true;
        'rows: for i in 0..dim {
            let mut s = BigRational::zero();
            for j in 0..dim {
                s += BigRational::from(scheme.q_mat.at(j, i).clone()) * &wr[j];
            }
            if s.is_negative() {
                ok = false;
                break 'rows;
            }
        }
        if !ok {
            continue;
        }
        let objective: BigRational = wr.iter().cloned().sum();
        return Some(ExactDistribution { w: wr, objective });
    }
    None
}

// ---------------------------------------------------------------------------
// Equality witness (LP value = ratio bound)
// ---------------------------------------------------------------------------

/// Report for the exact LP-feasible witness built from two eigenmatrix rows.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub r: usize,
    /// Least entry of column r of P.
    pub tau: BigInt,
    /// Smallest row index attaining τ.
    pub ell: usize,
    /// All rows attaining τ.
    pub alternatives: Vec<usize>,
    /// v_r·P_{ℓi} ≥ v_i·τ for every i.
    pub hypothesis_holds: bool,
    /// a = (-τ/(v_r-τ))·P_0ᵀ + (v_r/(v_r-τ))·P_ℓᵀ
    pub witness: Vec<BigRational>,
    /// Exact feasibility: a ≥ 0, a_0 = 1, a_r = 0, Qᵀa ≥ 0.
    pub feasible: bool,
    /// 1ᵀa = v·(-τ)/(v_r - τ)
    pub objective: BigRational,
    /// Objective equals the ratio bound for relation r.
    pub matches_ratio_bound: bool,
}

/// Builds the witness vector for relation `r` of a symmetric scheme and
/// checks the equality condition and exact feasibility.
pub fn prop1_witness(scheme: &HammingScheme, r: usize) -> Result<WitnessReport> {
    let dim = scheme.dim();
    if r == 0 || r >= dim {
        return Err(Error::invalid(format!("relation index {r} out of range")));
    }
    let tau = (0..dim)
        .map(|i| scheme.p.at(i, r).clone())
        .min()
        .expect("nonempty column");
    let alternatives: Vec<usize> = (0..dim)
        .filter(|&i| *scheme.p.at(i, r) == tau)
        .collect();
    let ell = alternatives[0];
    let v_r = BigInt::from_biguint(Sign::Plus, scheme.valencies[r].clone());
    let denom = &v_r - &tau;
    if denom.is_zero() {
        return Err(Error::invalid(
            "least eigenvalue equals the valency; witness undefined",
        ));
    }

    let mut hypothesis_holds = true;
    for i in 0..dim {
        let v_i = BigInt::from_biguint(Sign::Plus, scheme.valencies[i].clone());
        if &v_r * scheme.p.at(ell, i) < &v_i * &tau {
            hypothesis_holds = false;
        }
    }

    let c0 = BigRational::new(-tau.clone(), denom.clone());
    let cl = BigRational::new(v_r.clone(), denom.clone());
    let witness: Vec<BigRational> = (0..dim)
        .map(|i| {
            &c0 * BigRational::from(scheme.p.at(0, i).clone())
                + &cl * BigRational::from(scheme.p.at(ell, i).clone())
        })
        .collect();

    let mut feasible = witness[0] == BigRational::one()
        && witness[r].is_zero()
        && witness.iter().all(|a| !a.is_negative());
    if feasible {
        'rows: for i in 0..dim {
            let mut s = BigRational::zero();
            for j in 0..dim {
                s += BigRational::from(scheme.q_mat.at(j, i).clone()) * &witness[j];
            }
            if s.is_negative() {
                feasible = false;
                break 'rows;
            }
        }
    }

    let objective: BigRational = witness.iter().cloned().sum();
    let v = BigInt::from_biguint(Sign::Plus, scheme.v.clone());
    let closed_form = BigRational::new(&v * (-&tau), denom);
    let rb = ratio_bound(&scheme.v, &scheme.valencies[r], &tau)?;
    let matches_ratio_bound = objective == closed_form && objective == rb;

    Ok(WitnessReport {
        r,
        tau,
        ell,
        alternatives,
        hypothesis_holds,
        witness,
        feasible,
        objective,
        matches_ratio_bound,
    })
}

// ---------------------------------------------------------------------------
// Equality identity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CorollaryCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

/// Checks, in exact rational arithmetic,
///
/// ```text
/// C(n,n/2)·K_i(2) - C(n,i)·K_{n/2}(2)
///   = 2^{n/2+2}·(n-2)!·(n-1)!!·(n/2-i)² / (i!·(n/2)!·(n-i)!)  ≥ 0.
/// ```
pub fn corollary_identity_check(n: u32, i: u32) -> Result<CorollaryCheck> {
    if n % 4 != 0 || n == 0 {
        return Err(Error::invalid("identity requires n ≡ 0 (mod 4)"));
    }
    if i > n {
        return Err(Error::invalid(format!("index i={i} out of range 0..={n}")));
    }
    let n64 = n as u64;
    let half = n64 / 2;
    let lhs_int = binomial_int(n64, half as i64) * krawtchouk(n64, 2, i as u64, 2)?
        - binomial_int(n64, i as i64) * krawtchouk(n64, 2, half, 2)?;
    let lhs = BigRational::from(lhs_int);

    let num = BigInt::from(2).pow((half + 2) as u32)
        * BigInt::from_biguint(Sign::Plus, factorial(n64 - 2))
        * BigInt::from_biguint(Sign::Plus, double_factorial(n64 as i64 - 1)?)
        * BigInt::from(half as i64 - i as i64).pow(2);
    let den = BigInt::from_biguint(
        Sign::Plus,
        factorial(i as u64) * factorial(half) * factorial(n64 - i as u64),
    );
    let rhs = BigRational::new(num, den);
    let holds = lhs == rhs && !lhs.is_negative();
    Ok(CorollaryCheck { lhs, rhs, holds })
}

// ---------------------------------------------------------------------------
// Integer refinements
// ---------------------------------------------------------------------------

/// ⌈v / alpha_upper⌉: colorings need at least this many classes.
pub fn chromatic_lower_bound(v: &BigUint, alpha_upper: &BigUint) -> Result<BigUint> {
    if alpha_upper.is_zero() {
        return Err(Error::invalid("alpha_upper must be at least 1"));
    }
    Ok((v + alpha_upper - BigUint::one()) / alpha_upper)
}

/// Largest multiple of 4 that is ≤ ⌊bound⌋; stable-set sizes in the
/// distance-n/2 graph are always multiples of 4.
pub fn integer_refinement(bound: f64) -> Result<u64> {
    if !bound.is_finite() || bound < 0.0 {
        return Err(Error::invalid(format!(
            "integer refinement needs a finite nonnegative bound, got {bound}"
        )));
    }
    if bound >= 9.0e18 {
        return Err(Error::limit("bound too large for integer refinement"));
    }
    let f = bound.floor() as u64;
    Ok(f - f % 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_sizes_match_known_values() {
        for (n, want) in [
            (16u32, 2304u64),
            (20, 20144),
            (24, 178_208),
            (28, 1_590_376),
            (32, 14_288_896),
        ] {
            assert_eq!(lower_bound_size(n).unwrap(), BigUint::from(want), "n={n}");
        }
        assert!(lower_bound_size(14).is_err());
        assert!(lower_bound_size(0).is_err());
    }

    #[test]
    fn certificates_small_n_verified() {
        for n in [4u32, 8, 12, 16] {
            let cert = lower_bound_set(n).unwrap();
            assert!(cert.verified, "n={n}");
            assert_eq!(BigUint::from(cert.vertices.len() as u64), cert.size);
        }
        let c4 = lower_bound_set(4).unwrap();
        assert_eq!(c4.size, BigUint::from(4u32));
        assert_eq!(c4.epsilon, 0);
    }

    #[test]
    fn alpha_omega4_is_exactly_4_by_brute_force() {
        // Exhaustive maximum stable set search on the 16-vertex graph.
        let n = 4u32;
        let verts: Vec<u64> = (0..16).collect();
        let adj: Vec<u16> = verts
            .iter()
            .map(|&x| {
                let mut m = 0u16;
                for &y in &verts {
                    if (x ^ y).count_ones() == n / 2 {
                        m |= 1 << y;
                    }
                }
                m
            })
            .collect();
        let mut best = 0u32;
        for mask in 0u32..(1 << 16) {
            let mut ok = true;
            let mut mm = mask;
            while mm != 0 {
                let v = mm.trailing_zeros() as usize;
                if (adj[v] as u32) & mask != 0 {
                    ok = false;
                    break;
                }
                mm &= mm - 1;
            }
            if ok {
                best = best.max(mask.count_ones());
            }
        }
        assert_eq!(best, 4);
        assert_eq!(lower_bound_size(4).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn ratio_bound_omega_values() {
        // ⌊2^n/n⌋ column: 4096, 52428, 699050, 9586980, 134217728.
        for (n, floor_want) in [
            (16u32, 4096u64),
            (20, 52_428),
            (24, 699_050),
            (28, 9_586_980),
            (32, 134_217_728),
        ] {
            let rb = ratio_bound_omega(n).unwrap();
            let fl = rb.floor().to_integer().to_u64().unwrap();
            assert_eq!(fl, floor_want, "n={n}");
        }
        // Ω(16) raw data route.
        let rb = ratio_bound(
            &BigUint::from(65536u32),
            &BigUint::from(12870u32),
            &BigInt::from(-858),
        )
        .unwrap();
        assert_eq!(rb, BigRational::from(BigInt::from(4096)));
        // Degenerate bipartite-like case k = -λ_min gives v/2.
        let rb = ratio_bound(
            &BigUint::from(100u32),
            &BigUint::from(7u32),
            &BigInt::from(-7),
        )
        .unwrap();
        assert_eq!(rb, BigRational::from(BigInt::from(50)));
        assert!(ratio_bound(
            &BigUint::from(10u32),
            &BigUint::from(3u32),
            &BigInt::from(2)
        )
        .is_err());
    }

    #[test]
    fn witness_h42() {
        let s = HammingScheme::new(4, 2).unwrap();
        let rep = prop1_witness(&s, 2).unwrap();
        assert_eq!(rep.tau, BigInt::from(-2));
        assert_eq!(rep.ell, 2);
        let want: Vec<i64> = vec![1, 1, 0, 1, 1];
        for (a, w) in rep.witness.iter().zip(want) {
            assert_eq!(*a, BigRational::from(BigInt::from(w)));
        }
        assert!(rep.hypothesis_holds);
        assert!(rep.feasible);
        assert_eq!(rep.objective, BigRational::from(BigInt::from(4)));
        assert!(rep.matches_ratio_bound);
    }

    #[test]
    fn witness_objective_is_ratio_bound_up_to_32() {
        for n in (4u64..=32).step_by(4) {
            let s = HammingScheme::new(n, 2).unwrap();
            let rep = prop1_witness(&s, (n / 2) as usize).unwrap();
            assert!(rep.hypothesis_holds, "n={n}");
            assert!(rep.feasible, "n={n}");
            let want = BigRational::new(BigInt::from(2).pow(n as u32), BigInt::from(n));
            assert_eq!(rep.objective, want, "n={n}");
            // a_0 = 1 always; a_r = 0 by construction.
            assert_eq!(rep.witness[0], BigRational::one());
            assert!(rep.witness[(n / 2) as usize].is_zero());
        }
    }

    #[test]
    fn corollary_identity_values() {
        let c = corollary_identity_check(8, 2).unwrap();
        assert_eq!(c.lhs, BigRational::from(BigInt::from(560)));
        assert_eq!(c.rhs, BigRational::from(BigInt::from(560)));
        assert!(c.holds);
        // (n, n/2): both sides vanish.
        for n in [4u32, 8, 12, 16] {
            let c = corollary_identity_check(n, n / 2).unwrap();
            assert!(c.lhs.is_zero() && c.rhs.is_zero() && c.holds);
        }
        for i in 0..=16 {
            assert!(corollary_identity_check(16, i).unwrap().holds, "i={i}");
        }
    }

    #[test]
    fn chromatic_bounds() {
        let v = BigUint::from(65536u32);
        assert_eq!(
            chromatic_lower_bound(&v, &BigUint::from(2304u32)).unwrap(),
            BigUint::from(29u32)
        );
        assert_eq!(
            chromatic_lower_bound(&v, &BigUint::from(3912u32)).unwrap(),
            BigUint::from(17u32)
        );
        assert_eq!(chromatic_lower_bound(&v, &v).unwrap(), BigUint::one());
        assert!(chromatic_lower_bound(&v, &BigUint::zero()).is_err());
    }

    #[test]
    fn refinement_rounds_to_multiples_of_4() {
        assert_eq!(integer_refinement(20166.98).unwrap(), 20164);
        assert_eq!(integer_refinement(20166.62).unwrap(), 20164);
        assert_eq!(integer_refinement(2304.0).unwrap(), 2304);
        assert_eq!(integer_refinement(3.9).unwrap(), 0);
        assert!(integer_refinement(f64::NAN).is_err());
        assert!(integer_refinement(f64::INFINITY).is_err());
        assert!(integer_refinement(-1.0).is_err());
    }

    #[test]
    fn approx_rational_snaps() {
        assert_eq!(
            approx_rational(0.5, 10),
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
        assert_eq!(approx_rational(1e-9, 1_000_000), BigRational::zero());
        assert_eq!(
            approx_rational(-2.25, 100),
            BigRational::new(BigInt::from(-9), BigInt::from(4))
        );
    }

    #[test]
    fn delsarte_lp_small_cases() {
        let cfg = SolverConfig::default();
        // All distances forbidden: only w_0 survives.
        let s = HammingScheme::new(5, 2).unwrap();
        let all: BTreeSet<u32> = (1..=5).collect();
        let (v, cert) = delsarte_lp(&s, &all, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        assert!(cert.exact.is_some());
        // Nothing forbidden: whole space, 2^n.
        let (v, _) = delsarte_lp(&s, &BTreeSet::new(), &cfg).unwrap();
        assert!((v - 32.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn delsarte_lp_omega8_is_32() {
        let cfg = SolverConfig::default();
        let s = HammingScheme::new(8, 2).unwrap();
        let forbidden: BTreeSet<u32> = [4].into_iter().collect();
        let (v, cert) = delsarte_lp(&s, &forbidden, &cfg).unwrap();
        assert!((v - 32.0).abs() < 32.0 * 1e-6, "{v}");
        assert!(cert.min_w > -1e-9);
        assert!(cert.min_qtw > -1e-6);
        // The witness lower-bounds the LP maximum.
        let rep = prop1_witness(&s, 4).unwrap();
        let wo = rep.objective.to_f64().unwrap();
        assert!(v + 1e-6 >= wo);
    }
}
