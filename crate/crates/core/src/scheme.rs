//! Exact algebra of the Hamming association scheme H(n,q).
//!
//! The j-th relation of H(n,q) joins words at Hamming distance j. Its
//! eigenvalues are the Krawtchouk polynomial values K_j(i), collected in the
//! first eigenvalue matrix P with `P[i][j] = K_j(i)`. H(n,q) is formally
//! self-dual, so the second eigenvalue matrix Q equals P and `P·Q = q^n·I`.
//!
//! Everything in this module is exact: all arithmetic is big-integer or
//! big-rational, and the self-duality identity is verified at construction
//! time rather than assumed.

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, One, Signed, Zero};

use crate::error::{Error, Result};

/// Default cap on the word length accepted by [`HammingScheme::new`].
/// Eigenmatrices are dense (n+1)², exact-integer storage.
pub const DEFAULT_MAX_N: u64 = 64;

/// Binomial coefficient C(n, k), exact. Returns 0 when `k` is out of range.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    num::integer::binomial(BigUint::from(n), BigUint::from(k as u64))
}

/// C(n, k) as a signed integer, for use inside alternating sums.
pub fn binomial_int(n: u64, k: i64) -> BigInt {
    BigInt::from_biguint(Sign::Plus, binomial(n, k))
}

/// Factorial n!, exact.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Double factorial m!! = m(m-2)(m-4)⋯ ending at 1 or 2.
///
/// Returns 1 for m ∈ {-1, 0, 1} (empty product); rejects m < -1.
pub fn double_factorial(m: i64) -> Result<BigUint> {
    if m < -1 {
        return Err(Error::invalid(format!(
            "double_factorial requires m >= -1, got {m}"
        )));
    }
    let mut acc = BigUint::one();
    let mut v = m;
    while v >= 2 {
        acc *= BigUint::from(v as u64);
        v -= 2;
    }
    Ok(acc)
}

/// Krawtchouk polynomial value K_k(x) for H(n,q):
/// K_k(x) = Σ_j (-1)^j (q-1)^{k-j} C(x,j) C(n-x, k-j).
pub fn krawtchouk(n: u64, q: u64, k: u64, x: u64) -> Result<BigInt> {
    if q < 2 {
        return Err(Error::invalid(format!("krawtchouk requires q >= 2, got {q}")));
    }
    if k > n || x > n {
        return Err(Error::invalid(format!(
            "krawtchouk indices out of range: k={k}, x={x}, n={n}"
        )));
    }
    let qm1 = BigInt::from(q - 1);
    let mut sum = BigInt::zero();
    for j in 0..=k {
        let term = binomial_int(x, j as i64) * binomial_int(n - x, (k - j) as i64);
        if term.is_zero() {
            continue;
        }
        let term = term * qm1.pow((k - j) as u32);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// Dense exact integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMat {
    pub n: usize,
    data: Vec<BigInt>,
}

impl ExactMat {
    pub fn zeros(n: usize) -> Self {
        ExactMat {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &ExactMat) -> ExactMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = ExactMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let add = a * other.at(k, j);
                    out.data[i * n + j] += add;
                }
            }
        }
        out
    }

    /// True iff self equals scalar·I.
    pub fn is_scalar_identity(&self, scalar: &BigInt) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                let want = if i == j { scalar.clone() } else { BigInt::zero() };
                if *self.at(i, j) != want {
                    return false;
                }
            }
        }
        true
    }
}

/// The Hamming association scheme H(n,q) with exact spectral data.
#[derive(Debug, Clone)]
pub struct HammingScheme {
    pub n: u64,
    pub q: u64,
    /// Number of points, q^n.
    pub v: BigUint,
    /// Degrees of the relation graphs; row 0 of P.
    pub valencies: Vec<BigUint>,
    /// Eigenspace dimensions; row 0 of Q.
    pub multiplicities: Vec<BigUint>,
    /// First eigenvalue matrix, P[i][j] = K_j(i).
    pub p: ExactMat,
    /// Second eigenvalue matrix; equals P for H(n,q).
    pub q_mat: ExactMat,
}

impl HammingScheme {
    /// Builds H(n,q) and verifies the scheme invariants exactly.
    pub fn new(n: u64, q: u64) -> Result<Self> {
        Self::with_max_n(n, q, DEFAULT_MAX_N)
    }

    /// As [`HammingScheme::new`] with a caller-chosen cap on n.
    pub fn with_max_n(n: u64, q: u64, max_n: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("scheme requires n >= 1"));
        }
        if q < 2 {
            return Err(Error::invalid(format!("scheme requires q >= 2, got {q}")));
        }
        if n > max_n {
            return Err(Error::limit(format!(
                "scheme size n={n} exceeds the configured limit {max_n}"
            )));
        }
        let dim = (n + 1) as usize;
        let mut p = ExactMat::zeros(dim);
        for i in 0..=n {
            for j in 0..=n {
                p.set(i as usize, j as usize, krawtchouk(n, q, j, i)?);
            }
        }
        // H(n,q) is self-dual: Q = P. Verified below via PQ = vI.
        let q_mat = p.clone();
        let v = BigUint::from(q).pow(n as u32);
        let product = p.mul(&q_mat);
        if !product.is_scalar_identity(&BigInt::from_biguint(Sign::Plus, v.clone())) {
            return Err(Error::invalid(format!(
                "eigenmatrix identity PQ = vI failed for H({n},{q})"
            )));
        }
        let row0 = |m: &ExactMat| -> Result<Vec<BigUint>> {
            (0..dim)
                .map(|j| {
                    let e = m.at(0, j);
                    if e.is_negative() || e.is_zero() {
                        Err(Error::invalid("row 0 of an eigenmatrix must be positive"))
                    } else {
                        Ok(e.magnitude().clone())
                    }
                })
                .collect()
        };
        let valencies = row0(&p)?;
        let multiplicities = row0(&q_mat)?;
        let total: BigUint = valencies.iter().sum();
        if total != v {
            return Err(Error::invalid("valencies do not sum to q^n"));
        }
        Ok(HammingScheme {
            n,
            q,
            v,
            valencies,
            multiplicities,
            p,
            q_mat,
        })
    }

    /// Number of relation classes plus one (matrix dimension).
    pub fn dim(&self) -> usize {
        (self.n + 1) as usize
    }
}

/// Spectrum of the orthogonality graph Ω(n): the graph on {0,1}^n whose
/// edges join words at Hamming distance n/2. Defined for n ≡ 0 (mod 4);
/// Ω(n) is bipartite for n ≡ 2 (mod 4) and empty for odd n, and those
/// cases are refused rather than modeled.
#[derive(Debug, Clone)]
pub struct OmegaSpectrum {
    pub n: u64,
    /// Degree k = C(n, n/2).
    pub degree: BigUint,
    /// Eigenvalues λ_1..λ_n (index m-1 holds λ_m), without multiplicities.
    pub lambda: Vec<BigInt>,
    /// Least eigenvalue, -C(n, n/2)/(n-1), attained at m = 2.
    pub lambda_min: BigInt,
}

/// Computes the Ω(n) spectrum exactly:
/// λ_m = 2^{n/2}/(n/2)! · (m-1)(m-3)⋯(m-n+1), m = 1..n.
///
/// Values are formed as exact rationals and asserted integral; a
/// non-integral value would signal an implementation bug.
pub fn omega_spectrum(n: u64) -> Result<OmegaSpectrum> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::invalid(format!(
            "omega spectrum requires n ≡ 0 (mod 4), got {n}"
        )));
    }
    let half = n / 2;
    let scale_num = BigInt::from(2).pow(half as u32);
    let scale_den = BigInt::from_biguint(Sign::Plus, factorial(half));
    let mut lambda = Vec::with_capacity(n as usize);
    for m in 1..=(n as i64) {
        let mut prod = BigInt::one();
        let mut f = m - 1;
        while f >= m - (n as i64) + 1 {
            prod *= BigInt::from(f);
            f -= 2;
        }
        let val = BigRational::new(&scale_num * prod, scale_den.clone());
        if !val.is_integer() {
            return Err(Error::invalid(format!(
                "non-integral eigenvalue at m={m} for n={n}"
            )));
        }
        lambda.push(val.to_integer());
    }
    let degree = binomial(n, half as i64);
    // Closed form for the minimum, reached at m = 2.
    let lambda_min_rat = BigRational::new(
        -BigInt::from_biguint(Sign::Plus, degree.clone()),
        BigInt::from(n - 1),
    );
    if !lambda_min_rat.is_integer() {
        return Err(Error::invalid(format!(
            "least eigenvalue -C(n,n/2)/(n-1) is not integral for n={n}"
        )));
    }
    let lambda_min = lambda_min_rat.to_integer();
    if lambda[1] != lambda_min || lambda.iter().min() != Some(&lambda_min) {
        return Err(Error::invalid(format!(
            "spectrum minimum mismatch for n={n}"
        )));
    }
    Ok(OmegaSpectrum {
        n,
        degree,
        lambda,
        lambda_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Pascal-triangle recurrence.
    fn pascal(n: usize, k: usize) -> BigUint {
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::one()];
            for w in row.windows(2) {
                next.push(&w[0] + &w[1]);
            }
            next.push(BigUint::one());
            row = next;
        }
        row.get(k).cloned().unwrap_or_else(BigUint::zero)
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(7, 0), BigUint::one());
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(5, 6), BigUint::zero());
    }

    #[test]
    fn binomial_matches_pascal_oracle() {
        assert_eq!(binomial(16, 8), BigUint::from(12870u32));
        for n in 0..=16u64 {
            for k in 0..=n {
                assert_eq!(binomial(n, k as i64), pascal(n as usize, k as usize));
            }
        }
    }

    #[test]
    fn double_factorial_values() {
        // 7!! = 7·5·3·1 and 5!! = 5·3·1, computed by the direct product.
        assert_eq!(double_factorial(7).unwrap(), BigUint::from(105u32));
        assert_eq!(double_factorial(5).unwrap(), BigUint::from(15u32));
        assert_eq!(double_factorial(0).unwrap(), BigUint::one());
        assert_eq!(double_factorial(-1).unwrap(), BigUint::one());
        assert_eq!(double_factorial(1).unwrap(), BigUint::one());
        assert!(double_factorial(-2).is_err());
    }

    #[test]
    fn krawtchouk_degree_zero_is_one() {
        for n in 1..=6 {
            for x in 0..=n {
                assert_eq!(krawtchouk(n, 2, 0, x).unwrap(), BigInt::one());
            }
        }
    }

    #[test]
    fn krawtchouk_direct_evaluations() {
        // Direct evaluation of the defining sum.
        assert_eq!(krawtchouk(4, 2, 2, 2).unwrap(), BigInt::from(-2));
        assert_eq!(krawtchouk(8, 2, 4, 2).unwrap(), BigInt::from(-10));
        assert!(krawtchouk(4, 2, 5, 0).is_err());
        assert!(krawtchouk(4, 2, 0, 5).is_err());
    }

    #[test]
    fn krawtchouk_orthogonality_exact() {
        // Σ_x C(n,x)(q-1)^x K_k(x) K_l(x) = δ_{kl} q^n (q-1)^k C(n,k)
        for &q in &[2u64, 3] {
            for n in 1..=20u64 {
                let table: Vec<Vec<BigInt>> = (0..=n)
                    .map(|k| (0..=n).map(|x| krawtchouk(n, q, k, x).unwrap()).collect())
                    .collect();
                let weights: Vec<BigInt> = (0..=n)
                    .map(|x| binomial_int(n, x as i64) * BigInt::from(q - 1).pow(x as u32))
                    .collect();
                for k in 0..=n as usize {
                    for l in k..=n as usize {
                        let mut sum = BigInt::zero();
                        for x in 0..=n as usize {
                            sum += &weights[x] * &table[k][x] * &table[l][x];
                        }
                        let expect = if k == l {
                            BigInt::from(q).pow(n as u32)
                                * BigInt::from(q - 1).pow(k as u32)
                                * binomial_int(n, k as i64)
                        } else {
                            BigInt::zero()
                        };
                        assert_eq!(sum, expect, "n={n} q={q} k={k} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn scheme_h22_matrix() {
        let s = HammingScheme::new(2, 2).unwrap();
        let expect: [[i64; 3]; 3] = [[1, 2, 1], [1, 0, -1], [1, -2, 1]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*s.p.at(i, j), BigInt::from(expect[i][j]));
            }
        }
        assert!(s
            .p
            .mul(&s.q_mat)
            .is_scalar_identity(&BigInt::from(4)));
    }

    #[test]
    fn scheme_row0_is_valencies() {
        for &(n, q) in &[(5u64, 2u64), (4, 3), (6, 2), (3, 4)] {
            let s = HammingScheme::new(n, q).unwrap();
            for j in 0..=n {
                let expect = binomial(n, j as i64) * BigUint::from(q - 1).pow(j as u32);
                assert_eq!(s.valencies[j as usize], expect);
                assert_eq!(s.multiplicities[j as usize], expect);
            }
            let total: BigUint = s.multiplicities.iter().sum();
            assert_eq!(total, s.v);
        }
    }

    #[test]
    fn scheme_pq_identity_n16() {
        let s = HammingScheme::new(16, 2).unwrap();
        assert!(s
            .p
            .mul(&s.q_mat)
            .is_scalar_identity(&BigInt::from(65536)));
        // q = 2 means P and Q coincide entrywise.
        assert_eq!(s.p, s.q_mat);
    }

    #[test]
    fn scheme_rejects_bad_input() {
        assert!(HammingScheme::new(0, 2).is_err());
        assert!(HammingScheme::new(4, 1).is_err());
        assert!(HammingScheme::new(65, 2).is_err());
        assert!(HammingScheme::with_max_n(10, 2, 8).is_err());
    }

    #[test]
    fn omega_spectrum_n16() {
        let sp = omega_spectrum(16).unwrap();
        assert_eq!(sp.degree, BigUint::from(12870u32));
        assert_eq!(sp.lambda_min, BigInt::from(-858));
        assert_eq!(sp.lambda[0], BigInt::zero()); // λ_1 = 0
    }

    #[test]
    fn omega_spectrum_n4() {
        let sp = omega_spectrum(4).unwrap();
        assert_eq!(sp.lambda[1], BigInt::from(-2)); // λ_2
        assert_eq!(sp.lambda[1], krawtchouk(4, 2, 2, 2).unwrap());
        assert_eq!(sp.lambda_min, BigInt::from(-2));
    }

    #[test]
    fn omega_spectrum_rejects_non_multiples_of_4() {
        for n in [0u64, 2, 3, 6, 10, 13] {
            assert!(omega_spectrum(n).is_err());
        }
    }

    #[test]
    fn omega_spectrum_matches_krawtchouk_column() {
        // {λ_m : m = 1..n} must be contained in column n/2 of P for H(n,2).
        for n in (4..=32u64).step_by(4) {
            let sp = omega_spectrum(n).unwrap();
            let column: Vec<BigInt> = (0..=n)
                .map(|i| krawtchouk(n, 2, n / 2, i).unwrap())
                .collect();
            for (m, lam) in sp.lambda.iter().enumerate() {
                assert_eq!(
                    lam,
                    &column[m + 1],
                    "λ_{} vs K_{{n/2}}({}) at n={n}",
                    m + 1,
                    m + 1
                );
                assert!(column.contains(lam));
            }
        }
    }
}
