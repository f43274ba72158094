//! The M^t_{i,j} matrix algebra of {0,1}^n and its block diagonalization.
//!
//! For weights i, j and overlap t, M^t_{i,j} is the 2^n × 2^n 0-1 matrix
//! with entry (X, Y) = 1 iff |X| = i, |Y| = j, and d_H(X, Y) = i + j - 2t.
//! These matrices span a non-commutative algebra of dimension O(n³) that is
//! invariant under coordinate permutations; an orthogonal change of basis
//! splits any member into small blocks indexed by k = 0..⌊n/2⌋, each block
//! repeated C(n,k) - C(n,k-1) times in the spectrum.
//!
//! Triples (i, j, t) with the same unordered multiset {i, j, i+j-2t} carry
//! equal coefficients in the symmetric relaxations, so variables are indexed
//! by orbits of triples rather than triples.

mod blocks;
mod builder;
mod explicit;

pub use blocks::{block_coefficient, reduce_blocks, reduced_block_templates, Family, ReducedBlock};
pub use builder::{
    build, build_laurent_sdp, build_schrijver_sdp, BuildOptions, Flavor, OrbitModel,
    UpperBoundMode, BUILDER_MAX_N,
};
pub use explicit::{
    bordered_equivalence_oracle, build_m, explicit_family_matrix, psd_equivalence_oracle,
    BorderedOracleReport, OracleReport, SparseZeroOne, EXPLICIT_MAX_N, ORACLE_MAX_N,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A triple (i, j, t): row weight, column weight, overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripleIndex {
    pub i: u32,
    pub j: u32,
    pub t: u32,
}

impl TripleIndex {
    /// Validates against n: 0 ≤ t ≤ min(i,j) and i + j - t ≤ n, exactly the
    /// condition that a pair X, Y with |X| = i, |Y| = j, |X ∩ Y| = t exists.
    pub fn new(n: u32, i: u32, j: u32, t: u32) -> Result<Self> {
        if i > n || j > n {
            return Err(Error::invalid(format!(
                "triple ({i},{j},{t}) has weights above n={n}"
            )));
        }
        if t > i.min(j) || i + j - t > n {
            return Err(Error::invalid(format!(
                "triple ({i},{j},{t}) is not realizable for n={n}"
            )));
        }
        Ok(TripleIndex { i, j, t })
    }

    /// Hamming distance d = i + j - 2t of any realizing pair.
    pub fn distance(&self) -> u32 {
        self.i + self.j - 2 * self.t
    }

    /// The unordered multiset {i, j, d}, sorted ascending.
    pub fn multiset(&self) -> (u32, u32, u32) {
        let mut v = [self.i, self.j, self.distance()];
        v.sort_unstable();
        (v[0], v[1], v[2])
    }
}

/// An orbit of triples under permutation of {i, j, i+j-2t}.
#[derive(Debug, Clone)]
pub struct TripleOrbit {
    /// Lexicographically least member (i, j, t) with i ≤ j; it satisfies
    /// i ≤ j ≤ d.
    pub rep: TripleIndex,
    pub members: Vec<TripleIndex>,
}

impl TripleOrbit {
    fn from_multiset(n: u32, a: u32, b: u32, c: u32) -> Self {
        debug_assert!(a <= b && b <= c && (a + b + c) % 2 == 0 && c <= a + b);
        let mut members = Vec::new();
        for (i, j, d) in [
            (a, b, c),
            (b, a, c),
            (a, c, b),
            (c, a, b),
            (b, c, a),
            (c, b, a),
        ] {
            let t = (i + j - d) / 2;
            let tr = TripleIndex { i, j, t };
            debug_assert!(TripleIndex::new(n, i, j, t).is_ok());
            if !members.contains(&tr) {
                members.push(tr);
            }
        }
        members.sort_unstable();
        TripleOrbit {
            rep: TripleIndex {
                i: a,
                j: b,
                t: (a + b - c) / 2,
            },
            members,
        }
    }
}

/// Canonical representative of the orbit of (i, j, t): idempotent, equal for
/// all orbit members.
pub fn canonical_triple(n: u32, i: u32, j: u32, t: u32) -> Result<TripleIndex> {
    let tr = TripleIndex::new(n, i, j, t)?;
    let (a, b, c) = tr.multiset();
    Ok(TripleIndex {
        i: a,
        j: b,
        t: (a + b - c) / 2,
    })
}

/// All orbits of valid triples for word length n, in deterministic order
/// (representatives sorted lexicographically), with a multiset lookup.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    pub n: u32,
    pub orbits: Vec<TripleOrbit>,
    index: BTreeMap<(u32, u32, u32), usize>,
}

impl OrbitTable {
    pub fn new(n: u32) -> Self {
        let mut orbits = Vec::new();
        for a in 0..=n {
            for b in a..=n {
                for c in b..=(a + b).min(2 * n - a - b) {
                    if (a + b + c) % 2 != 0 {
                        continue;
                    }
                    orbits.push(TripleOrbit::from_multiset(n, a, b, c));
                }
            }
        }
        orbits.sort_by_key(|o| (o.rep.i, o.rep.j, o.rep.t));
        let index = orbits
            .iter()
            .enumerate()
            .map(|(idx, o)| (o.rep.multiset(), idx))
            .collect();
        OrbitTable { n, orbits, index }
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Orbit id of a valid triple.
    pub fn orbit_of(&self, i: u32, j: u32, t: u32) -> Result<usize> {
        let tr = TripleIndex::new(self.n, i, j, t)?;
        self.index
            .get(&tr.multiset())
            .copied()
            .ok_or_else(|| Error::invalid(format!("triple ({i},{j},{t}) has no orbit")))
    }

    /// Orbit id of the {0, 0, 0} triple.
    pub fn unit_orbit(&self) -> usize {
        self.index[&(0, 0, 0)]
    }

    /// Orbit id of (d, 0, 0), i.e. the multiset {0, d, d}.
    pub fn pair_orbit(&self, d: u32) -> Result<usize> {
        self.orbit_of(d, 0, 0)
    }
}
