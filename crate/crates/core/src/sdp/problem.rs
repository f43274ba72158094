//! Block-diagonal linear-matrix-inequality problems.
//!
//! A problem asks to maximize `objective·x + offset` subject to
//! `F_0 + Σ_m x_m F_m ⪰ 0`, where every `F` is block diagonal with the
//! same block layout. Diagonal blocks encode ordinary linear inequalities.

/// Shape of one block in the joint block-diagonal structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// Dense symmetric PSD block of the given order.
    Dense(usize),
    /// Diagonal block of the given order (componentwise inequalities).
    Diag(usize),
}

impl BlockKind {
    pub fn size(&self) -> usize {
        match self {
            BlockKind::Dense(n) | BlockKind::Diag(n) => *n,
        }
    }

    pub fn is_diag(&self) -> bool {
        matches!(self, BlockKind::Diag(_))
    }
}

/// Sparse symmetric coefficient matrix within a single block.
/// Entries are stored with `i <= j`; an off-diagonal entry represents the
/// mirrored pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlockMatrix {
    pub entries: Vec<(u32, u32, f64)>,
}

impl BlockMatrix {
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((i as u32, j as u32, v));
    }

    /// Merges duplicate coordinates and drops zeros; sorts by (i, j).
    pub fn normalize(&mut self) {
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut out: Vec<(u32, u32, f64)> = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            if let Some(last) = out.last_mut() {
                if last.0 == i && last.1 == j {
                    last.2 += v;
                    continue;
                }
            }
            out.push((i, j, v));
        }
        out.retain(|&(_, _, v)| v != 0.0);
        self.entries = out;
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A complete LMI problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    /// Human-readable instance tag, round-tripped through file export.
    pub name: String,
    /// Linear objective coefficients; the problem maximizes objective·x.
    pub objective: Vec<f64>,
    /// Constant added to the reported optimum (e.g. substituted variables).
    pub objective_offset: f64,
    pub blocks: Vec<BlockKind>,
    /// Constant term F_0, one sparse matrix per block.
    pub f0: Vec<BlockMatrix>,
    /// Variable coefficients per block: (variable index, coefficients),
    /// sorted by variable index, at most one record per variable.
    pub coeffs: Vec<Vec<(usize, BlockMatrix)>>,
}

impl SdpProblem {
    pub fn new(name: impl Into<String>, num_vars: usize) -> Self {
        SdpProblem {
            name: name.into(),
            objective: vec![0.0; num_vars],
            objective_offset: 0.0,
            blocks: Vec::new(),
            f0: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total matrix order across blocks.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    pub fn add_block(&mut self, kind: BlockKind) -> usize {
        self.blocks.push(kind);
        self.f0.push(BlockMatrix::default());
        self.coeffs.push(Vec::new());
        self.blocks.len() - 1
    }

    /// Adds a coefficient of variable `var` at entry (i, j) of block `blk`.
    pub fn add_coeff(&mut self, blk: usize, var: usize, i: usize, j: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let list = &mut self.coeffs[blk];
        match list.iter_mut().find(|(m, _)| *m == var) {
            Some((_, mat)) => mat.push(i, j, v),
            None => {
                let mut mat = BlockMatrix::default();
                mat.push(i, j, v);
                list.push((var, mat));
            }
        }
    }

    pub fn add_f0(&mut self, blk: usize, i: usize, j: usize, v: f64) {
        self.f0[blk].push(i, j, v);
    }

    /// Sorts and merges all sparse data into canonical form.
    pub fn normalize(&mut self) {
        for m in self.f0.iter_mut() {
            m.normalize();
        }
        for list in self.coeffs.iter_mut() {
            for (_, m) in list.iter_mut() {
                m.normalize();
            }
            list.retain(|(_, m)| !m.is_empty());
            list.sort_by_key(|(m, _)| *m);
        }
    }

    /// Structural sanity checks: indices in range, diag entries on the
    /// diagonal, coefficient lists sorted and deduplicated.
    pub fn validate(&self) -> crate::error::Result<()> {
        use crate::error::Error;
        if self.f0.len() != self.blocks.len() || self.coeffs.len() != self.blocks.len() {
            return Err(Error::invalid("block table length mismatch"));
        }
        for (b, kind) in self.blocks.iter().enumerate() {
            let sz = kind.size() as u32;
            let check = |m: &BlockMatrix| -> crate::error::Result<()> {
                for &(i, j, v) in &m.entries {
                    if i > j || j >= sz {
                        return Err(Error::invalid(format!(
                            "entry ({i},{j}) out of range in block {b}"
                        )));
                    }
                    if kind.is_diag() && i != j {
                        return Err(Error::invalid(format!(
                            "off-diagonal entry ({i},{j}) in diagonal block {b}"
                        )));
                    }
                    if !v.is_finite() {
                        return Err(Error::invalid("non-finite coefficient"));
                    }
                }
                Ok(())
            };
            check(&self.f0[b])?;
            let mut prev: Option<usize> = None;
            for (var, m) in &self.coeffs[b] {
                if *var >= self.num_vars() {
                    return Err(Error::invalid(format!("variable {var} out of range")));
                }
                if let Some(p) = prev {
                    if *var <= p {
                        return Err(Error::invalid("coefficient list not sorted"));
                    }
                }
                prev = Some(*var);
                check(m)?;
            }
        }
        Ok(())
    }

    /// Evaluates F_0 + Σ x_m F_m for one block as dense rows.
    pub fn eval_block(&self, blk: usize, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.blocks[blk].size();
        let mut out = vec![vec![0.0; n]; n];
        let mut add = |m: &BlockMatrix, w: f64| {
            for &(i, j, v) in &m.entries {
                out[i as usize][j as usize] += w * v;
                if i != j {
                    out[j as usize][i as usize] += w * v;
                }
            }
        };
        add(&self.f0[blk], 1.0);
        for (var, m) in &self.coeffs[blk] {
            add(m, x[*var]);
        }
        out
    }
}
