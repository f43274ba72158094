//! SDPA sparse format (".dat-s") export and import.
//!
//! The file encodes the standard form `min cᵀx  s.t.  Σ x_i F_i - F_0 ⪰ 0`;
//! our problems maximize, so the writer negates the objective and F_0 and
//! the parser undoes it. Instance name and objective offset ride in the
//! leading comment line so a parse reproduces the exact `SdpProblem`.
//!
//! Output is canonical: entries sorted by (matrix, block, row, column),
//! floats printed in shortest round-trip form. Export → parse → export is
//! byte-identical.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sdp::{BlockKind, SdpProblem};

/// Serializes a (normalized) problem to SDPA sparse text.
pub fn write_sdpa(problem: &SdpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\"orthobound offset={} name={}",
        problem.objective_offset, problem.name
    );
    let m = problem.num_vars();
    let _ = writeln!(out, "{m}");
    let _ = writeln!(out, "{}", problem.num_blocks());
    let sizes: Vec<String> = problem
        .blocks
        .iter()
        .map(|b| match b {
            BlockKind::Dense(s) => format!("{s}"),
            BlockKind::Diag(s) => format!("-{s}"),
        })
        .collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let c: Vec<String> = problem.objective.iter().map(|v| fmt_f64(-v)).collect();
    let _ = writeln!(out, "{}", c.join(" "));

    // matno 0 is F_0 (negated); matno m is variable m-1.
    let mut entries: Vec<(usize, usize, u32, u32, f64)> = Vec::new();
    for (blk, mat) in problem.f0.iter().enumerate() {
        for &(i, j, v) in &mat.entries {
            entries.push((0, blk, i, j, -v));
        }
    }
    for (blk, list) in problem.coeffs.iter().enumerate() {
        for (var, mat) in list {
            for &(i, j, v) in &mat.entries {
                entries.push((var + 1, blk, i, j, v));
            }
        }
    }
    entries.sort_by(|a, b| (a.0, a.1, a.2, a.3).cmp(&(b.0, b.1, b.2, b.3)));
    for (mat, blk, i, j, v) in entries {
        let _ = writeln!(out, "{mat} {} {} {} {}", blk + 1, i + 1, j + 1, fmt_f64(v));
    }
    out
}

fn fmt_f64(v: f64) -> String {
    // Shortest decimal that parses back to the same f64.
    format!("{v}")
}

/// Parses SDPA sparse text into a problem (normalized form).
pub fn parse_sdpa(text: &str) -> Result<SdpProblem> {
    let mut name = String::from("imported");
    let mut offset = 0.0_f64;
    let mut lines = text.lines().peekable();

    // Comment lines: '"' or '*'. The writer's first comment carries metadata.
    while let Some(line) = lines.peek() {
        let trimmed = line.trim_start();
        if trimmed.starts_with('"') || trimmed.starts_with('*') {
            if let Some(rest) = trimmed.trim_start_matches(['"', '*']).trim().strip_prefix("orthobound ") {
                // offset is a single token; the name runs to the end of line.
                if let Some((head, tail)) = rest.split_once("name=") {
                    name = tail.to_string();
                    for tok in head.split_whitespace() {
                        if let Some(v) = tok.strip_prefix("offset=") {
                            offset = v
                                .parse()
                                .map_err(|_| Error::Format(format!("bad offset {v}")))?;
                        }
                    }
                }
            }
            lines.next();
        } else {
            break;
        }
    }

    let mut next_line = || -> Result<&str> {
        lines
            .next()
            .ok_or_else(|| Error::Format("unexpected end of file".into()))
    };
    let m: usize = parse_first_int(next_line()?)?;
    let nblocks: usize = parse_first_int(next_line()?)?;
    let sizes_line = next_line()?;
    let sizes: Vec<i64> = numeric_tokens(sizes_line)
        .map(|t| {
            t.parse::<f64>()
                .map(|v| v as i64)
                .map_err(|_| Error::Format(format!("bad block size {t}")))
        })
        .collect::<Result<_>>()?;
    if sizes.len() != nblocks {
        return Err(Error::Format(format!(
            "expected {nblocks} block sizes, found {}",
            sizes.len()
        )));
    }
    let c_line = next_line()?;
    let c: Vec<f64> = numeric_tokens(c_line)
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Format(format!("bad objective value {t}")))
        })
        .collect::<Result<_>>()?;
    if c.len() != m {
        return Err(Error::Format(format!(
            "expected {m} objective values, found {}",
            c.len()
        )));
    }

    let mut problem = SdpProblem::new(name, m);
    problem.objective = c.iter().map(|v| -v).collect();
    problem.objective_offset = offset;
    for s in &sizes {
        if *s == 0 {
            return Err(Error::Format("zero block size".into()));
        }
        if *s < 0 {
            problem.add_block(BlockKind::Diag((-s) as usize));
        } else {
            problem.add_block(BlockKind::Dense(*s as usize));
        }
    }

    for line in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('"') || t.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = numeric_tokens(t).collect();
        if toks.len() != 5 {
            return Err(Error::Format(format!("bad entry line: {line}")));
        }
        let matno: usize = toks[0]
            .parse()
            .map_err(|_| Error::Format(format!("bad matrix index {}", toks[0])))?;
        let blk: usize = toks[1]
            .parse()
            .map_err(|_| Error::Format(format!("bad block index {}", toks[1])))?;
        let i: usize = toks[2]
            .parse()
            .map_err(|_| Error::Format(format!("bad row {}", toks[2])))?;
        let j: usize = toks[3]
            .parse()
            .map_err(|_| Error::Format(format!("bad column {}", toks[3])))?;
        let v: f64 = toks[4]
            .parse()
            .map_err(|_| Error::Format(format!("bad value {}", toks[4])))?;
        if matno > m || blk == 0 || blk > nblocks || i == 0 || j == 0 {
            return Err(Error::Format(format!("entry out of range: {line}")));
        }
        let (blk, i, j) = (blk - 1, i - 1, j - 1);
        let sz = problem.blocks[blk].size();
        if i >= sz || j >= sz {
            return Err(Error::Format(format!("entry exceeds block size: {line}")));
        }
        if matno == 0 {
            problem.add_f0(blk, i, j, -v);
        } else {
            problem.add_coeff(blk, matno - 1, i, j, v);
        }
    }
    problem.normalize();
    problem.validate()?;
    Ok(problem)
}

fn parse_first_int(line: &str) -> Result<usize> {
    numeric_tokens(line)
        .next()
        .ok_or_else(|| Error::Format(format!("expected an integer on: {line}")))?
        .parse()
        .map_err(|_| Error::Format(format!("expected an integer on: {line}")))
}

/// Splits on whitespace and the separator characters real SDPA files use.
fn numeric_tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
        .filter(|t| !t.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{solve, SolverConfig};

    fn sample_problem() -> SdpProblem {
        let mut p = SdpProblem::new("sample", 2);
        p.objective = vec![1.0, 2.5];
        p.objective_offset = 1.0;
        let b = p.add_block(BlockKind::Dense(2));
        p.add_f0(b, 0, 0, 1.0);
        p.add_f0(b, 1, 1, 1.0);
        p.add_coeff(b, 0, 0, 1, 1.0);
        let d = p.add_block(BlockKind::Diag(2));
        p.add_coeff(d, 1, 0, 0, 1.0);
        p.add_f0(d, 1, 1, 0.75);
        p.add_coeff(d, 1, 1, 1, -1.0);
        p.normalize();
        p
    }

    #[test]
    fn roundtrip_identity() {
        let p = sample_problem();
        let text = write_sdpa(&p);
        let q = parse_sdpa(&text).unwrap();
        assert_eq!(p, q);
        let text2 = write_sdpa(&q);
        assert_eq!(text, text2, "export → parse → export must be byte-identical");
    }

    #[test]
    fn roundtrip_preserves_solution() {
        let p = sample_problem();
        let q = parse_sdpa(&write_sdpa(&p)).unwrap();
        let cfg = SolverConfig::default();
        let s1 = solve(&p, &cfg).unwrap();
        let s2 = solve(&q, &cfg).unwrap();
        assert_eq!(s1.objective.to_bits(), s2.objective.to_bits());
    }

    #[test]
    fn parser_tolerates_foreign_formatting() {
        let text = "\
* exported elsewhere
2
2
{2, -2}
1.0, -3.0
0 1 1 1 -1
1 1 1 2 1
2 2 1 1 1
2 2 2 2 -1
";
        let p = parse_sdpa(text).unwrap();
        assert_eq!(p.num_vars(), 2);
        assert_eq!(p.objective, vec![-1.0, 3.0]);
        assert_eq!(p.blocks[0], BlockKind::Dense(2));
        assert_eq!(p.blocks[1], BlockKind::Diag(2));
        assert_eq!(p.f0[0].entries, vec![(0, 0, 1.0)]);
    }

    #[test]
    fn parser_rejects_malformed() {
        assert!(parse_sdpa("").is_err());
        assert!(parse_sdpa("1\n1\n3\n1.0\n9 1 1 1 1\n").is_err()); // matno out of range
        assert!(parse_sdpa("1\n1\n2\n1.0\n1 1 5 1 1\n").is_err()); // row beyond block
        assert!(parse_sdpa("1\n2\n2\n1.0\n").is_err()); // block count mismatch
    }
}
