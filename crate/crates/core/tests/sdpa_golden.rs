//! Golden-file and property tests for the SDPA sparse format.

use std::collections::BTreeSet;

use proptest::prelude::*;

use orthobound::sdp::{BlockKind, SdpProblem};
use orthobound::sdpa::{parse_sdpa, write_sdpa};
use orthobound::terwilliger::build_schrijver_sdp;

/// The committed golden export must stay byte-stable across builds.
#[test]
fn golden_schrijver_n4_byte_exact() {
    let forbidden: BTreeSet<u32> = [2].into_iter().collect();
    let (p, _) = build_schrijver_sdp(4, &forbidden).unwrap();
    let text = write_sdpa(&p);
    let golden = include_str!("golden/schrijver_n4.dat-s");
    assert_eq!(text, golden, "export drifted from the committed golden file");
    let parsed = parse_sdpa(golden).unwrap();
    assert_eq!(parsed, p);
}

fn arb_problem() -> impl Strategy<Value = SdpProblem> {
    // Random small problems: 1..4 vars, 1..3 blocks, sparse entries.
    (1usize..4, 1usize..4).prop_flat_map(|(nvars, nblocks)| {
        let block = (any::<bool>(), 1usize..4).prop_map(|(diag, sz)| {
            if diag {
                BlockKind::Diag(sz)
            } else {
                BlockKind::Dense(sz)
            }
        });
        let blocks = prop::collection::vec(block, nblocks);
        let objective = prop::collection::vec(-4.0..4.0f64, nvars);
        let entries = prop::collection::vec(
            (0usize..nblocks, 0usize..=nvars, 0usize..4, 0usize..4, -2.0..2.0f64),
            0..24,
        );
        (Just(nvars), blocks, objective, entries, -3.0..3.0f64).prop_map(
            |(nvars, blocks, objective, entries, offset)| {
                let mut p = SdpProblem::new("prop", nvars);
                p.objective = objective;
                p.objective_offset = offset;
                for b in blocks {
                    p.add_block(b);
                }
                for (blk, var, i, j, v) in entries {
                    let sz = p.blocks[blk].size();
                    let (mut i, mut j) = (i % sz, j % sz);
                    if p.blocks[blk].is_diag() {
                        j = i;
                    }
                    if i > j {
                        std::mem::swap(&mut i, &mut j);
                    }
                    if var == 0 {
                        p.add_f0(blk, i, j, v);
                    } else {
                        p.add_coeff(blk, var - 1, i, j, v);
                    }
                }
                p.normalize();
                p
            },
        )
    })
}

proptest! {
    /// parse(write(p)) == p and write is a fixed point of parse∘write.
    #[test]
    fn roundtrip_random_problems(p in arb_problem()) {
        let text = write_sdpa(&p);
        let q = parse_sdpa(&text).unwrap();
        prop_assert_eq!(&p, &q);
        prop_assert_eq!(text, write_sdpa(&q));
    }
}
