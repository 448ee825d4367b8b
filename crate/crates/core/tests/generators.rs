mod common;

use common::{brute_assemble, rotated_base_row, summed_offsets};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tileasm_core::generators::cumulative_offsets;
use tileasm_core::{
    expected_tile_count, gen_nonuniform, gen_transform, gen_uniform, nonuniform_oracle, run,
    uniform_oracle, validate_system, Generated, HaltReason, ShiftSpec, SimConfig,
};

/// Labels of the N x N square grown by the library simulator.
fn simulated_grid(g: &Generated) -> Vec<Vec<u32>> {
    let r = run(&g.system, &SimConfig::default()).unwrap();
    assert_eq!(r.halted, HaltReason::Quiescent);
    let n = g.layout.n;
    assert_eq!(r.assembly.len(), (n * n) as usize);
    (0..n)
        .map(|row| {
            (0..n)
                .map(|c| g.label_at(&r.assembly, row, c).unwrap())
                .collect()
        })
        .collect()
}

/// Labels of the square grown by the brute-force assembler.
fn brute_grid(g: &Generated) -> Vec<Vec<u32>> {
    let b = brute_assemble(&g.system, 10_000);
    assert!(b.ambiguous.is_empty());
    let n = g.layout.n;
    assert_eq!(b.placed.len(), (n * n) as usize);
    (0..n)
        .map(|row| {
            (0..n)
                .map(|c| g.layout.label(b.placed[&(row as i64, c as i64)]).unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn n4_s1_rows_match_brute_force() {
    let g = gen_uniform(4, 1).unwrap();
    let grid = brute_grid(&g);
    assert_eq!(grid[0], vec![5, 2, 3, 4]);
    assert_eq!(&grid[1][1..], &[1, 2, 3]);
    assert_eq!(grid[2][1], 4);
    assert_eq!(simulated_grid(&g), grid);
    for r in 0..4 {
        for c in 0..4 {
            assert_eq!(
                uniform_oracle(4, 1, r, c).unwrap(),
                grid[r as usize][c as usize]
            );
        }
    }
}

#[test]
fn uniform_matches_oracle_and_brute_force() {
    for n in 2..=12u32 {
        for s in -(n as i64)..(2 * n as i64) {
            let g = gen_uniform(n, s).unwrap();
            assert_eq!(g.system.tiles.len(), 3 * n as usize - 1);
            let sim = simulated_grid(&g);
            let mismatches = g.compare(
                &run(&g.system, &SimConfig::default()).unwrap().assembly,
                |r, c| uniform_oracle(n, s, r, c).unwrap(),
            );
            assert!(mismatches.is_empty(), "n={n} s={s}: {mismatches:?}");
            if (0..n as i64).contains(&s) {
                assert_eq!(sim, brute_grid(&g), "n={n} s={s}");
            }
        }
    }
}

#[test]
fn zero_shift_copies_the_base_row() {
    for n in 2..=9u32 {
        let g = gen_uniform(n, 0).unwrap();
        let grid = simulated_grid(&g);
        for row in &grid[1..] {
            assert_eq!(*row, (1..=n).collect::<Vec<_>>());
        }
    }
}

#[test]
fn nonuniform_n6_example() {
    let shifts = [2, 3, 1, 2, 3];
    let g = gen_nonuniform(6, &shifts).unwrap();
    assert_eq!(g.system.tiles.len(), 29);
    assert!(validate_system(&g.system).is_empty());
    let grid = simulated_grid(&g);
    assert_eq!(grid, brute_grid(&g));
    assert_eq!(summed_offsets(6, &shifts), vec![0, 2, 5, 0, 2, 5]);
    assert_eq!(
        cumulative_offsets(6, &shifts).unwrap(),
        vec![0, 2, 5, 0, 2, 5]
    );
    // Row 3: cumulative shift 6 = 0 (mod 6), so it repeats the base row.
    assert_eq!(grid[3], vec![1, 2, 3, 4, 5, 6]);
    // Row 1: base row shifted by the first shift alone.
    assert_eq!(grid[1], rotated_base_row(6, 2));
    for r in 0..6 {
        for c in 0..6 {
            assert_eq!(
                nonuniform_oracle(6, &shifts, r, c).unwrap(),
                grid[r as usize][c as usize]
            );
        }
    }
}

#[test]
fn random_nonuniform_shifts_follow_cumulative_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in 2..=10u32 {
        for _ in 0..15 {
            let shifts: Vec<i64> = (0..n - 1).map(|_| rng.random_range(-20..20)).collect();
            let g = gen_nonuniform(n, &shifts).unwrap();
            let spec = ShiftSpec::per_row(n, &shifts).unwrap();
            assert_eq!(g.system.tiles.len(), expected_tile_count(&spec));
            let grid = simulated_grid(&g);
            let offsets = summed_offsets(n, &shifts);
            for r in 1..n as usize {
                assert_eq!(
                    grid[r],
                    rotated_base_row(n, offsets[r]),
                    "n={n} {shifts:?} row {r}"
                );
            }
        }
    }
}

#[test]
fn constant_shift_array_equals_uniform() {
    for n in 2..=9u32 {
        for s in 0..n as i64 {
            let uni = simulated_grid(&gen_uniform(n, s).unwrap());
            let per = simulated_grid(&gen_nonuniform(n, &vec![s; n as usize - 1]).unwrap());
            assert_eq!(uni, per);
        }
    }
}

#[test]
fn transform_rotates_every_label() {
    let base = gen_nonuniform(4, &[1, 1, 1]).unwrap();
    let rot = gen_transform(4, &[1, 1, 1], 1).unwrap();
    let a = simulated_grid(&base);
    let b = simulated_grid(&rot);
    for r in 0..4 {
        for c in 0..4 {
            if (r, c) == (0, 0) {
                assert_eq!(b[r][c], 5);
                continue;
            }
            assert_eq!(b[r][c], (a[r][c] + 4 - 2) % 4 + 1, "({r},{c})");
        }
    }
    assert_eq!(b, brute_grid(&rot));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=8u32 {
        let shifts: Vec<i64> = (0..n - 1).map(|_| rng.random_range(0..n as i64)).collect();
        let k = rng.random_range(-10..10);
        let grid = simulated_grid(&gen_transform(n, &shifts, k).unwrap());
        let offsets = summed_offsets(n, &shifts);
        for r in 1..n as usize {
            assert_eq!(grid[r], rotated_base_row(n, offsets[r] + k));
        }
        assert_eq!(&grid[0][1..], &rotated_base_row(n, k)[1..]);
    }
}

#[test]
fn tile_counts_follow_the_formulas() {
    for n in 2..=64u32 {
        for s in 0..n as i64 {
            let g = gen_uniform(n, s).unwrap();
            assert_eq!(g.system.tiles.len(), 3 * n as usize - 1);
        }
    }
    assert_eq!(
        expected_tile_count(&ShiftSpec::per_row(2, &[1]).unwrap()),
        5
    );
    assert_eq!(gen_nonuniform(2, &[1]).unwrap().system.tiles.len(), 5);
}

proptest! {
    #[test]
    fn shift_reduction_is_invisible(n in 2u32..20, s in -100i64..100, r in 0u32..20, c in 0u32..20) {
        prop_assume!(r < n && c < n);
        prop_assert_eq!(
            uniform_oracle(n, s, r, c).unwrap(),
            uniform_oracle(n, s.rem_euclid(n as i64), r, c).unwrap()
        );
    }

    #[test]
    fn oracle_rejects_sites_outside_the_square(n in 2u32..10, r in 0u32..30, c in 0u32..30) {
        prop_assume!(r >= n || c >= n);
        prop_assert!(uniform_oracle(n, 1, r, c).is_err());
    }
}
