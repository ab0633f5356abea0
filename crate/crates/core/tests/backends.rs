mod common;

use common::{dense_cells, sorted_cells, triple_with};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparseq_core::bitvec::BitvectorBuilder;
use sparseq_core::closure;
use sparseq_core::oracle::dense::DenseMatrix;
use sparseq_core::{BoolMatrix, Budget, Coord, CsrcMatrix, K2Matrix, Restriction};

fn restriction(kind: u8, r: u32, c: u32) -> Restriction {
    match kind % 3 {
        0 => Restriction::row(r),
        1 => Restriction::col(c),
        _ => Restriction::cell(r, c),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_steps_by_the_bit(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
        let mut b = BitvectorBuilder::new();
        for &x in &bits {
            b.push(x);
        }
        let bv = b.finalize();
        let mut ones = 0;
        for (i, &x) in bits.iter().enumerate() {
            prop_assert_eq!(bv.rank(i), ones);
            prop_assert_eq!(bv.get(i), x);
            ones += x as u64;
        }
        prop_assert_eq!(bv.rank(bits.len()), ones);
    }

    #[test]
    fn build_then_enumerate_is_the_input_set(
        side_log in 1u32..8,
        raw in proptest::collection::vec((any::<u32>(), any::<u32>()), 0..200),
    ) {
        let side = 1usize << side_log;
        let cells: Vec<Coord> = raw.iter().map(|&(r, c)| Coord::new(r % side as u32, c % side as u32)).collect();
        let mut want = cells.clone();
        want.sort_unstable();
        want.dedup();
        let k2 = K2Matrix::build(&cells, side).unwrap();
        let csr = CsrcMatrix::build(&cells, side).unwrap();
        prop_assert_eq!(sorted_cells(&k2), want.clone());
        prop_assert_eq!(csr.coords(), want.clone());
        prop_assert!(k2.bit_len() <= 4 * want.len() * side_log as usize);
        prop_assert_eq!(k2.stored_ones() as usize, want.len());
    }

    #[test]
    fn transpose_is_an_involution(seed in any::<u64>(), t in any::<bool>(), i in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = triple_with(&mut rng, 32, 50, t, i);
        prop_assert!(x.k2.transpose().transpose().same_cells(&x.k2));
        prop_assert!(x.csr.transpose().transpose().same_cells(&x.csr));
        prop_assert_eq!(sorted_cells(&x.k2.transpose()), dense_cells(&x.dense.transpose()));
        prop_assert_eq!(sorted_cells(&x.csr.transpose()), dense_cells(&x.dense.transpose()));
    }

    #[test]
    fn sum_and_product_agree(seed in any::<u64>(), flags in 0u8..16, side_log in 1u32..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = 1usize << side_log;
        let a = triple_with(&mut rng, side, side * 2, flags & 1 != 0, flags & 2 != 0);
        let b = triple_with(&mut rng, side, side * 2, flags & 4 != 0, flags & 8 != 0);
        let bud = Budget::unlimited();
        let want = dense_cells(&a.dense.or(&b.dense));
        prop_assert_eq!(sorted_cells(&a.k2.sum(&b.k2, &bud).unwrap()), want.clone());
        prop_assert_eq!(sorted_cells(&a.csr.sum(&b.csr, &bud).unwrap()), want);
        let want = dense_cells(&a.dense.boolmul(&b.dense));
        prop_assert_eq!(sorted_cells(&a.k2.multiply(&b.k2, &bud).unwrap()), want.clone());
        prop_assert_eq!(sorted_cells(&a.csr.multiply(&b.csr, &bud).unwrap()), want);
    }

    #[test]
    fn algebra_laws(seed in any::<u64>(), flags in 0u8..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = triple_with(&mut rng, 16, 24, flags & 1 != 0, flags & 2 != 0);
        let b = triple_with(&mut rng, 16, 24, flags & 4 != 0, flags & 8 != 0);
        let c = triple_with(&mut rng, 16, 24, flags & 16 != 0, flags & 32 != 0);
        let bud = Budget::unlimited();
        let (a, b, c) = (a.k2, b.k2, c.k2);
        prop_assert!(a.sum(&b, &bud).unwrap().same_cells(&b.sum(&a, &bud).unwrap()));
        let l = a.sum(&b, &bud).unwrap().sum(&c, &bud).unwrap();
        let r = a.sum(&b.sum(&c, &bud).unwrap(), &bud).unwrap();
        prop_assert!(l.same_cells(&r));
        let l = a.multiply(&b, &bud).unwrap().multiply(&c, &bud).unwrap();
        let r = a.multiply(&b.multiply(&c, &bud).unwrap(), &bud).unwrap();
        prop_assert!(l.same_cells(&r));
        let l = a.sum(&b, &bud).unwrap().multiply(&c, &bud).unwrap();
        let r = a.multiply(&c, &bud).unwrap().sum(&b.multiply(&c, &bud).unwrap(), &bud).unwrap();
        prop_assert!(l.same_cells(&r));
        let l = a.multiply(&b, &bud).unwrap().transpose();
        let r = b.transpose().multiply(&a.transpose(), &bud).unwrap();
        prop_assert!(l.same_cells(&r));
    }

    #[test]
    fn restricted_operations_agree(
        seed in any::<u64>(),
        flags in 0u8..16,
        kind in 0u8..3,
        r in 0u32..32,
        c in 0u32..32,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = triple_with(&mut rng, 32, 60, flags & 1 != 0, flags & 2 != 0);
        let b = triple_with(&mut rng, 32, 60, flags & 4 != 0, flags & 8 != 0);
        let res = restriction(kind, r, c);
        let bud = Budget::unlimited();
        let want = dense_cells(&a.dense.or(&b.dense).mask(res.row, res.col));
        prop_assert_eq!(sorted_cells(&a.k2.sum_restricted(&b.k2, res, &bud).unwrap()), want.clone());
        prop_assert_eq!(sorted_cells(&a.csr.sum_restricted(&b.csr, res, &bud).unwrap()), want);
        let want = dense_cells(&a.dense.boolmul(&b.dense).mask(res.row, res.col));
        prop_assert_eq!(sorted_cells(&a.k2.multiply_restricted(&b.k2, res, &bud).unwrap()), want.clone());
        prop_assert_eq!(sorted_cells(&a.csr.multiply_restricted(&b.csr, res, &bud).unwrap()), want);
        // <r>A<c> is A masked by the restriction
        let want = dense_cells(&a.dense.mask(res.row, res.col));
        prop_assert_eq!(sorted_cells(&a.k2.restrict(res, &bud).unwrap()), want.clone());
        prop_assert_eq!(sorted_cells(&a.csr.restrict(res, &bud).unwrap()), want);
    }

    #[test]
    fn closures_agree_and_are_idempotent(seed in any::<u64>(), flags in 0u8..4, side_log in 1u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = 1usize << side_log;
        let a = triple_with(&mut rng, side, side + side / 2, flags & 1 != 0, flags & 2 != 0);
        let bud = Budget::unlimited();
        let plus = closure::closure_plus(&a.k2, &bud).unwrap();
        let want = dense_cells(&a.dense.warshall_closure());
        prop_assert_eq!(sorted_cells(&plus), want.clone());
        prop_assert_eq!(sorted_cells(&closure::closure_plus(&a.csr, &bud).unwrap()), want);
        prop_assert!(closure::closure_plus(&plus, &bud).unwrap().same_cells(&plus));
        let star = closure::closure_star(&a.k2, &bud).unwrap();
        prop_assert_eq!(sorted_cells(&star), dense_cells(&a.dense.star()));
        prop_assert!(closure::closure_star(&star, &bud).unwrap().same_cells(&star));
        // A* = I + A+
        let sum = plus.sum(&K2Matrix::identity(side), &bud).unwrap();
        prop_assert!(sum.same_cells(&star));
    }

    #[test]
    fn restricted_closures_agree(
        seed in any::<u64>(),
        flags in 0u8..4,
        kind in 0u8..3,
        r in 0u32..32,
        c in 0u32..32,
        reflexive in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = triple_with(&mut rng, 32, 40, flags & 1 != 0, flags & 2 != 0);
        let res = restriction(kind, r, c);
        let full = if reflexive { a.dense.star() } else { a.dense.warshall_closure() };
        let want = dense_cells(&full.mask(res.row, res.col));
        let bud = Budget::unlimited();
        prop_assert_eq!(
            sorted_cells(&closure::closure_restricted(&a.k2, res, reflexive, &bud).unwrap()),
            want.clone()
        );
        prop_assert_eq!(
            sorted_cells(&closure::closure_restricted(&a.csr, res, reflexive, &bud).unwrap()),
            want
        );
    }
}

#[test]
fn dense_warshall_matches_iterated_squaring() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for side in [4usize, 16, 64] {
        for _ in 0..10 {
            let cells = common::random_cells(&mut rng, side, side);
            let d = DenseMatrix::from_coords(side, &cells);
            let mut sq = d.clone();
            loop {
                let next = sq.or(&sq.boolmul(&sq));
                if next == sq {
                    break;
                }
                sq = next;
            }
            assert_eq!(sq, d.warshall_closure());
        }
    }
}

#[test]
fn csr_transpose_shares_storage() {
    let a = CsrcMatrix::build(&[Coord::new(0, 1), Coord::new(2, 3)], 4).unwrap();
    let t = a.transpose();
    assert!(t.shares_storage(&a));
    assert!(t.get(1, 0) && !t.get(0, 1));
}
