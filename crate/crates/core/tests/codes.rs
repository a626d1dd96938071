use liftcert::codes::{
    circulant_structure_check, code_dimension, css_valid, lifted_product, lifted_product_ring, tanner_base_matrix,
    tanner_code, BitMatrix, BitVec, BlockLayout, CSSCode, DistanceMode, GroupAlgebraMatrix, LinearCodeF2, Poly,
};
use liftcert::graphs::{lift, random_regular, Signing};
use liftcert::groups::AbelianGroupSpec;
use proptest::prelude::*;

fn ring_matrix(l: u32, rows: usize, cols: usize, bits: &[bool]) -> GroupAlgebraMatrix {
    let mut m = GroupAlgebraMatrix::zeros(l, rows, cols).unwrap();
    let mut it = bits.iter().cycle();
    for i in 0..rows {
        for j in 0..cols {
            let exps: Vec<u32> = (0..l).filter(|_| *it.next().unwrap()).collect();
            m.set(i, j, Poly::from_exponents(&exps, l));
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lifted_products_are_css(
        l in 1u32..6,
        ma in 1usize..4, na in 1usize..4, mb in 1usize..4, nb in 1usize..4,
        bits in proptest::collection::vec(any::<bool>(), 1..64),
    ) {
        let a = ring_matrix(l, ma, na, &bits);
        let b = ring_matrix(l, mb, nb, &bits[bits.len() / 2..].iter().chain(&bits).copied().collect::<Vec<_>>());
        let hp = lifted_product(&a, &b).unwrap();
        prop_assert!(css_valid(&hp));
        prop_assert_eq!(hp.n, (na * nb + ma * mb) * (l * l) as usize);
        let ring = lifted_product_ring(&a, &b).unwrap();
        prop_assert!(css_valid(&ring));
        prop_assert_eq!(ring.n, (na * nb + ma * mb) * l as usize);
    }

    #[test]
    fn rank_plus_nullity(rows in 0usize..12, cols in 1usize..90, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = BitMatrix::random(rows, cols, &mut rng);
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.num_rows(), cols);
        prop_assert!(m.mul_transpose(&k).unwrap().is_zero());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn dimension_invariant_under_row_operations(l in 2u32..5, ops in proptest::collection::vec((0usize..64, 0usize..64), 0..40)) {
        let a = GroupAlgebraMatrix::parse(l, &[vec!["1+x"]]).unwrap();
        let code = lifted_product(&a, &a).unwrap();
        let mix = |m: &BitMatrix| {
            let mut rows = m.rows().to_vec();
            let r = rows.len();
            for &(i, j) in &ops {
                let (i, j) = (i % r, j % r);
                if i != j {
                    let src = rows[j].clone();
                    rows[i].xor_assign(&src);
                }
            }
            BitMatrix::from_rows(m.num_cols(), rows).unwrap()
        };
        let mixed = CSSCode::new(mix(&code.hx), mix(&code.hz)).unwrap();
        prop_assert!(css_valid(&mixed));
        prop_assert_eq!(code_dimension(&mixed), code_dimension(&code));
    }
}

#[test]
fn information_set_never_beats_exact() {
    let mut agree = 0;
    let mut total = 0;
    for l in 2..=4u32 {
        let a = GroupAlgebraMatrix::parse(l, &[vec!["1+x"]]).unwrap();
        let code = lifted_product(&a, &a).unwrap();
        let exact = code.min_distance(DistanceMode::Exact).unwrap().value.unwrap();
        for seed in 0..10 {
            let ub = code
                .min_distance(DistanceMode::InformationSet { trials: 10, seed })
                .unwrap()
                .value
                .unwrap();
            assert!(ub >= exact);
            total += 1;
            agree += usize::from(ub == exact);
        }
    }
    println!("information-set matched exact distance in {agree}/{total} toric trials");
}

#[test]
fn classical_exact_matches_brute_force() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let g = BitMatrix::random(5, 11, &mut rng);
        let code = LinearCodeF2::from_generator(&g);
        let basis = code.generator().rows().to_vec();
        let brute = (1u32..1 << basis.len())
            .map(|mask| {
                let mut v = BitVec::zeros(11);
                for (i, b) in basis.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        v.xor_assign(b);
                    }
                }
                v.weight()
            })
            .min();
        assert_eq!(code.min_distance(DistanceMode::Exact).unwrap().value, brute);
    }
}

#[test]
fn tanner_of_lifts_is_quasi_cyclic_and_matches_base_matrix() {
    for seed in 0..6u64 {
        let base = random_regular(10, 3, seed).unwrap();
        let l = 3 + seed as u32;
        let s = Signing::random(&base, AbelianGroupSpec::cyclic(l).unwrap(), seed);
        let lifted = lift(&base, &s, false).unwrap();
        for c0 in [LinearCodeF2::even_weight(3), LinearCodeF2::repetition(3)] {
            let h = tanner_code(&lifted, &c0).unwrap();
            assert!(circulant_structure_check(&h, &BlockLayout::cyclic(l as usize)).unwrap());
            let bm = tanner_base_matrix(&base, &s, &c0).unwrap();
            assert!(bm.expand().same_row_space(&h));
        }
    }
}

#[test]
fn alist_files_roundtrip_through_disk() {
    let dir = tempfile_dir();
    let h = LinearCodeF2::hamming_7_4().parity().clone();
    let path = dir.join("hamming.alist");
    std::fs::write(&path, h.to_alist()).unwrap();
    let back = BitMatrix::from_alist(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, h);
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("liftcert-codes-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
