use extmcg::f2_forms::{self, F2Vector, QuadraticRefinement, SymplecticSpaceF2};
use extmcg::sl2z::{self, Gen, GenWord, Mod2Class, Token, UniModMat2};
use proptest::prelude::*;

/// Normal-form words: alternating `V` and `T^k`, letter length at most `max_len`.
fn normal_word(max_len: i64) -> impl Strategy<Value = GenWord> {
    (any::<bool>(), any::<bool>(), prop::collection::vec(1i64..=6, 0..12), prop::collection::vec(any::<bool>(), 12))
        .prop_map(move |(start_v, negative, sizes, signs)| {
            let mut tokens = Vec::new();
            let mut budget = max_len;
            let mut is_v = start_v;
            for (i, &k) in sizes.iter().enumerate() {
                let cost = if is_v { 1 } else { k };
                if cost > budget {
                    break;
                }
                budget -= cost;
                tokens.push(if is_v { Token::new(Gen::V, 1) } else { Token::new(Gen::T, if signs[i] { k } else { -k }) });
                is_v = !is_v;
            }
            GenWord::new(tokens, negative)
        })
}

fn member() -> impl Strategy<Value = UniModMat2> {
    normal_word(20).prop_map(|w| sl2z::eval_word(&w))
}

fn sl2z_matrix() -> impl Strategy<Value = UniModMat2> {
    // products of elementary matrices cover SL(2,Z)
    prop::collection::vec((any::<bool>(), -4i64..=4), 0..10).prop_map(|steps| {
        steps.into_iter().fold(UniModMat2::identity(), |acc, (upper, k)| {
            let e = if upper { UniModMat2::from_i64(1, k, 0, 1) } else { UniModMat2::from_i64(1, 0, k, 1) };
            &acc * &e.unwrap()
        })
    })
}

fn alternating_nondegenerate(dim: usize) -> impl Strategy<Value = SymplecticSpaceF2> {
    prop::collection::vec(any::<bool>(), dim * (dim - 1) / 2)
        .prop_filter_map("degenerate", move |upper| {
            let mut rows = vec![vec![0u8; dim]; dim];
            let mut it = upper.into_iter();
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let b = u8::from(it.next().unwrap());
                    rows[i][j] = b;
                    rows[j][i] = b;
                }
            }
            SymplecticSpaceF2::from_rows(&rows).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn membership_closed(a in member(), b in member()) {
        prop_assert!(sl2z::is_member(&a) && sl2z::is_member(&b));
        prop_assert!(sl2z::is_member(&(&a * &b)));
        prop_assert!(sl2z::is_member(&a.inverse()));
    }

    #[test]
    fn membership_matches_mod2_class(m in sl2z_matrix()) {
        let by_class = sl2z::reduce_mod2(&m) != Mod2Class::Other;
        prop_assert_eq!(sl2z::is_member(&m), by_class);
        prop_assert_eq!(sl2z::decompose(&m).is_ok(), by_class);
    }

    #[test]
    fn word_roundtrip(w in normal_word(20)) {
        prop_assert!(w.is_normal());
        let m = sl2z::eval_word(&w);
        prop_assert_eq!(sl2z::decompose(&m).unwrap(), w.clone());
        prop_assert_eq!(w.to_string().parse::<GenWord>().unwrap(), w);
    }

    #[test]
    fn normal_form_preserves_value(raw in prop::collection::vec((any::<bool>(), -5i64..=5), 0..16), negative in any::<bool>()) {
        let tokens = raw.into_iter().map(|(v, e)| Token::new(if v { Gen::V } else { Gen::T }, e)).collect();
        let w = GenWord::new(tokens, negative);
        let nf = sl2z::normal_form(&w);
        prop_assert!(nf.is_normal());
        prop_assert_eq!(sl2z::eval_word(&nf), sl2z::eval_word(&w));
    }

    #[test]
    fn matrix_json_roundtrip(m in member()) {
        let text = m.to_json().to_string();
        prop_assert_eq!(UniModMat2::from_json(&text).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn refinement_identity(space in (1usize..=4).prop_flat_map(|k| alternating_nondegenerate(2 * k)), values in any::<u64>(), v in any::<u64>(), w in any::<u64>()) {
        let dim = space.dim();
        let mask = (1u64 << dim) - 1;
        let bits: Vec<u8> = (0..dim).map(|i| ((values >> i) & 1) as u8).collect();
        let q = QuadraticRefinement::new(space.clone(), &bits).unwrap();
        let v = F2Vector::from_packed(dim, v & mask).unwrap();
        let w = F2Vector::from_packed(dim, w & mask).unwrap();
        let lhs = q.eval(&(v + w)).unwrap();
        let rhs = q.eval(&v).unwrap() ^ q.eval(&w).unwrap() ^ space.pair(&v, &w).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn arf_basis_independent(space in (1usize..=3).prop_flat_map(|k| alternating_nondegenerate(2 * k)), values in any::<u64>(), order in any::<u64>()) {
        let dim = space.dim();
        let bits: Vec<u8> = (0..dim).map(|i| ((values >> i) & 1) as u8).collect();
        let q = QuadraticRefinement::new(space.clone(), &bits).unwrap();
        // a rotated unit basis spans, so a symplectic basis can be grown from it
        let shift = (order % dim as u64) as usize;
        let seq: Vec<F2Vector> = (0..dim).map(|i| F2Vector::unit(dim, (i + shift) % dim).unwrap()).collect();
        let pairs = space.symplectic_basis_from(&seq).unwrap();
        prop_assert!(space.is_symplectic_basis(&pairs));
        prop_assert_eq!(q.arf_with_basis(&pairs).unwrap(), q.arf());
        // majority definition
        let ones = F2Vector::all(dim).unwrap().filter(|x| q.eval(x).unwrap() == 1).count();
        prop_assert_eq!(u8::from(2 * ones > 1 << dim), q.arf());
    }
}

#[test]
fn arf_transport_invariant_over_sp4() {
    let space = SymplecticSpaceF2::standard(2).unwrap();
    let group = f2_forms::enumerate_sp(2).unwrap();
    for q in QuadraticRefinement::all(&space).unwrap() {
        for s in &group {
            let t = f2_forms::transport(&q, s).unwrap();
            assert_eq!(t.arf(), q.arf());
        }
    }
}

#[test]
fn arf_counts_up_to_rank_three() {
    // 2^{k-1}(2^k + 1) refinements have Arf invariant zero
    for (k, zeros, ones) in [(1usize, 3usize, 1usize), (2, 10, 6), (3, 36, 28)] {
        let space = SymplecticSpaceF2::standard(k).unwrap();
        let all = QuadraticRefinement::all(&space).unwrap();
        let z = all.iter().filter(|q| q.arf() == 0).count();
        assert_eq!((z, all.len() - z), (zeros, ones));
    }
}

#[test]
fn nonstandard_isometries_preserve_arf() {
    let space = SymplecticSpaceF2::from_rows(&[
        vec![0, 1, 1, 0],
        vec![1, 0, 0, 1],
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
    ])
    .unwrap();
    check_space(&space);
}

fn check_space(space: &SymplecticSpaceF2) {
    let group = f2_forms::enumerate_isometries(space).unwrap();
    assert_eq!(group.len(), 720);
    for q in QuadraticRefinement::all(space).unwrap() {
        for s in group.iter().step_by(7) {
            assert!(s.preserves(space));
            assert_eq!(f2_forms::transport(&q, s).unwrap().arf(), q.arf());
        }
    }
}
