use descents::exact::{factorial, rat, rat_from_uints, render, Rational};
use descents::measures::{c_pmf_c, d_pmf_c, d_pmf_r, transfer_l1};
use descents::moments::{mean_c_exact, second_moment_c_exact};
use descents::permcore::{cyclic_descent_count, cyclic_rotate, descent_count, eulerian_row, insert_symbol};
use descents::sampler::{sample_histogram, SampleStatistic, SamplerConfig};
use descents::{ExactPmf, Family, Permutation};
use num_traits::One;
use proptest::prelude::*;

fn permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (2..=max_n)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #[test]
    fn cyclic_minus_linear_is_zero_or_one(p in permutation(40)) {
        let gap = cyclic_descent_count(&p).unwrap() - descent_count(&p);
        prop_assert!(gap <= 1);
        prop_assert_eq!(gap == 1, p.wraps_down());
    }

    #[test]
    fn cyclic_count_is_rotation_invariant(p in permutation(40), shift in 0usize..40) {
        let s = shift % p.len();
        let q = cyclic_rotate(&p, s).unwrap();
        prop_assert_eq!(cyclic_descent_count(&q).unwrap(), cyclic_descent_count(&p).unwrap());
    }

    #[test]
    fn insertion_changes_descents_by_case(p in permutation(30), j in 0usize..=30) {
        let n = p.len();
        let j = j % (n + 1);
        let d = descent_count(&p);
        let q = insert_symbol(&p, j).unwrap();
        let keeps = j == n || (j > 0 && p.at(j) > p.at(j + 1));
        prop_assert_eq!(descent_count(&q), if keeps { d } else { d + 1 });
    }

    #[test]
    fn text_round_trip(p in permutation(30)) {
        let back: Permutation = p.to_string().parse().unwrap();
        prop_assert_eq!(back.inverse().inverse(), p);
    }

    #[test]
    fn laws_are_normalized(k in 1u64..5000, n in 2usize..60) {
        for pmf in [d_pmf_r(k, n).unwrap(), c_pmf_c(k, n).unwrap(), d_pmf_c(k, n).unwrap()] {
            let total: Rational = pmf.masses().iter().sum();
            prop_assert!(total.is_one());
        }
    }

    #[test]
    fn moments_agree_with_pmf(k in 1u64..500, n in 2usize..50) {
        let pmf = c_pmf_c(k, n).unwrap();
        prop_assert_eq!(mean_c_exact(k, n).unwrap(), pmf.mean());
        prop_assert_eq!(second_moment_c_exact(k, n).unwrap(), pmf.moment(2));
    }

    #[test]
    fn transfer_l1_within_bound(k in 1u64..10_000, n in 2usize..80) {
        let (l1, bound) = transfer_l1(k, n).unwrap();
        prop_assert!(l1 <= bound);
    }

    #[test]
    fn sampling_is_seed_deterministic(seed in any::<u64>(), streams in 1u32..6) {
        let cfg = SamplerConfig::new(3, 5, 500, seed, streams).unwrap();
        let a = sample_histogram(&cfg, Family::C, SampleStatistic::C).unwrap();
        let b = sample_histogram(&cfg, Family::C, SampleStatistic::C).unwrap();
        prop_assert_eq!(a.values().sum::<u64>(), 500);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rationals_render_reduced(num in 1i64..1000, den in 1i64..1000, scale in 1i64..50) {
        prop_assert_eq!(render(&rat(num * scale, den * scale)), render(&rat(num, den)));
    }
}

#[test]
fn large_k_approaches_eulerian_law() {
    let k = 1u64 << 20;
    for n in 1..=7usize {
        let row = eulerian_row(n);
        let fact = factorial(n as u64);
        let eulerian =
            ExactPmf::from_pairs(row.iter().enumerate().map(|(r, a)| (r as u64, rat_from_uints(a, &fact))))
                .unwrap();
        let l1 = d_pmf_r(k, n).unwrap().l1_distance(&eulerian);
        let bound = rat(10 * (n * n) as i64, k as i64);
        assert!(l1 < bound, "n={n}");
    }
}

#[test]
fn canonical_rendering() {
    assert_eq!(render(&rat(6, 8)), "3/4");
}
