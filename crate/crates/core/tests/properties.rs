use proptest::prelude::*;

use voa_core::fock::{basis_mode_action, grade, project_eigen, theta, FockElement, Sector};
use voa_core::group_ext::{irreducible_modules, Cocycle, QuotientGroup};
use voa_core::lattice::{LVector, LatticeData};
use voa_core::scalars::{rat, Scalar};
use voa_core::vertex::{Module, VertexEngine};
use voa_core::zhu::{circ, heisenberg_basis, o_action_matrix, star, Membership, MembershipSolver, TopSpace, ZhuExpr};
use voa_core::{fock, linalg};

fn scalar() -> impl Strategy<Value = Scalar> {
    // a + b sqrt(2) + c i + e sqrt(-3)
    prop::collection::vec((-6i64..=6, 1i64..=5), 4).prop_map(|c| {
        let gens = [Scalar::one(), Scalar::sqrt(2).unwrap(), Scalar::i(), Scalar::sqrt(-3).unwrap()];
        gens.iter().zip(c).map(|(g, (n, d))| g.scale(&rat(n, d))).sum()
    })
}

fn even_gram() -> impl Strategy<Value = LatticeData> {
    (1usize..=3, prop::collection::vec(-3i64..=3, 6)).prop_filter_map("degenerate", |(d, e)| {
        let mut g = vec![vec![0i64; d]; d];
        let mut k = 0;
        for i in 0..d {
            for j in i..d {
                let x = if i == j { 2 * e[k] } else { e[k] };
                g[i][j] = x;
                g[j][i] = x;
                k += 1;
            }
        }
        LatticeData::load(g).ok()
    })
}

fn coords(d: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, d)
}

fn lattice_and_vectors(n: usize) -> impl Strategy<Value = (LatticeData, Vec<Vec<i64>>)> {
    even_gram().prop_flat_map(move |l| {
        let d = l.rank();
        (Just(l), prop::collection::vec(coords(d), n))
    })
}

/// Random element of the untwisted Fock space of rank 2 with up to three monomials.
fn fock2() -> impl Strategy<Value = FockElement> {
    prop::collection::vec((prop::collection::vec((0usize..2, 1u32..=3), 0..3), -4i64..=4), 1..4).prop_map(|terms| {
        let mut x = FockElement::zero(Sector::Untwisted);
        for (modes, c) in terms {
            let mut m = FockElement::vacuum(2);
            for (dir, n) in modes {
                m = m.create(dir, 2 * n);
            }
            x.add_scaled(&m, &Scalar::from_int(c));
        }
        x
    })
}

proptest! {
    #[test]
    fn scalar_field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn pairing_is_symmetric_bilinear((l, v) in lattice_and_vectors(3)) {
        let [x, y, z] = [0, 1, 2].map(|i| LVector::from_ints(&v[i]));
        prop_assert_eq!(l.pair(&x, &y), l.pair(&y, &x));
        prop_assert_eq!(l.pair(&x.add(&y), &z), l.pair(&x, &z) + l.pair(&y, &z));
        prop_assert!(l.norm(&x).is_integer() && (l.norm(&x).to_integer() % 2 == 0.into()));
    }

    #[test]
    fn cocycle_identities((l, v) in lattice_and_vectors(3)) {
        let eps = Cocycle::new(&l);
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let sum = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(p, q)| p + q).collect::<Vec<_>>();
        let pab = l.pair(&LVector::from_ints(a), &LVector::from_ints(b)).to_integer();
        let sign = if pab.clone() % 2 == 0.into() { 1 } else { -1 };
        prop_assert_eq!(eps.epsilon_ints(a, b) * eps.epsilon_ints(b, a), sign);
        prop_assert_eq!(
            eps.epsilon_ints(a, b) * eps.epsilon_ints(&sum(a, b), c),
            eps.epsilon_ints(b, c) * eps.epsilon_ints(a, &sum(b, c))
        );
        prop_assert_eq!(eps.epsilon_ints(&sum(a, b), c), eps.epsilon_ints(a, c) * eps.epsilon_ints(b, c));
    }

    #[test]
    fn heisenberg_commutator(x in fock2(), a in 0usize..2, b in 0usize..2, m in -3i64..=3, n in -3i64..=3) {
        let act = |dir, k: i64, y: &FockElement| basis_mode_action(dir, 2 * k, y).unwrap();
        let lhs = act(a, m, &act(b, n, &x)).sub(&act(b, n, &act(a, m, &x)));
        let c = if a == b && m + n == 0 { m } else { 0 };
        prop_assert_eq!(lhs, x.scale(&Scalar::from_int(c)));
    }

    #[test]
    fn theta_is_an_involution(x in fock2()) {
        prop_assert_eq!(theta(&theta(&x)), x.clone());
        prop_assert_eq!(project_eigen(&x, true).add(&project_eigen(&x, false)), x.clone());
        let p = project_eigen(&x, true);
        prop_assert_eq!(theta(&p), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grading_is_additive(i in 0usize..9, j in 0usize..9, n in -3i64..=3) {
        let eng = VertexEngine::free(1);
        let basis = heisenberg_basis(1, 3);
        let (u, v) = (&basis[i % basis.len()], &basis[j % basis.len()]);
        let x = eng.untwisted_mode(u, &rat(n, 1), v).unwrap();
        if !x.is_zero() {
            let expect = grade(u, 1).unwrap() + grade(v, 1).unwrap() - rat(n + 1, 1);
            prop_assert_eq!(grade(&x, 1).unwrap(), expect);
        }
    }

    #[test]
    fn quotient_group_reps_are_irreducible(l in even_gram()) {
        let g = QuotientGroup::build(&l, &Cocycle::new(&l)).unwrap();
        let reps = irreducible_modules(&g);
        let sum_sq: usize = reps.iter().map(|r| r.dim * r.dim).sum();
        // kappa acts as -1, so these reps fill the odd half of the group algebra
        prop_assert_eq!(sum_sq * 2, g.order());
        for r in &reps {
            prop_assert!(r.satisfies_table(&g));
            prop_assert_eq!(r.endomorphism_dimension(&g), 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `o(u*v) = o(u) o(v)` and `o(u o v) = 0` on the twisted top levels of `M(1)^+`.
    #[test]
    fn zero_modes_respect_products(i in 0usize..40, j in 0usize..40) {
        let eng = VertexEngine::free(2);
        let even: Vec<FockElement> =
            heisenberg_basis(2, 3).into_iter().map(|b| project_eigen(&b, true)).filter(|b| !b.is_zero()).collect();
        let (u, v) = (&even[i % even.len()], &even[j % even.len()]);
        let trivial = voa_core::group_ext::GroupRep::trivial();
        for plus in [true, false] {
            let top = TopSpace {
                label: String::new(),
                basis: fock::top_level_basis(&fock::TopLevel::Twisted { t_dim: 1, plus }, 2),
                module: Module::Twisted(&trivial),
            };
            let o = |x: FockElement| o_action_matrix(&eng, &ZhuExpr::vector(x), &top).unwrap();
            let prod = o(star(&eng, u, v).unwrap());
            prop_assert_eq!(prod, linalg::mat_mul(&o(u.clone()), &o(v.clone())));
            let c = o(circ(&eng, u, v).unwrap());
            prop_assert!(c.iter().flatten().all(|x| x.is_zero()));
        }
    }

    /// Random combinations of `u o v` are found, and their certificates replay.
    #[test]
    fn membership_certificates_replay(pairs in prop::collection::vec((0usize..9, 0usize..9, -3i64..=3), 1..3)) {
        let eng = VertexEngine::free(1);
        let basis = heisenberg_basis(1, 3);
        let solver = MembershipSolver::new(&eng, 8).unwrap();
        let mut x = FockElement::zero(Sector::Untwisted);
        for (i, j, c) in pairs {
            let (u, v) = (&basis[i % basis.len()], &basis[j % basis.len()]);
            if u.terms.keys().all(|m| m.modes.is_empty()) {
                continue;
            }
            x.add_scaled(&circ(&eng, u, v).unwrap(), &Scalar::from_int(c));
        }
        match solver.solve(&x).unwrap() {
            Membership::Found(cert) => prop_assert!(cert.verify(&eng).unwrap()),
            Membership::Inconclusive { .. } => prop_assert!(false, "combination of circ products not found"),
        }
    }
}
