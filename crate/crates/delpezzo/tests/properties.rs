//! Property tests: structural invariants that must hold on arbitrary small
//! inputs, checked by randomized search with shrinking.

use proptest::prelude::*;

use delpezzo::diophantine::{solve_norm_equation, NormEquation, SolvabilityVerdict};
use delpezzo::equivariant::decompose_involution;
use delpezzo::intmat::{inertia, int, IntMat};
use delpezzo::isometry::Isometry;
use delpezzo::lattice::{
    restricted_signature, LatticeElement, LorentzianLattice, Sublattice, CANONICAL,
};

fn small_vec(rank: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, rank)
}

/// An admissible reflection vector in `M_n`, chosen from the families with
/// norm ±1 or ±2: `H`, `E_i`, `E_i − E_j`, `H − E_i − E_j`.
fn reflection_vector(n: usize, family: usize, pick_i: usize, pick_j: usize) -> Vec<i64> {
    let i = 1 + pick_i % n;
    let j = 1 + (pick_i + 1 + pick_j % (n - 1)) % n;
    let mut v = vec![0i64; n + 1];
    match family {
        0 => v[0] = 1,
        1 => v[i] = 1,
        2 => {
            v[i] = 1;
            v[j] = -1;
        }
        _ => {
            v[0] = 1;
            v[i] = -1;
            v[j] = -1;
        }
    }
    v
}

proptest! {
    /// Reflections in admissible vectors preserve the form and square to
    /// the identity.
    #[test]
    fn reflection_is_a_form_preserving_involution(
        n in 2usize..=5,
        family in 0usize..4,
        pick_i in 0usize..8,
        pick_j in 0usize..8,
        w1 in small_vec(6),
        w2 in small_vec(6),
    ) {
        let l = LorentzianLattice::m_n(n);
        let rank = l.rank();
        let v = l.element(&reflection_vector(n, family, pick_i, pick_j), CANONICAL).unwrap();
        let nv = l.norm(&v).unwrap();
        prop_assert!(nv == int(1) || nv == int(-1) || nv == int(-2));
        let a = l.element(&w1[..rank], CANONICAL).unwrap();
        let b = l.element(&w2[..rank], CANONICAL).unwrap();
        let ra = l.reflect(&v, &a).unwrap();
        let rb = l.reflect(&v, &b).unwrap();
        prop_assert_eq!(l.evaluate_form(&ra, &rb).unwrap(), l.evaluate_form(&a, &b).unwrap());
        prop_assert_eq!(l.reflect(&v, &ra).unwrap().coords, a.coords);
    }

    /// Saturated spans are idempotent: re-spanning the computed basis gives
    /// the same sublattice, and membership holds for every basis row.
    #[test]
    fn span_is_idempotent_and_contains_its_basis(
        count in 1usize..=3,
        coords in prop::collection::vec(small_vec(4), 3),
    ) {
        let l = LorentzianLattice::m_n(3);
        let gens: Vec<LatticeElement> = coords[..count]
            .iter()
            .map(|c| LatticeElement::from_i64(c, CANONICAL))
            .collect();
        let s = Sublattice::span(&l, &gens).unwrap();
        let rows: Vec<LatticeElement> = (0..s.rank())
            .map(|i| LatticeElement::new(s.basis_row(i), CANONICAL))
            .collect();
        let again = Sublattice::span(&l, &rows).unwrap();
        prop_assert_eq!(s.basis_rows(), again.basis_rows());
        for r in &rows {
            prop_assert!(s.contains(&l.to_canonical(r).unwrap()));
        }
    }

    /// Inertia is a congruence invariant: conjugating a symmetric matrix by
    /// a unimodular matrix leaves (p, q, z) unchanged, and p + q + z equals
    /// the dimension.
    #[test]
    fn inertia_is_a_congruence_invariant(
        diag in prop::collection::vec(-3i64..=3, 3),
        shear in prop::collection::vec(-2i64..=2, 3),
    ) {
        let g = IntMat::diag(&diag);
        // Unimodular upper-triangular transform.
        let mut u = IntMat::identity(3);
        u[(0, 1)] = int(shear[0]);
        u[(0, 2)] = int(shear[1]);
        u[(1, 2)] = int(shear[2]);
        let h = u.transpose().mul(&g).mul(&u);
        let (p, q, z) = inertia(&g);
        prop_assert_eq!(inertia(&h), (p, q, z));
        prop_assert_eq!(p + q + z, 3);
    }

    /// The involution decomposition satisfies t + c + 2r = rank, and the
    /// eigenlattice signatures add up to the ambient signature.
    #[test]
    fn decomposition_ranks_are_consistent(
        n in 1usize..=4,
        flip_h in any::<bool>(),
        swap in any::<bool>(),
    ) {
        let l = LorentzianLattice::m_n(n);
        let rank = l.rank();
        let mut m = IntMat::identity(rank);
        m[(0, 0)] = int(if flip_h { -1 } else { 1 });
        if swap && rank >= 3 {
            m[(1, 1)] = int(0);
            m[(2, 2)] = int(0);
            m[(1, 2)] = int(1);
            m[(2, 1)] = int(1);
        } else {
            m[(rank - 1, rank - 1)] = int(-1);
        }
        let iso = Isometry::new(&l, m).unwrap();
        prop_assume!(iso.is_involution());
        let d = decompose_involution(&l, &iso).unwrap();
        prop_assert_eq!(d.t + d.c + 2 * d.r, rank);
        let plus = delpezzo::lattice::eigenlattice(&l, iso.matrix(), 1);
        let minus = delpezzo::lattice::eigenlattice(&l, iso.matrix(), -1);
        let (pp, pq, _) = restricted_signature(&l, &plus);
        let (mp, mq, _) = restricted_signature(&l, &minus);
        prop_assert_eq!((pp + mp) as i64 - (pq + mq) as i64, 1 - n as i64);
    }

}

proptest! {
    // The indefinite binary solver iterates Pell orbits; keep the case count
    // modest so the suite stays fast on large random discriminants.
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Solver soundness: a Solvable verdict always carries a verified
    /// witness (inside the sublattice, nonzero when required, exact norm).
    #[test]
    fn solvable_verdicts_carry_valid_witnesses(
        v in small_vec(3),
        w in small_vec(3),
        k in -8i64..=8,
        nonzero in any::<bool>(),
    ) {
        let l = LorentzianLattice::m_n(2);
        let gens = vec![
            LatticeElement::from_i64(&v, CANONICAL),
            LatticeElement::from_i64(&w, CANONICAL),
        ];
        let s = Sublattice::span(&l, &gens).unwrap();
        prop_assume!(s.rank() <= 3);
        let eq = NormEquation::new(s.clone(), k, nonzero);
        if let SolvabilityVerdict::Solvable { witness } = solve_norm_equation(&l, &eq).unwrap() {
            let coords = l.to_canonical(&witness).unwrap();
            prop_assert!(s.contains(&coords));
            if nonzero {
                prop_assert!(coords.iter().any(|c| !num_traits::Zero::is_zero(c)));
            }
            prop_assert_eq!(l.norm(&witness).unwrap(), int(k));
        }
    }
}
