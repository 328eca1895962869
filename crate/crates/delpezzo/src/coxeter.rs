//! The simple-root systems presenting the isometry groups of the rank-3 and
//! rank-4 Lorentzian lattices, their pair-order (Coxeter label) tables, the
//! exact Gram consistency check, parabolic subgroups with certified
//! finiteness verdicts, and the maximal finite candidates `⟨G_v, -I⟩`.

use crate::intmat::{Int, Rat};
use crate::isometry::{
    close_group, element_order, ElementOrder, InfinitenessCertificate, Isometry, MatrixGroup,
    CLOSURE_CAP,
};
use crate::lattice::{LatticeElement, LorentzianLattice, CANONICAL};
use crate::Result;
use num_traits::Signed;

/// The order `m(s,t)` of a product of two simple reflections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOrder {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for PairOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairOrder::Finite(k) => write!(f, "{k}"),
            PairOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Finiteness verdict for a parabolic subgroup.
#[derive(Debug, Clone)]
pub enum Finiteness {
    Finite {
        order: usize,
    },
    /// Certified by an explicit infinite-order element: the word (indices
    /// into the generator list) and the structural certificate of its
    /// infinitude.
    Infinite {
        witness_word: Vec<usize>,
        certificate: InfinitenessCertificate,
    },
}

#[derive(Debug, Clone)]
pub struct ParabolicVerdict {
    /// Generated by the simple reflections other than the omitted one;
    /// closed (elements present) iff finite.
    pub group: MatrixGroup,
    pub finiteness: Finiteness,
    pub omitted_root: String,
}

/// The simple-root system for `n = 2` or `n = 3`.
#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    pub n: usize,
    lattice: LorentzianLattice,
    simple_roots: Vec<LatticeElement>,
    root_names: Vec<String>,
}

impl CoxeterSystem {
    pub fn new(n: usize) -> CoxeterSystem {
        assert!(n == 2 || n == 3, "only the rank-3 and rank-4 systems are in scope");
        let lattice = LorentzianLattice::m_n(n);
        let (roots, names): (Vec<Vec<i64>>, Vec<&str>) = if n == 2 {
            (
                vec![vec![1, -1, -1], vec![0, 1, -1], vec![0, 0, 1]],
                vec!["H-E1-E2", "E1-E2", "E2"],
            )
        } else {
            (
                vec![
                    vec![1, -1, -1, -1],
                    vec![0, 1, -1, 0],
                    vec![0, 0, 1, -1],
                    vec![0, 0, 0, 1],
                ],
                vec!["H-E1-E2-E3", "E1-E2", "E2-E3", "E3"],
            )
        };
        CoxeterSystem {
            n,
            lattice,
            simple_roots: roots
                .iter()
                .map(|r| LatticeElement::from_i64(r, CANONICAL))
                .collect(),
            root_names: names.into_iter().map(String::from).collect(),
        }
    }

    pub fn lattice(&self) -> &LorentzianLattice {
        &self.lattice
    }

    pub fn simple_roots(&self) -> &[LatticeElement] {
        &self.simple_roots
    }

    pub fn root_names(&self) -> &[String] {
        &self.root_names
    }

    /// Index of the root whose omission is excluded from the maximal-finite
    /// list (the `E_1-E_2` root).
    pub fn e1_minus_e2_index(&self) -> usize {
        1
    }

    pub fn simple_reflections(&self) -> Vec<Isometry> {
        self.simple_roots
            .iter()
            .map(|r| Isometry::reflection(&self.lattice, r).expect("root norms are -1 or -2"))
            .collect()
    }

    /// `m(s,t)` computed from the matrices; diagonal entries are 1.
    pub fn pair_order_table(&self) -> Vec<Vec<PairOrder>> {
        let refs = self.simple_reflections();
        let k = refs.len();
        let mut table = vec![vec![PairOrder::Finite(1); k]; k];
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let prod = refs[i].compose(&refs[j]);
                table[i][j] = match element_order(prod.matrix()) {
                    ElementOrder::Finite(m) => PairOrder::Finite(m),
                    ElementOrder::Infinite(_) => PairOrder::Infinite,
                };
            }
        }
        table
    }

    /// Exact-rational check that the normalized Gram data matches the
    /// Coxeter labels: with `R = -Q`, for each pair of roots
    /// `4 R(v,w)^2 = 4 cos^2(pi/m) R(v,v) R(w,w)` and `R(v,w) ≤ 0`, where
    /// `cos^2(pi/m)` is 0, 1/4, 1/2 for m = 2, 3, 4 and 1 for the infinite
    /// label (normalized-value-1 convention).
    pub fn gram_consistency_check(&self) -> GramReport {
        self.gram_consistency_with(&self.pair_order_table())
    }

    /// Same check against an externally supplied label table (used as a
    /// negative control with corrupted labels).
    pub fn gram_consistency_with(&self, labels: &[Vec<PairOrder>]) -> GramReport {
        let mut failures = Vec::new();
        let k = self.simple_roots.len();
        for i in 0..k {
            for j in (i + 1)..k {
                let q_vw = self
                    .lattice
                    .evaluate_form(&self.simple_roots[i], &self.simple_roots[j])
                    .expect("roots are valid");
                let q_vv = self.lattice.norm(&self.simple_roots[i]).expect("valid");
                let q_ww = self.lattice.norm(&self.simple_roots[j]).expect("valid");
                // R = -Q.
                let r_vw = -q_vw.clone();
                let r_vv = -q_vv;
                let r_ww = -q_ww;
                let cos2: Option<Rat> = match labels[i][j] {
                    PairOrder::Finite(2) => Some(Rat::new(Int::from(0), Int::from(1))),
                    PairOrder::Finite(3) => Some(Rat::new(Int::from(1), Int::from(4))),
                    PairOrder::Finite(4) => Some(Rat::new(Int::from(1), Int::from(2))),
                    PairOrder::Infinite => Some(Rat::new(Int::from(1), Int::from(1))),
                    _ => None,
                };
                let pair = format!("({}, {})", self.root_names[i], self.root_names[j]);
                let Some(cos2) = cos2 else {
                    failures.push(format!("{pair}: unsupported label {}", labels[i][j]));
                    continue;
                };
                let lhs = Rat::from(Int::from(4) * &r_vw * &r_vw);
                let rhs = Rat::from(Int::from(4) * r_vv * r_ww) * cos2;
                if lhs != rhs {
                    failures.push(format!(
                        "{pair}: 4R(v,w)^2 = {lhs} but 4cos^2(pi/m)R(v,v)R(w,w) = {rhs}"
                    ));
                }
                if r_vw.is_positive() {
                    failures.push(format!("{pair}: R(v,w) = {r_vw} > 0"));
                }
            }
        }
        GramReport {
            pass: failures.is_empty(),
            failures,
        }
    }

    /// The parabolic subgroup generated by all simple reflections except the
    /// omitted one, with a certified finiteness verdict.
    pub fn parabolic_subgroup(&self, omit: usize) -> Result<ParabolicVerdict> {
        assert!(omit < self.simple_roots.len());
        let refs = self.simple_reflections();
        let gens: Vec<Isometry> = refs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != omit)
            .map(|(_, r)| r.clone())
            .collect();
        let group = MatrixGroup::from_generators(gens.clone());
        match close_group(&self.lattice, &group, CLOSURE_CAP) {
            Ok(closed) => {
                let order = closed.order()?;
                Ok(ParabolicVerdict {
                    group: closed,
                    finiteness: Finiteness::Finite { order },
                    omitted_root: self.root_names[omit].clone(),
                })
            }
            Err(crate::Error::ClosureDiverged(_)) => {
                let (word, certificate) = find_infinite_order_word(&gens)
                    .expect("a diverging reflection group contains an infinite-order element");
                Ok(ParabolicVerdict {
                    group,
                    finiteness: Finiteness::Infinite {
                        witness_word: word,
                        certificate,
                    },
                    omitted_root: self.root_names[omit].clone(),
                })
            }
            Err(e) => Err(e),
        }
    }

    /// For each simple root other than `E_1-E_2`, the candidate maximal
    /// finite subgroup `⟨G_v, -I⟩` (or `G_v` without the flag), closed.
    pub fn maximal_finite_candidates(
        &self,
        include_minus_identity: bool,
    ) -> Result<Vec<MatrixGroup>> {
        let refs = self.simple_reflections();
        let mut out = Vec::new();
        for omit in 0..self.simple_roots.len() {
            if omit == self.e1_minus_e2_index() {
                continue;
            }
            let mut gens: Vec<Isometry> = refs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != omit)
                .map(|(_, r)| r.clone())
                .collect();
            if include_minus_identity {
                gens.push(Isometry::minus_identity(&self.lattice));
            }
            let closed = close_group(
                &self.lattice,
                &MatrixGroup::from_generators(gens),
                CLOSURE_CAP,
            )?;
            out.push(closed);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct GramReport {
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Breadth-first search over short words in the generators for an element of
/// certified infinite order.  Words whose characteristic polynomial has a
/// non-cyclotomic factor (hyperbolic-type elements) are preferred over
/// quasi-unipotent (parabolic-type) ones: the former certificate is
/// self-contained, needing no matrix power computation to audit.
fn find_infinite_order_word(
    gens: &[Isometry],
) -> Option<(Vec<usize>, InfinitenessCertificate)> {
    use crate::intmat::IntMat;
    let rank = gens[0].rank();
    let mut layer: Vec<(Vec<usize>, IntMat)> = vec![(vec![], IntMat::identity(rank))];
    let mut fallback: Option<(Vec<usize>, InfinitenessCertificate)> = None;
    for _ in 0..8 {
        let mut next = Vec::new();
        for (word, m) in layer.iter() {
            for (gi, g) in gens.iter().enumerate() {
                let mut w = word.clone();
                w.push(gi);
                let prod = m.mul(g.matrix());
                if let ElementOrder::Infinite(cert) = element_order(&prod) {
                    if matches!(cert, InfinitenessCertificate::NonCyclotomicFactor { .. }) {
                        return Some((w, cert));
                    }
                    if fallback.is_none() {
                        fallback = Some((w.clone(), cert));
                    }
                }
                next.push((w, prod));
            }
        }
        layer = next;
        // Keep the frontier small: deduplicate by matrix.
        layer.sort_by(|a, b| a.1.cmp(&b.1));
        layer.dedup_by(|a, b| a.1 == b.1);
    }
    fallback
}
