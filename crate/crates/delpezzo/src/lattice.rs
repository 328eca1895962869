//! The Lorentzian lattices `(H_2(M_n; Z), Q)` with their distinguished bases,
//! reflections, saturated sublattices, eigenlattices and restricted
//! signatures.
//!
//! The canonical basis of `M_n` is `(H, E_1, ..., E_n)` with Gram matrix
//! `diag(1, -1, ..., -1)`. For `M_2` a second basis `(S_1, S_2, Σ)` is
//! registered with `S_1 = H - E_1`, `S_2 = H - E_2`, `Σ = H - E_1 - E_2`;
//! this is the unique standard choice consistent with the printed matrices
//! of the named isometries, and the convention is echoed in every report.

use crate::intmat::{inertia, int, Int, IntMat};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub const CANONICAL: &str = "canonical";
/// Basis id for the `(S_1, S_2, Σ)` basis of `M_2`.
pub const S_BASIS: &str = "S";

/// Human-readable statement of the S-basis convention, included in reports.
pub const S_BASIS_CONVENTION: &str =
    "S-basis convention: S1 = H - E1, S2 = H - E2, Sigma = H - E1 - E2";

/// A vector in a registered basis of a [`LorentzianLattice`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeElement {
    pub coords: Vec<Int>,
    pub basis_id: String,
}

impl LatticeElement {
    pub fn new(coords: Vec<Int>, basis_id: &str) -> Self {
        LatticeElement {
            coords,
            basis_id: basis_id.to_string(),
        }
    }

    pub fn from_i64(coords: &[i64], basis_id: &str) -> Self {
        LatticeElement::new(coords.iter().map(|&v| int(v)).collect(), basis_id)
    }
}

/// A unimodular lattice of signature `(1, n)` (or the hyperbolic plane for
/// `M_*`), with a canonical basis and optional extra registered bases.
#[derive(Debug, Clone)]
pub struct LorentzianLattice {
    name: String,
    rank: usize,
    gram: IntMat,
    /// Printable names of the canonical basis vectors, e.g. H, E1, E2.
    basis_names: Vec<String>,
    /// basis_id -> matrix whose columns are the basis vectors in canonical
    /// coordinates.
    bases: BTreeMap<String, IntMat>,
}

impl LorentzianLattice {
    /// `M_n = CP^2 # n(-CP^2)`: canonical basis `(H, E_1..E_n)`,
    /// Gram `diag(1, -1, ..., -1)`. For `n = 2` the S-basis is registered
    /// automatically.
    pub fn m_n(n: usize) -> Self {
        assert!(n <= 9, "lattices of rank > 10 are out of scope");
        let rank = n + 1;
        let gram = IntMat::from_fn(rank, rank, |r, c| {
            if r != c {
                Int::zero()
            } else if r == 0 {
                Int::one()
            } else {
                -Int::one()
            }
        });
        let mut basis_names = vec!["H".to_string()];
        for i in 1..=n {
            basis_names.push(format!("E{i}"));
        }
        let mut bases = BTreeMap::new();
        bases.insert(CANONICAL.to_string(), IntMat::identity(rank));
        let mut lat = LorentzianLattice {
            name: format!("M{n}"),
            rank,
            gram,
            basis_names,
            bases,
        };
        if n == 2 {
            // Columns: S1 = H - E1, S2 = H - E2, Sigma = H - E1 - E2.
            let s = IntMat::from_i64(&[&[1, 1, 1], &[-1, 0, -1], &[0, -1, -1]]);
            lat.register_basis(S_BASIS, s).expect("S basis is unimodular");
        }
        lat
    }

    /// `M_* = S^2 x S^2`: hyperbolic plane with isotropic generators
    /// `S_1, S_2`.
    pub fn m_star() -> Self {
        let gram = IntMat::from_i64(&[&[0, 1], &[1, 0]]);
        let mut bases = BTreeMap::new();
        bases.insert(CANONICAL.to_string(), IntMat::identity(2));
        LorentzianLattice {
            name: "M*".to_string(),
            rank: 2,
            gram,
            basis_names: vec!["S1".to_string(), "S2".to_string()],
            bases,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &IntMat {
        &self.gram
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    /// Register a basis given by the matrix whose columns are the basis
    /// vectors in canonical coordinates. The matrix must be unimodular.
    pub fn register_basis(&mut self, id: &str, columns: IntMat) -> Result<()> {
        if columns.nrows() != self.rank || columns.ncols() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: columns.nrows(),
            });
        }
        let d = columns.det();
        if !d.clone().abs().is_one() {
            return Err(Error::NotUnimodular(d.to_string()));
        }
        self.bases.insert(id.to_string(), columns);
        Ok(())
    }

    pub fn basis_matrix(&self, id: &str) -> Result<&IntMat> {
        self.bases.get(id).ok_or_else(|| Error::UnknownBasis(id.to_string()))
    }

    /// The i-th canonical basis vector (H = 0, E_i = i for M_n).
    pub fn canonical_vector(&self, i: usize) -> LatticeElement {
        let mut coords = vec![Int::zero(); self.rank];
        coords[i] = Int::one();
        LatticeElement::new(coords, CANONICAL)
    }

    pub fn element(&self, coords: &[i64], basis_id: &str) -> Result<LatticeElement> {
        if coords.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: coords.len(),
            });
        }
        self.basis_matrix(basis_id)?;
        Ok(LatticeElement::from_i64(coords, basis_id))
    }

    /// Canonical coordinates of an element.
    pub fn to_canonical(&self, v: &LatticeElement) -> Result<Vec<Int>> {
        if v.coords.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: v.coords.len(),
            });
        }
        let c = self.basis_matrix(&v.basis_id)?;
        Ok(c.mul_vec(&v.coords))
    }

    /// Convert an element into another registered basis (always integral,
    /// since change-of-basis matrices are unimodular).
    pub fn convert(&self, v: &LatticeElement, to_basis: &str) -> Result<LatticeElement> {
        let canonical = self.to_canonical(v)?;
        let c = self.basis_matrix(to_basis)?;
        let coords = c.inverse_unimodular().mul_vec(&canonical);
        Ok(LatticeElement::new(coords, to_basis))
    }

    /// The symmetric bilinear form `Q(v, w)`; basis-independent.
    pub fn evaluate_form(&self, v: &LatticeElement, w: &LatticeElement) -> Result<Int> {
        let vc = self.to_canonical(v)?;
        let wc = self.to_canonical(w)?;
        let gw = self.gram.mul_vec(&wc);
        Ok(vc.iter().zip(gw.iter()).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self, v: &LatticeElement) -> Result<Int> {
        self.evaluate_form(v, v)
    }

    /// Reflection of `w` about `v`: `w - (2 Q(v,w)/Q(v,v)) v`. Only
    /// `Q(v,v) ∈ {±1, ±2}` is supported; the result is then always integral.
    pub fn reflect(&self, v: &LatticeElement, w: &LatticeElement) -> Result<LatticeElement> {
        let nv = self.norm(v)?;
        let abs = nv.clone().abs();
        if !(abs == int(1) || abs == int(2)) {
            return Err(Error::BadReflectionNorm(nv.to_string()));
        }
        let q = self.evaluate_form(v, w)?;
        let factor = int(2) * &q / &nv; // exact: |nv| ∈ {1,2} and 2q divisible
        let vc = self.to_canonical(v)?;
        let wc = self.to_canonical(w)?;
        let coords: Vec<Int> = wc
            .iter()
            .zip(vc.iter())
            .map(|(w_i, v_i)| w_i - &factor * v_i)
            .collect();
        let canonical = LatticeElement::new(coords, CANONICAL);
        self.convert(&canonical, &w.basis_id)
    }

    /// Matrix of `Ref_v` acting on column coordinate vectors in the
    /// requested basis.
    pub fn reflection_matrix(&self, v: &LatticeElement, basis_id: &str) -> Result<IntMat> {
        let nv = self.norm(v)?;
        let abs = nv.clone().abs();
        if !(abs == int(1) || abs == int(2)) {
            return Err(Error::BadReflectionNorm(nv.to_string()));
        }
        let vc = self.to_canonical(v)?;
        // R = I - (2/Q(v,v)) v (Gv)^T acting on canonical coordinates.
        let gv = self.gram.mul_vec(&vc);
        let mut r = IntMat::identity(self.rank);
        for i in 0..self.rank {
            for j in 0..self.rank {
                let t = int(2) * &vc[i] * &gv[j] / &nv;
                r[(i, j)] -= t;
            }
        }
        let c = self.basis_matrix(basis_id)?;
        Ok(c.inverse_unimodular().mul(&r).mul(c))
    }

    /// Pretty-print canonical coordinates as a combination of the named
    /// basis vectors, e.g. `2H-E1-E2`.
    pub fn format_canonical(&self, coords: &[Int]) -> String {
        let mut out = String::new();
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.basis_names[i];
            let a = c.clone().abs();
            if c.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if !a.is_one() {
                out.push_str(&a.to_string());
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// A saturated subgroup of a [`LorentzianLattice`], stored as the canonical
/// HNF basis of its saturation (rows = canonical coordinates). Two
/// sublattices are equal iff they are the same subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient_name: String,
    ambient_rank: usize,
    /// HNF rows; saturated.
    basis: IntMat,
}

impl Sublattice {
    /// Saturated span of the given elements.
    pub fn span(lattice: &LorentzianLattice, elements: &[LatticeElement]) -> Result<Sublattice> {
        let rows: Vec<Vec<Int>> = elements
            .iter()
            .map(|e| lattice.to_canonical(e))
            .collect::<Result<_>>()?;
        let raw = if rows.is_empty() {
            IntMat::zeros(0, lattice.rank())
        } else {
            IntMat::from_rows(rows)
        };
        Ok(Sublattice::from_rows_raw(lattice, raw))
    }

    /// Exact integer span of independent generators, keeping them as the
    /// working basis (no saturation, no Hermite canonicalization). Use this
    /// when the coordinates of the restricted Gram matter, e.g. to state a
    /// norm equation in the variables of a particular spanning set.
    pub fn with_basis(lattice: &LorentzianLattice, elements: &[LatticeElement]) -> Result<Sublattice> {
        let rows: Vec<Vec<Int>> = elements
            .iter()
            .map(|e| lattice.to_canonical(e))
            .collect::<Result<_>>()?;
        let raw = if rows.is_empty() {
            IntMat::zeros(0, lattice.rank())
        } else {
            IntMat::from_rows(rows)
        };
        if raw.rank() != raw.nrows() {
            return Err(Error::InvalidInput(
                "sublattice generators must be linearly independent".to_string(),
            ));
        }
        Ok(Sublattice {
            ambient_name: lattice.name().to_string(),
            ambient_rank: lattice.rank(),
            basis: raw,
        })
    }

    /// Saturated span of rows given directly in canonical coordinates.
    pub fn from_rows_raw(lattice: &LorentzianLattice, rows: IntMat) -> Sublattice {
        assert_eq!(rows.ncols(), lattice.rank());
        // Saturation via the double kernel (annihilator of the annihilator).
        let saturated = rows.kernel().kernel();
        Sublattice {
            ambient_name: lattice.name().to_string(),
            ambient_rank: lattice.rank(),
            basis: saturated.row_hnf().drop_zero_rows(),
        }
    }

    pub fn zero(lattice: &LorentzianLattice) -> Sublattice {
        Sublattice {
            ambient_name: lattice.name().to_string(),
            ambient_rank: lattice.rank(),
            basis: IntMat::zeros(0, lattice.rank()),
        }
    }

    pub fn full(lattice: &LorentzianLattice) -> Sublattice {
        Sublattice {
            ambient_name: lattice.name().to_string(),
            ambient_rank: lattice.rank(),
            basis: IntMat::identity(lattice.rank()),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn ambient_name(&self) -> &str {
        &self.ambient_name
    }

    /// Basis rows in canonical coordinates.
    pub fn basis_rows(&self) -> &IntMat {
        &self.basis
    }

    pub fn basis_row(&self, i: usize) -> Vec<Int> {
        self.basis.row(i)
    }

    /// Express a canonical-coordinate vector in this sublattice's basis, if
    /// it lies in the (exact) integer span. Works for any basis: solve
    /// against the Hermite form and pull the solution back through the
    /// transform.
    pub fn coefficients_of(&self, canonical: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(canonical.len(), self.ambient_rank);
        if self.rank() == 0 {
            return if canonical.iter().all(|x| x.is_zero()) {
                Some(vec![])
            } else {
                None
            };
        }
        let (h, u) = self.basis.row_hnf_with_transform();
        let mut v = canonical.to_vec();
        let mut c = vec![Int::zero(); self.rank()];
        for r in 0..self.rank() {
            let pc = (0..self.ambient_rank).find(|&col| !h[(r, col)].is_zero())?;
            if v[pc].is_zero() {
                continue;
            }
            let q = &v[pc] / &h[(r, pc)];
            if &q * &h[(r, pc)] != v[pc] {
                return None;
            }
            for col in 0..self.ambient_rank {
                let t = &q * &h[(r, col)];
                v[col] -= t;
            }
            c[r] = q;
        }
        if !v.iter().all(|x| x.is_zero()) {
            return None;
        }
        // v = cᵀH = cᵀU·basis, so the coefficients are cᵀU.
        let coeffs: Vec<Int> = (0..self.rank())
            .map(|j| (0..self.rank()).map(|i| &c[i] * &u[(i, j)]).sum())
            .collect();
        Some(coeffs)
    }

    pub fn contains(&self, canonical: &[Int]) -> bool {
        self.coefficients_of(canonical).is_some()
    }

    /// Saturated intersection: the kernel of the stacked annihilators of the
    /// two sublattices.
    pub fn intersect(&self, other: &Sublattice) -> Result<Sublattice> {
        if self.ambient_name != other.ambient_name || self.ambient_rank != other.ambient_rank {
            return Err(Error::AmbientMismatch);
        }
        let n1 = self.basis.kernel();
        let n2 = other.basis.kernel();
        let mut rows = Vec::new();
        for r in 0..n1.nrows() {
            rows.push(n1.row(r));
        }
        for r in 0..n2.nrows() {
            rows.push(n2.row(r));
        }
        let stacked = if rows.is_empty() {
            IntMat::zeros(0, self.ambient_rank)
        } else {
            IntMat::from_rows(rows)
        };
        let inter = stacked.kernel();
        Ok(Sublattice {
            ambient_name: self.ambient_name.clone(),
            ambient_rank: self.ambient_rank,
            basis: inter.row_hnf().drop_zero_rows(),
        })
    }

    /// Gram matrix of the ambient form restricted to this sublattice's
    /// basis.
    pub fn restricted_gram(&self, lattice: &LorentzianLattice) -> IntMat {
        assert_eq!(lattice.name(), self.ambient_name);
        self.basis.mul(lattice.gram()).mul(&self.basis.transpose())
    }

    /// Pretty description, e.g. `span{2H-E1-E2}` or `0`.
    pub fn describe(&self, lattice: &LorentzianLattice) -> String {
        if self.rank() == 0 {
            return "0".to_string();
        }
        let gens: Vec<String> = (0..self.rank())
            .map(|r| lattice.format_canonical(&self.basis.row(r)))
            .collect();
        format!("span{{{}}}", gens.join(", "))
    }
}

/// Saturated `sign`-eigenlattice of an isometry matrix given in canonical
/// coordinates.
pub fn eigenlattice(lattice: &LorentzianLattice, m: &IntMat, sign: i64) -> Sublattice {
    assert!(sign == 1 || sign == -1);
    let mut shifted = m.clone();
    for i in 0..shifted.nrows() {
        shifted[(i, i)] -= int(sign);
    }
    Sublattice {
        ambient_name: lattice.name().to_string(),
        ambient_rank: lattice.rank(),
        basis: shifted.kernel().row_hnf().drop_zero_rows(),
    }
}

/// Inertia `(p_plus, p_minus, p_zero)` of the ambient form restricted to a
/// sublattice, by exact rational congruence diagonalization.
pub fn restricted_signature(
    lattice: &LorentzianLattice,
    s: &Sublattice,
) -> (usize, usize, usize) {
    inertia(&s.restricted_gram(lattice))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> LorentzianLattice {
        LorentzianLattice::m_n(2)
    }

    #[test]
    fn form_values_on_named_vectors() {
        let l = m2();
        let h = l.element(&[1, 0, 0], CANONICAL).unwrap();
        let e1 = l.element(&[0, 1, 0], CANONICAL).unwrap();
        let e2 = l.element(&[0, 0, 1], CANONICAL).unwrap();
        assert_eq!(l.evaluate_form(&h, &h).unwrap(), int(1));
        assert_eq!(l.evaluate_form(&e1, &e2).unwrap(), int(0));
        let s1 = l.element(&[1, 0, 0], S_BASIS).unwrap();
        let s2 = l.element(&[0, 1, 0], S_BASIS).unwrap();
        let sigma = l.element(&[0, 0, 1], S_BASIS).unwrap();
        assert_eq!(l.evaluate_form(&s1, &s2).unwrap(), int(1));
        assert_eq!(l.norm(&s1).unwrap(), int(0));
        assert_eq!(l.norm(&s2).unwrap(), int(0));
        assert_eq!(l.norm(&sigma).unwrap(), int(-1));
        assert_eq!(l.evaluate_form(&s1, &sigma).unwrap(), int(0));
        assert_eq!(l.evaluate_form(&s2, &sigma).unwrap(), int(0));
    }

    #[test]
    fn reflect_examples() {
        let l = m2();
        let e1 = l.element(&[0, 1, 0], CANONICAL).unwrap();
        let e2 = l.element(&[0, 0, 1], CANONICAL).unwrap();
        let e1_minus_e2 = l.element(&[0, 1, -1], CANONICAL).unwrap();
        assert_eq!(l.reflect(&e1_minus_e2, &e1).unwrap(), e2);
        assert_eq!(
            l.reflect(&e2, &e2).unwrap(),
            l.element(&[0, 0, -1], CANONICAL).unwrap()
        );
        // Q(v,v) = -1, Q(v,H) = 1, so Ref_v(H) = H + 2v = 3H-2E1-2E2 (norm
        // preserved: Q = 9-4-4 = 1). On M_3 the analogous norm -2 root gives
        // H + v instead.
        let v = l.element(&[1, -1, -1], CANONICAL).unwrap();
        let h = l.element(&[1, 0, 0], CANONICAL).unwrap();
        assert_eq!(
            l.reflect(&v, &h).unwrap(),
            l.element(&[3, -2, -2], CANONICAL).unwrap()
        );
        let l3 = LorentzianLattice::m_n(3);
        let v3 = l3.element(&[1, -1, -1, -1], CANONICAL).unwrap();
        let h3 = l3.element(&[1, 0, 0, 0], CANONICAL).unwrap();
        assert_eq!(
            l3.reflect(&v3, &h3).unwrap(),
            l3.element(&[2, -1, -1, -1], CANONICAL).unwrap()
        );
        // Norm outside {±1, ±2} is rejected.
        let bad = l.element(&[2, 0, 0], CANONICAL).unwrap();
        assert!(matches!(
            l.reflect(&bad, &h),
            Err(Error::BadReflectionNorm(_))
        ));
    }

    #[test]
    fn reflection_matrices_match_printed_forms() {
        let l = m2();
        let e1 = l.element(&[0, 1, 0], CANONICAL).unwrap();
        let psi = l.reflection_matrix(&e1, CANONICAL).unwrap();
        assert_eq!(psi, IntMat::diag(&[1, -1, 1]));

        let e1_minus_e2 = l.element(&[0, 1, -1], CANONICAL).unwrap();
        let a = l.reflection_matrix(&e1_minus_e2, S_BASIS).unwrap();
        assert_eq!(
            a,
            IntMat::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])
        );

        let v = l.element(&[1, -1, -1], CANONICAL).unwrap();
        let b = l.reflection_matrix(&v, S_BASIS).unwrap();
        assert_eq!(b, IntMat::diag(&[1, 1, -1]));
    }

    #[test]
    fn eigenlattice_examples() {
        let l = m2();
        let e1_minus_e2 = l.element(&[0, 1, -1], CANONICAL).unwrap();
        let a_mat = l.reflection_matrix(&e1_minus_e2, CANONICAL).unwrap();
        let plus = eigenlattice(&l, &a_mat, 1);
        // span{S1+S2, Sigma} = span{H, E1+E2} as saturated lattices.
        let expected = Sublattice::span(
            &l,
            &[
                l.element(&[1, 1, 0], S_BASIS).unwrap(),
                l.element(&[0, 0, 1], S_BASIS).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(plus, expected);
        assert_eq!(restricted_signature(&l, &plus), (1, 1, 0));

        // -AB: +1 eigenlattice span{S1-S2, Sigma}, restricted gram diag(-2,-1).
        let v = l.element(&[1, -1, -1], CANONICAL).unwrap();
        let b_mat = l.reflection_matrix(&v, CANONICAL).unwrap();
        let minus_ab = a_mat.mul(&b_mat).neg();
        let plus2 = eigenlattice(&l, &minus_ab, 1);
        let expected2 = Sublattice::span(
            &l,
            &[
                l.element(&[1, -1, 0], S_BASIS).unwrap(),
                l.element(&[0, 0, 1], S_BASIS).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(plus2, expected2);
        assert_eq!(restricted_signature(&l, &plus2), (0, 2, 0));

        // Identity has zero (-1)-eigenlattice.
        assert_eq!(eigenlattice(&l, &IntMat::identity(3), -1).rank(), 0);
        // Full lattice signature (1,2,0).
        assert_eq!(restricted_signature(&l, &Sublattice::full(&l)), (1, 2, 0));
    }

    #[test]
    fn intersection_examples() {
        let l3 = LorentzianLattice::m_n(3);
        let a = Sublattice::span(
            &l3,
            &[
                l3.element(&[1, 0, 0, 0], CANONICAL).unwrap(),
                l3.element(&[0, 1, 1, 0], CANONICAL).unwrap(),
            ],
        )
        .unwrap();
        let b = Sublattice::span(
            &l3,
            &[
                l3.element(&[1, -1, -1, 1], CANONICAL).unwrap(),
                l3.element(&[1, -1, 0, 0], CANONICAL).unwrap(),
                l3.element(&[1, 0, -1, 0], CANONICAL).unwrap(),
            ],
        )
        .unwrap();
        let inter = a.intersect(&b).unwrap();
        let expected = Sublattice::span(
            &l3,
            &[l3.element(&[2, -1, -1, 0], CANONICAL).unwrap()],
        )
        .unwrap();
        assert_eq!(inter, expected);
        assert_eq!(inter.restricted_gram(&l3), IntMat::from_i64(&[&[2]]));

        let c = Sublattice::span(
            &l3,
            &[l3.element(&[1, -1, -1, -1], CANONICAL).unwrap()],
        )
        .unwrap();
        assert_eq!(a.intersect(&c).unwrap().rank(), 0);
        assert_eq!(a.intersect(&a).unwrap(), a);
    }

    #[test]
    fn saturation_and_membership() {
        let l = m2();
        // span of 2H-2E1 saturates to H-E1.
        let s = Sublattice::span(&l, &[l.element(&[2, -2, 0], CANONICAL).unwrap()]).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.contains(&[int(1), int(-1), int(0)]));
        assert!(!s.contains(&[int(1), int(0), int(0)]));
        assert_eq!(
            s.coefficients_of(&[int(3), int(-3), int(0)]),
            Some(vec![int(3)])
        );
    }

    #[test]
    fn basis_round_trip_and_m_star() {
        let l = m2();
        let v = l.element(&[2, -1, 3], CANONICAL).unwrap();
        let in_s = l.convert(&v, S_BASIS).unwrap();
        let back = l.convert(&in_s, CANONICAL).unwrap();
        assert_eq!(back, v);

        let star = LorentzianLattice::m_star();
        let s1 = star.element(&[1, 0], CANONICAL).unwrap();
        let s2 = star.element(&[0, 1], CANONICAL).unwrap();
        assert_eq!(star.norm(&s1).unwrap(), int(0));
        assert_eq!(star.evaluate_form(&s1, &s2).unwrap(), int(1));
        assert_eq!(restricted_signature(&star, &Sublattice::full(&star)), (1, 1, 0));
    }

    #[test]
    fn format_canonical_strings() {
        let l = m2();
        assert_eq!(l.format_canonical(&[int(2), int(-1), int(-1)]), "2H-E1-E2");
        assert_eq!(l.format_canonical(&[int(0), int(0), int(0)]), "0");
        assert_eq!(l.format_canonical(&[int(-1), int(0), int(2)]), "-H+2E2");
    }
}
