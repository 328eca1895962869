//! Integral isometries of the Lorentzian lattices: construction with exact
//! Gram validation, element orders with structural infinitude certificates,
//! breadth-first finite closure, subgroup enumeration, and isomorphism
//! fingerprints for the small groups the classification needs.

use crate::intmat::{cyclotomic, euler_phi, Int, IntMat};
use crate::lattice::{LorentzianLattice, CANONICAL};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Maximal finite element order in the integral orthogonal groups of rank
/// ≤ 4; used as a sanity bound, not as a decision procedure (orders are
/// decided exactly via the cyclotomic factorization of the characteristic
/// polynomial).
pub const ORDER_CAP: u64 = 12;

/// Cap for breadth-first group closure.
pub const CLOSURE_CAP: usize = 10_000;

/// An integral isometry, stored as its matrix acting on column coordinate
/// vectors in the canonical basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    mat: IntMat,
}

impl Isometry {
    /// Validate `m^T G m = G` and `det = ±1` and wrap.
    pub fn new(lattice: &LorentzianLattice, mat: IntMat) -> Result<Isometry> {
        if mat.nrows() != lattice.rank() || mat.ncols() != lattice.rank() {
            return Err(Error::RankMismatch {
                expected: lattice.rank(),
                got: mat.nrows(),
            });
        }
        let g = lattice.gram();
        if &mat.transpose().mul(g).mul(&mat) != g {
            return Err(Error::NotAnIsometry);
        }
        if !mat.det().abs().is_one() {
            return Err(Error::NotAnIsometry);
        }
        Ok(Isometry { mat })
    }

    /// Construct from a matrix written in a registered basis.
    pub fn from_basis(
        lattice: &LorentzianLattice,
        basis_id: &str,
        mat: IntMat,
    ) -> Result<Isometry> {
        let c = lattice.basis_matrix(basis_id)?;
        let canonical = c.mul(&mat).mul(&c.inverse_unimodular());
        Isometry::new(lattice, canonical)
    }

    pub fn identity(lattice: &LorentzianLattice) -> Isometry {
        Isometry {
            mat: IntMat::identity(lattice.rank()),
        }
    }

    pub fn minus_identity(lattice: &LorentzianLattice) -> Isometry {
        Isometry {
            mat: IntMat::identity(lattice.rank()).neg(),
        }
    }

    /// The reflection about a vector of norm ±1 or ±2.
    pub fn reflection(
        lattice: &LorentzianLattice,
        v: &crate::lattice::LatticeElement,
    ) -> Result<Isometry> {
        let mat = lattice.reflection_matrix(v, CANONICAL)?;
        Ok(Isometry { mat })
    }

    /// Matrix in the canonical basis.
    pub fn matrix(&self) -> &IntMat {
        &self.mat
    }

    /// Matrix rewritten in another registered basis.
    pub fn in_basis(&self, lattice: &LorentzianLattice, basis_id: &str) -> Result<IntMat> {
        let c = lattice.basis_matrix(basis_id)?;
        Ok(c.inverse_unimodular().mul(&self.mat).mul(c))
    }

    pub fn rank(&self) -> usize {
        self.mat.nrows()
    }

    /// `self` then... composition as matrices: `(self ∘ other)(v) =
    /// self(other(v))`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            mat: self.mat.mul(&other.mat),
        }
    }

    /// Inverse via `G^{-1} m^T G` (exact; `G` is unimodular).
    pub fn inverse(&self, lattice: &LorentzianLattice) -> Isometry {
        let g = lattice.gram();
        Isometry {
            mat: g.inverse_unimodular().mul(&self.mat.transpose()).mul(g),
        }
    }

    pub fn neg(&self) -> Isometry {
        Isometry {
            mat: self.mat.neg(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.mat == IntMat::identity(self.mat.nrows())
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity() && self.mat.mul(&self.mat) == IntMat::identity(self.mat.nrows())
    }

    pub fn commutes_with(&self, other: &Isometry) -> bool {
        self.mat.mul(&other.mat) == other.mat.mul(&self.mat)
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.mat.mul_vec(v)
    }

    /// Exact element order, with a structural certificate when infinite.
    pub fn order(&self) -> ElementOrder {
        element_order(&self.mat)
    }
}

/// Infinitude certificates for [`element_order`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfinitenessCertificate {
    /// The characteristic polynomial has an irreducible factor that is not
    /// cyclotomic, so no power of the matrix is the identity.
    NonCyclotomicFactor { remaining_factor: Vec<Int> },
    /// The characteristic polynomial is a product of cyclotomics Φ_d, so the
    /// only possible finite order is N = lcm of the d's — but m^N ≠ I, which
    /// proves the matrix is not semisimple and has infinite order.
    QuasiUnipotent { candidate_order: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(u64),
    Infinite(InfinitenessCertificate),
}

impl ElementOrder {
    pub fn is_finite(&self) -> bool {
        matches!(self, ElementOrder::Finite(_))
    }
}

/// Exact order of an integer matrix, decided via the cyclotomic
/// factorization of its characteristic polynomial. This is a proof either
/// way: a non-cyclotomic factor or a failed `m^N = I` check certifies
/// infinitude; otherwise the order divides N and is found among its
/// divisors.
pub fn element_order(m: &IntMat) -> ElementOrder {
    assert!(m.is_square());
    let n = m.nrows();
    if n == 0 {
        return ElementOrder::Finite(1);
    }
    let mut p = m.char_poly();
    // Peel off cyclotomic factors Φ_d with φ(d) ≤ deg; φ(d) ≥ sqrt(d/2)
    // bounds the candidates by 2·deg² + 2.
    let deg = n as u64;
    let mut present: Vec<u64> = Vec::new();
    for d in 1..=(2 * deg * deg + 2) {
        if euler_phi(d) > deg {
            continue;
        }
        let phi_d = cyclotomic(d);
        let mut took = false;
        while let Some(q) = crate::intmat::poly_div_exact(&p, &phi_d) {
            p = q;
            took = true;
            if crate::intmat::poly_deg(&p) == 0 {
                break;
            }
        }
        if took {
            present.push(d);
        }
        if crate::intmat::poly_deg(&p) == 0 {
            break;
        }
    }
    if crate::intmat::poly_deg(&p) > 0 {
        return ElementOrder::Infinite(InfinitenessCertificate::NonCyclotomicFactor {
            remaining_factor: p,
        });
    }
    let candidate: u64 = present.iter().fold(1u64, |acc, &d| acc.lcm(&d));
    if m.pow(candidate) != IntMat::identity(n) {
        return ElementOrder::Infinite(InfinitenessCertificate::QuasiUnipotent {
            candidate_order: candidate,
        });
    }
    // The order divides `candidate`; find the smallest divisor that works.
    let mut divisors: Vec<u64> = (1..=candidate).filter(|d| candidate % d == 0).collect();
    divisors.sort_unstable();
    for d in divisors {
        if m.pow(d) == IntMat::identity(n) {
            return ElementOrder::Finite(d);
        }
    }
    unreachable!("candidate order itself verifies")
}

/// A subgroup of the isometry group, optionally closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGroup {
    pub generators: Vec<Isometry>,
    /// Sorted, deduplicated full element list; present iff finite and
    /// closed.
    pub elements: Option<Vec<Isometry>>,
}

impl MatrixGroup {
    pub fn from_generators(generators: Vec<Isometry>) -> MatrixGroup {
        MatrixGroup {
            generators,
            elements: None,
        }
    }

    pub fn order(&self) -> Result<usize> {
        self.elements
            .as_ref()
            .map(|e| e.len())
            .ok_or(Error::GroupNotClosed)
    }

    pub fn elements(&self) -> Result<&[Isometry]> {
        self.elements.as_deref().ok_or(Error::GroupNotClosed)
    }

    pub fn contains(&self, m: &Isometry) -> Result<bool> {
        Ok(self.elements()?.binary_search(m).is_ok())
    }

    /// Element-set equality (both groups must be closed).
    pub fn same_elements(&self, other: &MatrixGroup) -> Result<bool> {
        Ok(self.elements()? == other.elements()?)
    }

    /// Is `other` a subgroup (as a set) of `self`?
    pub fn contains_group(&self, other: &MatrixGroup) -> Result<bool> {
        let mine = self.elements()?;
        Ok(other
            .elements()?
            .iter()
            .all(|m| mine.binary_search(m).is_ok()))
    }
}

/// Breadth-first closure under products and inverses. Returns
/// `Error::ClosureDiverged` when more than `cap` elements appear.
pub fn close_group(
    lattice: &LorentzianLattice,
    g: &MatrixGroup,
    cap: usize,
) -> Result<MatrixGroup> {
    let mut gens: Vec<Isometry> = g.generators.clone();
    for gen in g.generators.iter() {
        gens.push(gen.inverse(lattice));
    }
    let mut seen: BTreeSet<Isometry> = BTreeSet::new();
    let id = Isometry::identity(lattice);
    seen.insert(id.clone());
    let mut queue: VecDeque<Isometry> = VecDeque::new();
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for gen in gens.iter() {
            let y = x.compose(gen);
            if seen.contains(&y) {
                continue;
            }
            if seen.len() >= cap {
                return Err(Error::ClosureDiverged(cap));
            }
            seen.insert(y.clone());
            queue.push_back(y);
        }
    }
    Ok(MatrixGroup {
        generators: g.generators.clone(),
        elements: Some(seen.into_iter().collect()),
    })
}

/// Multiplication table of a closed group: `table[i][j]` = index of
/// `elements[i] ∘ elements[j]`.
fn mult_table(elements: &[Isometry]) -> Vec<Vec<usize>> {
    let n = elements.len();
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let p = elements[i].compose(&elements[j]);
            table[i][j] = elements
                .binary_search(&p)
                .expect("closed group: product stays inside");
        }
    }
    table
}

fn identity_index(elements: &[Isometry]) -> usize {
    elements
        .iter()
        .position(|e| e.is_identity())
        .expect("closed group contains identity")
}

fn closure_indices(table: &[Vec<usize>], id: usize, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut set = seed.clone();
    set.insert(id);
    let mut queue: Vec<usize> = set.iter().copied().collect();
    while let Some(x) = queue.pop() {
        let snapshot: Vec<usize> = set.iter().copied().collect();
        for &y in snapshot.iter() {
            for &p in [table[x][y], table[y][x]].iter() {
                if set.insert(p) {
                    queue.push(p);
                }
            }
        }
    }
    set
}

/// All subgroups of a closed group of order ≤ 200, deduplicated by element
/// set, in a deterministic order.
pub fn enumerate_subgroups(g: &MatrixGroup) -> Result<Vec<MatrixGroup>> {
    let elements = g.elements()?;
    let n = elements.len();
    if n > 200 {
        return Err(Error::GroupTooLarge(n, 200));
    }
    let table = mult_table(elements);
    let id = identity_index(elements);
    let trivial: BTreeSet<usize> = [id].into_iter().collect();
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    found.insert(trivial.clone());
    let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::new();
    queue.push_back(trivial);
    while let Some(s) = queue.pop_front() {
        for x in 0..n {
            if s.contains(&x) {
                continue;
            }
            let mut seed = s.clone();
            seed.insert(x);
            let closed = closure_indices(&table, id, &seed);
            if !found.contains(&closed) {
                found.insert(closed.clone());
                queue.push_back(closed);
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|idxs| {
            let elems: Vec<Isometry> = idxs.iter().map(|&i| elements[i].clone()).collect();
            MatrixGroup {
                generators: elems.clone(),
                elements: Some(elems),
            }
        })
        .collect())
}

/// Elementwise conjugation `by^{-1} · x · by` of every element/generator.
pub fn conjugate(
    lattice: &LorentzianLattice,
    g: &MatrixGroup,
    by: &Isometry,
) -> Result<MatrixGroup> {
    let inv = by.inverse(lattice);
    let conj = |x: &Isometry| inv.compose(x).compose(by);
    let generators = g.generators.iter().map(&conj).collect();
    let elements = g.elements.as_ref().map(|els| {
        let mut v: Vec<Isometry> = els.iter().map(&conj).collect();
        v.sort();
        v
    });
    Ok(MatrixGroup {
        generators,
        elements,
    })
}

// ---------------------------------------------------------------------------
// Isomorphism fingerprints
// ---------------------------------------------------------------------------

/// Invariants identifying the small groups that occur in the classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub order: usize,
    /// element order -> count
    pub order_histogram: BTreeMap<u64, usize>,
    pub center_order: usize,
    pub derived_order: usize,
    pub abelian: bool,
    /// Canonical label; equal labels for isomorphic groups within the
    /// recognized family.
    pub label: String,
}

fn element_orders_by_table(table: &[Vec<usize>], id: usize) -> Vec<u64> {
    let n = table.len();
    (0..n)
        .map(|i| {
            let mut x = i;
            let mut k = 1u64;
            while x != id {
                x = table[x][i];
                k += 1;
                assert!(k as usize <= n + 1, "order exceeds group order");
            }
            k
        })
        .collect()
}

fn derived_subgroup(table: &[Vec<usize>], id: usize, inv: &[usize]) -> BTreeSet<usize> {
    let n = table.len();
    let mut comms: BTreeSet<usize> = BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            // [x,y] = x^{-1} y^{-1} x y
            let c = table[table[table[inv[x]][inv[y]]][x]][y];
            comms.insert(c);
        }
    }
    closure_indices(table, id, &comms)
}

fn inverse_indices(table: &[Vec<usize>], id: usize) -> Vec<usize> {
    let n = table.len();
    (0..n)
        .map(|i| (0..n).find(|&j| table[i][j] == id).expect("group has inverses"))
        .collect()
}

/// Abelian invariant-factor label from the order histogram (for abelian
/// groups the counts `N_d = #{x : x^d = 1}` determine the type uniquely; we
/// search the candidate types directly).
fn abelian_label(order: usize, orders: &[u64]) -> String {
    // Enumerate abelian types of this order as multisets of prime powers.
    fn prime_power_partitions(order: usize) -> Vec<Vec<u64>> {
        // factor order
        let mut n = order;
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut p = 2u64;
        while (p * p) as usize <= n {
            let mut e = 0;
            while n % p as usize == 0 {
                n /= p as usize;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            factors.push((n as u64, 1));
        }
        // partitions of each exponent
        fn partitions(n: u32) -> Vec<Vec<u32>> {
            fn go(n: u32, max: u32) -> Vec<Vec<u32>> {
                if n == 0 {
                    return vec![vec![]];
                }
                let mut out = Vec::new();
                for first in (1..=n.min(max)).rev() {
                    for rest in go(n - first, first) {
                        let mut v = vec![first];
                        v.extend(rest);
                        out.push(v);
                    }
                }
                out
            }
            go(n, n)
        }
        let mut types: Vec<Vec<u64>> = vec![vec![]];
        for &(p, e) in factors.iter() {
            let mut next = Vec::new();
            for part in partitions(e) {
                for t in types.iter() {
                    let mut nt = t.clone();
                    for &k in part.iter() {
                        nt.push(p.pow(k));
                    }
                    next.push(nt);
                }
            }
            types = next;
        }
        for t in types.iter_mut() {
            t.sort_unstable();
            t.reverse();
        }
        types.sort();
        types.dedup();
        types
    }
    let histogram = |orders: &[u64]| {
        let mut h: BTreeMap<u64, usize> = BTreeMap::new();
        for &o in orders {
            *h.entry(o).or_default() += 1;
        }
        h
    };
    let actual = histogram(orders);
    for t in prime_power_partitions(order) {
        // Build the order multiset of the abelian group with cyclic factors t.
        let mut elems: Vec<u64> = vec![1];
        for &q in t.iter() {
            let mut next = Vec::new();
            for &o in elems.iter() {
                for r in 0..q {
                    // order of (x, r) where r has order q / gcd(q, r)
                    let ro = q / q.gcd(&r.max(1));
                    let ro = if r == 0 { 1 } else { ro };
                    next.push(o.lcm(&ro));
                }
            }
            elems = next;
        }
        if histogram(&elems) == actual {
            // Format: group equal factors as powers.
            if t.is_empty() {
                return "1".to_string();
            }
            let mut parts: Vec<String> = Vec::new();
            let mut i = 0;
            while i < t.len() {
                let mut j = i;
                while j < t.len() && t[j] == t[i] {
                    j += 1;
                }
                let count = j - i;
                if count == 1 {
                    parts.push(format!("Z/{}", t[i]));
                } else {
                    parts.push(format!("(Z/{})^{}", t[i], count));
                }
                i = j;
            }
            return parts.join(" x ");
        }
    }
    format!("abelian[order={order}]")
}

/// All homomorphisms G -> Z/2, found by F2 linear algebra on the
/// multiplication table; returns the supports of the (-1)-fibers.
fn signs_homomorphisms(table: &[Vec<usize>], id: usize) -> Vec<Vec<bool>> {
    let n = table.len();
    // Unknowns x_i in F2 with x_id = 0 and x_{t[i][j]} = x_i + x_j.
    // Gaussian elimination over rows of (coeff bitmask, rhs=0 always).
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let push = |row: Vec<bool>, rows: &mut Vec<Vec<bool>>| {
        rows.push(row);
    };
    let mut unit = vec![false; n];
    unit[id] = true;
    push(unit, &mut rows);
    for i in 0..n {
        for j in 0..n {
            let k = table[i][j];
            let mut row = vec![false; n];
            row[i] ^= true;
            row[j] ^= true;
            row[k] ^= true;
            if row.iter().any(|&b| b) {
                rows.push(row);
            }
        }
    }
    // Row reduce.
    let mut pivots: Vec<usize> = Vec::new();
    let mut reduced: Vec<Vec<bool>> = Vec::new();
    for mut row in rows {
        for (r, &p) in reduced.iter().zip(pivots.iter()) {
            if row[p] {
                for c in 0..n {
                    row[c] ^= r[c];
                }
            }
        }
        if let Some(p) = row.iter().position(|&b| b) {
            // back-substitute into earlier rows
            for (r, _) in reduced.iter_mut().zip(pivots.iter()) {
                if r[p] {
                    for c in 0..n {
                        r[c] ^= row[c];
                    }
                }
            }
            reduced.push(row);
            pivots.push(p);
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut homs = Vec::new();
    for mask in 1..(1usize << free.len()) {
        let mut x = vec![false; n];
        for (bit, &c) in free.iter().enumerate() {
            x[c] = (mask >> bit) & 1 == 1;
        }
        for (r, &p) in reduced.iter().zip(pivots.iter()) {
            let mut v = false;
            for c in 0..n {
                if c != p && r[c] {
                    v ^= x[c];
                }
            }
            x[p] = v;
        }
        homs.push(x);
    }
    homs
}

fn label_from_table(table: &[Vec<usize>], id: usize) -> String {
    let n = table.len();
    let orders = element_orders_by_table(table, id);
    let abelian = (0..n).all(|i| (0..n).all(|j| table[i][j] == table[j][i]));
    if abelian {
        return abelian_label(n, &orders);
    }
    // Try splitting off a central Z/2: a central involution z and a
    // sign homomorphism with φ(z) = -1 give G = ker(φ) × ⟨z⟩.
    let central_involutions: Vec<usize> = (0..n)
        .filter(|&z| orders[z] == 2 && (0..n).all(|x| table[z][x] == table[x][z]))
        .collect();
    if !central_involutions.is_empty() {
        let homs = signs_homomorphisms(table, id);
        for &z in central_involutions.iter() {
            for phi in homs.iter() {
                if !phi[z] {
                    continue;
                }
                let kernel: Vec<usize> = (0..n).filter(|&x| !phi[x]).collect();
                let pos: BTreeMap<usize, usize> =
                    kernel.iter().enumerate().map(|(a, &b)| (b, a)).collect();
                let sub_table: Vec<Vec<usize>> = kernel
                    .iter()
                    .map(|&x| kernel.iter().map(|&y| pos[&table[x][y]]).collect())
                    .collect();
                let sub_id = pos[&id];
                return format!("{} x Z/2", label_from_table(&sub_table, sub_id));
            }
        }
    }
    // Base nonabelian recognitions by (order, histogram).
    let mut hist: BTreeMap<u64, usize> = BTreeMap::new();
    for &o in orders.iter() {
        *hist.entry(o).or_default() += 1;
    }
    let hist_sig: Vec<(u64, usize)> = hist.iter().map(|(&k, &v)| (k, v)).collect();
    match (n, hist_sig.as_slice()) {
        (6, [(1, 1), (2, 3), (3, 2)]) => "S3".to_string(),
        (8, [(1, 1), (2, 5), (4, 2)]) => "D4".to_string(),
        (8, [(1, 1), (2, 1), (4, 6)]) => "Q8".to_string(),
        (24, [(1, 1), (2, 9), (3, 8), (4, 6)]) => "S4".to_string(),
        (12, [(1, 1), (2, 3), (3, 2), (6, 0)]) | (12, [(1, 1), (2, 7), (3, 2), (6, 2)]) => {
            // D6 ≅ S3 × Z/2 is caught by the split above; this arm is a
            // fallback for tables without a split (A4 etc. fall through).
            "D6".to_string()
        }
        _ => {
            let h: Vec<String> = hist
                .iter()
                .map(|(k, v)| format!("{k}:{v}"))
                .collect();
            format!("G[order={n};orders={}]", h.join(","))
        }
    }
}

/// Fingerprint of a closed group of order ≤ 200.
pub fn isomorphism_fingerprint(g: &MatrixGroup) -> Result<Fingerprint> {
    let elements = g.elements()?;
    let n = elements.len();
    if n > 200 {
        return Err(Error::GroupTooLarge(n, 200));
    }
    let table = mult_table(elements);
    let id = identity_index(elements);
    let orders = element_orders_by_table(&table, id);
    let mut order_histogram: BTreeMap<u64, usize> = BTreeMap::new();
    for &o in orders.iter() {
        *order_histogram.entry(o).or_default() += 1;
    }
    let center_order = (0..n)
        .filter(|&z| (0..n).all(|x| table[z][x] == table[x][z]))
        .count();
    let inv = inverse_indices(&table, id);
    let derived = derived_subgroup(&table, id, &inv);
    let abelian = center_order == n;
    let label = label_from_table(&table, id);
    Ok(Fingerprint {
        order: n,
        order_histogram,
        center_order,
        derived_order: derived.len(),
        abelian,
        label,
    })
}

/// Named generators of the order-2 story on M_2: A = Ref_{E1-E2},
/// B = Ref_{H-E1-E2}, Φ (order 4), Ψ = Ref_{E1}.
pub fn named_m2(l: &LorentzianLattice) -> (Isometry, Isometry, Isometry, Isometry) {
    use crate::lattice::LatticeElement;
    let a = Isometry::reflection(l, &LatticeElement::from_i64(&[0, 1, -1], CANONICAL)).unwrap();
    let b = Isometry::reflection(l, &LatticeElement::from_i64(&[1, -1, -1], CANONICAL)).unwrap();
    let psi = Isometry::reflection(l, &LatticeElement::from_i64(&[0, 1, 0], CANONICAL)).unwrap();
    let ref_e2 = Isometry::reflection(l, &LatticeElement::from_i64(&[0, 0, 1], CANONICAL)).unwrap();
    let phi = ref_e2.compose(&a); // E1 -> -E2, E2 -> E1: order 4
    (a, b, phi, psi)
}
