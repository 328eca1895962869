//! Exact solvability of `Q(x,x) = k` for integral vectors in a sublattice of
//! rank at most 3, with optional nonzero requirements. Strategies, in order:
//! radical splitting for degenerate restricted forms, exhaustive search for
//! definite forms, modular obstructions (with a primitivity descent when the
//! target is 0), and a complete reduction-theoretic window for binary
//! indefinite forms. Verdicts are exact; `Unknown` is the honest fallback.

use crate::intmat::{inertia, int, Int, IntMat, Rat};
use crate::lattice::{LatticeElement, LorentzianLattice, Sublattice, CANONICAL};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::ops::Range;

/// Moduli checked by the modular-obstruction strategy.
pub const MODULI: [u64; 7] = [2, 3, 4, 5, 8, 9, 16];

const ORBIT_CAP: usize = 10_000;

/// Largest `y` scanned for fundamental solutions of `X² − D·y² = N`. The
/// exact window is proportional to the Pell fundamental `u`, which grows
/// super-polynomially in `D` (already ~1.4·10⁸ for `D = 151`); past this cap
/// the scan is truncated and the verdict degrades to `Unknown` instead of
/// claiming unsolvability from an incomplete window.
const FUNDAMENTAL_SCAN_CAP: i64 = 200_000;

/// `Q(x,x) = target` for `x` in `sublattice` (optionally also in
/// `extra_membership`), with `x ≠ 0` when `require_nonzero` is set.
#[derive(Debug, Clone)]
pub struct NormEquation {
    pub sublattice: Sublattice,
    pub target: i64,
    pub require_nonzero: bool,
    pub extra_membership: Option<Sublattice>,
}

impl NormEquation {
    pub fn new(sublattice: Sublattice, target: i64, require_nonzero: bool) -> NormEquation {
        NormEquation {
            sublattice,
            target,
            require_nonzero,
            extra_membership: None,
        }
    }

    pub fn with_membership(mut self, extra: Sublattice) -> NormEquation {
        self.extra_membership = Some(extra);
        self
    }
}

/// Why an equation has no solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnsolvableReason {
    /// The form is definite and the finite norm-bounded box is empty.
    DefinitenessBound,
    /// No solution in the residues modulo `modulus`.
    ModularObstruction { modulus: u64 },
    /// No *primitive* solution modulo a power of two; for target 0 this is
    /// the infinite-descent argument at the prime 2.
    DescentAtTwo { modulus: u64 },
    /// Binary indefinite form: the complete window of orbit representatives
    /// is exhausted.
    PellWindowExhausted,
    /// Binary form of nonsquare discriminant and target 0: a nonzero
    /// solution would make the discriminant a rational square.
    IrrationalSlope,
}

impl std::fmt::Display for UnsolvableReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnsolvableReason::DefinitenessBound => write!(f, "definiteness bound"),
            UnsolvableReason::ModularObstruction { modulus } => {
                write!(f, "modular obstruction (mod {modulus})")
            }
            UnsolvableReason::DescentAtTwo { modulus } => {
                write!(f, "descent at 2 (mod {modulus})")
            }
            UnsolvableReason::PellWindowExhausted => write!(f, "Pell window exhausted"),
            UnsolvableReason::IrrationalSlope => write!(f, "irrational slope"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolvabilityVerdict {
    Solvable { witness: LatticeElement },
    Unsolvable(UnsolvableReason),
    Unknown,
}

/// A part of a joint (split) equation: the sublattice of one class variable
/// and whether that variable must be nonzero.
#[derive(Debug, Clone)]
pub struct SplitPart {
    pub sublattice: Sublattice,
    pub require_nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitVerdict {
    Solvable { witnesses: Vec<LatticeElement> },
    Unsolvable(UnsolvableReason),
    Unknown,
}

/// Gram of the form restricted to the (intersected, saturated) solution
/// sublattice.
pub fn restricted_gram(lattice: &LorentzianLattice, e: &NormEquation) -> Result<IntMat> {
    Ok(effective_sublattice(lattice, e)?.restricted_gram(lattice))
}

fn effective_sublattice(lattice: &LorentzianLattice, e: &NormEquation) -> Result<Sublattice> {
    if e.sublattice.ambient_name() != lattice.name() {
        return Err(Error::AmbientMismatch);
    }
    match &e.extra_membership {
        Some(extra) => e.sublattice.intersect(extra),
        None => Ok(e.sublattice.clone()),
    }
}

/// Decide `Q(x,x) = k` on the equation's sublattice.
pub fn solve_norm_equation(
    lattice: &LorentzianLattice,
    e: &NormEquation,
) -> Result<SolvabilityVerdict> {
    if e.sublattice.rank() > 3 {
        return Err(Error::RankTooLarge(e.sublattice.rank()));
    }
    let sub = effective_sublattice(lattice, e)?;
    let gram = sub.restricted_gram(lattice);
    let k = int(e.target);
    let blocks: Vec<Range<usize>> = if e.require_nonzero {
        vec![0..sub.rank()]
    } else {
        vec![]
    };
    match solve_core(&gram, &k, &blocks) {
        CoreVerdict::Solvable(x) => {
            let witness = lift_witness(lattice, &sub, &x);
            debug_assert_eq!(lattice.norm(&witness).unwrap(), k);
            debug_assert!(sub.contains(&witness.coords));
            Ok(SolvabilityVerdict::Solvable { witness })
        }
        CoreVerdict::Unsolvable(r) => Ok(SolvabilityVerdict::Unsolvable(r)),
        CoreVerdict::Unknown => Ok(SolvabilityVerdict::Unknown),
    }
}

/// Decide `Σ_i Q(x_i, x_i) = target` jointly over the parts, each `x_i`
/// ranging over its own sublattice (block-orthogonal sum of the restricted
/// forms), with per-part nonzero requirements.
pub fn solve_split_equation(
    lattice: &LorentzianLattice,
    parts: &[SplitPart],
    target: i64,
) -> Result<SplitVerdict> {
    let total: usize = parts.iter().map(|p| p.sublattice.rank()).sum();
    if total > 3 {
        return Err(Error::RankTooLarge(total));
    }
    for p in parts {
        if p.sublattice.ambient_name() != lattice.name() {
            return Err(Error::AmbientMismatch);
        }
    }
    let mut gram = IntMat::zeros(total, total);
    let mut blocks = Vec::new();
    let mut offset = 0usize;
    let mut ranges = Vec::new();
    for p in parts {
        let g = p.sublattice.restricted_gram(lattice);
        let r = p.sublattice.rank();
        for i in 0..r {
            for j in 0..r {
                gram[(offset + i, offset + j)] = g[(i, j)].clone();
            }
        }
        ranges.push(offset..offset + r);
        if p.require_nonzero {
            blocks.push(offset..offset + r);
        }
        offset += r;
    }
    match solve_core(&gram, &int(target), &blocks) {
        CoreVerdict::Solvable(x) => {
            let witnesses = parts
                .iter()
                .zip(&ranges)
                .map(|(p, range)| lift_witness(lattice, &p.sublattice, &x[range.clone()]))
                .collect();
            Ok(SplitVerdict::Solvable { witnesses })
        }
        CoreVerdict::Unsolvable(r) => Ok(SplitVerdict::Unsolvable(r)),
        CoreVerdict::Unknown => Ok(SplitVerdict::Unknown),
    }
}

fn lift_witness(lattice: &LorentzianLattice, sub: &Sublattice, coeffs: &[Int]) -> LatticeElement {
    let mut canonical = vec![Int::zero(); lattice.rank()];
    for (i, c) in coeffs.iter().enumerate() {
        let row = sub.basis_row(i);
        for (j, entry) in row.iter().enumerate() {
            canonical[j] += c * entry;
        }
    }
    LatticeElement::new(canonical, CANONICAL)
}

// ---------------------------------------------------------------------------
// Core solver on an abstract symmetric integer form.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum CoreVerdict {
    Solvable(Vec<Int>),
    Unsolvable(UnsolvableReason),
    Unknown,
}

fn eval_form(g: &IntMat, x: &[Int]) -> Int {
    let mut total = Int::zero();
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            total += &x[i] * &g[(i, j)] * &x[j];
        }
    }
    total
}

fn blocks_ok(x: &[Int], blocks: &[Range<usize>]) -> bool {
    blocks
        .iter()
        .all(|b| x[b.clone()].iter().any(|c| !c.is_zero()))
}

fn solve_core(gram: &IntMat, k: &Int, blocks: &[Range<usize>]) -> CoreVerdict {
    let r = gram.nrows();
    if r == 0 {
        return if k.is_zero() && blocks.is_empty() {
            CoreVerdict::Solvable(vec![])
        } else {
            CoreVerdict::Unsolvable(UnsolvableReason::DefinitenessBound)
        };
    }
    // The zero vector settles unconstrained target 0.
    if k.is_zero() && blocks.is_empty() {
        return CoreVerdict::Solvable(vec![Int::zero(); r]);
    }
    let (p, q, z) = inertia(gram);
    if z > 0 {
        return solve_degenerate(gram, k, blocks);
    }
    if p == 0 || q == 0 {
        return solve_definite(gram, k, blocks, q > 0);
    }
    // Indefinite, nondegenerate.
    if let Some(v) = modular_obstruction(gram, k, blocks) {
        return CoreVerdict::Unsolvable(v);
    }
    if r == 2 {
        return solve_binary_indefinite(gram, k, blocks);
    }
    CoreVerdict::Unknown
}

/// Degenerate form: split off the radical. A nonzero radical vector solves
/// target 0 outright when it meets the nonzero requirements; otherwise the
/// form descends to the nondegenerate quotient and solutions lift, with
/// radical freedom used to satisfy the requirements.
fn solve_degenerate(gram: &IntMat, k: &Int, blocks: &[Range<usize>]) -> CoreVerdict {
    let r = gram.nrows();
    let kernel = gram.kernel(); // rows: saturated radical basis
    let z = kernel.nrows();
    debug_assert!(z > 0);
    if k.is_zero() {
        // Small combinations of radical vectors (exact norm 0).
        let mut best: Option<Vec<Int>> = None;
        let mut coeffs = vec![0i64; z];
        search_box(&mut coeffs, 0, 2, &mut |c| {
            if best.is_some() {
                return;
            }
            let mut x = vec![Int::zero(); r];
            for (i, ci) in c.iter().enumerate() {
                for j in 0..r {
                    x[j] += int(*ci) * &kernel[(i, j)];
                }
            }
            if blocks_ok(&x, blocks) {
                best = Some(x);
            }
        });
        if let Some(x) = best {
            return CoreVerdict::Solvable(x);
        }
    }
    // Complete the radical to a unimodular basis; the quotient form lives on
    // the complementary rows.
    let quotient_rank = r - z;
    if quotient_rank == 0 {
        // The form vanishes identically; nonzero targets are out, and the
        // radical box above already handled target 0.
        return if k.is_zero() {
            CoreVerdict::Unknown
        } else {
            CoreVerdict::Unsolvable(UnsolvableReason::DefinitenessBound)
        };
    }
    let complement = hnf_completion(&kernel, r);
    let mut stacked = Vec::new();
    for i in 0..quotient_rank {
        stacked.push(complement.row(i));
    }
    let c = IntMat::from_rows(stacked);
    let qgram = c.mul(gram).mul(&c.transpose());
    match solve_core(&qgram, k, &[]) {
        CoreVerdict::Solvable(u_coords) => {
            // Lift and use radical freedom to satisfy nonzero requirements.
            let base: Vec<Int> = (0..r)
                .map(|j| {
                    (0..quotient_rank)
                        .map(|i| &u_coords[i] * &c[(i, j)])
                        .sum::<Int>()
                })
                .collect();
            let mut found: Option<Vec<Int>> = None;
            let mut coeffs = vec![0i64; z];
            search_box(&mut coeffs, 0, 2, &mut |w| {
                if found.is_some() {
                    return;
                }
                let mut x = base.clone();
                for (i, wi) in w.iter().enumerate() {
                    for j in 0..r {
                        x[j] += int(*wi) * &kernel[(i, j)];
                    }
                }
                if blocks_ok(&x, blocks) {
                    found = Some(x);
                }
            });
            match found {
                Some(x) => CoreVerdict::Solvable(x),
                None => CoreVerdict::Unknown,
            }
        }
        CoreVerdict::Unsolvable(reason) => CoreVerdict::Unsolvable(reason),
        CoreVerdict::Unknown => CoreVerdict::Unknown,
    }
}

/// Rows completing `rows` (saturated, full column count) to a basis of Z^n:
/// returns an (n − z) × n matrix whose rows, together with `rows`, form a
/// unimodular matrix. Uses the inverse-transpose of the HNF transform of the
/// stacked identity trick.
fn hnf_completion(rows: &IntMat, n: usize) -> IntMat {
    // Transpose trick: columns of T = U^{-T} where U·rowsᵀ-HNF. We instead
    // find a unimodular extension directly: HNF of rowsᵀ with transform V
    // gives V·rowsᵀ = H; the last n − z rows of V annihilate the span, and
    // V being unimodular, the dual basis (V^{-1} columns) splits. Concretely
    // the rows of (V^{-1})ᵀ beyond the pivot rows complete the basis.
    let (h, v) = rows.transpose().row_hnf_with_transform();
    let z = h.nonzero_row_count();
    debug_assert_eq!(z, rows.nrows());
    let vinv = v.inverse_unimodular();
    // V^{-1} has columns; rows of V^{-1}ᵀ = columns of V^{-1}. The first z
    // columns of V^{-1} map onto the span; the remaining columns complete.
    let vt = vinv.transpose();
    let mut out = Vec::new();
    for i in z..n {
        out.push(vt.row(i));
    }
    IntMat::from_rows(out)
}

fn search_box(coeffs: &mut Vec<i64>, idx: usize, radius: i64, f: &mut dyn FnMut(&[i64])) {
    if idx == coeffs.len() {
        f(coeffs);
        return;
    }
    for v in -radius..=radius {
        coeffs[idx] = v;
        search_box(coeffs, idx + 1, radius, f);
    }
}

// ---------------------------------------------------------------------------
// Definite forms: complete enumeration inside the norm ellipsoid.
// ---------------------------------------------------------------------------

fn solve_definite(gram: &IntMat, k: &Int, blocks: &[Range<usize>], negative: bool) -> CoreVerdict {
    let (g, kk) = if negative {
        (gram.neg(), -k)
    } else {
        (gram.clone(), k.clone())
    };
    if kk.is_negative() {
        return CoreVerdict::Unsolvable(UnsolvableReason::DefinitenessBound);
    }
    if kk.is_zero() {
        // Definite: only the zero vector has norm 0.
        return CoreVerdict::Unsolvable(UnsolvableReason::DefinitenessBound);
    }
    // Rational LDL^T: Q(x) = Σ d_i (x_i + Σ_{j>i} l_{ij} x_j)^2.
    let r = g.nrows();
    let mut d = vec![Rat::zero(); r];
    let mut l = vec![vec![Rat::zero(); r]; r];
    for i in 0..r {
        let mut di = Rat::from(g[(i, i)].clone());
        for m in 0..i {
            let lm = l[m][i].clone();
            di -= &d[m] * &lm * &lm;
        }
        d[i] = di;
        for j in (i + 1)..r {
            let mut v = Rat::from(g[(i, j)].clone());
            for m in 0..i {
                v -= &d[m] * &l[m][i] * &l[m][j];
            }
            l[i][j] = v / &d[i];
        }
    }
    let mut x = vec![Int::zero(); r];
    let found = definite_rec(&d, &l, r, &Rat::from(kk), &mut x, blocks);
    match found {
        Some(sol) => CoreVerdict::Solvable(sol),
        None => CoreVerdict::Unsolvable(UnsolvableReason::DefinitenessBound),
    }
}

/// Assign coordinate `level − 1` (levels descend), with `budget` remaining.
fn definite_rec(
    d: &[Rat],
    l: &[Vec<Rat>],
    level: usize,
    budget: &Rat,
    x: &mut Vec<Int>,
    blocks: &[Range<usize>],
) -> Option<Vec<Int>> {
    if level == 0 {
        if budget.is_zero() && blocks_ok(x, blocks) {
            return Some(x.clone());
        }
        return None;
    }
    let i = level - 1;
    // center c = −Σ_{j>i} l_{ij} x_j; d_i (x_i − c)^2 ≤ budget.
    let mut c = Rat::zero();
    for j in (i + 1)..x.len() {
        c -= &l[i][j] * Rat::from(x[j].clone());
    }
    let bound = budget / &d[i];
    let radius: Int = floor_sqrt_rat(&bound) + 1;
    let center_floor: Int = c.floor().to_integer();
    let lo: Int = &center_floor - &radius;
    let hi: Int = &center_floor + &radius + 1;
    let mut xi: Int = lo;
    while xi <= hi {
        let delta = Rat::from(xi.clone()) - &c;
        let used = &d[i] * &delta * &delta;
        if used <= *budget {
            x[i] = xi.clone();
            let rest = budget - used;
            if let Some(sol) = definite_rec(d, l, i, &rest, x, blocks) {
                return Some(sol);
            }
            x[i] = Int::zero();
        }
        xi += 1;
    }
    None
}

/// Largest integer `m ≥ 0` with `m² ≤ r` (requires `r ≥ 0`).
fn floor_sqrt_rat(r: &Rat) -> Int {
    debug_assert!(!r.is_negative());
    let num = r.numer().clone();
    let den = r.denom().clone();
    let mut m = (&num * &den).sqrt() / &den;
    while &(&m + 1u8) * (&m + 1u8) * &den <= num {
        m += 1;
    }
    while &m * &m * &den > num && m.is_positive() {
        m -= 1;
    }
    m
}

// ---------------------------------------------------------------------------
// Modular obstructions.
// ---------------------------------------------------------------------------

/// Returns a certificate if some modulus rules the equation out. For target
/// 0 with a nonzero requirement only primitive residue vectors are admitted
/// (a nonzero solution scales to a primitive one).
fn modular_obstruction(
    gram: &IntMat,
    k: &Int,
    blocks: &[Range<usize>],
) -> Option<UnsolvableReason> {
    let r = gram.nrows();
    let primitive_mode = k.is_zero() && !blocks.is_empty();
    // In primitive (descent) mode the powers of two are checked first, so a
    // 2-adic descent certificate is reported when one exists.
    let moduli: Vec<u64> = if primitive_mode {
        vec![2, 4, 8, 16, 3, 9, 5]
    } else {
        MODULI.to_vec()
    };
    for &m in &moduli {
        let p = if m % 2 == 0 { 2u64 } else if m % 3 == 0 { 3 } else { 5 };
        let mi = int(m as i64);
        let target = k.mod_floor(&mi);
        let mut found = false;
        let mut x = vec![0i64; r];
        'outer: loop {
            let is_primitive = x.iter().any(|&c| c % (p as i64) != 0);
            if !primitive_mode || is_primitive {
                let xi: Vec<Int> = x.iter().map(|&c| int(c)).collect();
                if eval_form(gram, &xi).mod_floor(&mi) == target {
                    found = true;
                    break;
                }
            }
            // odometer
            for i in 0..r {
                x[i] += 1;
                if x[i] < m as i64 {
                    continue 'outer;
                }
                x[i] = 0;
            }
            break;
        }
        if !found {
            return Some(if primitive_mode && m % 2 == 0 {
                UnsolvableReason::DescentAtTwo { modulus: m }
            } else {
                UnsolvableReason::ModularObstruction { modulus: m }
            });
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Binary indefinite forms.
// ---------------------------------------------------------------------------

fn solve_binary_indefinite(gram: &IntMat, k: &Int, blocks: &[Range<usize>]) -> CoreVerdict {
    let a = gram[(0, 0)].clone();
    let b = gram[(0, 1)].clone();
    let c = gram[(1, 1)].clone();
    let disc = &b * &b - &a * &c; // > 0 for indefinite nondegenerate
    debug_assert!(disc.is_positive());
    let s = disc.sqrt();
    let square = &s * &s == disc;

    if k.is_zero() {
        // Nonzero solution required (unconstrained 0 handled earlier).
        if !square {
            return CoreVerdict::Unsolvable(UnsolvableReason::IrrationalSlope);
        }
        let mut candidates: Vec<(Int, Int)> = Vec::new();
        if a.is_zero() {
            candidates.push((Int::one(), Int::zero()));
        }
        if c.is_zero() {
            candidates.push((Int::zero(), Int::one()));
        }
        if !a.is_zero() {
            candidates.push((&s - &b, a.clone()));
            candidates.push((-&s - &b, a.clone()));
        }
        for (x, y) in candidates {
            let g = x.gcd(&y);
            let (x, y) = if g.is_zero() { (x, y) } else { (x / &g, y / &g) };
            let v = vec![x, y];
            if !eval_form(gram, &v).is_zero() {
                continue;
            }
            if blocks_ok(&v, blocks) && v.iter().any(|t| !t.is_zero()) {
                return CoreVerdict::Solvable(v);
            }
        }
        return CoreVerdict::Unknown;
    }

    // k ≠ 0 from here.
    if a.is_zero() && c.is_zero() {
        // 2bxy = k: divisor enumeration.
        let twob = int(2) * &b;
        for y in divisors_signed(k) {
            let rest = k / &y;
            if (&rest % &twob).is_zero() {
                let x = rest / &twob;
                let v = vec![x, y];
                if eval_form(gram, &v) == *k && blocks_ok(&v, blocks) {
                    return CoreVerdict::Solvable(v);
                }
            }
        }
        return CoreVerdict::Unsolvable(UnsolvableReason::PellWindowExhausted);
    }
    if a.is_zero() {
        // Swap coordinates so the x²-coefficient is nonzero.
        let swapped = IntMat::from_rows(vec![
            vec![c.clone(), b.clone()],
            vec![b.clone(), a.clone()],
        ]);
        let swapped_blocks: Vec<Range<usize>> = blocks
            .iter()
            .map(|r| (1 - (r.end - 1))..(2 - r.start))
            .collect();
        return match solve_binary_indefinite(&swapped, k, &swapped_blocks) {
            CoreVerdict::Solvable(v) => CoreVerdict::Solvable(vec![v[1].clone(), v[0].clone()]),
            other => other,
        };
    }

    // a ≠ 0: a·Q(x,y) = (ax + by)² − disc·y², so solve X² − D·y² = a·k with
    // X ≡ b·y (mod a), x = (X − b·y)/a.
    let n = &a * k;
    if square {
        return solve_binary_square_disc(gram, &a, &b, &s, &n, k, blocks);
    }
    let (t, u) = pell_fundamental(&disc);
    // Every orbit of the automorph contains a representative with
    // |y| ≤ u·⌈√|N|⌉ + 1 (a generous over-estimate of the classical bound).
    let exact_bound = &u * (n.abs().sqrt() + 1) + 1;
    let truncated = exact_bound > int(FUNDAMENTAL_SCAN_CAP);
    let ybound = if truncated {
        int(FUNDAMENTAL_SCAN_CAP)
    } else {
        exact_bound
    };
    let mut fundamentals: Vec<(Int, Int)> = Vec::new();
    let mut y = Int::zero();
    while y <= ybound {
        let rhs = &n + &disc * &y * &y;
        if !rhs.is_negative() {
            let x0 = rhs.sqrt();
            if &x0 * &x0 == rhs {
                fundamentals.push((x0.clone(), y.clone()));
                if !x0.is_zero() {
                    fundamentals.push((-x0, y.clone()));
                }
            }
        }
        y += 1;
    }
    if fundamentals.is_empty() {
        if truncated {
            return CoreVerdict::Unknown;
        }
        return CoreVerdict::Unsolvable(UnsolvableReason::PellWindowExhausted);
    }
    // Automorph A = [[t, D·u], [u, t]] (and its inverse with u ↦ −u). Check
    // the congruence over a full period of A modulo |a|, in both directions,
    // for each fundamental representative and its negation.
    let amod = a.abs();
    let period = automorph_period(&t, &u, &disc, &amod);
    let period = match period {
        Some(p) => p,
        None => return CoreVerdict::Unknown,
    };
    let steps = (2 * period + 8).min(ORBIT_CAP);
    for dirn in [false, true] {
        let uu = if dirn { -&u } else { u.clone() };
        for f in &fundamentals {
            for sign in [false, true] {
                let (mut xx, mut yy) = if sign {
                    (-&f.0, -&f.1)
                } else {
                    f.clone()
                };
                for _ in 0..steps {
                    let rem = (&xx - &b * &yy).mod_floor(&amod);
                    if rem.is_zero() || amod.is_one() {
                        let xcoord = (&xx - &b * &yy) / &a;
                        let v = vec![xcoord, yy.clone()];
                        if eval_form(gram, &v) == *k && blocks_ok(&v, blocks) {
                            return CoreVerdict::Solvable(v);
                        }
                    }
                    let nx = &t * &xx + &disc * &uu * &yy;
                    let ny = &uu * &xx + &t * &yy;
                    xx = nx;
                    yy = ny;
                }
            }
        }
    }
    if truncated {
        return CoreVerdict::Unknown;
    }
    CoreVerdict::Unsolvable(UnsolvableReason::PellWindowExhausted)
}

/// Square discriminant: `X² − s²y² = N` factors; enumerate divisor pairs.
fn solve_binary_square_disc(
    gram: &IntMat,
    a: &Int,
    b: &Int,
    s: &Int,
    n: &Int,
    k: &Int,
    blocks: &[Range<usize>],
) -> CoreVerdict {
    debug_assert!(!n.is_zero());
    for d in divisors_signed(n) {
        let e = n / &d;
        let sum = &d + &e;
        let diff = &e - &d;
        if (&sum % int(2)).is_zero() && (&diff % (int(2) * s)).is_zero() {
            let x_big = sum / int(2);
            let y = diff / (int(2) * s);
            let num = &x_big - b * &y;
            if (&num % a).is_zero() {
                let x = num / a;
                let v = vec![x, y];
                if eval_form(gram, &v) == *k && blocks_ok(&v, blocks) {
                    return CoreVerdict::Solvable(v);
                }
            }
        }
    }
    CoreVerdict::Unsolvable(UnsolvableReason::PellWindowExhausted)
}

/// All divisors of `n ≠ 0`, both signs.
fn divisors_signed(n: &Int) -> Vec<Int> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = Int::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(-&d);
            let e = &n / &d;
            if e != d {
                out.push(e.clone());
                out.push(-e);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// Fundamental solution of `t² − d·u² = 1` (d ≥ 2 nonsquare), by continued
/// fractions of √d.
fn pell_fundamental(d: &Int) -> (Int, Int) {
    let a0 = d.sqrt();
    let mut m = Int::zero();
    let mut den = Int::one();
    let mut a = a0.clone();
    let (mut p_prev, mut p) = (Int::one(), a0.clone());
    let (mut q_prev, mut q) = (Int::zero(), Int::one());
    loop {
        if &p * &p - d * &q * &q == Int::one() && q.is_positive() {
            return (p, q);
        }
        m = &den * &a - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m).div_floor(&den);
        let np = &a * &p + &p_prev;
        let nq = &a * &q + &q_prev;
        p_prev = p;
        q_prev = q;
        p = np;
        q = nq;
    }
}

/// Multiplicative order of the automorph modulo `m` (None past the cap).
fn automorph_period(t: &Int, u: &Int, d: &Int, m: &Int) -> Option<usize> {
    if m.is_one() {
        return Some(1);
    }
    let reduce = |v: &Int| v.mod_floor(m);
    let id = (Int::one(), Int::zero(), Int::zero(), Int::one());
    let a = (reduce(t), reduce(&(d * u)), reduce(u), reduce(t));
    let mut cur = a.clone();
    for step in 1..=ORBIT_CAP {
        if cur == id {
            return Some(step);
        }
        cur = (
            reduce(&(&cur.0 * &a.0 + &cur.1 * &a.2)),
            reduce(&(&cur.0 * &a.1 + &cur.1 * &a.3)),
            reduce(&(&cur.2 * &a.0 + &cur.3 * &a.2)),
            reduce(&(&cur.2 * &a.1 + &cur.3 * &a.3)),
        );
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::S_BASIS;

    fn m2() -> LorentzianLattice {
        LorentzianLattice::m_n(2)
    }

    fn span(l: &LorentzianLattice, vs: &[&[i64]], basis: &str) -> Sublattice {
        let elems: Vec<LatticeElement> = vs
            .iter()
            .map(|v| LatticeElement::from_i64(v, basis))
            .collect();
        Sublattice::with_basis(l, &elems).unwrap()
    }

    #[test]
    fn restricted_grams() {
        let l = m2();
        // span{S1+S2, Σ}: diag(2, −1).
        let sub = span(&l, &[&[1, 1, 0], &[0, 0, 1]], S_BASIS);
        let e = NormEquation::new(sub, 0, true);
        assert_eq!(
            restricted_gram(&l, &e).unwrap(),
            IntMat::from_i64(&[&[2, 0], &[0, -1]])
        );
        let l3 = LorentzianLattice::m_n(3);
        let sub = span(&l3, &[&[2, -1, -1, 0]], CANONICAL);
        let e = NormEquation::new(sub, 0, true);
        assert_eq!(restricted_gram(&l3, &e).unwrap(), IntMat::from_i64(&[&[2]]));
        let e = NormEquation::new(Sublattice::zero(&l), 0, false);
        assert_eq!(restricted_gram(&l, &e).unwrap(), IntMat::zeros(0, 0));
    }

    #[test]
    fn frozen_case_equations() {
        let l = m2();
        // 2ab = 1 on span{S1, S2}: modular obstruction mod 2.
        let s1s2 = span(&l, &[&[1, 0, 0], &[0, 1, 0]], S_BASIS);
        let v = solve_norm_equation(&l, &NormEquation::new(s1s2.clone(), 1, false)).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::ModularObstruction { modulus: 2 })
        );
        // −a² = 1 on span{Σ}: definiteness.
        let sigma = span(&l, &[&[0, 0, 1]], S_BASIS);
        let v = solve_norm_equation(&l, &NormEquation::new(sigma.clone(), 1, false)).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::DefinitenessBound)
        );
        // −2a² = −3 on span{S1−S2} (gram −2): definite, so the definiteness
        // exhaustion certificate fires first (a mod-2 certificate would be
        // equally valid; strategy order decides which is reported).
        let s1ms2 = span(&l, &[&[1, -1, 0]], S_BASIS);
        let v = solve_norm_equation(&l, &NormEquation::new(s1ms2.clone(), -3, false)).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::DefinitenessBound)
        );
        // a² = 3 on span{S1+S2}... use a rank-1 positive piece: span{H} in M_0
        // has gram (1); a² = 3 unsolvable by exhaustion.
        let l0 = LorentzianLattice::m_n(0);
        let h = span(&l0, &[&[1]], CANONICAL);
        let v = solve_norm_equation(&l0, &NormEquation::new(h, 3, false)).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::DefinitenessBound)
        );
        // a² − 2b² = 0, nonzero: descent at 2.
        let full2 = span(&l, &[&[1, 1, 0], &[0, 0, 1]], S_BASIS); // diag(2,-1)? no:
        let _ = full2;
        // Use an abstract check through a sublattice with gram diag(1,−2):
        // span{H, E1+E2} in M_2 has gram [[1,0],[0,-2]].
        let sub = span(&l, &[&[1, 0, 0], &[0, 1, 1]], CANONICAL);
        assert_eq!(
            restricted_gram(&l, &NormEquation::new(sub.clone(), 0, true)).unwrap(),
            IntMat::from_i64(&[&[1, 0], &[0, -2]])
        );
        let v = solve_norm_equation(&l, &NormEquation::new(sub.clone(), 0, true)).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::DescentAtTwo { modulus: 4 })
        );
        // a² − 2b² = 1: solvable, witness verifies.
        let v = solve_norm_equation(&l, &NormEquation::new(sub.clone(), 1, false)).unwrap();
        match v {
            SolvabilityVerdict::Solvable { witness } => {
                assert_eq!(l.norm(&witness).unwrap(), int(1));
                assert!(sub.contains(&witness.coords));
            }
            other => panic!("expected solvable, got {other:?}"),
        }
        // 2c² + 2d² = 0 with both parts nonzero: the split form of the
        // two-sphere budget; definite, unsolvable.
        let l3 = LorentzianLattice::m_n(3);
        let part1 = SplitPart {
            sublattice: span(&l3, &[&[2, -1, -1, 0]], CANONICAL),
            require_nonzero: true,
        };
        // A second positive rank-1 piece: 2H−E1−E3.
        let part2 = SplitPart {
            sublattice: span(&l3, &[&[2, -1, 0, -1]], CANONICAL),
            require_nonzero: true,
        };
        let v = solve_split_equation(&l3, &[part1, part2], 0).unwrap();
        assert_eq!(
            v,
            SplitVerdict::Unsolvable(UnsolvableReason::DefinitenessBound)
        );
    }

    #[test]
    fn pell_window_and_slopes() {
        assert_eq!(pell_fundamental(&int(2)), (int(3), int(2)));
        assert_eq!(pell_fundamental(&int(3)), (int(2), int(1)));
        assert_eq!(pell_fundamental(&int(5)), (int(9), int(4)));
        let l = m2();
        // Hyperbolic plane span{S1,S2} (gram [[0,1],[1,0]]): 2ab = 2 solvable.
        let s1s2 = span(&l, &[&[1, 0, 0], &[0, 1, 0]], S_BASIS);
        let v = solve_norm_equation(&l, &NormEquation::new(s1s2.clone(), 2, false)).unwrap();
        match v {
            SolvabilityVerdict::Solvable { witness } => {
                assert_eq!(l.norm(&witness).unwrap(), int(2));
            }
            other => panic!("expected solvable, got {other:?}"),
        }
        // 2ab = 0 nonzero required: square discriminant, solvable ((1,0)).
        let v = solve_norm_equation(&l, &NormEquation::new(s1s2, 0, true)).unwrap();
        assert!(matches!(v, SolvabilityVerdict::Solvable { .. }));
        // a² − 2b² = 5: modular obstruction... actually 5 ≡ ±a² mod 8:
        // squares mod 8 are {0,1,4}, 2b² ∈ {0,2}, a²−2b² mod 8 ∈
        // {0,1,4,6,7,2,3}: 5 is excluded → mod 8 obstruction.
        let sub = span(&l, &[&[1, 0, 0], &[0, 1, 1]], CANONICAL);
        let v = solve_norm_equation(&l, &NormEquation::new(sub.clone(), 5, false)).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::ModularObstruction { modulus: 8 })
        );
        // a² − 2b² = 7: solvable (3² − 2·1² = 7).
        let v = solve_norm_equation(&l, &NormEquation::new(sub.clone(), 7, false)).unwrap();
        assert!(matches!(v, SolvabilityVerdict::Solvable { .. }));
        // a² − 2b² = 3: no modular obstruction at small moduli? 3 mod 8:
        // a²−2b² ∈ {0,1,2,3,4,6,7} mod 8 — includes 3 (a=1... 1−2·3²=−17≡7;
        // a²−2b²=3 has a ≡ odd: 1−2b² ≡ 3 mod 8 → 2b² ≡ −2 ≡ 6 → b² ≡ 3
        // mod 4: impossible; even a: 4−2b²≡3 odd≠even... mod 8 covers it.
        let v = solve_norm_equation(&l, &NormEquation::new(sub, 3, false)).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::ModularObstruction { modulus: 8 })
        );
    }

    #[test]
    fn rank_and_membership_handling() {
        let l = LorentzianLattice::m_n(5);
        let full = Sublattice::full(&l);
        let e = NormEquation::new(full, 1, false);
        assert!(matches!(
            solve_norm_equation(&l, &e),
            Err(Error::RankTooLarge(6))
        ));
        // Intersection with extra membership shrinks the problem: the
        // Prop-4.10 pair span{H,E1+E2} ∩ (+1 eigenlattice of σ(12) within
        // span of {2H−E1−E2}) — emulate with direct spans.
        let l3 = LorentzianLattice::m_n(3);
        let big = span(&l3, &[&[1, 0, 0, 0], &[0, 1, 1, 0]], CANONICAL);
        let other = span(&l3, &[&[2, -1, -1, 0], &[0, 0, 0, 1]], CANONICAL);
        let e = NormEquation::new(big, 0, true).with_membership(other);
        assert_eq!(restricted_gram(&l3, &e).unwrap(), IntMat::from_i64(&[&[2]]));
        let v = solve_norm_equation(&l3, &e).unwrap();
        assert_eq!(
            v,
            SolvabilityVerdict::Unsolvable(UnsolvableReason::DefinitenessBound)
        );
    }

    #[test]
    fn degenerate_forms_split_the_radical() {
        // Rank-2 degenerate: gram [[0,0],[0,2]] via span{S1−S2 + ...}. Use
        // M_* with a null vector: span{e1, e1+e2}? Gram [[0,1],[1,0]] is
        // nondegenerate; instead take M_3 span{H−E1−E2−E3, E2−E3}: the
        // first is norm −2, orthogonal to the second (norm −2)?
        // Q(H−E1−E2−E3, E2−E3) = 0 − (−1) − ... compute: 0.
        // Simpler true-degenerate: span{H−E1, H−E1} collapses; use
        // span{H+E1}? norm 0: gram (0) — degenerate rank 1.
        let l = m2();
        let null = span(&l, &[&[1, -1, 0]], CANONICAL); // H−E1: norm 0
        let e = NormEquation::new(null.clone(), 0, true);
        let v = solve_norm_equation(&l, &e).unwrap();
        match v {
            SolvabilityVerdict::Solvable { witness } => {
                assert_eq!(l.norm(&witness).unwrap(), int(0));
                assert!(witness.coords.iter().any(|c| !c.is_zero()));
            }
            other => panic!("expected solvable, got {other:?}"),
        }
        // Nonzero target on a null line: k ≠ 0 never represented.
        let e = NormEquation::new(null, 2, false);
        let v = solve_norm_equation(&l, &e).unwrap();
        assert!(matches!(v, SolvabilityVerdict::Unsolvable(_)));
    }
}
