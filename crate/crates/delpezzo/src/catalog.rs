//! Records of every explicit realization construction, with mechanical
//! consistency checks.
//!
//! Each entry stores the induced isometries of a finite group realized by
//! diffeomorphisms of a del Pezzo manifold — built as a section, a glued
//! connected sum, an orbit-equivariant sum, or an automorphism of a blowup —
//! together with the claimed group shape, the fixed-set profiles of the
//! order-2 generators, optional tangential (local differential) data at the
//! gluing points, and optional monomial "blowup descriptors" regenerating
//! each matrix from a sign on `H` plus a signed permutation of the
//! exceptional classes. `verify_entry` re-derives everything that can be
//! re-derived and reports each failed check by name.

use std::collections::BTreeMap;

use crate::equivariant::{
    decompose_involution, enumerate_profiles, ComponentKind, FixedSetProfile, ProfileCaps,
};
use crate::intmat::{int, Int, IntMat};
use crate::isometry::{close_group, isomorphism_fingerprint, Isometry, MatrixGroup, CLOSURE_CAP};
use crate::lattice::{LorentzianLattice, CANONICAL};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// The manifold an entry lives on: `M_*` or `M_n` (`n = 0` is the plane
/// itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    Star,
    N(usize),
}

impl Manifold {
    pub fn parse(s: &str) -> Result<Manifold> {
        if s == "M_*" {
            return Ok(Manifold::Star);
        }
        if let Some(n) = s.strip_prefix("M_") {
            if let Ok(n) = n.parse::<usize>() {
                if n <= 8 {
                    return Ok(Manifold::N(n));
                }
            }
        }
        Err(Error::InvalidInput(format!("unknown manifold `{s}`")))
    }

    pub fn lattice(&self) -> LorentzianLattice {
        match *self {
            Manifold::Star => LorentzianLattice::m_star(),
            Manifold::N(n) => LorentzianLattice::m_n(n),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Manifold::Star => "M_*".to_string(),
            Manifold::N(n) => format!("M_{n}"),
        }
    }
}

/// How the realization is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionKind {
    /// A section of the projection to the mapping class group.
    Section,
    /// Two pieces glued at a common fixed point of a `(Z/2)^2` action.
    Glue,
    /// An orbit-equivariant sum attaching copies of a piece along an orbit.
    EquivariantSum,
    /// Automorphisms and anti-automorphisms of a blowup.
    BlowupAutomorphism,
}

impl ConstructionKind {
    pub fn parse(s: &str) -> Result<ConstructionKind> {
        Ok(match s {
            "section" => ConstructionKind::Section,
            "glue" => ConstructionKind::Glue,
            "equivariant_sum" => ConstructionKind::EquivariantSum,
            "blowup_automorphism" => ConstructionKind::BlowupAutomorphism,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown construction kind `{s}`"
                )))
            }
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ConstructionKind::Section => "section",
            ConstructionKind::Glue => "glue",
            ConstructionKind::EquivariantSum => "equivariant_sum",
            ConstructionKind::BlowupAutomorphism => "blowup_automorphism",
        }
    }
}

/// Local differentials at one gluing point, as signed permutations of a
/// chart `(a, b, c, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentialRep {
    pub chart: String,
    /// element name -> 4×4 signed permutation matrix.
    pub actions: Vec<(String, IntMat)>,
}

/// Monomial descriptor of a blowup-induced isometry: a sign on `H` and a
/// signed target `±j` for each exceptional class `E_i ↦ ±E_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupDescriptor {
    pub h_sign: i64,
    pub targets: Vec<i64>,
}

impl BlowupDescriptor {
    /// Rebuild the canonical-basis matrix the descriptor encodes.
    pub fn matrix(&self) -> IntMat {
        let rank = self.targets.len() + 1;
        IntMat::from_fn(rank, rank, |r, c| {
            if c == 0 {
                return if r == 0 { int(self.h_sign) } else { Int::zero() };
            }
            let t = self.targets[c - 1];
            if r == t.unsigned_abs() as usize {
                int(t.signum())
            } else {
                Int::zero()
            }
        })
    }
}

/// One realization record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationEntry {
    pub name: String,
    pub manifold: Manifold,
    pub construction: ConstructionKind,
    /// Basis id the generator rows (and the split) are written in.
    pub basis: String,
    pub generators: Vec<(String, Isometry)>,
    /// Derived elements as products of earlier names.
    pub defined: Vec<(String, Vec<String>)>,
    pub claimed_order: usize,
    pub claimed_label: String,
    /// Block ranks of the connected-sum homology splitting, in `basis`.
    pub split: Option<Vec<usize>>,
    /// Claimed element orders.
    pub orders: BTreeMap<String, u64>,
    /// Whole-manifold fixed-set profiles per named element.
    pub fixed_sets: BTreeMap<String, FixedSetProfile>,
    /// Fixed sets of the piece maps as stated in the source construction
    /// (recorded, not re-derived: the pieces live on other manifolds).
    pub piece_fixed: Vec<(String, usize, FixedSetProfile)>,
    pub blowup: BTreeMap<String, BlowupDescriptor>,
    pub charts: Vec<TangentialRep>,
    pub note: Option<String>,
}

impl RealizationEntry {
    /// Resolve every named element (generators, then defined products).
    pub fn element_map(&self) -> Result<BTreeMap<String, Isometry>> {
        let mut map: BTreeMap<String, Isometry> = BTreeMap::new();
        for (name, m) in self.generators.iter() {
            map.insert(name.clone(), m.clone());
        }
        for (name, factors) in self.defined.iter() {
            let mut acc: Option<Isometry> = None;
            for f in factors.iter() {
                let m = map.get(f).ok_or_else(|| {
                    Error::InvalidInput(format!("defined element `{name}` uses unknown `{f}`"))
                })?;
                acc = Some(match acc {
                    None => m.clone(),
                    Some(a) => a.compose(m),
                });
            }
            let prod = acc.ok_or_else(|| {
                Error::InvalidInput(format!("defined element `{name}` has no factors"))
            })?;
            map.insert(name.clone(), prod);
        }
        Ok(map)
    }

    pub fn group(&self) -> MatrixGroup {
        MatrixGroup::from_generators(self.generators.iter().map(|(_, m)| m.clone()).collect())
    }
}

// ---------------------------------------------------------------------------
// Profile and entry parsing
// ---------------------------------------------------------------------------

fn parse_component(tok: &str) -> Result<ComponentKind> {
    match tok {
        "pt" => return Ok(ComponentKind::Point),
        "S2" => return Ok(ComponentKind::Orientable(0)),
        "T2" => return Ok(ComponentKind::Orientable(1)),
        "RP2" => return Ok(ComponentKind::NonOrientable(1)),
        _ => {}
    }
    if let Some(g) = tok.strip_prefix("Sigma") {
        if let Ok(g) = g.parse::<u32>() {
            return Ok(ComponentKind::Orientable(g));
        }
    }
    if let Some(k) = tok.strip_prefix('#').and_then(|t| t.strip_suffix("RP2")) {
        if let Ok(k) = k.parse::<u32>() {
            if k >= 1 {
                return Ok(ComponentKind::NonOrientable(k));
            }
        }
    }
    Err(Error::InvalidInput(format!(
        "unknown fixed-set component `{tok}`"
    )))
}

/// Parse a profile written the way profiles print: `[S2, pt]`.
pub fn parse_profile(s: &str) -> Result<FixedSetProfile> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidInput(format!("profile `{s}` is not bracketed")))?;
    let mut components = Vec::new();
    for tok in inner.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        components.push(parse_component(tok)?);
    }
    if components.is_empty() {
        return Err(Error::InvalidInput("profile is empty".to_string()));
    }
    Ok(FixedSetProfile::new(components))
}

fn parse_signed_slot(tok: &str) -> Result<(usize, i64)> {
    let (sign, letter) = match tok.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, tok),
    };
    let idx = match letter {
        "a" => 0,
        "b" => 1,
        "c" => 2,
        "d" => 3,
        _ => {
            return Err(Error::InvalidInput(format!(
                "bad chart coordinate `{tok}`"
            )))
        }
    };
    Ok((idx, sign))
}

/// Parse a chart action like `a b -c -d` (the image of `(a,b,c,d)`).
fn parse_chart_action(slots: &[&str]) -> Result<IntMat> {
    if slots.len() != 4 {
        return Err(Error::InvalidInput(
            "chart action needs exactly 4 coordinates".to_string(),
        ));
    }
    let mut mat = IntMat::zeros(4, 4);
    let mut used = [false; 4];
    for (row, tok) in slots.iter().enumerate() {
        let (col, sign) = parse_signed_slot(tok)?;
        if used[col] {
            return Err(Error::InvalidInput(format!(
                "chart action repeats coordinate `{tok}`"
            )));
        }
        used[col] = true;
        mat[(row, col)] = int(sign);
    }
    Ok(mat)
}

const SCHEMA_HEADER: &str = "catalog-entry v1";

/// Parse one entry from its line-oriented text form.
pub fn parse_entry(text: &str) -> Result<RealizationEntry> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text.lines().enumerate().peekable();

    let mut name: Option<String> = None;
    let mut manifold: Option<Manifold> = None;
    let mut construction: Option<ConstructionKind> = None;
    let mut basis = CANONICAL.to_string();
    let mut generators: Vec<(String, Isometry)> = Vec::new();
    let mut defined: Vec<(String, Vec<String>)> = Vec::new();
    let mut claimed: Option<(usize, String)> = None;
    let mut split: Option<Vec<usize>> = None;
    let mut orders: BTreeMap<String, u64> = BTreeMap::new();
    let mut fixed_sets: BTreeMap<String, FixedSetProfile> = BTreeMap::new();
    let mut piece_fixed: Vec<(String, usize, FixedSetProfile)> = Vec::new();
    let mut blowup: BTreeMap<String, BlowupDescriptor> = BTreeMap::new();
    let mut charts: Vec<TangentialRep> = Vec::new();
    let mut note: Option<String> = None;
    let mut saw_header = false;
    let mut saw_end = false;

    while let Some((idx, raw)) = lines.next() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != SCHEMA_HEADER {
                return Err(perr(lineno, format!("expected `{SCHEMA_HEADER}`")));
            }
            saw_header = true;
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match keyword {
            "name" => name = Some(rest.to_string()),
            "note" => note = Some(rest.to_string()),
            "manifold" => {
                manifold = Some(Manifold::parse(rest).map_err(|e| perr(lineno, e.to_string()))?)
            }
            "construction" => {
                construction =
                    Some(ConstructionKind::parse(rest).map_err(|e| perr(lineno, e.to_string()))?)
            }
            "basis" => basis = rest.to_string(),
            "fingerprint" => {
                let (ord, label) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| perr(lineno, "fingerprint needs order and label".into()))?;
                let ord = ord
                    .parse::<usize>()
                    .map_err(|_| perr(lineno, format!("bad fingerprint order `{ord}`")))?;
                claimed = Some((ord, label.trim().to_string()));
            }
            "split" => {
                let mut sizes = Vec::new();
                for tok in rest.split_whitespace() {
                    sizes.push(
                        tok.parse::<usize>()
                            .map_err(|_| perr(lineno, format!("bad split size `{tok}`")))?,
                    );
                }
                if sizes.is_empty() {
                    return Err(perr(lineno, "split needs at least one block".into()));
                }
                split = Some(sizes);
            }
            "generator" => {
                let gname = rest.to_string();
                if gname.is_empty() {
                    return Err(perr(lineno, "generator needs a name".into()));
                }
                let m = manifold
                    .ok_or_else(|| perr(lineno, "manifold must precede generators".into()))?;
                let lattice = m.lattice();
                let rank = lattice.rank();
                let mut rows: Vec<Vec<Int>> = Vec::new();
                while rows.len() < rank {
                    let (ridx, rraw) = lines
                        .next()
                        .ok_or_else(|| perr(lineno, format!("matrix for `{gname}` truncated")))?;
                    let rline = rraw.trim();
                    if rline.is_empty() || rline.starts_with('#') {
                        continue;
                    }
                    let mut row = Vec::new();
                    for tok in rline.split_whitespace() {
                        row.push(
                            tok.parse::<i64>().map(int).map_err(|_| {
                                perr(ridx + 1, format!("bad matrix entry `{tok}`"))
                            })?,
                        );
                    }
                    if row.len() != rank {
                        return Err(perr(
                            ridx + 1,
                            format!("matrix row has {} entries, expected {rank}", row.len()),
                        ));
                    }
                    rows.push(row);
                }
                let mat = IntMat::from_rows(rows);
                let iso = Isometry::from_basis(&lattice, &basis, mat)
                    .map_err(|e| perr(lineno, format!("`{gname}`: {e}")))?;
                generators.push((gname, iso));
            }
            "define" => {
                let (dname, prod) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(lineno, "define needs `name = factors`".into()))?;
                let factors: Vec<String> =
                    prod.split_whitespace().map(|s| s.to_string()).collect();
                defined.push((dname.trim().to_string(), factors));
            }
            "order" => {
                let mut it = rest.split_whitespace();
                let ename = it
                    .next()
                    .ok_or_else(|| perr(lineno, "order needs an element name".into()))?;
                let k = it
                    .next()
                    .and_then(|t| t.parse::<u64>().ok())
                    .ok_or_else(|| perr(lineno, "order needs an integer".into()))?;
                orders.insert(ename.to_string(), k);
            }
            "fixed" => {
                let (ename, prof) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| perr(lineno, "fixed needs a name and a profile".into()))?;
                let profile =
                    parse_profile(prof.trim()).map_err(|e| perr(lineno, e.to_string()))?;
                fixed_sets.insert(ename.to_string(), profile);
            }
            "piece" => {
                let mut it = rest.splitn(3, char::is_whitespace);
                let ename = it
                    .next()
                    .ok_or_else(|| perr(lineno, "piece needs a name".into()))?;
                let pidx = it
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| perr(lineno, "piece needs an index".into()))?;
                let prof = it
                    .next()
                    .ok_or_else(|| perr(lineno, "piece needs a profile".into()))?;
                let profile =
                    parse_profile(prof.trim()).map_err(|e| perr(lineno, e.to_string()))?;
                piece_fixed.push((ename.to_string(), pidx, profile));
            }
            "blowup" => {
                let mut it = rest.split_whitespace();
                let ename = it
                    .next()
                    .ok_or_else(|| perr(lineno, "blowup needs a name".into()))?;
                let h_sign = it
                    .next()
                    .and_then(|t| t.parse::<i64>().ok())
                    .filter(|s| s.abs() == 1)
                    .ok_or_else(|| perr(lineno, "blowup needs a sign ±1 on H".into()))?;
                let mut targets = Vec::new();
                for tok in it {
                    let t = tok
                        .parse::<i64>()
                        .map_err(|_| perr(lineno, format!("bad blowup target `{tok}`")))?;
                    if t == 0 {
                        return Err(perr(lineno, "blowup target cannot be 0".into()));
                    }
                    targets.push(t);
                }
                blowup.insert(ename.to_string(), BlowupDescriptor { h_sign, targets });
            }
            "tangential" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 6 {
                    return Err(perr(
                        lineno,
                        "tangential needs: chart, element, 4 coordinates".into(),
                    ));
                }
                let mat =
                    parse_chart_action(&toks[2..]).map_err(|e| perr(lineno, e.to_string()))?;
                let chart = toks[0];
                match charts.iter_mut().find(|c| c.chart == chart) {
                    Some(c) => c.actions.push((toks[1].to_string(), mat)),
                    None => charts.push(TangentialRep {
                        chart: chart.to_string(),
                        actions: vec![(toks[1].to_string(), mat)],
                    }),
                }
            }
            "end" => {
                saw_end = true;
                break;
            }
            _ => return Err(perr(lineno, format!("unknown keyword `{keyword}`"))),
        }
    }

    if !saw_end {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "missing `end`".to_string(),
        });
    }
    let (claimed_order, claimed_label) = claimed.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing `fingerprint`".to_string(),
    })?;
    let entry = RealizationEntry {
        name: name.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `name`".to_string(),
        })?,
        manifold: manifold.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `manifold`".to_string(),
        })?,
        construction: construction.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `construction`".to_string(),
        })?,
        basis,
        generators,
        defined,
        claimed_order,
        claimed_label,
        split,
        orders,
        fixed_sets,
        piece_fixed,
        blowup,
        charts,
        note,
    };
    if entry.generators.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "entry has no generators".to_string(),
        });
    }
    Ok(entry)
}

// ---------------------------------------------------------------------------
// Block assembly
// ---------------------------------------------------------------------------

/// Assemble the block-diagonal isometry of a connected-sum splitting: the
/// given blocks are placed along the diagonal in the named basis of
/// `target`, whose restricted form must itself be block-diagonal with the
/// same block sizes.
pub fn glue_action(
    target: &LorentzianLattice,
    basis_id: &str,
    blocks: &[IntMat],
) -> Result<Isometry> {
    let rank = target.rank();
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    if total != rank || blocks.iter().any(|b| !b.is_square()) {
        return Err(Error::RankMismatch {
            expected: rank,
            got: total,
        });
    }
    let sizes: Vec<usize> = blocks.iter().map(|b| b.nrows()).collect();
    let basis = target.basis_matrix(basis_id)?;
    let basis_gram = basis.transpose().mul(target.gram()).mul(basis);
    check_gram_blocks(&basis_gram, &sizes)?;
    let mut mat = IntMat::zeros(rank, rank);
    let mut off = 0;
    for b in blocks.iter() {
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                mat[(off + r, off + c)] = b[(r, c)].clone();
            }
        }
        off += b.nrows();
    }
    Isometry::from_basis(target, basis_id, mat)
}

fn block_ranges(sizes: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut off = 0;
    for &s in sizes {
        out.push(off..off + s);
        off += s;
    }
    out
}

/// The form written in the split basis must have no cross terms between
/// blocks, otherwise the "splitting" is not an orthogonal one.
fn check_gram_blocks(basis_gram: &IntMat, sizes: &[usize]) -> Result<()> {
    let ranges = block_ranges(sizes);
    for (i, ri) in ranges.iter().enumerate() {
        for (j, rj) in ranges.iter().enumerate() {
            if i == j {
                continue;
            }
            for r in ri.clone() {
                for c in rj.clone() {
                    if !basis_gram[(r, c)].is_zero() {
                        return Err(Error::InvalidInput(format!(
                            "declared splitting is not orthogonal: gram({r},{c}) != 0"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tangential representations
// ---------------------------------------------------------------------------

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// All 384 signed permutation matrices in dimension 4.
pub fn signed_permutations4() -> Vec<IntMat> {
    let mut out = Vec::with_capacity(384);
    for p in permutations4() {
        for signs in 0..16u32 {
            out.push(IntMat::from_fn(4, 4, |r, c| {
                if p[r] == c {
                    if signs & (1 << r) != 0 {
                        -Int::one()
                    } else {
                        Int::one()
                    }
                } else {
                    Int::zero()
                }
            }));
        }
    }
    out
}

fn subset_product(mats: &[&IntMat], n: usize) -> IntMat {
    let mut acc = IntMat::identity(n);
    for m in mats {
        acc = acc.mul(m);
    }
    acc
}

/// The image of a rep: all subset products of its (commuting, involutive)
/// element matrices.
fn rep_image(rep: &TangentialRep) -> Vec<IntMat> {
    let k = rep.actions.len();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0..(1u32 << k) {
        let chosen: Vec<&IntMat> = rep
            .actions
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, (_, m))| m)
            .collect();
        out.push(subset_product(&chosen, 4));
    }
    out
}

/// Search for a signed permutation `P` with `det P = −1` conjugating `r1`
/// to `r2` elementwise (the gluing identification reverses orientation onto
/// the reversed-orientation piece). When `demand_no_minus_identity` is set
/// — the two-piece gluing rule requires the invariant tangent line to be
/// 1-dimensional — also insists that `−I_4` is absent from both images.
/// Returns the conjugator.
pub fn glue_compatibility(
    r1: &TangentialRep,
    r2: &TangentialRep,
    demand_no_minus_identity: bool,
) -> Result<IntMat> {
    let names1: Vec<&String> = r1.actions.iter().map(|(n, _)| n).collect();
    let names2: Vec<&String> = r2.actions.iter().map(|(n, _)| n).collect();
    if names1 != names2 {
        return Err(Error::InvalidInput(
            "tangential charts list different elements".to_string(),
        ));
    }
    if demand_no_minus_identity {
        let minus = IntMat::identity(4).neg();
        for (label, rep) in [(&r1.chart, r1), (&r2.chart, r2)] {
            if rep_image(rep).contains(&minus) {
                return Err(Error::InvalidInput(format!(
                    "chart `{label}`: -identity lies in the tangential image"
                )));
            }
        }
    }
    for p in signed_permutations4() {
        if p.det() != -Int::one() {
            continue;
        }
        let ok = r1
            .actions
            .iter()
            .zip(r2.actions.iter())
            .all(|((_, m1), (_, m2))| p.mul(m1) == m2.mul(&p));
        if ok {
            return Ok(p);
        }
    }
    Err(Error::InvalidInput(
        "no orientation-reversing signed permutation conjugates the charts".to_string(),
    ))
}

// ---------------------------------------------------------------------------
// Entry verification
// ---------------------------------------------------------------------------

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Report of all checks run against one entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub entry: String,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn push(checks: &mut Vec<CheckOutcome>, name: &str, r: std::result::Result<String, String>) {
    match r {
        Ok(detail) => checks.push(CheckOutcome {
            name: name.to_string(),
            passed: true,
            detail,
        }),
        Err(detail) => checks.push(CheckOutcome {
            name: name.to_string(),
            passed: false,
            detail,
        }),
    }
}

/// Run every mechanical consistency check against an entry.
pub fn verify_entry(e: &RealizationEntry) -> VerifyReport {
    let mut checks: Vec<CheckOutcome> = Vec::new();
    let lattice = e.manifold.lattice();

    // Form preservation: re-assert m^T G m = G for each generator (the
    // parser already constructs Isometry values, so this is a double-entry
    // guard against direct construction of bad entries).
    push(&mut checks, "isometry", {
        let g = lattice.gram();
        let bad: Vec<&str> = e
            .generators
            .iter()
            .filter(|(_, m)| &m.matrix().transpose().mul(g).mul(m.matrix()) != g)
            .map(|(n, _)| n.as_str())
            .collect();
        if bad.is_empty() {
            Ok(format!("{} generators preserve the form", e.generators.len()))
        } else {
            Err(format!("non-isometries: {}", bad.join(", ")))
        }
    });

    let elements = match e.element_map() {
        Ok(m) => m,
        Err(err) => {
            push(&mut checks, "elements", Err(err.to_string()));
            return VerifyReport {
                entry: e.name.clone(),
                checks,
            };
        }
    };

    // Closure and fingerprint.
    let closed = close_group(&lattice, &e.group(), CLOSURE_CAP);
    push(&mut checks, "fingerprint", match &closed {
        Err(err) => Err(format!("group closure failed: {err}")),
        Ok(g) => match isomorphism_fingerprint(g) {
            Err(err) => Err(format!("fingerprint failed: {err}")),
            Ok(fp) => {
                if fp.order == e.claimed_order && fp.label == e.claimed_label {
                    Ok(format!("order {} / {}", fp.order, fp.label))
                } else {
                    Err(format!(
                        "claimed order {} / `{}`, computed order {} / `{}`",
                        e.claimed_order, e.claimed_label, fp.order, fp.label
                    ))
                }
            }
        },
    });

    // Claimed element orders.
    push(&mut checks, "orders", {
        let mut bad = Vec::new();
        for (name, &k) in e.orders.iter() {
            match elements.get(name) {
                None => bad.push(format!("`{name}` unknown")),
                Some(m) => match m.order() {
                    crate::isometry::ElementOrder::Finite(o) if o == k => {}
                    crate::isometry::ElementOrder::Finite(o) => {
                        bad.push(format!("`{name}` has order {o}, claimed {k}"))
                    }
                    crate::isometry::ElementOrder::Infinite(_) => {
                        bad.push(format!("`{name}` has infinite order"))
                    }
                },
            }
        }
        if bad.is_empty() {
            Ok(format!("{} element orders match", e.orders.len()))
        } else {
            Err(bad.join("; "))
        }
    });

    // Fixed-set profiles against the Betti equations.
    push(&mut checks, "betti", {
        let mut bad = Vec::new();
        let mut n_checked = 0;
        for (name, profile) in e.fixed_sets.iter() {
            let m = match elements.get(name) {
                Some(m) => m,
                None => {
                    bad.push(format!("`{name}` unknown"));
                    continue;
                }
            };
            let d = match decompose_involution(&lattice, m) {
                Ok(d) => d,
                Err(err) => {
                    bad.push(format!("`{name}`: {err}"));
                    continue;
                }
            };
            if profile.total_beta1() as usize != d.beta1()
                || profile.total_beta0_plus_beta2() as usize != d.beta0_plus_beta2()
            {
                bad.push(format!(
                    "`{name}`: profile {profile} has (β1, β0+β2) = ({}, {}), equations force ({}, {})",
                    profile.total_beta1(),
                    profile.total_beta0_plus_beta2(),
                    d.beta1(),
                    d.beta0_plus_beta2()
                ));
                continue;
            }
            let complexity = profile
                .components()
                .iter()
                .map(|c| match *c {
                    ComponentKind::Orientable(g) => 2 * g,
                    ComponentKind::NonOrientable(k) => k,
                    ComponentKind::Point => 0,
                })
                .max()
                .unwrap_or(0);
            let caps = ProfileCaps {
                max_components: profile.len().max(4),
                max_complexity: complexity.max(4),
            };
            if !enumerate_profiles(&d, caps).contains(profile) {
                bad.push(format!("`{name}`: profile {profile} not among admissible profiles"));
                continue;
            }
            n_checked += 1;
        }
        if bad.is_empty() {
            Ok(format!("{n_checked} profiles satisfy the Betti equations"))
        } else {
            Err(bad.join("; "))
        }
    });

    // Piece metadata references a declared block.
    if let Some(split) = &e.split {
        push(&mut checks, "piece-indices", {
            let bad: Vec<String> = e
                .piece_fixed
                .iter()
                .filter(|(_, i, _)| *i == 0 || *i > split.len())
                .map(|(n, i, _)| format!("`{n}` piece {i}"))
                .collect();
            if bad.is_empty() {
                Ok(format!("{} piece records in range", e.piece_fixed.len()))
            } else {
                Err(bad.join("; "))
            }
        });
    }

    // Block structure of the declared splitting.
    if matches!(
        e.construction,
        ConstructionKind::Glue | ConstructionKind::EquivariantSum
    ) {
        push(&mut checks, "blocks", check_blocks(e, &lattice));
    }

    // Tangential data.
    if !e.charts.is_empty() {
        push(&mut checks, "tangential", check_tangential(e, &elements));
    }

    // Blowup descriptors regenerate the canonical matrices.
    if !e.blowup.is_empty() {
        push(&mut checks, "blowup", {
            let mut bad = Vec::new();
            for (name, desc) in e.blowup.iter() {
                match elements.get(name) {
                    None => bad.push(format!("`{name}` unknown")),
                    Some(m) => {
                        if desc.targets.len() + 1 != lattice.rank() {
                            bad.push(format!("`{name}`: descriptor rank mismatch"));
                        } else if &desc.matrix() != m.matrix() {
                            bad.push(format!("`{name}`: descriptor regenerates a different matrix"));
                        }
                    }
                }
            }
            if bad.is_empty() {
                Ok(format!("{} descriptors regenerate their matrices", e.blowup.len()))
            } else {
                Err(bad.join("; "))
            }
        });
    }

    VerifyReport {
        entry: e.name.clone(),
        checks,
    }
}

fn check_blocks(e: &RealizationEntry, lattice: &LorentzianLattice) -> std::result::Result<String, String> {
    let split = match &e.split {
        Some(s) => s,
        None => return Err("glue/equivariant_sum entry lacks a split".to_string()),
    };
    if split.iter().sum::<usize>() != lattice.rank() {
        return Err("split sizes do not sum to the rank".to_string());
    }
    let basis = lattice
        .basis_matrix(&e.basis)
        .map_err(|err| err.to_string())?;
    let basis_gram = basis.transpose().mul(lattice.gram()).mul(basis);
    check_gram_blocks(&basis_gram, split).map_err(|err| err.to_string())?;
    let ranges = block_ranges(split);
    let permuting = e.construction == ConstructionKind::EquivariantSum;
    for (name, m) in e.generators.iter() {
        let mat = m.in_basis(lattice, &e.basis).map_err(|err| err.to_string())?;
        for (bi, rb) in ranges.iter().enumerate() {
            // Which block does the image of block bi land in?
            let mut target: Option<usize> = None;
            for c in rb.clone() {
                for r in 0..mat.nrows() {
                    if mat[(r, c)].is_zero() {
                        continue;
                    }
                    let tb = ranges
                        .iter()
                        .position(|rr| rr.contains(&r))
                        .expect("row is inside some block");
                    match target {
                        None => target = Some(tb),
                        Some(t) if t == tb => {}
                        Some(t) => {
                            return Err(format!(
                                "`{name}`: block {} maps across blocks {} and {}",
                                bi + 1,
                                t + 1,
                                tb + 1
                            ))
                        }
                    }
                }
            }
            if !permuting {
                if let Some(t) = target {
                    if t != bi {
                        return Err(format!(
                            "`{name}`: glue entries must preserve each block, block {} maps to {}",
                            bi + 1,
                            t + 1
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{} generators respect the {}-block splitting",
        e.generators.len(),
        split.len()
    ))
}

fn check_tangential(
    e: &RealizationEntry,
    elements: &BTreeMap<String, Isometry>,
) -> std::result::Result<String, String> {
    if e.charts.len() != 2 {
        return Err(format!(
            "expected exactly 2 tangential charts, found {}",
            e.charts.len()
        ));
    }
    for rep in e.charts.iter() {
        // Every chart action must be a special orthogonal involution and the
        // actions must commute (the stabilizer acting at the point is
        // elementary abelian in all recorded constructions).
        for (name, m) in rep.actions.iter() {
            if !elements.contains_key(name) {
                return Err(format!("chart `{}`: unknown element `{name}`", rep.chart));
            }
            if m.det() != Int::one() {
                return Err(format!(
                    "chart `{}`: `{name}` is orientation-reversing",
                    rep.chart
                ));
            }
            if m.mul(m) != IntMat::identity(4) {
                return Err(format!(
                    "chart `{}`: `{name}` is not an involution",
                    rep.chart
                ));
            }
        }
        for (i, (n1, m1)) in rep.actions.iter().enumerate() {
            for (n2, m2) in rep.actions.iter().skip(i + 1) {
                if m1.mul(m2) != m2.mul(m1) {
                    return Err(format!(
                        "chart `{}`: `{n1}` and `{n2}` do not commute",
                        rep.chart
                    ));
                }
            }
        }
        // Homomorphism + faithfulness against the homology group: subset
        // products must identify equal homology elements with equal chart
        // actions and distinct with distinct.
        let homology: Vec<&Isometry> = rep
            .actions
            .iter()
            .map(|(n, _)| elements.get(n).expect("checked above"))
            .collect();
        for (n1, h1) in rep.actions.iter().map(|(n, _)| n).zip(homology.iter()) {
            for (n2, h2) in rep.actions.iter().map(|(n, _)| n).zip(homology.iter()) {
                if !h1.commutes_with(h2) {
                    return Err(format!(
                        "homology elements `{n1}` and `{n2}` do not commute"
                    ));
                }
            }
        }
        let k = rep.actions.len();
        let rank = homology
            .first()
            .map(|m| m.matrix().nrows())
            .unwrap_or(0);
        let mut table: Vec<(IntMat, IntMat)> = Vec::new();
        for mask in 0..(1u32 << k) {
            let hom: Vec<&IntMat> = homology
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, m)| m.matrix())
                .collect();
            let tan: Vec<&IntMat> = rep
                .actions
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, (_, m))| m)
                .collect();
            table.push((subset_product(&hom, rank), subset_product(&tan, 4)));
        }
        for (h1, t1) in table.iter() {
            for (h2, t2) in table.iter() {
                if (h1 == h2) != (t1 == t2) {
                    return Err(format!(
                        "chart `{}`: tangential rep is not a faithful homomorphic image",
                        rep.chart
                    ));
                }
            }
        }
    }
    let demand = e.construction == ConstructionKind::Glue;
    let conj = glue_compatibility(&e.charts[0], &e.charts[1], demand)
        .map_err(|err| err.to_string())?;
    let images: Vec<String> = (0..4)
        .map(|r| {
            let c = (0..4).find(|&c| !conj[(r, c)].is_zero()).expect("signed perm");
            format!(
                "{}{}",
                if conj[(r, c)].is_negative() { "-" } else { "" },
                ["a", "b", "c", "d"][c]
            )
        })
        .collect();
    Ok(format!(
        "charts `{}` and `{}` conjugate by ({})",
        e.charts[0].chart,
        e.charts[1].chart,
        images.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// Parametric family and the built-in catalog
// ---------------------------------------------------------------------------

/// The entry realizing `Ref_H·∏_{k<n} Ref_{E_k}` on `M_n`: negation of the
/// blown-down factor glued with a reflection of the last exceptional piece.
pub fn parametric_entry_mn(n: usize) -> Result<RealizationEntry> {
    if !(1..=8).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "parametric entries exist for 1 ≤ n ≤ 8, got {n}"
        )));
    }
    let lattice = LorentzianLattice::m_n(n);
    let c = glue_action(
        &lattice,
        CANONICAL,
        &[IntMat::identity(n).neg(), IntMat::identity(1)],
    )?;
    let mut orders = BTreeMap::new();
    orders.insert("c".to_string(), 2);
    let mut fixed_sets = BTreeMap::new();
    fixed_sets.insert(
        "c".to_string(),
        FixedSetProfile::new(vec![
            ComponentKind::NonOrientable(n as u32),
            ComponentKind::Point,
        ]),
    );
    let mut blowup = BTreeMap::new();
    let mut targets: Vec<i64> = (1..n as i64).map(|k| -k).collect();
    targets.push(n as i64);
    blowup.insert(
        "c".to_string(),
        BlowupDescriptor {
            h_sign: -1,
            targets,
        },
    );
    let chart_action = parse_chart_action(&["-a", "-b", "c", "d"]).expect("fixed chart literal");
    let charts = vec![
        TangentialRep {
            chart: "p".to_string(),
            actions: vec![("c".to_string(), chart_action.clone())],
        },
        TangentialRep {
            chart: "q".to_string(),
            actions: vec![("c".to_string(), chart_action)],
        },
    ];
    let note = if n == 2 {
        Some(
            "for n = 2 the order-2 class with no holomorphic or anti-holomorphic \
             representative is Ref_E1·Ref_E2, handled by the classification search; \
             this entry realizes Ref_H·Ref_E1 instead"
                .to_string(),
        )
    } else {
        None
    };
    Ok(RealizationEntry {
        name: format!("M_{n}: <c> negation glued with a plane reflection"),
        manifold: Manifold::N(n),
        construction: ConstructionKind::Glue,
        basis: CANONICAL.to_string(),
        generators: vec![("c".to_string(), c)],
        defined: Vec::new(),
        claimed_order: 2,
        claimed_label: "Z/2".to_string(),
        split: Some(vec![n, 1]),
        orders,
        fixed_sets,
        piece_fixed: vec![
            (
                "c".to_string(),
                1,
                FixedSetProfile::new(vec![ComponentKind::NonOrientable(1)]),
            ),
            (
                "c".to_string(),
                2,
                FixedSetProfile::new(vec![ComponentKind::Orientable(0)]),
            ),
        ],
        blowup,
        charts,
        note,
    })
}

const ENTRY_SOURCES: &[&str] = &[
    include_str!("../data/catalog/m0-conjugation.entry"),
    include_str!("../data/catalog/mstar-sections.entry"),
    include_str!("../data/catalog/m1-glue.entry"),
    include_str!("../data/catalog/m2-a-minus-identity.entry"),
    include_str!("../data/catalog/m2-b-minus-b.entry"),
    include_str!("../data/catalog/m2-ab-minus-identity.entry"),
    include_str!("../data/catalog/m2-ab-minus-b.entry"),
    include_str!("../data/catalog/m2-dihedral-sum.entry"),
    include_str!("../data/catalog/m3-order-24.entry"),
];

/// The full set of shipped realizations.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub entries: Vec<RealizationEntry>,
}

impl Catalog {
    /// All shipped entries: the explicit records plus the parametric family
    /// for `1 ≤ n ≤ 8`.
    pub fn builtin() -> Result<Catalog> {
        let mut entries = Vec::new();
        for src in ENTRY_SOURCES {
            entries.push(parse_entry(src)?);
        }
        for n in 1..=8 {
            entries.push(parametric_entry_mn(n)?);
        }
        Ok(Catalog { entries })
    }

    pub fn verify_all(&self) -> Vec<VerifyReport> {
        self.entries.iter().map(verify_entry).collect()
    }

    /// Find a shipped entry on the same manifold whose realized group
    /// contains `g` (then `g` itself is realized by restricting the
    /// action).
    pub fn find_realizing(
        &self,
        lattice: &LorentzianLattice,
        g: &MatrixGroup,
    ) -> Result<Option<&RealizationEntry>> {
        for e in self.entries.iter() {
            let el = e.manifold.lattice();
            if el.name() != lattice.name() {
                continue;
            }
            let closed = close_group(&el, &e.group(), CLOSURE_CAP)?;
            if closed.contains_group(g)? {
                return Ok(Some(e));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::named_m2;
    use crate::lattice::S_BASIS;

    #[test]
    fn builtin_catalog_verifies() {
        let catalog = Catalog::builtin().unwrap();
        assert_eq!(catalog.entries.len(), 9 + 8);
        for report in catalog.verify_all() {
            assert!(
                report.passed(),
                "entry `{}` failed: {:?}",
                report.entry,
                report.failures()
            );
        }
    }

    #[test]
    fn glue_action_examples() {
        // Negation on the blown-down plane plus identity on E1 is the first
        // section generator on M_1.
        let l1 = LorentzianLattice::m_n(1);
        let c1 = glue_action(
            &l1,
            CANONICAL,
            &[IntMat::from_i64(&[&[-1]]), IntMat::from_i64(&[&[1]])],
        )
        .unwrap();
        assert_eq!(c1.matrix(), &IntMat::diag(&[-1, 1]));

        // Identity blocks give the identity.
        let id = glue_action(&l1, CANONICAL, &[IntMat::identity(1), IntMat::identity(1)]).unwrap();
        assert!(id.is_identity());

        // Swap on {S1, S2} plus negation on Sigma assembles the composite
        // A·B.
        let l2 = LorentzianLattice::m_n(2);
        let (a, b, _phi, _psi) = named_m2(&l2);
        let swap = IntMat::from_i64(&[&[0, 1], &[1, 0]]);
        let ab = glue_action(&l2, S_BASIS, &[swap, IntMat::from_i64(&[&[-1]])]).unwrap();
        assert_eq!(ab, a.compose(&b));
    }

    #[test]
    fn glue_action_rejects_non_orthogonal_split() {
        // The canonical basis of M_* has no orthogonal 1+1 splitting: the
        // hyperbolic form pairs the two generators.
        let ls = LorentzianLattice::m_star();
        let err = glue_action(
            &ls,
            CANONICAL,
            &[IntMat::from_i64(&[&[-1]]), IntMat::from_i64(&[&[-1]])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn orientation_condition_rejects_det_plus_one_conjugators() {
        // A pair of commuting quarter-turns in complementary planes: every
        // signed permutation commuting with both has determinant +1, so the
        // only conjugators between the chart and itself are
        // orientation-preserving and compatibility must fail.
        let j_first = IntMat::from_i64(&[
            &[0, -1, 0, 0],
            &[1, 0, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
        ]);
        let j_second = IntMat::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 0, -1],
            &[0, 0, 1, 0],
        ]);
        let r = TangentialRep {
            chart: "p".to_string(),
            actions: vec![("x".to_string(), j_first), ("y".to_string(), j_second)],
        };
        assert!(glue_compatibility(&r, &r, false).is_err());

        // A diagonal involution pair admits an orientation-reversing
        // conjugator (swap two axes with equal signs in every action).
        let r2 = TangentialRep {
            chart: "p".to_string(),
            actions: vec![(
                "c".to_string(),
                parse_chart_action(&["-a", "-b", "c", "d"]).unwrap(),
            )],
        };
        assert!(glue_compatibility(&r2, &r2, true).is_ok());

        // With -identity in the image and the glue rule demanded, rejection
        // comes from the membership check.
        let r3 = TangentialRep {
            chart: "p".to_string(),
            actions: vec![
                (
                    "x".to_string(),
                    parse_chart_action(&["-a", "-b", "c", "d"]).unwrap(),
                ),
                (
                    "y".to_string(),
                    parse_chart_action(&["a", "b", "-c", "-d"]).unwrap(),
                ),
            ],
        };
        assert!(glue_compatibility(&r3, &r3, true).is_err());
    }

    #[test]
    fn corrupted_phi_fails_verification() {
        // Negative control: replace the order-4 generator by an order-2 one
        // and watch the fingerprint and order checks fail by name.
        let catalog = Catalog::builtin().unwrap();
        let mut entry = catalog
            .entries
            .iter()
            .find(|e| e.name.contains("Phi"))
            .expect("dihedral entry is shipped")
            .clone();
        let l2 = LorentzianLattice::m_n(2);
        let (_a, _b, _phi, psi) = named_m2(&l2);
        for (name, m) in entry.generators.iter_mut() {
            if name == "Phi" {
                *m = psi.clone();
            }
        }
        let report = verify_entry(&entry);
        assert!(!report.passed());
        let failing: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
        assert!(failing.contains(&"fingerprint"));
        assert!(failing.contains(&"orders"));
    }

    #[test]
    fn parametric_entries() {
        let e1 = parametric_entry_mn(1).unwrap();
        assert_eq!(e1.generators[0].1.matrix(), &IntMat::diag(&[-1, 1]));
        let e3 = parametric_entry_mn(3).unwrap();
        assert_eq!(
            e3.generators[0].1.matrix(),
            &IntMat::diag(&[-1, -1, -1, 1])
        );
        assert!(verify_entry(&e3).passed());
        let e2 = parametric_entry_mn(2).unwrap();
        assert!(e2.note.is_some());
        assert!(parametric_entry_mn(0).is_err());
        assert!(parametric_entry_mn(9).is_err());
    }

    #[test]
    fn find_realizing_covers_the_four_glue_groups() {
        let catalog = Catalog::builtin().unwrap();
        let l2 = LorentzianLattice::m_n(2);
        let (a, b, _phi, _psi) = named_m2(&l2);
        let minus = Isometry::minus_identity(&l2);
        let ab = a.compose(&b);
        let realized = [
            vec![a.clone(), minus.clone()],
            vec![b.clone(), b.neg()],
            vec![ab.clone(), minus.clone()],
            vec![ab.clone(), b.neg()],
        ];
        for gens in realized.iter() {
            let g = close_group(&l2, &MatrixGroup::from_generators(gens.clone()), 100).unwrap();
            assert!(
                catalog.find_realizing(&l2, &g).unwrap().is_some(),
                "group should be covered"
            );
        }
        // <A, B> is not contained in any shipped entry's group.
        let gab = close_group(
            &l2,
            &MatrixGroup::from_generators(vec![a.clone(), b.clone()]),
            100,
        )
        .unwrap();
        assert!(catalog.find_realizing(&l2, &gab).unwrap().is_none());
    }
}
