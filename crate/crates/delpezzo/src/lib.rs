//! Exact-arithmetic toolkit for the mapping class groups of del Pezzo
//! manifolds `M_n = CP^2 # n(-CP^2)` and `M_* = S^2 x S^2`, modeled as the
//! integral orthogonal groups of their intersection forms.
//!
//! The crate is organized bottom-up:
//!
//! - [`intmat`]: arbitrary-precision integer matrices, Hermite normal form,
//!   integer kernels, characteristic polynomials.
//! - [`lattice`]: the Lorentzian lattices, reflections, sublattices,
//!   eigenlattices, restricted signatures.
//! - [`isometry`]: form-preserving matrices, finite closure, subgroup
//!   enumeration, element orders, isomorphism fingerprints.
//! - [`coxeter`]: the simple-root systems for n = 2, 3 and their parabolic
//!   subgroups.
//! - [`equivariant`]: involution decompositions over Z[Z/2] and fixed-set
//!   profile enumeration.
//! - [`signature`]: ambient/quotient signatures and the involution
//!   signature budget.
//! - [`diophantine`]: exact solvability of `Q(x,x) = k` on small sublattices.
//! - [`obstruction`]: the branching obstruction search, certificate replay,
//!   and subgroup classification.
//! - [`catalog`]: homology-level records of the explicit realizations, with
//!   mechanical consistency checks.
//! - [`report`]: deterministic human- and machine-readable reports backing
//!   the CLI.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals); no
//! floating point is used anywhere.
//!
//! # Quick tour
//!
//! The same snippets appear as concept chapters in the `book/` guide; they
//! are compiled and run as doc-tests here.
//!
//! Lattices, elements and reflections:
//!
//! ```
//! use delpezzo::intmat::int;
//! use delpezzo::lattice::{LorentzianLattice, CANONICAL};
//!
//! let l = LorentzianLattice::m_n(2);
//! let h = l.element(&[1, 0, 0], CANONICAL).unwrap();
//! let e1 = l.element(&[0, 1, 0], CANONICAL).unwrap();
//! assert_eq!(l.norm(&h).unwrap(), int(1));
//! assert_eq!(l.norm(&e1).unwrap(), int(-1));
//! // Ref_{E1} fixes everything orthogonal to E1, in particular H.
//! assert_eq!(l.reflect(&e1, &h).unwrap().coords, h.coords);
//! ```
//!
//! Finite isometry groups and their fingerprints:
//!
//! ```
//! use delpezzo::isometry::{
//!     close_group, isomorphism_fingerprint, named_m2, Isometry, MatrixGroup, CLOSURE_CAP,
//! };
//! use delpezzo::lattice::LorentzianLattice;
//!
//! let l = LorentzianLattice::m_n(2);
//! let (a, b, _, _) = named_m2(&l);
//! let minus = Isometry::minus_identity(&l);
//! let gens = MatrixGroup::from_generators(vec![a, b, minus]);
//! let g = close_group(&l, &gens, CLOSURE_CAP).unwrap();
//! let fp = isomorphism_fingerprint(&g).unwrap();
//! assert_eq!((fp.order, fp.abelian), (8, true));
//! ```
//!
//! Involution decompositions, budgets and surviving fixed-set profiles:
//!
//! ```
//! use delpezzo::equivariant::{decompose_involution, enumerate_profiles, ProfileCaps};
//! use delpezzo::isometry::named_m2;
//! use delpezzo::lattice::LorentzianLattice;
//! use delpezzo::signature::{defect_budget, parity_prune};
//!
//! let l = LorentzianLattice::m_n(2);
//! let (a, _, _, _) = named_m2(&l);
//! let d = decompose_involution(&l, &a).unwrap();
//! assert_eq!((d.t, d.c, d.r), (1, 0, 1));
//! let budget = defect_budget(&l, &a).unwrap();
//! assert_eq!(budget.budget, 1);
//! let surviving: Vec<String> = enumerate_profiles(&d, ProfileCaps::default())
//!     .into_iter()
//!     .filter(|p| parity_prune(&budget, p))
//!     .map(|p| p.to_string())
//!     .collect();
//! assert_eq!(surviving, ["[S2, pt]"]);
//! ```
//!
//! Exact norm equations:
//!
//! ```
//! use delpezzo::diophantine::{
//!     solve_norm_equation, NormEquation, SolvabilityVerdict, UnsolvableReason,
//! };
//! use delpezzo::lattice::{LatticeElement, LorentzianLattice, Sublattice, CANONICAL};
//!
//! let l = LorentzianLattice::m_n(2);
//! let sigma = LatticeElement::from_i64(&[1, -1, -1], CANONICAL);
//! let s = Sublattice::span(&l, &[sigma]).unwrap();
//! // Q(a·Sigma) = -a^2, so Q = 1 has no solution on this line.
//! let eq = NormEquation::new(s, 1, true);
//! match solve_norm_equation(&l, &eq).unwrap() {
//!     SolvabilityVerdict::Unsolvable(UnsolvableReason::DefinitenessBound) => {}
//!     other => panic!("unexpected: {other:?}"),
//! }
//! ```
//!
//! The branching obstruction search:
//!
//! ```
//! use delpezzo::isometry::{close_group, named_m2, MatrixGroup, CLOSURE_CAP};
//! use delpezzo::lattice::LorentzianLattice;
//! use delpezzo::obstruction::{branch_search, LiftHypothesis, VerdictStatus};
//!
//! let l = LorentzianLattice::m_n(2);
//! let (a, b, _, _) = named_m2(&l);
//! let gens = MatrixGroup::from_generators(vec![a.clone(), b.neg()]);
//! let g = close_group(&l, &gens, CLOSURE_CAP).unwrap();
//! let h = LiftHypothesis::new(g, a, vec![b.neg()]).unwrap();
//! let verdict = branch_search(&l, &h).unwrap();
//! assert_eq!(verdict.status, VerdictStatus::Obstructed);
//! ```
//!
//! Certificate replay and the realization catalog:
//!
//! ```
//! use delpezzo::catalog::Catalog;
//! use delpezzo::obstruction::{builtin_certificates, check_certificate, VerdictStatus};
//!
//! for cert in builtin_certificates() {
//!     let checked = check_certificate(&cert).unwrap();
//!     assert_eq!(checked.verdict.status, VerdictStatus::Obstructed);
//! }
//! let catalog = Catalog::builtin().unwrap();
//! assert!(catalog.verify_all().iter().all(|r| r.passed()));
//! ```

pub mod catalog;
pub mod coxeter;
pub mod diophantine;
pub mod equivariant;
pub mod intmat;
pub mod isometry;
pub mod lattice;
pub mod obstruction;
pub mod report;
pub mod signature;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("unknown basis id `{0}`")]
    UnknownBasis(String),
    #[error("change-of-basis matrix must be unimodular (det = ±1), got det = {0}")]
    NotUnimodular(String),
    #[error("unsupported reflection norm {0}: Q(v,v) must be in {{±1, ±2}}")]
    BadReflectionNorm(String),
    #[error("matrix does not preserve the form (gram identity fails)")]
    NotAnIsometry,
    #[error("matrix is not an involution")]
    NotAnInvolution,
    #[error("ambient lattice mismatch")]
    AmbientMismatch,
    #[error("group is not closed; call close_group first")]
    GroupNotClosed,
    #[error("group order {0} exceeds the supported bound {1}")]
    GroupTooLarge(usize, usize),
    #[error("group closure diverged: more than {0} elements")]
    ClosureDiverged(usize),
    #[error("norm equation has rank {0} > 3: unsupported")]
    RankTooLarge(usize),
    #[error("focus element must belong to the hypothesis group")]
    FocusNotInGroup,
    #[error("witness at index {0} does not commute with the focus element")]
    WitnessNotCommuting(usize),
    #[error("certificate rejected at step {step}: {reason}")]
    CertificateRejected { step: usize, reason: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("catalog entry `{entry}` failed check `{check}`: {detail}")]
    CatalogCheck {
        entry: String,
        check: String,
        detail: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
