//! Deterministic reports backing the command-line interface: every command
//! produces a [`Report`] that renders either as an aligned text table or as
//! structured JSON.  Reports are pure functions of their inputs, so
//! replaying a command reproduces its output byte for byte.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::{Catalog, Manifold};
use crate::coxeter::{CoxeterSystem, Finiteness};
use crate::equivariant::{decompose_involution, enumerate_profiles, ProfileCaps};
use crate::intmat::{int, IntMat};
use crate::isometry::{
    close_group, isomorphism_fingerprint, named_m2, enumerate_subgroups, Isometry, MatrixGroup,
    CLOSURE_CAP,
};
use crate::lattice::{LorentzianLattice, S_BASIS_CONVENTION};
use crate::obstruction::{
    branch_search_with, check_certificate, classify_finite_subgroup_with, order2_profile_report,
    Certificate, ComplexFlags, LiftHypothesis, SearchOptions, Verdict, VerdictStatus,
};
use crate::signature::defect_budget;
use crate::{Error, Result};

/// Version string stamped into every report.
pub const ENGINE_VERSION: &str = concat!("delpezzo ", env!("CARGO_PKG_VERSION"));

/// Output format of a rendered report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Structured,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "table" => Ok(Format::Table),
            "structured" => Ok(Format::Structured),
            other => Err(Error::InvalidInput(format!(
                "unknown format `{other}` (expected table|structured)"
            ))),
        }
    }
}

/// One titled block of a report: an optional column-aligned table plus free
/// notes (traces, verdicts, conventions).
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn notes(title: &str, notes: Vec<String>) -> Section {
        Section {
            title: title.to_string(),
            columns: vec![],
            rows: vec![],
            notes,
        }
    }

    pub fn table(title: &str, columns: &[&str], rows: Vec<Vec<String>>) -> Section {
        Section {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            notes: vec![],
        }
    }
}

/// A complete, deterministic command report.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Report {
    pub engine: String,
    pub command: String,
    pub conventions: Vec<String>,
    pub sections: Vec<Section>,
    /// Highest exit class produced: 0 completed, 3 contains an undetermined
    /// verdict.  Rejected input never reaches a report.
    pub exit_code: i32,
}

impl Report {
    fn new(command: impl Into<String>) -> Report {
        Report {
            engine: ENGINE_VERSION.to_string(),
            command: command.into(),
            conventions: vec![
                S_BASIS_CONVENTION.to_string(),
                "matrices act on column vectors of canonical coordinates unless a basis is declared"
                    .to_string(),
            ],
            sections: vec![],
            exit_code: 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Table => {
                let mut out = String::new();
                out.push_str(&format!("# {} — {}\n", self.engine, self.command));
                for c in &self.conventions {
                    out.push_str(&format!("note: {c}\n"));
                }
                for sec in &self.sections {
                    out.push('\n');
                    out.push_str(&format!("## {}\n", sec.title));
                    if !sec.columns.is_empty() {
                        let mut widths: Vec<usize> =
                            sec.columns.iter().map(|c| c.len()).collect();
                        for row in &sec.rows {
                            for (i, cell) in row.iter().enumerate() {
                                if i < widths.len() {
                                    widths[i] = widths[i].max(cell.len());
                                }
                            }
                        }
                        let fmt_row = |cells: &[String]| -> String {
                            cells
                                .iter()
                                .enumerate()
                                .map(|(i, c)| {
                                    format!("{:w$}", c, w = widths.get(i).copied().unwrap_or(0))
                                })
                                .collect::<Vec<_>>()
                                .join("  ")
                                .trim_end()
                                .to_string()
                        };
                        out.push_str(&fmt_row(&sec.columns));
                        out.push('\n');
                        out.push_str(
                            &widths
                                .iter()
                                .map(|w| "-".repeat(*w))
                                .collect::<Vec<_>>()
                                .join("  "),
                        );
                        out.push('\n');
                        for row in &sec.rows {
                            out.push_str(&fmt_row(row));
                            out.push('\n');
                        }
                    }
                    for n in &sec.notes {
                        out.push_str(&format!("- {n}\n"));
                    }
                }
                out
            }
        }
    }
}

fn verdict_cell(v: &Verdict) -> String {
    v.status.to_string()
}

fn bump_exit(report: &mut Report, v: &Verdict) {
    if v.status == VerdictStatus::Undetermined {
        report.exit_code = 3;
    }
}

/// Human names for the elements of the reflection candidate on the rank-3
/// lattice.
fn m2_element_names(lattice: &LorentzianLattice) -> BTreeMap<IntMat, String> {
    let (a, b, _, _) = named_m2(lattice);
    let id = Isometry::identity(lattice);
    let ab = a.compose(&b);
    let mut names = BTreeMap::new();
    for (m, n) in [
        (id.clone(), "I"),
        (a.clone(), "A"),
        (b.clone(), "B"),
        (ab.clone(), "AB"),
        (id.neg(), "-I"),
        (a.neg(), "-A"),
        (b.neg(), "-B"),
        (ab.neg(), "-AB"),
    ] {
        names.insert(m.matrix().clone(), n.to_string());
    }
    names
}

fn describe_group(g: &MatrixGroup, names: &BTreeMap<IntMat, String>) -> String {
    let mut parts = Vec::new();
    for e in g.elements().unwrap_or(&[]) {
        if e.is_identity() {
            continue;
        }
        match names.get(e.matrix()) {
            Some(n) => parts.push(n.clone()),
            None => parts.push("?".to_string()),
        }
    }
    format!("{{{}}}", parts.join(", "))
}

/// The full subgroup classification table for the rank-3 lattice, or the
/// three maximal candidates for the rank-4 lattice.
pub fn cmd_classify(n: usize, catalog: &Catalog, certificates: &[Certificate]) -> Result<Report> {
    let mut report = Report::new(format!("classify --n {n}"));
    match n {
        2 => {
            let lattice = LorentzianLattice::m_n(2);
            let (a, b, phi, psi) = named_m2(&lattice);
            let minus = Isometry::minus_identity(&lattice);
            let names = m2_element_names(&lattice);
            let g1 = close_group(
                &lattice,
                &MatrixGroup::from_generators(vec![a, b, minus.clone()]),
                CLOSURE_CAP,
            )?;
            let mut rows = Vec::new();
            let mut subgroups = enumerate_subgroups(&g1)?;
            subgroups.sort_by_key(|g| {
                (
                    g.elements().map(|e| e.len()).unwrap_or(0),
                    g.elements()
                        .map(|e| e.iter().map(|m| m.matrix().clone()).collect::<Vec<_>>())
                        .unwrap_or_default(),
                )
            });
            for sub in &subgroups {
                let v = classify_finite_subgroup_with(&lattice, sub, catalog, certificates)?;
                bump_exit(&mut report, &v);
                let fp = isomorphism_fingerprint(sub)?;
                rows.push(vec![
                    describe_group(sub, &names),
                    fp.order.to_string(),
                    fp.label,
                    verdict_cell(&v),
                ]);
            }
            report.sections.push(Section::table(
                "subgroups of the reflection candidate (order 8)",
                &["elements", "order", "type", "verdict"],
                rows,
            ));

            let g2 = close_group(
                &lattice,
                &MatrixGroup::from_generators(vec![phi, psi, minus]),
                CLOSURE_CAP,
            )?;
            let v = classify_finite_subgroup_with(&lattice, &g2, catalog, certificates)?;
            bump_exit(&mut report, &v);
            let fp = isomorphism_fingerprint(&g2)?;
            report.sections.push(Section::table(
                "dihedral candidate",
                &["order", "type", "verdict"],
                vec![vec![fp.order.to_string(), fp.label, verdict_cell(&v)]],
            ));
        }
        3 => {
            let lattice = LorentzianLattice::m_n(3);
            let mut rows = Vec::new();
            for (label, gens) in m3_maximal_candidates(&lattice) {
                let g = MatrixGroup::from_generators(gens);
                let closed = close_group(&lattice, &g, CLOSURE_CAP)?;
                let v = classify_finite_subgroup_with(&lattice, &closed, catalog, certificates)?;
                bump_exit(&mut report, &v);
                let fp = isomorphism_fingerprint(&closed)?;
                rows.push(vec![
                    label,
                    fp.order.to_string(),
                    fp.label,
                    verdict_cell(&v),
                ]);
            }
            report.sections.push(Section::table(
                "maximal finite candidates",
                &["generators", "order", "type", "verdict"],
                rows,
            ));
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "classify supports n = 2 or 3, got {other}"
            )))
        }
    }
    Ok(report)
}

/// Named generator sets of the three maximal rank-4 candidates.
pub fn m3_maximal_candidates(
    lattice: &LorentzianLattice,
) -> Vec<(String, Vec<Isometry>)> {
    let psi = Isometry::new(
        lattice,
        IntMat::from_i64(&[
            &[2, 1, 1, 1],
            &[-1, 0, -1, -1],
            &[-1, -1, 0, -1],
            &[-1, -1, -1, 0],
        ]),
    )
    .expect("quadratic involution");
    let s12 = Isometry::new(
        lattice,
        IntMat::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 0, 1, 0],
            &[0, 1, 0, 0],
            &[0, 0, 0, 1],
        ]),
    )
    .expect("swap 12");
    let s23 = Isometry::new(
        lattice,
        IntMat::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 0, 1],
            &[0, 0, 1, 0],
        ]),
    )
    .expect("swap 23");
    let r3 = Isometry::new(
        lattice,
        IntMat::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, -1],
        ]),
    )
    .expect("conjugation 3");
    let minus = Isometry::minus_identity(lattice);
    vec![
        (
            "<s12, s23, r3, -I>".to_string(),
            vec![s12.clone(), s23.clone(), r3.clone(), minus.clone()],
        ),
        (
            "<psi, s12, r3, -I>".to_string(),
            vec![psi.clone(), s12.clone(), r3, minus.clone()],
        ),
        ("<psi, s12, s23, -I>".to_string(), vec![psi, s12, s23, minus]),
    ]
}

/// Parsed matrix-input file: a manifold header, an optional basis line, and
/// a sequence of named matrices.
#[derive(Debug, Clone)]
pub struct MatrixInput {
    pub manifold: Manifold,
    pub basis: String,
    pub matrices: Vec<(String, IntMat)>,
}

/// Parses the plain-text matrix format: a `<command> v1` header line,
/// `manifold <label>`, optional `basis <id>`, then blocks of
/// `<role>` followed by one whitespace-separated row per line.
pub fn parse_matrix_input(text: &str, expected_header: &str) -> Result<MatrixInput> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "empty input".into(),
    })?;
    if header != expected_header {
        return Err(Error::Parse {
            line: hline,
            msg: format!("expected `{expected_header}` header, got `{header}`"),
        });
    }
    let mut manifold: Option<Manifold> = None;
    let mut basis = crate::lattice::CANONICAL.to_string();
    let mut matrices = Vec::new();
    while let Some((no, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        match key {
            "manifold" => {
                let label = toks.next().ok_or(Error::Parse {
                    line: no,
                    msg: "manifold requires a label".into(),
                })?;
                manifold = Some(Manifold::parse(label)?);
            }
            "basis" => {
                basis = toks
                    .next()
                    .ok_or(Error::Parse {
                        line: no,
                        msg: "basis requires an id".into(),
                    })?
                    .to_string();
            }
            role => {
                let m = manifold.ok_or(Error::Parse {
                    line: no,
                    msg: "manifold must be declared before matrices".into(),
                })?;
                let rank = m.lattice().rank();
                let mut mat = IntMat::zeros(rank, rank);
                for i in 0..rank {
                    let (rno, row) = lines.next().ok_or(Error::Parse {
                        line: no,
                        msg: format!("matrix `{role}`: missing row {i}"),
                    })?;
                    let entries: Vec<&str> = row.split_whitespace().collect();
                    if entries.len() != rank {
                        return Err(Error::Parse {
                            line: rno,
                            msg: format!("expected {rank} entries, got {}", entries.len()),
                        });
                    }
                    for (j, e) in entries.iter().enumerate() {
                        mat[(i, j)] = int(e.parse::<i64>().map_err(|_| Error::Parse {
                            line: rno,
                            msg: format!("bad integer `{e}`"),
                        })?);
                    }
                }
                matrices.push((role.to_string(), mat));
            }
        }
    }
    Ok(MatrixInput {
        manifold: manifold.ok_or(Error::Parse {
            line: 0,
            msg: "input missing `manifold`".into(),
        })?,
        basis,
        matrices,
    })
}

/// Validates an isometry with a row/column diagnostic on failure.
pub fn isometry_checked(
    lattice: &LorentzianLattice,
    basis: &str,
    name: &str,
    mat: &IntMat,
) -> Result<Isometry> {
    match Isometry::from_basis(lattice, basis, mat.clone()) {
        Ok(m) => Ok(m),
        Err(Error::NotAnIsometry) => {
            // Locate the first failing entry of the Gram identity in the
            // declared basis for a precise diagnostic.
            let c = lattice.basis_matrix(basis)?;
            let gram_b = c.transpose().mul(lattice.gram()).mul(c);
            let lhs = mat.transpose().mul(&gram_b).mul(mat);
            for i in 0..mat.nrows() {
                for j in 0..mat.nrows() {
                    if lhs[(i, j)] != gram_b[(i, j)] {
                        return Err(Error::InvalidInput(format!(
                            "matrix `{name}` does not preserve the form: Gram identity fails at row {i}, col {j} ({} != {})",
                            lhs[(i, j)],
                            gram_b[(i, j)]
                        )));
                    }
                }
            }
            Err(Error::NotAnIsometry)
        }
        Err(e) => Err(e),
    }
}

/// Runs the automatic branch search on a parsed hypothesis file: the first
/// matrix is the focus, the rest are commuting witnesses.
pub fn cmd_obstruct(input: &str, opts: SearchOptions) -> Result<Report> {
    let parsed = parse_matrix_input(input, "obstruct v1")?;
    let lattice = parsed.manifold.lattice();
    let mut isometries = Vec::new();
    for (name, mat) in &parsed.matrices {
        isometries.push((name.clone(), isometry_checked(&lattice, &parsed.basis, name, mat)?));
    }
    let focus_pos = parsed
        .matrices
        .iter()
        .position(|(n, _)| n == "focus")
        .ok_or_else(|| Error::InvalidInput("input declares no `focus` matrix".into()))?;
    let focus = isometries[focus_pos].1.clone();
    let witnesses: Vec<Isometry> = isometries
        .iter()
        .enumerate()
        .filter(|(i, (n, _))| *i != focus_pos && n == "witness")
        .map(|(_, (_, m))| m.clone())
        .collect();
    let mut gens = vec![focus.clone()];
    gens.extend(witnesses.iter().cloned());
    let group = close_group(&lattice, &MatrixGroup::from_generators(gens), CLOSURE_CAP)?;
    let hypothesis = LiftHypothesis::new(group, focus, witnesses)?;
    let verdict = branch_search_with(&lattice, &hypothesis, opts)?;

    let mut report = Report::new(format!("obstruct ({})", parsed.manifold.label()));
    report.sections.push(Section::notes(
        "hypothesis",
        vec![
            format!("manifold: {}", parsed.manifold.label()),
            format!("basis: {}", parsed.basis),
            format!("witnesses: {}", hypothesis.commuting_witnesses.len()),
        ],
    ));
    bump_exit(&mut report, &verdict);
    let mut notes = vec![format!("verdict: {}", verdict.status)];
    notes.extend(verdict.trace);
    report.sections.push(Section::notes("branch search", notes));
    Ok(report)
}

/// The designated order-2 class whose complex realizability the theorem
/// settles for each manifold.
pub fn designated_involution(m: Manifold) -> Result<Isometry> {
    let lattice = m.lattice();
    match m {
        Manifold::Star => Ok(Isometry::minus_identity(&lattice)),
        Manifold::N(0) => Ok(Isometry::minus_identity(&lattice)),
        Manifold::N(2) => {
            // Product of the two blowup-class reflections.
            Isometry::new(
                &lattice,
                IntMat::from_i64(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
            )
        }
        Manifold::N(_) => {
            // Reflection in H composed with the reflections in E_1..E_{n-1}:
            // negates all canonical vectors except the last blowup class.
            let rank = lattice.rank();
            let mut mat = IntMat::identity(rank);
            for i in 0..rank - 1 {
                mat[(i, i)] = int(-1);
            }
            Isometry::new(&lattice, mat)
        }
    }
}

/// Complex-structure feasibility report for the designated class of one
/// manifold.
pub fn cmd_complex_flags(m: Manifold, catalog: &Catalog) -> Result<Report> {
    let lattice = m.lattice();
    let c = designated_involution(m)?;
    let r = order2_profile_report(&lattice, &c, ComplexFlags::both())?;
    let mut report = Report::new(format!("complex-flags --n {}", m.label()));

    report.sections.push(Section::notes(
        "involution",
        vec![
            format!(
                "decomposition (t, c, r) = ({}, {}, {})",
                r.decomposition.t, r.decomposition.c, r.decomposition.r
            ),
            format!(
                "signature budget: 2*{} - {} = {}",
                r.budget.sigma_quotient, r.budget.sigma_m, r.budget.budget
            ),
            format!(
                "admissible profiles: {}",
                r.admissible
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" | ")
            ),
        ],
    ));

    let mut bi = vec![format!(
        "biholomorphic involution: {}",
        if r.biholomorphic.feasible {
            "no homological obstruction"
        } else {
            "infeasible"
        }
    )];
    bi.extend(r.biholomorphic.notes.clone());
    report.sections.push(Section::notes("biholomorphic filter", bi));

    let mut anti = vec![format!(
        "anti-biholomorphic involution: {}",
        if r.anti_biholomorphic.feasible {
            "no isolated-point objection"
        } else {
            "infeasible"
        }
    )];
    anti.extend(r.anti_biholomorphic.notes.clone());
    report
        .sections
        .push(Section::notes("anti-biholomorphic filter", anti));

    let cyclic = close_group(
        &lattice,
        &MatrixGroup::from_generators(vec![c]),
        CLOSURE_CAP,
    )?;
    let reference = catalog
        .find_realizing(&lattice, &cyclic)?
        .map(|e| e.name.clone())
        .unwrap_or_else(|| "none".to_string());
    report.sections.push(Section::notes(
        "smooth realization",
        vec![format!("catalog reference: {reference}")],
    ));
    Ok(report)
}

/// Pair-order table, Gram consistency, parabolic finiteness, and the
/// maximal finite candidates for the rank-3 or rank-4 simple-root system.
pub fn cmd_coxeter(n: usize) -> Result<Report> {
    if n != 2 && n != 3 {
        return Err(Error::InvalidInput(format!(
            "coxeter supports n = 2 or 3, got {n}"
        )));
    }
    let sys = CoxeterSystem::new(n);
    let mut report = Report::new(format!("coxeter --n {n}"));

    let table = sys.pair_order_table();
    let names = sys.root_names();
    let mut rows = Vec::new();
    for (i, row) in table.iter().enumerate() {
        let mut cells = vec![names[i].clone()];
        cells.extend(row.iter().map(|o| o.to_string()));
        rows.push(cells);
    }
    let mut columns = vec!["root".to_string()];
    columns.extend(names.iter().cloned());
    report.sections.push(Section {
        title: "pair orders".to_string(),
        columns,
        rows,
        notes: vec![],
    });

    let gram = sys.gram_consistency_check();
    report.sections.push(Section::notes(
        "gram consistency",
        if gram.pass {
            vec!["pass".to_string()]
        } else {
            gram.failures.clone()
        },
    ));

    let mut rows = Vec::new();
    for omit in 0..names.len() {
        let v = sys.parabolic_subgroup(omit)?;
        let cell = match &v.finiteness {
            Finiteness::Finite { order } => format!("finite, order {order}"),
            Finiteness::Infinite { witness_word, .. } => format!(
                "infinite (witness word length {})",
                witness_word.len()
            ),
        };
        rows.push(vec![v.omitted_root.clone(), cell]);
    }
    report.sections.push(Section::table(
        "parabolic subgroups (omitting one root)",
        &["omitted root", "finiteness"],
        rows,
    ));

    let mut rows = Vec::new();
    for g in sys.maximal_finite_candidates(true)? {
        let fp = isomorphism_fingerprint(&g)?;
        rows.push(vec![fp.order.to_string(), fp.label]);
    }
    report.sections.push(Section::table(
        "maximal finite candidates (with -I)",
        &["order", "type"],
        rows,
    ));
    Ok(report)
}

/// Lists the shipped realization catalog.
pub fn cmd_catalog_list(catalog: &Catalog) -> Result<Report> {
    let mut report = Report::new("catalog list");
    let mut rows = Vec::new();
    for e in &catalog.entries {
        rows.push(vec![
            e.name.clone(),
            e.manifold.label(),
            e.construction.label().to_string(),
            e.claimed_order.to_string(),
            e.claimed_label.clone(),
        ]);
    }
    report.sections.push(Section::table(
        "realization entries",
        &["name", "manifold", "construction", "order", "type"],
        rows,
    ));
    Ok(report)
}

/// Verifies every shipped catalog entry and reports per-check outcomes.
pub fn cmd_catalog_verify(catalog: &Catalog) -> Result<Report> {
    let mut report = Report::new("catalog verify");
    let mut rows = Vec::new();
    let mut all_pass = true;
    for vr in catalog.verify_all() {
        for check in &vr.checks {
            if !check.passed {
                all_pass = false;
            }
            rows.push(vec![
                vr.entry.clone(),
                check.name.clone(),
                if check.passed { "pass" } else { "FAIL" }.to_string(),
                check.detail.clone(),
            ]);
        }
    }
    report.sections.push(Section::table(
        "entry checks",
        &["entry", "check", "status", "detail"],
        rows,
    ));
    report.sections.push(Section::notes(
        "summary",
        vec![if all_pass {
            "all entries pass".to_string()
        } else {
            "FAILURES present".to_string()
        }],
    ));
    if !all_pass {
        report.exit_code = 3;
    }
    Ok(report)
}

/// Prints `(t, c, r)`, the signature budget and the admissible profiles for
/// an involution given in the matrix-input format.
pub fn cmd_decompose(input: &str, caps: ProfileCaps) -> Result<Report> {
    let parsed = parse_matrix_input(input, "decompose v1")?;
    let lattice = parsed.manifold.lattice();
    let (name, mat) = parsed
        .matrices
        .first()
        .ok_or_else(|| Error::InvalidInput("input declares no matrix".into()))?;
    let m = isometry_checked(&lattice, &parsed.basis, name, mat)?;
    let d = decompose_involution(&lattice, &m)?;
    let budget = defect_budget(&lattice, &m)?;
    let profiles = enumerate_profiles(&d, caps);
    let mut report = Report::new(format!("decompose ({})", parsed.manifold.label()));
    report.sections.push(Section::notes(
        "involution",
        vec![
            format!("decomposition (t, c, r) = ({}, {}, {})", d.t, d.c, d.r),
            format!(
                "betti constraints: beta1 = {}, beta0 + beta2 = {}",
                d.beta1(),
                d.beta0_plus_beta2()
            ),
            format!(
                "signature budget: 2*{} - {} = {}",
                budget.sigma_quotient, budget.sigma_m, budget.budget
            ),
        ],
    ));
    report.sections.push(Section::notes(
        "profiles",
        profiles.iter().map(|p| p.to_string()).collect(),
    ));
    Ok(report)
}

/// Replays a set of certificates, reporting per-certificate verdicts.
pub fn cmd_certificates(certs: &[Certificate]) -> Result<Report> {
    let mut report = Report::new("certificates");
    let mut rows = Vec::new();
    for c in certs {
        let checked = check_certificate(c)?;
        rows.push(vec![
            checked.name.clone(),
            checked.manifold.label(),
            checked.group.order()?.to_string(),
            checked.verdict.status.to_string(),
        ]);
    }
    report.sections.push(Section::table(
        "certificates",
        &["name", "manifold", "group order", "verdict"],
        rows,
    ));
    Ok(report)
}
