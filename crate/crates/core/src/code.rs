//! Parity-check codes with GL(m, F_q) coefficients.
//!
//! Two ensembles are built here: regular `(dl, dr)` codes sampled from the socket
//! configuration model, and spatially-coupled `(dl, dr, L)` codes obtained by
//! lifting a band base matrix with random `M × M` permutations. In both cases every
//! edge of the binary skeleton gets its own uniform coefficient from GL(m, F_q).

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{random_permutation, Elem, Field, GlMatrix, Matrix};

const SKELETON_ATTEMPTS: usize = 100;

/// Checks `dr/dl ∈ ℤ`, `dr/dl ≥ 2`, `dl ≥ 1`.
pub fn validate_degrees(dl: usize, dr: usize) -> Result<()> {
    if dl == 0 {
        return Err(Error::Parameter("dl must be at least 1".into()));
    }
    if !dr.is_multiple_of(dl) {
        return Err(Error::Parameter(format!(
            "dr/dl must be an integer, got dr = {dr}, dl = {dl}"
        )));
    }
    if dr / dl < 2 {
        return Err(Error::Parameter(format!(
            "dr/dl must be at least 2, got {dr}/{dl}"
        )));
    }
    Ok(())
}

/// Protograph adjacency matrix with edge multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl BaseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<BaseMatrix> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} base matrix",
                entries.len()
            )));
        }
        Ok(BaseMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn row_weights(&self) -> Vec<u32> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).sum())
            .collect()
    }

    pub fn col_weights(&self) -> Vec<u32> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).sum())
            .collect()
    }

    /// Rows rendered as `1`/space strings, trailing spaces trimmed.
    pub fn pattern(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| {
                let s: String = (0..self.cols)
                    .map(|c| if self.get(r, c) > 0 { '1' } else { ' ' })
                    .collect();
                s.trim_end().to_string()
            })
            .collect()
    }
}

/// Band base matrix of the `(dl, dr, L)` coupled ensemble.
///
/// `L + dl − 1` rows and `(dr/dl)·L` columns; column `j` belongs to section
/// `j / (dr/dl)` and has ones in rows `s..s+dl`.
pub fn base_matrix_coupled(dl: usize, dr: usize, coupling: usize) -> Result<BaseMatrix> {
    validate_degrees(dl, dr)?;
    if coupling == 0 {
        return Err(Error::Parameter("coupling number L must be at least 1".into()));
    }
    let ratio = dr / dl;
    let rows = coupling + dl - 1;
    let cols = ratio * coupling;
    let mut entries = vec![0u32; rows * cols];
    for c in 0..cols {
        let s = c / ratio;
        for r in s..s + dl {
            entries[r * cols + c] = 1;
        }
    }
    BaseMatrix::new(rows, cols, entries)
}

/// Sparse 0/1 matrix stored as per-row column lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBinary {
    pub rows: usize,
    pub cols: usize,
    pub row_support: Vec<Vec<usize>>,
}

impl SparseBinary {
    pub fn row_weights(&self) -> Vec<usize> {
        self.row_support.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for row in &self.row_support {
            for &c in row {
                w[c] += 1;
            }
        }
        w
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.cols]; self.rows];
        for (r, row) in self.row_support.iter().enumerate() {
            for &c in row {
                d[r][c] = 1;
            }
        }
        d
    }
}

/// Replaces every 1 of `base` with an independent uniform `M × M` permutation
/// block and every 0 with a zero block.
pub fn lift<R: Rng + ?Sized>(base: &BaseMatrix, lifting: usize, rng: &mut R) -> Result<SparseBinary> {
    if lifting == 0 {
        return Err(Error::Parameter("lifting number M must be at least 1".into()));
    }
    let mut row_support = vec![Vec::new(); base.rows * lifting];
    for r in 0..base.rows {
        for c in 0..base.cols {
            match base.get(r, c) {
                0 => {}
                1 => {
                    let perm = random_permutation(lifting, rng);
                    for (i, &p) in perm.iter().enumerate() {
                        row_support[r * lifting + i].push(c * lifting + p);
                    }
                }
                e => {
                    return Err(Error::Parameter(format!(
                        "base entry ({r}, {c}) has multiplicity {e}; only 0/1 base matrices can be lifted"
                    )))
                }
            }
        }
    }
    Ok(SparseBinary {
        rows: base.rows * lifting,
        cols: base.cols * lifting,
        row_support,
    })
}

/// Binary skeleton of a regular `(dl, dr)` code with `M·dl` checks and `M·dr`
/// variables, without repeated (check, variable) incidences.
///
/// Sockets are matched by a uniform permutation; any duplicate incidence is then
/// removed by swapping its socket with a random socket of another check, when the
/// swap introduces no new duplicate. If repair stalls the permutation is redrawn.
pub fn regular_skeleton<R: Rng + ?Sized>(
    dl: usize,
    dr: usize,
    lifting: usize,
    rng: &mut R,
) -> Result<SparseBinary> {
    validate_degrees(dl, dr)?;
    if lifting == 0 {
        return Err(Error::Parameter("M must be at least 1".into()));
    }
    let n_vars = lifting * dr;
    let n_checks = lifting * dl;
    let n_sockets = n_vars * dl;
    let mut sockets: Vec<usize> = (0..n_sockets).map(|s| s / dl).collect();
    for _ in 0..SKELETON_ATTEMPTS {
        sockets.shuffle(rng);
        let mut checks: Vec<Vec<usize>> = sockets.chunks(dr).map(<[usize]>::to_vec).collect();
        if repair_duplicates(&mut checks, 20 * n_sockets, rng) {
            return Ok(SparseBinary {
                rows: n_checks,
                cols: n_vars,
                row_support: checks,
            });
        }
    }
    Err(Error::Construction(format!(
        "no simple ({dl}, {dr}) graph found with M = {lifting} after {SKELETON_ATTEMPTS} attempts"
    )))
}

fn first_duplicate(check: &[usize]) -> Option<usize> {
    (1..check.len()).find(|&i| check[..i].contains(&check[i]))
}

fn repair_duplicates<R: Rng + ?Sized>(checks: &mut [Vec<usize>], budget: usize, rng: &mut R) -> bool {
    let n = checks.len();
    let mut tries = 0;
    for a in 0..n {
        while let Some(i) = first_duplicate(&checks[a]) {
            if n < 2 {
                return false;
            }
            loop {
                tries += 1;
                if tries > budget {
                    return false;
                }
                let b = rng.gen_range(0..n);
                if b == a {
                    continue;
                }
                let j = rng.gen_range(0..checks[b].len());
                let (v, w) = (checks[a][i], checks[b][j]);
                if checks[b].contains(&v) || checks[a].contains(&w) {
                    continue;
                }
                checks[a][i] = w;
                checks[b][j] = v;
                break;
            }
        }
    }
    true
}

/// One nonzero entry `h_{i,j}` of the parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub var: usize,
    pub coeff: GlMatrix,
}

/// Construction parameters recorded alongside a code.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMeta {
    #[serde(rename = "L")]
    pub coupling: Option<usize>,
    #[serde(rename = "M")]
    pub lifting: Option<usize>,
    pub dl: Option<usize>,
    pub dr: Option<usize>,
    pub seed: Option<u64>,
}

/// A GL(m, F_q)-valued sparse parity-check matrix.
///
/// A word `(x_1, …, x_N)` with `x_j ∈ F_q^m` is a codeword when
/// `Σ_{j ∈ ∂i} h_{i,j} x_j = 0` for every check `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckCode {
    field: Field,
    m: usize,
    n_vars: usize,
    checks: Vec<Vec<Edge>>,
    meta: CodeMeta,
}

impl ParityCheckCode {
    pub fn new(field: Field, m: usize, n_vars: usize, rows: Vec<Vec<(usize, Matrix)>>) -> Result<ParityCheckCode> {
        if m == 0 {
            return Err(Error::Parameter("symbol dimension m must be positive".into()));
        }
        let mut checks = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            let mut seen = HashSet::new();
            let mut edges = Vec::with_capacity(row.len());
            for (var, coeff) in row {
                if var >= n_vars {
                    return Err(Error::Shape(format!(
                        "check {i} references variable {var}, code has {n_vars}"
                    )));
                }
                if !seen.insert(var) {
                    return Err(Error::Shape(format!(
                        "check {i} references variable {var} twice"
                    )));
                }
                if coeff.field() != field || coeff.rows() != m || coeff.cols() != m {
                    return Err(Error::Shape(format!(
                        "coefficient for ({i}, {var}) is {}x{} over F_{}, expected {m}x{m} over F_{}",
                        coeff.rows(),
                        coeff.cols(),
                        coeff.field().q(),
                        field.q()
                    )));
                }
                edges.push(Edge {
                    var,
                    coeff: GlMatrix::new(coeff)?,
                });
            }
            checks.push(edges);
        }
        Ok(ParityCheckCode {
            field,
            m,
            n_vars,
            checks,
            meta: CodeMeta::default(),
        })
    }

    /// Attaches an independent uniform GL(m, F_q) coefficient to every edge of `skeleton`.
    pub fn from_skeleton<R: Rng + ?Sized>(
        skeleton: &SparseBinary,
        field: Field,
        m: usize,
        rng: &mut R,
    ) -> Result<ParityCheckCode> {
        if m == 0 {
            return Err(Error::Parameter("symbol dimension m must be positive".into()));
        }
        let checks = skeleton
            .row_support
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&var| Edge {
                        var,
                        coeff: GlMatrix::random(field, m, rng),
                    })
                    .collect()
            })
            .collect();
        Ok(ParityCheckCode {
            field,
            m,
            n_vars: skeleton.cols,
            checks,
            meta: CodeMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: CodeMeta) -> ParityCheckCode {
        self.meta = meta;
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn n_edges(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    pub fn checks(&self) -> &[Vec<Edge>] {
        &self.checks
    }

    pub fn meta(&self) -> &CodeMeta {
        &self.meta
    }

    pub fn var_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vars];
        for row in &self.checks {
            for e in row {
                d[e.var] += 1;
            }
        }
        d
    }

    pub fn skeleton(&self) -> SparseBinary {
        SparseBinary {
            rows: self.n_checks(),
            cols: self.n_vars,
            row_support: self
                .checks
                .iter()
                .map(|row| row.iter().map(|e| e.var).collect())
                .collect(),
        }
    }

    /// Per check, `Σ h_{i,j} x_j`.
    pub fn syndrome(&self, word: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
        if word.len() != self.n_vars || word.iter().any(|x| x.len() != self.m) {
            return Err(Error::Shape(format!(
                "word must have {} symbols of length {}",
                self.n_vars, self.m
            )));
        }
        Ok(self
            .checks
            .iter()
            .map(|row| {
                let mut acc = vec![0; self.m];
                for e in row {
                    let hx = e.coeff.apply(&word[e.var]);
                    self.field.axpy(&mut acc, 1, &hx);
                }
                acc
            })
            .collect())
    }

    pub fn is_codeword(&self, word: &[Vec<Elem>]) -> Result<bool> {
        Ok(self
            .syndrome(word)?
            .iter()
            .all(|s| s.iter().all(|&e| e == 0)))
    }

    /// Canonical JSON text: keys sorted, no whitespace, trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let file = CodeFile {
            m: self.m,
            meta: self.meta.clone(),
            n_checks: self.n_checks(),
            n_vars: self.n_vars,
            q: self.field.q(),
            rows: self
                .checks
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| (e.var, e.coeff.matrix().to_rows()))
                        .collect()
                })
                .collect(),
        };
        let mut s = serde_json::to_string(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<ParityCheckCode> {
        let file: CodeFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let field = Field::new(file.q).map_err(|e| Error::Format(e.to_string()))?;
        if file.rows.len() != file.n_checks {
            return Err(Error::Format(format!(
                "n_checks = {} but {} rows present",
                file.n_checks,
                file.rows.len()
            )));
        }
        let mut rows = Vec::with_capacity(file.rows.len());
        for row in file.rows {
            let mut out = Vec::with_capacity(row.len());
            for (var, coeff) in row {
                let mat = Matrix::from_rows(field, file.m, &coeff)
                    .map_err(|e| Error::Format(e.to_string()))?;
                if mat.rows() != file.m {
                    return Err(Error::Format(format!(
                        "coefficient with {} rows, expected {}",
                        mat.rows(),
                        file.m
                    )));
                }
                out.push((var, mat));
            }
            rows.push(out);
        }
        let code = ParityCheckCode::new(field, file.m, file.n_vars, rows).map_err(|e| match e {
            Error::Singular => Error::Format("a coefficient matrix is singular".into()),
            other => Error::Format(other.to_string()),
        })?;
        Ok(code.with_meta(file.meta))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<ParityCheckCode> {
        ParityCheckCode::from_json(&fs::read_to_string(path)?)
    }
}

// Field order is the sorted key order of the file format.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    m: usize,
    meta: CodeMeta,
    n_checks: usize,
    n_vars: usize,
    q: u32,
    rows: Vec<Vec<(usize, Vec<Vec<Elem>>)>>,
}

/// Regular `(dl, dr)` code with `M·dl` checks over `M·dr` variables.
pub fn build_regular<R: Rng + ?Sized>(
    dl: usize,
    dr: usize,
    lifting: usize,
    m: usize,
    field: Field,
    rng: &mut R,
) -> Result<ParityCheckCode> {
    let skeleton = regular_skeleton(dl, dr, lifting, rng)?;
    Ok(ParityCheckCode::from_skeleton(&skeleton, field, m, rng)?.with_meta(CodeMeta {
        coupling: None,
        lifting: Some(lifting),
        dl: Some(dl),
        dr: Some(dr),
        seed: None,
    }))
}

/// Spatially-coupled `(dl, dr, L)` code lifted by `M`: `(L+dl−1)·M` checks over
/// `(dr/dl)·L·M` variables.
pub fn build_coupled<R: Rng + ?Sized>(
    dl: usize,
    dr: usize,
    coupling: usize,
    lifting: usize,
    m: usize,
    field: Field,
    rng: &mut R,
) -> Result<ParityCheckCode> {
    let base = base_matrix_coupled(dl, dr, coupling)?;
    let skeleton = lift(&base, lifting, rng)?;
    Ok(ParityCheckCode::from_skeleton(&skeleton, field, m, rng)?.with_meta(CodeMeta {
        coupling: Some(coupling),
        lifting: Some(lifting),
        dl: Some(dl),
        dr: Some(dr),
        seed: None,
    }))
}

/// Design rate from the block dimensions, assuming full row rank:
/// `1 − dl/dr` for regular codes and `1 − (dl/dr)(L+dl−1)/L` for coupled codes.
pub fn design_rate(dl: usize, dr: usize, coupling: Option<usize>) -> Result<f64> {
    validate_degrees(dl, dr)?;
    let base = 1.0 - dl as f64 / dr as f64;
    match coupling {
        None => Ok(base),
        Some(0) => Err(Error::Parameter("coupling number L must be at least 1".into())),
        Some(l) => Ok(1.0 - (dl as f64 / dr as f64) * (l + dl - 1) as f64 / l as f64),
    }
}
