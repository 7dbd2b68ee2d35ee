//! Stabilizer codes: generators, the text file format, and the Tanner graph.
//!
//! A code is a data-qubit count plus a list of Pauli-string stabilizers.
//! Qubits are 0-indexed. The text format is one `n=<int>` header followed by
//! one stabilizer per line, written as whitespace-separated `<Pauli><index>`
//! tokens (`X0 X1 Z4`). Everything after a `#` is a comment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn commutes_with(self, other: Pauli) -> bool {
        self == other
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl TryFrom<char> for Pauli {
    type Error = char;

    fn try_from(c: char) -> Result<Self, char> {
        match c {
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub id: usize,
    pub support: Vec<(usize, Pauli)>,
}

impl Stabilizer {
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.iter().map(|&(q, _)| q)
    }

    pub fn pauli_on(&self, qubit: usize) -> Option<Pauli> {
        self.support
            .iter()
            .find_map(|&(q, p)| (q == qubit).then_some(p))
    }

    /// True when every term is `Z`; such checks need no basis change on the ancilla.
    pub fn is_z_type(&self) -> bool {
        self.support.iter().all(|&(_, p)| p == Pauli::Z)
    }

    pub fn commutes_with(&self, other: &Stabilizer) -> bool {
        let clashes = self
            .support
            .iter()
            .filter(|&&(q, p)| other.pauli_on(q).is_some_and(|o| !p.commutes_with(o)))
            .count();
        clashes % 2 == 0
    }
}

impl fmt::Display for Stabilizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (q, p)) in self.support.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerCode {
    n: usize,
    stabilizers: Vec<Stabilizer>,
    label: String,
}

impl StabilizerCode {
    /// Validates and builds a code. Stabilizer ids are reassigned to their list position.
    pub fn new(
        n: usize,
        supports: Vec<Vec<(usize, Pauli)>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 || supports.is_empty() {
            return Err(Error::EmptyCode);
        }
        let code = Self::from_parts(n, supports, label);
        code.validate()?;
        Ok(code)
    }

    fn from_parts(n: usize, supports: Vec<Vec<(usize, Pauli)>>, label: impl Into<String>) -> Self {
        let stabilizers = supports
            .into_iter()
            .enumerate()
            .map(|(id, support)| Stabilizer { id, support })
            .collect();
        StabilizerCode {
            n,
            stabilizers,
            label: label.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        for s in &self.stabilizers {
            if s.support.is_empty() {
                return Err(Error::EmptyStabilizer(s.id));
            }
            let mut seen = vec![false; self.n];
            for &(q, _) in &s.support {
                if q >= self.n {
                    return Err(Error::QubitOutOfRange {
                        stabilizer: s.id,
                        qubit: q,
                        n: self.n,
                    });
                }
                if std::mem::replace(&mut seen[q], true) {
                    return Err(Error::DuplicateQubit {
                        stabilizer: s.id,
                        qubit: q,
                    });
                }
            }
        }
        if let Some((a, b)) = self.first_anticommuting_pair() {
            return Err(Error::Anticommuting(a, b));
        }
        Ok(())
    }

    pub fn first_anticommuting_pair(&self) -> Option<(usize, usize)> {
        let s = &self.stabilizers;
        (0..s.len())
            .flat_map(|i| (i + 1..s.len()).map(move |j| (i, j)))
            .find(|&(i, j)| !s[i].commutes_with(&s[j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stabilizers.
    pub fn m(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn stabilizers(&self) -> &[Stabilizer] {
        &self.stabilizers
    }

    pub fn stabilizer(&self, id: usize) -> &Stabilizer {
        &self.stabilizers[id]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn max_weight(&self) -> usize {
        self.stabilizers.iter().map(Stabilizer::weight).max().unwrap_or(0)
    }

    pub fn tanner_graph(&self) -> TannerGraph {
        tanner_graph(self)
    }

    /// Renders the code in the text file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\nn={}\n", self.label, self.n);
        for s in &self.stabilizers {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

/// Rotated surface code on a `d x d` patch of data qubits.
///
/// Qubit `(row, col)` has index `row * d + col`. Faces sit on the `(d+1) x (d+1)`
/// lattice of plaquette corners and are X-type when `row + col` is even;
/// weight-2 X faces close the top and bottom edges, weight-2 Z faces the sides.
pub fn build_surface_code(d: usize) -> Result<StabilizerCode> {
    if d == 0 || d.is_multiple_of(2) {
        return Err(Error::InvalidDistance(d, "surface code distance must be odd and >= 1"));
    }
    let mut supports = Vec::new();
    for i in 0..=d {
        for j in 0..=d {
            let pauli = if (i + j) % 2 == 0 { Pauli::X } else { Pauli::Z };
            let on_row_edge = i == 0 || i == d;
            let on_col_edge = j == 0 || j == d;
            if on_row_edge && on_col_edge {
                continue;
            }
            if (on_row_edge && pauli != Pauli::X) || (on_col_edge && pauli != Pauli::Z) {
                continue;
            }
            let mut support = Vec::with_capacity(4);
            for (r, c) in [(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)] {
                // corner (i, j) touches data rows i-1..=i and cols j-1..=j
                if (1..=d).contains(&r) && (1..=d).contains(&c) {
                    support.push(((r - 1) * d + (c - 1), pauli));
                }
            }
            supports.push(support);
        }
    }
    Ok(StabilizerCode::from_parts(d * d, supports, format!("surface:{d}")))
}

type Point = (i64, i64);

/// Triangular 6.6.6 color code; each face carries an X and a Z stabilizer on the same support.
///
/// Faces are points `(a, b)` of a triangular lattice, data qubits are the
/// lattice triangles. Coordinates are scaled by 3 so triangle centroids stay integral.
pub fn build_color_code(d: usize) -> Result<StabilizerCode> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidDistance(d, "color code distance must be odd and >= 3"));
    }
    let side = 3 * (3 * (d as i64 - 1) / 2 - 2);
    let inside = |x: i64, y: i64| x - y >= -6 && x + 2 * y >= -side && 2 * x + y <= 0;
    let span = 2 * d as i64 + 4;

    // (centroid, corner faces)
    let mut triangles: Vec<(Point, [Point; 3])> = Vec::new();
    for a in -span..=span {
        for b in -span..=span {
            let up = ((3 * a + 1, 3 * b + 1), [(a, b), (a + 1, b), (a, b + 1)]);
            let down = ((3 * a + 2, 3 * b + 2), [(a + 1, b), (a, b + 1), (a + 1, b + 1)]);
            for (c, faces) in [up, down] {
                if inside(c.0, c.1) {
                    triangles.push((c, faces));
                }
            }
        }
    }
    // qubits ordered top row first, left to right
    triangles.sort_by_key(|&((x, y), _)| (std::cmp::Reverse(x + 2 * y), x - y));

    let mut faces: std::collections::BTreeMap<(i64, i64), Vec<usize>> = Default::default();
    for (q, (_, corners)) in triangles.iter().enumerate() {
        for &f in corners {
            faces.entry(f).or_default().push(q);
        }
    }
    let mut faces: Vec<Vec<usize>> = faces.into_values().filter(|s| s.len() >= 3).collect();
    faces.sort_by_key(|s| s[0]);

    let mut supports = Vec::with_capacity(2 * faces.len());
    for face in &faces {
        for pauli in [Pauli::X, Pauli::Z] {
            supports.push(face.iter().map(|&q| (q, pauli)).collect());
        }
    }
    Ok(StabilizerCode::from_parts(
        triangles.len(),
        supports,
        format!("color:{d}"),
    ))
}

/// Bit-flip repetition code on `n` qubits: checks `Z_i Z_{i+1}`.
pub fn build_repetition_code(n: usize) -> Result<StabilizerCode> {
    if n < 2 {
        return Err(Error::InvalidDistance(n, "repetition code needs at least 2 qubits"));
    }
    let supports = (0..n - 1)
        .map(|i| vec![(i, Pauli::Z), (i + 1, Pauli::Z)])
        .collect();
    Ok(StabilizerCode::from_parts(n, supports, format!("repetition:{n}")))
}

/// Parses the text file format. Syntax errors carry 1-based line and column.
pub fn parse_code(text: &str) -> Result<StabilizerCode> {
    let mut n: Option<usize> = None;
    let mut label = String::from("custom");
    let mut supports = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let (body, comment) = match raw.find('#') {
            Some(i) => (&raw[..i], Some(raw[i + 1..].trim())),
            None => (raw, None),
        };
        if n.is_none() && supports.is_empty() {
            if let Some(c) = comment.filter(|c| !c.is_empty() && body.trim().is_empty()) {
                label = c.to_string();
            }
        }
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let offset = body.len() - body.trim_start().len();
        if n.is_none() {
            let value = trimmed
                .strip_prefix("n=")
                .or_else(|| trimmed.strip_prefix("n ="))
                .ok_or_else(|| Error::Syntax {
                    line: line_no,
                    column: offset + 1,
                    message: "expected header `n=<int>`".into(),
                })?;
            let parsed = value.trim().parse::<usize>().map_err(|_| Error::Syntax {
                line: line_no,
                column: offset + 3,
                message: format!("invalid qubit count `{}`", value.trim()),
            })?;
            n = Some(parsed);
            continue;
        }
        let mut support = Vec::new();
        let mut col = 0;
        for token in body.split_whitespace() {
            col = body[col..].find(token).map(|i| col + i).unwrap_or(col);
            let column = col + 1;
            col += token.len();
            let mut chars = token.chars();
            let pauli = chars
                .next()
                .and_then(|c| Pauli::try_from(c).ok())
                .ok_or_else(|| Error::Syntax {
                    line: line_no,
                    column,
                    message: format!("expected Pauli X, Y or Z in `{token}`"),
                })?;
            let index = chars.as_str().parse::<usize>().map_err(|_| Error::Syntax {
                line: line_no,
                column: column + 1,
                message: format!("expected qubit index in `{token}`"),
            })?;
            support.push((index, pauli));
        }
        supports.push(support);
    }
    let n = n.ok_or(Error::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing header `n=<int>`".into(),
    })?;
    StabilizerCode::new(n, supports, label)
}

impl FromStr for StabilizerCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_code(s)
    }
}

/// Builds a generated code from a short spec: `surface:<d>`, `color:<d>` or `repetition:<n>`.
pub fn generate(spec: &str) -> Result<StabilizerCode> {
    let (family, size) = spec
        .split_once(':')
        .ok_or_else(|| Error::Invalid(format!("code spec `{spec}` is not <family>:<size>")))?;
    let size: usize = size
        .trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("code size in `{spec}` is not an integer")))?;
    match family.trim() {
        "surface" | "sc" => build_surface_code(size),
        "color" | "cc" => build_color_code(size),
        "repetition" | "rep" => build_repetition_code(size),
        other => Err(Error::Invalid(format!("unknown code family `{other}`"))),
    }
}

/// Bipartite check/data adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    checks: Vec<Vec<usize>>,
    data: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn check_count(&self) -> usize {
        self.checks.len()
    }

    pub fn data_count(&self) -> usize {
        self.data.len()
    }

    pub fn edge_count(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    /// Data neighbours of check `c`, ascending.
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.checks[c]
    }

    /// Check neighbours of data qubit `q`, ascending.
    pub fn data_neighbors(&self, q: usize) -> &[usize] {
        &self.data[q]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.checks
            .iter()
            .enumerate()
            .flat_map(|(c, qs)| qs.iter().map(move |&q| (c, q)))
    }

    pub fn has_edge(&self, check: usize, data: usize) -> bool {
        self.checks[check].binary_search(&data).is_ok()
    }
}

pub fn tanner_graph(code: &StabilizerCode) -> TannerGraph {
    let mut checks = Vec::with_capacity(code.m());
    let mut data = vec![Vec::new(); code.n()];
    for s in code.stabilizers() {
        let mut qs: Vec<usize> = s.qubits().collect();
        qs.sort_unstable();
        for &q in &qs {
            data[q].push(s.id);
        }
        checks.push(qs);
    }
    TannerGraph { checks, data }
}
