//! Text formats: whitespace edge lists, Matrix Market symmetric coordinate
//! files, and one-value-per-line vectors.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, SddError};
use crate::graph::{laplacian_of, WeightedGraph};
use crate::matrix::SparseSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    EdgeList,
}

impl MatrixFormat {
    /// `.mtx` files are Matrix Market; anything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") => MatrixFormat::MatrixMarket,
            _ => MatrixFormat::EdgeList,
        }
    }
}

#[derive(Debug, Clone)]
pub enum MatrixInput {
    Matrix(SparseSymMatrix),
    Graph(WeightedGraph),
}

impl MatrixInput {
    /// The matrix itself, or the graph's Laplacian.
    pub fn into_matrix(self) -> SparseSymMatrix {
        match self {
            MatrixInput::Matrix(m) => m,
            MatrixInput::Graph(g) => laplacian_of(&g),
        }
    }
}

pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<MatrixInput> {
    let text = std::fs::read_to_string(path)?;
    match format {
        MatrixFormat::MatrixMarket => parse_matrix_market(&text).map(MatrixInput::Matrix),
        MatrixFormat::EdgeList => parse_edge_list(&text).map(MatrixInput::Graph),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> SddError {
    SddError::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = parse_num(tok, line, "number")?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

/// Lines `u v w` with 0-based ids and positive `w`; `#` and `%` start
/// comments. The vertex count is one more than the largest id. Parallel
/// edges are merged by summing weights.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut raw = Vec::new();
    let mut n = 0;
    for (i, line) in text.lines().enumerate() {
        let lno = i + 1;
        let body = line.split(['#', '%']).next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(lno, format!("expected 'u v w', got {} fields", toks.len())));
        }
        let u: usize = parse_num(toks[0], lno, "vertex id")?;
        let v: usize = parse_num(toks[1], lno, "vertex id")?;
        let w = parse_real(toks[2], lno)?;
        if w <= 0.0 {
            return Err(parse_err(lno, format!("weight must be positive, got {w}")));
        }
        if u == v {
            return Err(parse_err(lno, "self-loop"));
        }
        n = n.max(u + 1).max(v + 1);
        raw.push((u, v, w));
    }
    if raw.is_empty() {
        return Err(parse_err(0, "no edges"));
    }
    WeightedGraph::from_edges(n, raw)
}

/// Matrix Market `coordinate real` (or `integer`) with `symmetric` or
/// `general` symmetry; duplicates are summed.
pub fn parse_matrix_market(text: &str) -> Result<SparseSymMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let h: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return Err(parse_err(1, "missing '%%MatrixMarket matrix' header"));
    }
    if h[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported layout '{}'", h[2])));
    }
    if h[3] != "real" && h[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field '{}'", h[3])));
    }
    let symmetric = match h[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };
    let mut size: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for (i, line) in lines {
        let lno = i + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(parse_err(lno, "expected 'rows cols nnz'"));
                }
                let r: usize = parse_num(toks[0], lno, "row count")?;
                let c: usize = parse_num(toks[1], lno, "column count")?;
                let nnz: usize = parse_num(toks[2], lno, "entry count")?;
                if r != c {
                    return Err(parse_err(lno, format!("matrix is {r}x{c}, not square")));
                }
                size = Some((r, nnz));
            }
            Some((n, _)) => {
                if toks.len() != 3 {
                    return Err(parse_err(lno, "expected 'i j value'"));
                }
                let r: usize = parse_num(toks[0], lno, "row index")?;
                let c: usize = parse_num(toks[1], lno, "column index")?;
                let v = parse_real(toks[2], lno)?;
                if r == 0 || c == 0 || r > n || c > n {
                    return Err(parse_err(lno, format!("index ({r}, {c}) outside 1..={n}")));
                }
                entries.push((r - 1, c - 1, v));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(0, "missing size line"))?;
    if entries.len() != nnz {
        return Err(parse_err(0, format!("expected {nnz} entries, found {}", entries.len())));
    }
    if symmetric {
        SparseSymMatrix::from_triplets(n, entries)
    } else {
        SparseSymMatrix::from_full_triplets(n, entries)
    }
}

/// One edge per line, `u v w`, sorted by `(u, v)`.
pub fn format_edge_list(g: &WeightedGraph) -> String {
    let mut s = String::new();
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u, e.v, e.w);
    }
    s
}

/// Symmetric coordinate form, lower triangle, 1-based.
pub fn format_matrix_market(a: &SparseSymMatrix) -> String {
    let mut lower: Vec<(usize, usize, f64)> = a.off_diagonal().iter().map(|&(i, j, v)| (j, i, v)).collect();
    lower.extend(a.diag().iter().enumerate().filter(|(_, &d)| d != 0.0).map(|(i, &d)| (i, i, d)));
    lower.sort_by_key(|x| (x.1, x.0));
    let mut s = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(s, "{} {} {}", a.n(), a.n(), lower.len());
    for (i, j, v) in lower {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v);
    }
    s
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut v = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split(['#', '%']).next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        v.push(parse_real(body, i + 1)?);
    }
    Ok(v)
}

/// One value per line, printed with round-trip precision.
pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::with_capacity(v.len() * 24);
    for x in v {
        let _ = writeln!(s, "{x:e}");
    }
    s
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}
