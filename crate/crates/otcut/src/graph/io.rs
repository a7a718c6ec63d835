//! Graph file ingestion and export.
//!
//! Edge-list format: one `i j w` triple per line, whitespace separated,
//! 0-based indices, `#` starts a comment, the weight defaults to 1 when
//! omitted. Duplicate same-direction entries are summed; the loaded graph is
//! symmetrized by taking the larger of the two directed weights.
//!
//! MatrixMarket format: `coordinate` with `real`, `integer` or `pattern`
//! fields and `symmetric` or `general` symmetry, 1-based indices converted on
//! load, symmetrized the same way.

use super::{GraphError, SparseGraph};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

fn read_file(path: &Path) -> Result<String, GraphError> {
    std::fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Accumulated directed weights turned into a max-symmetrized graph.
fn symmetrize(n: usize, directed: HashMap<(usize, usize), f64>) -> Result<SparseGraph, GraphError> {
    let mut edges = Vec::with_capacity(directed.len());
    for (&(i, j), &w) in &directed {
        if i > j {
            continue;
        }
        let back = directed.get(&(j, i)).copied().unwrap_or(0.0);
        edges.push((i, j, w.max(back)));
    }
    for (&(i, j), &w) in &directed {
        if i > j && !directed.contains_key(&(j, i)) {
            edges.push((j, i, w));
        }
    }
    SparseGraph::from_undirected_edges(n, &edges)
}

/// Loads a whitespace-separated edge list with 0-based indices.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<SparseGraph, GraphError> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let mut directed: HashMap<(usize, usize), f64> = HashMap::new();
    let mut max_index = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let i: usize = tokens
            .next()
            .unwrap()
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "expected source index"))?;
        let j: usize = tokens
            .next()
            .ok_or_else(|| parse_err(path, lineno + 1, "expected target index"))?
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "expected target index"))?;
        let w: f64 = match tokens.next() {
            Some(t) => t
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "expected numeric weight"))?,
            None => 1.0,
        };
        if tokens.next().is_some() {
            return Err(parse_err(path, lineno + 1, "trailing tokens after weight"));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(parse_err(
                path,
                lineno + 1,
                format!("invalid weight {w}; weights must be finite and nonnegative"),
            ));
        }
        *directed.entry((i, j)).or_insert(0.0) += w;
        max_index = Some(max_index.unwrap_or(0).max(i).max(j));
    }
    let Some(max_index) = max_index else {
        return Err(GraphError::EmptyGraph);
    };
    symmetrize(max_index + 1, directed)
}

/// Loads a MatrixMarket coordinate file (real/integer/pattern,
/// symmetric/general), converting 1-based indices.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseGraph, GraphError> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5
        || !fields[0].eq_ignore_ascii_case("%%MatrixMarket")
        || !fields[1].eq_ignore_ascii_case("matrix")
        || !fields[2].eq_ignore_ascii_case("coordinate")
    {
        return Err(parse_err(
            path,
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>' header",
        ));
    }
    let field = fields[3].to_ascii_lowercase();
    if !matches!(field.as_str(), "real" | "integer" | "pattern") {
        return Err(parse_err(path, 1, format!("unsupported field '{field}'")));
    }
    let symmetry = fields[4].to_ascii_lowercase();
    if !matches!(symmetry.as_str(), "symmetric" | "general") {
        return Err(parse_err(
            path,
            1,
            format!("unsupported symmetry '{symmetry}'"),
        ));
    }
    let pattern = field == "pattern";
    let mirrored = symmetry == "symmetric";

    let mut size: Option<(usize, usize)> = None;
    let mut directed: HashMap<(usize, usize), f64> = HashMap::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if size.is_none() {
            if tokens.len() != 3 {
                return Err(parse_err(path, lineno + 1, "expected 'rows cols nnz'"));
            }
            let rows: usize = tokens[0]
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "bad row count"))?;
            let cols: usize = tokens[1]
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "bad column count"))?;
            if rows != cols {
                return Err(parse_err(path, lineno + 1, "adjacency must be square"));
            }
            size = Some((rows, cols));
            continue;
        }
        let n = size.unwrap().0;
        let want = if pattern { 2 } else { 3 };
        if tokens.len() != want {
            return Err(parse_err(
                path,
                lineno + 1,
                format!("expected {want} tokens per entry"),
            ));
        }
        let i: usize = tokens[0]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad row index"))?;
        let j: usize = tokens[1]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "bad column index"))?;
        if i == 0 || j == 0 {
            return Err(parse_err(path, lineno + 1, "indices are 1-based"));
        }
        let (i, j) = (i - 1, j - 1);
        if i >= n || j >= n {
            return Err(GraphError::IndexOutOfRange {
                index: i.max(j),
                n,
            });
        }
        let w: f64 = if pattern {
            1.0
        } else {
            tokens[2]
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "bad weight"))?
        };
        if !w.is_finite() || w < 0.0 {
            return Err(parse_err(path, lineno + 1, "weights must be nonnegative"));
        }
        *directed.entry((i, j)).or_insert(0.0) += w;
        if mirrored && i != j {
            *directed.entry((j, i)).or_insert(0.0) += w;
        }
    }
    let Some((n, _)) = size else {
        return Err(GraphError::EmptyGraph);
    };
    if directed.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    symmetrize(n, directed)
}

/// Writes an edge list with one line per undirected edge (`i <= j`), sorted.
pub fn save_edge_list(g: &SparseGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let path = path.as_ref();
    let mut out = String::new();
    for (i, j, w) in g.entries() {
        if i <= j {
            out.push_str(&format!("{i} {j} {w}\n"));
        }
    }
    let mut f = std::fs::File::create(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    f.write_all(out.as_bytes()).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })
}
