//! File formats: edge lists, observation masks, covariate tables, similarity
//! matrices, score rankings and ROC curves.
//!
//! Edge lists and masks are plain text, one whitespace-separated "i j" pair
//! per line, `#` starting a comment. Scores and curves are CSV. All numeric
//! output uses Rust's shortest round-trip float formatting, so identical runs
//! produce byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::graph::{AdjacencyMatrix, CovariateTable, ObservationMask};
use crate::similarity::SimilarityMatrix;
use crate::solver::ScoreMatrix;
use crate::{Error, Result};

/// Result of reading an edge list: the matrix plus the number of self-loop
/// lines that were skipped.
#[derive(Debug)]
pub struct EdgeListRead {
    pub matrix: AdjacencyMatrix,
    pub skipped_self_loops: usize,
}

fn parse_pair_line(line: &str, lineno: usize) -> Result<Option<(usize, usize)>> {
    let line = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut it = line.split_whitespace();
    let (i, j) = match (it.next(), it.next()) {
        (None, _) => return Ok(None),
        (Some(a), Some(b)) => (a, b),
        (Some(_), None) => {
            return Err(Error::InvalidInput(format!(
                "line {lineno}: expected \"i j\" pair"
            )))
        }
    };
    let i: usize = i
        .parse()
        .map_err(|_| Error::InvalidInput(format!("line {lineno}: bad node index {i:?}")))?;
    let j: usize = j
        .parse()
        .map_err(|_| Error::InvalidInput(format!("line {lineno}: bad node index {j:?}")))?;
    Ok(Some((i, j)))
}

/// Read a whitespace-separated edge list into an adjacency matrix.
///
/// Indices must lie in `[0, n)`. Self-loop lines are skipped and counted.
/// When `directed` is false each pair is mirrored.
pub fn read_edge_list(path: &Path, n: usize, directed: bool) -> Result<EdgeListRead> {
    let file = File::open(path)?;
    let mut matrix = AdjacencyMatrix::empty(n, directed);
    let mut skipped_self_loops = 0;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let Some((i, j)) = parse_pair_line(&line, idx + 1)? else {
            continue;
        };
        if i >= n || j >= n {
            return Err(Error::InvalidInput(format!(
                "line {}: node index ({i},{j}) out of range for n={n}",
                idx + 1
            )));
        }
        if i == j {
            skipped_self_loops += 1;
            continue;
        }
        matrix.set(i, j, 1)?;
    }
    Ok(EdgeListRead {
        matrix,
        skipped_self_loops,
    })
}

/// Write an adjacency matrix back out as an edge list (one "i j" line per
/// entry; `i < j` only for undirected matrices).
pub fn write_edge_list(a: &AdjacencyMatrix, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..a.n() {
        for j in 0..a.n() {
            if i == j || (!a.directed() && i > j) {
                continue;
            }
            if a.get(i, j) == 1 {
                writeln!(w, "{i} {j}")?;
            }
        }
    }
    Ok(())
}

/// Read an observation mask: same format as an edge list, listing pairs with
/// E_ij = 1. Mirrored when `symmetric` is set.
pub fn read_mask(path: &Path, n: usize, symmetric: bool) -> Result<ObservationMask> {
    let file = File::open(path)?;
    let mut mask = ObservationMask::zeros(n);
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let Some((i, j)) = parse_pair_line(&line, idx + 1)? else {
            continue;
        };
        if i >= n || j >= n {
            return Err(Error::InvalidInput(format!(
                "line {}: node index ({i},{j}) out of range for n={n}",
                idx + 1
            )));
        }
        mask.set(i, j, 1);
        if symmetric {
            mask.set(j, i, 1);
        }
    }
    Ok(mask)
}

/// Write the E_ij = 1 pairs of a mask (`i < j` only when `symmetric`).
pub fn write_mask(mask: &ObservationMask, symmetric: bool, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..mask.n() {
        for j in 0..mask.n() {
            if i == j || (symmetric && i > j) {
                continue;
            }
            if mask.get(i, j) == 1 {
                writeln!(w, "{i} {j}")?;
            }
        }
    }
    Ok(())
}

/// Read a covariate CSV: n rows, p numeric columns. `skip_header` drops the
/// first row.
pub fn read_covariates(path: &Path, skip_header: bool) -> Result<CovariateTable> {
    let file = File::open(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if idx == 0 && skip_header {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("line {}: bad numeric cell {cell:?}", idx + 1))
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected {} columns, got {}",
                    idx + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("covariate file is empty".into()));
    }
    let n = rows.len();
    let p = rows[0].len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let rows = Array2::from_shape_vec((n, p), flat)
        .map_err(|e| Error::InvalidInput(format!("covariate shape: {e}")))?;
    CovariateTable::new(rows)
}

/// Write scores as CSV rows "i,j,score", sorted descending by score with
/// `(i,j)` lexicographic tie-breaking.
///
/// `select` picks the pairs to write (entries with value 1); when absent all
/// off-diagonal pairs are written. Undirected scores list each pair once as
/// `i < j`. The diagonal is never written.
pub fn write_scores(
    scores: &ScoreMatrix,
    select: Option<&ObservationMask>,
    path: &Path,
) -> Result<()> {
    if let Some(mask) = select {
        if mask.n() != scores.n() {
            return Err(Error::DimensionMismatch(format!(
                "selection mask is {}x{0} but scores are {1}x{1}",
                mask.n(),
                scores.n()
            )));
        }
    }
    if scores.entries().iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("scores must be finite".into()));
    }
    let mut rows: Vec<(usize, usize, f64)> = scores
        .pairs()
        .into_iter()
        .filter(|&(i, j)| select.is_none_or(|m| m.get(i, j) == 1))
        .map(|(i, j)| (i, j, scores.get(i, j)))
        .collect();
    rows.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap()
            .then_with(|| (a.0, a.1).cmp(&(b.0, b.1)))
    });
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "i,j,score")?;
    for (i, j, s) in rows {
        writeln!(w, "{i},{j},{s}")?;
    }
    Ok(())
}

/// Read a score CSV (as written by [`write_scores`]) back into a matrix.
/// Pairs not present in the file keep score 0.
pub fn read_scores(path: &Path, n: usize, directed: bool) -> Result<ScoreMatrix> {
    let file = File::open(path)?;
    let mut scores = ScoreMatrix::zeros(n, directed);
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if idx == 0 || line.trim().is_empty() {
            continue; // header
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "line {}: expected \"i,j,score\"",
                idx + 1
            )));
        }
        let i: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("line {}: bad index", idx + 1)))?;
        let j: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("line {}: bad index", idx + 1)))?;
        let s: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("line {}: bad score", idx + 1)))?;
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidInput(format!(
                "line {}: pair ({i},{j}) invalid for n={n}",
                idx + 1
            )));
        }
        scores.set(i, j, s);
    }
    Ok(scores)
}

/// Write a similarity matrix. `.csv` paths get a dense comma-separated
/// matrix; any other extension gets sparse "i j w" triplets.
pub fn write_similarity(w: &SimilarityMatrix, path: &Path) -> Result<()> {
    let dense_format = path.extension().is_some_and(|e| e == "csv");
    let mut out = BufWriter::new(File::create(path)?);
    if dense_format {
        let dense = w.to_dense();
        for i in 0..w.n() {
            let row: Vec<String> = (0..w.n()).map(|j| format!("{}", dense[[i, j]])).collect();
            writeln!(out, "{}", row.join(","))?;
        }
    } else {
        for (i, j, v) in w.iter_nonzero() {
            if i <= j {
                writeln!(out, "{i} {j} {v}")?;
            }
        }
    }
    Ok(())
}

/// Read a similarity matrix written by [`write_similarity`].
pub fn read_similarity(path: &Path, n: usize) -> Result<SimilarityMatrix> {
    let dense_format = path.extension().is_some_and(|e| e == "csv");
    let file = File::open(path)?;
    if dense_format {
        let mut entries = Array2::zeros((n, n));
        let mut count = 0;
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if count >= n {
                return Err(Error::InvalidInput(format!("more than {n} rows")));
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != n {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected {n} columns, got {}",
                    idx + 1,
                    cells.len()
                )));
            }
            for (j, cell) in cells.iter().enumerate() {
                entries[[count, j]] = cell.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("line {}: bad cell {cell:?}", idx + 1))
                })?;
            }
            count += 1;
        }
        if count != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} rows, got {count}"
            )));
        }
        SimilarityMatrix::from_dense(entries)
    } else {
        let mut entries = Array2::zeros((n, n));
        for i in 0..n {
            entries[[i, i]] = 1.0;
        }
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected \"i j w\" triplet",
                    idx + 1
                )));
            }
            let i: usize = parts[0]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("line {}: bad index", idx + 1)))?;
            let j: usize = parts[1]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("line {}: bad index", idx + 1)))?;
            let v: f64 = parts[2]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("line {}: bad weight", idx + 1)))?;
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "line {}: index out of range",
                    idx + 1
                )));
            }
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
        SimilarityMatrix::from_dense(entries)
    }
}

/// Write an ROC curve as "fpr,tpr" CSV with a trailing "# auc=..." line.
pub fn write_roc(curve: &crate::eval::RocCurve, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "fpr,tpr")?;
    for &(fpr, tpr) in curve.points() {
        writeln!(w, "{fpr},{tpr}")?;
    }
    writeln!(w, "# auc={}", curve.auc())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn edge_list_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "0 1\n1 2\n").unwrap();
        let read = read_edge_list(&path, 3, false).unwrap();
        assert_eq!(read.skipped_self_loops, 0);
        let a = read.matrix;
        assert_eq!(a.get(0, 1), 1);
        assert_eq!(a.get(1, 0), 1);
        assert_eq!(a.get(1, 2), 1);
        assert_eq!(a.get(2, 1), 1);
        assert_eq!(a.get(0, 2), 0);

        let back = dir.path().join("back.txt");
        write_edge_list(&a, &back).unwrap();
        let again = read_edge_list(&back, 3, false).unwrap().matrix;
        assert_eq!(a, again);
    }

    #[test]
    fn empty_file_gives_empty_matrix() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "").unwrap();
        let a = read_edge_list(&path, 3, false).unwrap().matrix;
        assert_eq!(a, AdjacencyMatrix::empty(3, false));
    }

    #[test]
    fn directed_read_is_asymmetric() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "0 1\n").unwrap();
        let a = read_edge_list(&path, 3, true).unwrap().matrix;
        assert_eq!(a.get(0, 1), 1);
        assert_eq!(a.get(1, 0), 0);
    }

    #[test]
    fn comments_and_self_loops() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "# a comment\n0 1 # trailing\n2 2\n").unwrap();
        let read = read_edge_list(&path, 3, true).unwrap();
        assert_eq!(read.skipped_self_loops, 1);
        assert_eq!(read.matrix.get(0, 1), 1);
    }

    #[test]
    fn out_of_range_index_is_an_error() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "0 7\n").unwrap();
        assert!(read_edge_list(&path, 3, true).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_edge_list(Path::new("/nonexistent/x.txt"), 3, true).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn scores_single_pair_undirected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let mut s = ScoreMatrix::zeros(2, false);
        s.set(0, 1, 0.7);
        write_scores(&s, None, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "i,j,score\n0,1,0.7\n");
    }

    #[test]
    fn scores_tie_breaks_lexicographically() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let mut s = ScoreMatrix::zeros(3, false);
        s.set(0, 1, 0.5);
        s.set(0, 2, 0.5);
        s.set(1, 2, 0.1);
        write_scores(&s, None, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "i,j,score\n0,1,0.5\n0,2,0.5\n1,2,0.1\n");
    }

    #[test]
    fn directed_scores_write_all_off_diagonal_pairs() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let mut s = ScoreMatrix::zeros(3, true);
        for (k, (i, j)) in s.pairs().into_iter().enumerate() {
            s.set(i, j, k as f64);
        }
        write_scores(&s, None, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7); // header + 6 pairs
        let scores: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn covariates_with_header() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "a,b\n1.0,2.0\n3.0,4.0\n").unwrap();
        let x = read_covariates(&path, true).unwrap();
        assert_eq!(x.n(), 2);
        assert_eq!(x.p(), 2);
        assert_eq!(x.rows()[[1, 0]], 3.0);
    }

    #[test]
    fn non_finite_covariates_and_scores_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "1.0,NaN\n").unwrap();
        assert!(read_covariates(&path, false).is_err());

        let mut s = ScoreMatrix::zeros(2, false);
        s.set(0, 1, f64::INFINITY);
        assert!(write_scores(&s, None, &dir.path().join("s.csv")).is_err());
    }

    #[test]
    fn similarity_round_trips_in_both_formats() {
        let dir = tempdir().unwrap();
        let mut entries = ndarray::Array2::zeros((3, 3));
        for i in 0..3 {
            entries[[i, i]] = 1.0;
        }
        entries[[0, 1]] = 0.25;
        entries[[1, 0]] = 0.25;
        let w = SimilarityMatrix::from_dense(entries).unwrap();

        let dense_path = dir.path().join("w.csv");
        write_similarity(&w, &dense_path).unwrap();
        let dense_back = read_similarity(&dense_path, 3).unwrap();

        let sparse_path = dir.path().join("w.txt");
        let sparse = w.truncate(0.2).unwrap();
        write_similarity(&sparse, &sparse_path).unwrap();
        let sparse_back = read_similarity(&sparse_path, 3).unwrap();

        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(dense_back.get(i, j), w.get(i, j));
                assert_eq!(sparse_back.get(i, j), sparse.get(i, j));
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn edge_list_round_trip(edges in proptest::collection::btree_set((0usize..7, 0usize..7), 0..15), directed in proptest::bool::ANY) {
                let dir = tempdir().unwrap();
                let path = dir.path().join("e.txt");
                let mut a = AdjacencyMatrix::empty(7, directed);
                for &(i, j) in &edges {
                    if i != j {
                        a.set(i, j, 1).unwrap();
                    }
                }
                write_edge_list(&a, &path).unwrap();
                let back = read_edge_list(&path, 7, directed).unwrap();
                prop_assert_eq!(back.skipped_self_loops, 0);
                prop_assert_eq!(&back.matrix, &a);
                // undirected reads are symmetric by construction
                if !directed {
                    for i in 0..7 {
                        for j in 0..7 {
                            prop_assert_eq!(back.matrix.get(i, j), back.matrix.get(j, i));
                        }
                    }
                }
            }
        }
    }
}
