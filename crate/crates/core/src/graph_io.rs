//! Edge-list parsing, degree extraction and degree-histogram CSV files.
//!
//! Edge lists are plain text: one edge per line, the first two
//! whitespace-separated tokens are the endpoint ids, anything after them is
//! ignored, and lines starting with `#` or `%` are comments. Node ids are
//! opaque strings interned to dense indices.
//!
//! Histograms are CSV files with the header `degree,count` and LF line
//! endings. Only nodes with positive degree are listed; the number of
//! isolated nodes dropped is kept on the in-memory histogram but not written
//! to the file.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Parsed edges with node ids mapped to dense indices.
#[derive(Debug, Clone, Default)]
pub struct EdgeList {
    edges: Vec<(u32, u32)>,
    labels: Vec<String>,
    directed: bool,
}

impl EdgeList {
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Original id of the node with dense index `i`.
    pub fn label(&self, i: u32) -> &str {
        &self.labels[i as usize]
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }
}

#[derive(Debug, Default)]
struct Interner {
    ids: HashMap<String, u32>,
    labels: Vec<String>,
}

impl Interner {
    fn intern(&mut self, token: &str) -> u32 {
        if let Some(&i) = self.ids.get(token) {
            return i;
        }
        let i = self.labels.len() as u32;
        self.ids.insert(token.to_owned(), i);
        self.labels.push(token.to_owned());
        i
    }
}

/// Calls `f(source, target)` for every edge line of `reader`.
fn for_each_edge<R, F>(reader: R, interner: &mut Interner, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(u32, u32),
{
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                column: line.trim_end().chars().count() + 1,
                message: "expected two node ids".into(),
            });
        };
        let s = interner.intern(a);
        let t = interner.intern(b);
        f(s, t);
    }
    Ok(())
}

/// Reads an edge list. `directed` only affects duplicate detection
/// (`(u, v)` and `(v, u)` are the same undirected edge).
pub fn parse_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<EdgeList> {
    let mut interner = Interner::default();
    let mut edges = Vec::new();
    for_each_edge(reader, &mut interner, |s, t| edges.push((s, t)))?;
    Ok(EdgeList {
        edges,
        labels: interner.labels,
        directed,
    })
}

/// Which endpoint(s) of an edge contribute to a node's degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// Count edges whose second column is the node.
    In,
    /// Count edges whose first column is the node.
    Out,
    /// Count both endpoints; a self-loop adds two.
    Total,
}

impl FromStr for DegreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "in" => Ok(DegreeMode::In),
            "out" => Ok(DegreeMode::Out),
            "total" => Ok(DegreeMode::Total),
            _ => Err(Error::InvalidInput(format!("unknown degree mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeOptions {
    pub mode: DegreeMode,
    /// Collapse repeated edges; by default parallel edges all count.
    pub dedup: bool,
    pub drop_self_loops: bool,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        Self {
            mode: DegreeMode::Total,
            dedup: false,
            drop_self_loops: false,
        }
    }
}

/// Node and edge totals seen while building a histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphCounts {
    /// Distinct node ids, including those that end up with degree zero.
    pub nodes: u64,
    /// Edge lines read.
    pub edges: u64,
    /// Edges that contributed to degrees after filtering.
    pub edges_counted: u64,
}

#[derive(Default)]
struct DegreeAccumulator {
    degrees: Vec<u64>,
    seen: HashSet<(u32, u32)>,
    edges: u64,
    counted: u64,
}

impl DegreeAccumulator {
    fn add(&mut self, s: u32, t: u32, opts: &DegreeOptions, directed: bool) {
        self.edges += 1;
        let needed = s.max(t) as usize + 1;
        if self.degrees.len() < needed {
            self.degrees.resize(needed, 0);
        }
        if opts.drop_self_loops && s == t {
            return;
        }
        if opts.dedup {
            let key = if directed || s <= t { (s, t) } else { (t, s) };
            if !self.seen.insert(key) {
                return;
            }
        }
        self.counted += 1;
        match opts.mode {
            DegreeMode::In => self.degrees[t as usize] += 1,
            DegreeMode::Out => self.degrees[s as usize] += 1,
            DegreeMode::Total => {
                self.degrees[s as usize] += 1;
                self.degrees[t as usize] += 1;
            }
        }
    }

    fn finish(self) -> Result<(DegreeHistogram, GraphCounts)> {
        if self.edges == 0 {
            return Err(Error::InvalidInput("graph has no edges".into()));
        }
        let counts = GraphCounts {
            nodes: self.degrees.len() as u64,
            edges: self.edges,
            edges_counted: self.counted,
        };
        let h = DegreeHistogram::from_degrees(self.degrees)?;
        Ok((h, counts))
    }
}

/// Degree histogram of a parsed edge list.
pub fn degree_histogram(e: &EdgeList, opts: &DegreeOptions) -> Result<DegreeHistogram> {
    let mut acc = DegreeAccumulator::default();
    for &(s, t) in &e.edges {
        acc.add(s, t, opts, e.directed);
    }
    acc.degrees.resize(e.node_count().max(acc.degrees.len()), 0);
    acc.finish().map(|(h, _)| h)
}

/// Builds the degree histogram straight from a reader without storing the
/// edges (memory grows with the node count; `dedup` additionally keeps a set
/// of distinct edges).
pub fn degree_histogram_from_reader<R: BufRead>(
    reader: R,
    directed: bool,
    opts: &DegreeOptions,
) -> Result<(DegreeHistogram, GraphCounts)> {
    let mut interner = Interner::default();
    let mut acc = DegreeAccumulator::default();
    for_each_edge(reader, &mut interner, |s, t| acc.add(s, t, opts, directed))?;
    acc.finish()
}

/// Sparse table of `(degree, node count)` rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeHistogram {
    rows: Vec<(u64, u64)>,
    n: u64,
    excluded_zero_degree: u64,
}

impl DegreeHistogram {
    /// Validates rows: positive degrees and counts, no duplicate degrees.
    /// Rows are sorted by degree.
    pub fn from_rows(mut rows: Vec<(u64, u64)>) -> Result<Self> {
        for (i, &(d, c)) in rows.iter().enumerate() {
            if d == 0 || c == 0 {
                return Err(Error::Histogram {
                    row: i + 1,
                    message: format!("degree and count must be positive (got {d},{c})"),
                });
            }
        }
        rows.sort_unstable();
        if let Some(i) = rows.windows(2).position(|w| w[0].0 == w[1].0) {
            return Err(Error::Histogram {
                row: i + 2,
                message: format!("duplicate degree {}", rows[i].0),
            });
        }
        if rows.is_empty() {
            return Err(Error::Histogram {
                row: 0,
                message: "histogram has no rows".into(),
            });
        }
        let n = rows.iter().map(|r| r.1).sum();
        Ok(Self {
            rows,
            n,
            excluded_zero_degree: 0,
        })
    }

    /// Counts per-node degrees; zeros are dropped and tallied separately.
    pub fn from_degrees(degrees: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut table = BTreeMap::new();
        let mut zeros = 0;
        for d in degrees {
            if d == 0 {
                zeros += 1;
            } else {
                *table.entry(d).or_insert(0u64) += 1;
            }
        }
        if table.is_empty() {
            return Err(Error::InvalidInput("no node has positive degree".into()));
        }
        let rows: Vec<_> = table.into_iter().collect();
        let n = rows.iter().map(|r| r.1).sum();
        Ok(Self {
            rows,
            n,
            excluded_zero_degree: zeros,
        })
    }

    /// Histogram of rounded positive values, each floored at 1.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_degrees(values.iter().map(|&v| discretize(v)))
    }

    pub fn rows(&self) -> &[(u64, u64)] {
        &self.rows
    }

    /// Number of nodes with degree at least one.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn excluded_zero_degree(&self) -> u64 {
        self.excluded_zero_degree
    }

    pub fn max_degree(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.0)
    }

    pub fn min_degree(&self) -> u64 {
        self.rows.first().map_or(0, |r| r.0)
    }

    /// Count for `degree`, zero if absent.
    pub fn count(&self, degree: u64) -> u64 {
        self.rows
            .binary_search_by_key(&degree, |r| r.0)
            .map_or(0, |i| self.rows[i].1)
    }

    /// Writes the CSV form (`degree,count` header, LF endings).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(["degree", "count"]).map_err(io)?;
        for &(d, c) in &self.rows {
            out.write_record([d.to_string(), c.to_string()]).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the CSV form. Row numbers in errors count the header as row 1.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
        let mut records = reader.records();
        let header = match records.next() {
            Some(rec) => rec.map_err(|e| csv_error(1, e))?,
            None => {
                return Err(Error::Histogram {
                    row: 1,
                    message: "missing header 'degree,count'".into(),
                })
            }
        };
        if header.len() != 2 || header.get(0).map(str::trim) != Some("degree") || header.get(1).map(str::trim) != Some("count") {
            return Err(Error::Histogram {
                row: 1,
                message: "missing header 'degree,count'".into(),
            });
        }
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for (i, rec) in records.enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| csv_error(row, e))?;
            if rec.len() != 2 {
                return Err(Error::Histogram {
                    row,
                    message: format!("expected 2 fields, found {}", rec.len()),
                });
            }
            let parse = |s: &str| -> Result<u64> {
                let v: i128 = s.trim().parse().map_err(|_| Error::Histogram {
                    row,
                    message: format!("'{s}' is not an integer"),
                })?;
                if v <= 0 {
                    return Err(Error::Histogram {
                        row,
                        message: format!("values must be positive (got {v})"),
                    });
                }
                u64::try_from(v).map_err(|_| Error::Histogram {
                    row,
                    message: format!("{v} is out of range"),
                })
            };
            let d = parse(&rec[0])?;
            let c = parse(&rec[1])?;
            if !seen.insert(d) {
                return Err(Error::Histogram {
                    row,
                    message: format!("duplicate degree {d}"),
                });
            }
            rows.push((d, c));
        }
        if rows.is_empty() {
            return Err(Error::Histogram {
                row: 2,
                message: "histogram has no rows".into(),
            });
        }
        Self::from_rows(rows)
    }
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Histogram {
        row,
        message: e.to_string(),
    }
}

/// Rounds half away from zero and floors at one.
pub fn discretize(v: f64) -> u64 {
    let r = v.round();
    if r < 1.0 || r.is_nan() {
        1
    } else if r >= u64::MAX as f64 {
        u64::MAX
    } else {
        r as u64
    }
}

pub fn load_histogram(path: impl AsRef<Path>) -> Result<DegreeHistogram> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::File {
        path: path.to_owned(),
        source,
    })?;
    DegreeHistogram::read_csv(BufReader::new(file))
}

pub fn save_histogram(h: &DegreeHistogram, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::File {
        path: path.to_owned(),
        source,
    })?;
    h.write_csv(BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<EdgeList> {
        parse_edge_list(text.as_bytes(), true)
    }

    #[test]
    fn parses_edges_and_comments() {
        let e = parse("1 2\n2 3\n# comment\n").unwrap();
        assert_eq!(e.edge_count(), 2);
        assert_eq!(e.node_count(), 3);
        let e = parse("% header\na\tb extra tokens\n\n").unwrap();
        assert_eq!(e.edge_count(), 1);
        assert_eq!(e.label(0), "a");
        assert_eq!(e.label(1), "b");
    }

    #[test]
    fn malformed_line_reports_location() {
        match parse("1\n") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("1 2\n# ok\n  7\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn hist(text: &str, mode: DegreeMode, dedup: bool, drop_self_loops: bool) -> Result<DegreeHistogram> {
        let e = parse(text)?;
        degree_histogram(&e, &DegreeOptions { mode, dedup, drop_self_loops })
    }

    #[test]
    fn degree_modes() {
        let h = hist("1 2\n2 3\n", DegreeMode::In, false, false).unwrap();
        assert_eq!(h.rows(), &[(1, 2)]);
        assert_eq!(h.excluded_zero_degree(), 1);
        let h = hist("1 2\n2 3\n", DegreeMode::Total, false, false).unwrap();
        assert_eq!(h.rows(), &[(1, 2), (2, 1)]);
        let h = hist("1 2\n2 3\n", DegreeMode::Out, false, false).unwrap();
        assert_eq!(h.rows(), &[(1, 2)]);
    }

    #[test]
    fn self_loops_and_duplicates() {
        let h = hist("1 1\n2 3\n", DegreeMode::Total, false, true).unwrap();
        assert_eq!(h.excluded_zero_degree(), 1);
        assert_eq!(h.rows(), &[(1, 2)]);
        let h = hist("1 1\n", DegreeMode::Total, false, false).unwrap();
        assert_eq!(h.rows(), &[(2, 1)]);
        let h = hist("1 2\n1 2\n", DegreeMode::Total, false, false).unwrap();
        assert_eq!(h.rows(), &[(2, 2)]);
        let h = hist("1 2\n1 2\n", DegreeMode::Total, true, false).unwrap();
        assert_eq!(h.rows(), &[(1, 2)]);
        let e = parse_edge_list("1 2\n2 1\n".as_bytes(), false).unwrap();
        let opts = DegreeOptions { mode: DegreeMode::Total, dedup: true, drop_self_loops: false };
        assert_eq!(degree_histogram(&e, &opts).unwrap().rows(), &[(1, 2)]);
    }

    #[test]
    fn empty_graph_is_an_error() {
        assert!(hist("# nothing\n", DegreeMode::Total, false, false).is_err());
        assert!(hist("1 1\n", DegreeMode::Total, false, true).is_err());
    }

    #[test]
    fn streaming_matches_parsed() {
        let text = "a b\nb c\nc a\na d\nd d\n";
        for mode in [DegreeMode::In, DegreeMode::Out, DegreeMode::Total] {
            let opts = DegreeOptions { mode, dedup: false, drop_self_loops: false };
            let parsed = degree_histogram(&parse(text).unwrap(), &opts).unwrap();
            let (streamed, counts) = degree_histogram_from_reader(text.as_bytes(), true, &opts).unwrap();
            assert_eq!(parsed, streamed);
            assert_eq!(counts.nodes, 4);
            assert_eq!(counts.edges, 5);
        }
    }

    #[test]
    fn csv_examples() {
        let h = DegreeHistogram::read_csv("degree,count\n1,10\n5,2\n".as_bytes()).unwrap();
        assert_eq!(h.rows().len(), 2);
        assert_eq!(h.n(), 12);
        let err = DegreeHistogram::read_csv("degree,count\n1,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Histogram { row: 2, .. }), "{err}");
        let err = DegreeHistogram::read_csv("degree,count\n1,3\n2,1\n1,4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Histogram { row: 4, .. }), "{err}");
        let err = DegreeHistogram::read_csv("1,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Histogram { row: 1, .. }), "{err}");
        assert!(DegreeHistogram::read_csv("degree,count\n-2,3\n".as_bytes()).is_err());
        assert!(DegreeHistogram::read_csv("degree,count\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_output_is_exact() {
        let h = DegreeHistogram::from_rows(vec![(3, 1), (1, 5)]).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "degree,count\n1,5\n3,1\n");
    }

    #[test]
    fn discretize_rounds_half_away_and_floors() {
        assert_eq!(discretize(0.2), 1);
        assert_eq!(discretize(1.5), 2);
        assert_eq!(discretize(2.4999), 2);
        assert_eq!(discretize(2.5), 3);
    }
}
