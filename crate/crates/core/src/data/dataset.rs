use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::ops::Deref;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const QUERY_COLUMN: &str = "query_id";
const RANK_COLUMN: &str = "rank";

/// A single item described by `d` real-valued features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum FeatureKind {
    Numeric,
    /// Two-valued feature encoded as 0 / 1.
    Binary,
    /// Totally ordered levels, lowest first; level `i` of `L` is encoded as
    /// `i / (L - 1)`.
    Ordinal { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub names: Vec<String>,
    pub kinds: Vec<FeatureKind>,
}

impl FeatureSchema {
    pub fn numeric(names: Vec<String>) -> Self {
        let kinds = vec![FeatureKind::Numeric; names.len()];
        Self { names, kinds }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Parses one feature header cell: `name`, `name:numeric`,
    /// `name:binary` or `name:ordinal{low<mid<high}`.
    pub fn parse_column(cell: &str) -> Result<(String, FeatureKind)> {
        let cell = cell.trim();
        let (name, kind) = match cell.split_once(':') {
            None => (cell, FeatureKind::Numeric),
            Some((name, suffix)) => {
                let suffix = suffix.trim();
                let kind = if suffix == "numeric" {
                    FeatureKind::Numeric
                } else if suffix == "binary" {
                    FeatureKind::Binary
                } else if let Some(body) = suffix
                    .strip_prefix("ordinal{")
                    .and_then(|s| s.strip_suffix('}'))
                {
                    let levels: Vec<String> =
                        body.split('<').map(|l| l.trim().to_string()).collect();
                    if levels.iter().any(String::is_empty) {
                        return Err(Error::Schema(format!(
                            "column '{name}': empty ordinal level"
                        )));
                    }
                    let mut seen = levels.clone();
                    seen.sort();
                    seen.dedup();
                    if seen.len() != levels.len() {
                        return Err(Error::Schema(format!(
                            "column '{name}': repeated ordinal level"
                        )));
                    }
                    FeatureKind::Ordinal { levels }
                } else {
                    return Err(Error::Schema(format!(
                        "column '{name}': unknown feature kind '{suffix}'"
                    )));
                };
                (name.trim(), kind)
            }
        };
        if name.is_empty() {
            return Err(Error::Schema("empty column name".into()));
        }
        Ok((name.to_string(), kind))
    }

    fn header_cell(&self, k: usize) -> String {
        let name = &self.names[k];
        match &self.kinds[k] {
            FeatureKind::Numeric => name.clone(),
            FeatureKind::Binary => format!("{name}:binary"),
            FeatureKind::Ordinal { levels } => format!("{name}:ordinal{{{}}}", levels.join("<")),
        }
    }

    fn encode(&self, k: usize, raw: &str, line: u64) -> Result<f64> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("missing value for feature '{}'", self.names[k]),
            });
        }
        match &self.kinds[k] {
            FeatureKind::Numeric => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    line,
                    message: format!("'{raw}' is not a finite number (feature '{}')", self.names[k]),
                }),
            },
            FeatureKind::Binary => match raw.to_ascii_lowercase().as_str() {
                "0" | "false" | "no" => Ok(0.0),
                "1" | "true" | "yes" => Ok(1.0),
                _ => Err(Error::Parse {
                    line,
                    message: format!("'{raw}' is not a binary value (feature '{}')", self.names[k]),
                }),
            },
            FeatureKind::Ordinal { levels } => {
                let idx = levels
                    .iter()
                    .position(|l| l == raw)
                    .ok_or_else(|| Error::UnknownLevel {
                        line,
                        feature: self.names[k].clone(),
                        value: raw.to_string(),
                    })?;
                Ok(ordinal_code(idx, levels.len()))
            }
        }
    }

    fn decode(&self, k: usize, value: f64) -> String {
        match &self.kinds[k] {
            FeatureKind::Numeric => format!("{value}"),
            FeatureKind::Binary => if value >= 0.5 { "1" } else { "0" }.to_string(),
            FeatureKind::Ordinal { levels } => {
                let top = (levels.len() - 1) as f64;
                let idx = (value * top).round().clamp(0.0, top) as usize;
                levels[idx].clone()
            }
        }
    }
}

fn ordinal_code(index: usize, levels: usize) -> f64 {
    if levels <= 1 {
        0.0
    } else {
        index as f64 / (levels - 1) as f64
    }
}

/// A permutation stored as positions: `position(k)` is the 0-based rank of
/// item `k` (0 = most preferred).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ranking {
    positions: Vec<usize>,
}

impl Ranking {
    pub fn from_positions(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut seen = vec![false; n];
        for &p in &positions {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!(
                    "{positions:?} is not a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        Ok(Self { positions })
    }

    /// Builds a ranking from an ordering (item indices, best first).
    pub fn from_ordering(ordering: &[usize]) -> Result<Self> {
        let n = ordering.len();
        let mut positions = vec![usize::MAX; n];
        for (pos, &item) in ordering.iter().enumerate() {
            if item >= n || positions[item] != usize::MAX {
                return Err(Error::InvalidArgument(format!(
                    "{ordering:?} is not a permutation of 0..{n}"
                )));
            }
            positions[item] = pos;
        }
        Ok(Self { positions })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            positions: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, item: usize) -> usize {
        self.positions[item]
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Item indices from best to worst.
    pub fn ordering(&self) -> Vec<usize> {
        let mut ordering = vec![0; self.positions.len()];
        for (item, &pos) in self.positions.iter().enumerate() {
            ordering[pos] = item;
        }
        ordering
    }
}

impl TryFrom<Vec<usize>> for Ranking {
    type Error = Error;

    fn try_from(positions: Vec<usize>) -> Result<Self> {
        Self::from_positions(positions)
    }
}

impl From<Ranking> for Vec<usize> {
    fn from(r: Ranking) -> Self {
        r.positions
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedQuery {
    pub id: String,
    pub items: Vec<FeatureVector>,
    pub ranking: Ranking,
}

impl RankedQuery {
    pub fn new(id: impl Into<String>, items: Vec<FeatureVector>, ranking: Ranking) -> Result<Self> {
        if items.len() != ranking.len() {
            return Err(Error::DimensionMismatch {
                expected: items.len(),
                found: ranking.len(),
            });
        }
        Ok(Self {
            id: id.into(),
            items,
            ranking,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// All observed preferences `(winner, loser)` as item indices, in order
    /// of the winner's position and then the loser's.
    pub fn preferences(&self) -> Vec<(usize, usize)> {
        let ordering = self.ranking.ordering();
        let n = ordering.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for p in 0..n {
            for q in p + 1..n {
                out.push((ordering[p], ordering[q]));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDataset {
    pub schema: FeatureSchema,
    pub queries: Vec<RankedQuery>,
}

impl RankedDataset {
    pub fn dim(&self) -> usize {
        self.schema.dim()
    }

    pub fn items(&self) -> impl Iterator<Item = &FeatureVector> + Clone {
        self.queries.iter().flat_map(|q| q.items.iter())
    }

    pub fn num_items(&self) -> usize {
        self.queries.iter().map(RankedQuery::len).sum()
    }

    /// Applies `f` to every item, keeping rankings and schema.
    pub fn map_items<F>(&self, mut f: F) -> Result<RankedDataset>
    where
        F: FnMut(&FeatureVector) -> Result<FeatureVector>,
    {
        let queries = self
            .queries
            .iter()
            .map(|q| {
                let items = q.items.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
                Ok(RankedQuery {
                    id: q.id.clone(),
                    items,
                    ranking: q.ranking.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RankedDataset {
            schema: self.schema.clone(),
            queries,
        })
    }

    /// Rejects datasets whose schemas differ in names or kinds.
    pub fn check_compatible(&self, other: &FeatureSchema) -> Result<()> {
        check_schema(&self.schema, other)
    }
}

pub(crate) fn check_schema(expected: &FeatureSchema, found: &FeatureSchema) -> Result<()> {
    for (k, name) in expected.names.iter().enumerate() {
        match found.names.get(k) {
            None => return Err(Error::Schema(format!("missing column '{name}'"))),
            Some(other) if other != name => {
                return Err(Error::Schema(format!(
                    "expected column '{name}' at position {}, found '{other}'",
                    k + 1
                )))
            }
            Some(_) if found.kinds[k] != expected.kinds[k] => {
                return Err(Error::Schema(format!("column '{name}' has a different kind")))
            }
            Some(_) => {}
        }
    }
    if let Some(extra) = found.names.get(expected.dim()) {
        return Err(Error::Schema(format!("unexpected column '{extra}'")));
    }
    Ok(())
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Loads a ranked dataset from a CSV file with header
/// `query_id,rank,<feature>...`.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<RankedDataset> {
    read_dataset(open(path.as_ref())?, None)
}

/// Like [`load_dataset`], but the feature columns must match `schema`
/// (names in order; header kind suffixes, if present, must agree).
pub fn load_dataset_with_schema(
    path: impl AsRef<Path>,
    schema: &FeatureSchema,
) -> Result<RankedDataset> {
    read_dataset(open(path.as_ref())?, Some(schema))
}

pub fn read_dataset<R: Read>(reader: R, hint: Option<&FeatureSchema>) -> Result<RankedDataset> {
    let mut rdr = csv_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Schema("empty file".into()))??;
    if header.len() < 3 || &header[0] != QUERY_COLUMN || &header[1] != RANK_COLUMN {
        return Err(Error::Schema(format!(
            "header must start with '{QUERY_COLUMN},{RANK_COLUMN}' followed by at least one feature"
        )));
    }
    let schema = resolve_schema(header.iter().skip(2), hint)?;
    let width = header.len();

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<(usize, FeatureVector, u64)>> = HashMap::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        let qid = record[0].to_string();
        let rank = record[1]
            .parse::<usize>()
            .ok()
            .filter(|&r| r >= 1)
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("rank '{}' is not a positive integer", &record[1]),
            })?;
        let values = (0..schema.dim())
            .map(|k| schema.encode(k, &record[k + 2], line))
            .collect::<Result<Vec<_>>>()?;
        groups
            .entry(qid.clone())
            .or_insert_with(|| {
                order.push(qid);
                Vec::new()
            })
            .push((rank, FeatureVector(values), line));
    }
    if order.is_empty() {
        return Err(Error::Schema("dataset has no rows".into()));
    }

    let mut queries = Vec::with_capacity(order.len());
    for qid in order {
        let rows = groups.remove(&qid).unwrap_or_default();
        let n = rows.len();
        let mut seen = vec![false; n];
        let mut positions = Vec::with_capacity(n);
        let mut items = Vec::with_capacity(n);
        let mut out_of_range = false;
        for (rank, item, _) in rows {
            if rank <= n {
                if seen[rank - 1] {
                    return Err(Error::DuplicateRank { query: qid, rank });
                }
                seen[rank - 1] = true;
            } else {
                out_of_range = true;
            }
            positions.push(rank.wrapping_sub(1));
            items.push(item);
        }
        if out_of_range {
            return Err(Error::NonContiguousRanks { query: qid, n });
        }
        let ranking = Ranking::from_positions(positions)?;
        queries.push(RankedQuery {
            id: qid,
            items,
            ranking,
        });
    }
    Ok(RankedDataset { schema, queries })
}

fn resolve_schema<'a>(
    cells: impl Iterator<Item = &'a str>,
    hint: Option<&FeatureSchema>,
) -> Result<FeatureSchema> {
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut explicit = Vec::new();
    for cell in cells {
        let (name, kind) = FeatureSchema::parse_column(cell)?;
        explicit.push(cell.contains(':'));
        names.push(name);
        kinds.push(kind);
    }
    match hint {
        None => Ok(FeatureSchema { names, kinds }),
        Some(hint) => {
            for (k, name) in hint.names.iter().enumerate() {
                match names.get(k) {
                    None => return Err(Error::Schema(format!("missing column '{name}'"))),
                    Some(found) if found != name => {
                        return Err(Error::Schema(format!(
                            "expected column '{name}' at feature position {}, found '{found}'",
                            k + 1
                        )))
                    }
                    Some(_) if explicit[k] && kinds[k] != hint.kinds[k] => {
                        return Err(Error::Schema(format!(
                            "column '{name}' declares a different kind than the schema"
                        )))
                    }
                    Some(_) => {}
                }
            }
            if let Some(extra) = names.get(hint.dim()) {
                return Err(Error::Schema(format!("unexpected column '{extra}'")));
            }
            Ok(hint.clone())
        }
    }
}

/// Loads unranked query items. The header lists the schema's feature columns,
/// optionally preceded by `query_id` and/or `rank` columns, which are
/// ignored. Items are returned in file order.
pub fn load_items(path: impl AsRef<Path>, schema: &FeatureSchema) -> Result<Vec<FeatureVector>> {
    read_items(open(path.as_ref())?, schema)
}

pub fn read_items<R: Read>(reader: R, schema: &FeatureSchema) -> Result<Vec<FeatureVector>> {
    let mut rdr = csv_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Schema("empty file".into()))??;
    let mut skip = 0;
    if header.get(skip) == Some(QUERY_COLUMN) {
        skip += 1;
    }
    if header.get(skip) == Some(RANK_COLUMN) {
        skip += 1;
    }
    let schema = resolve_schema(header.iter().skip(skip), Some(schema))?;
    let width = header.len();
    let mut items = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        let values = (0..schema.dim())
            .map(|k| schema.encode(k, &record[k + skip], line))
            .collect::<Result<Vec<_>>>()?;
        items.push(FeatureVector(values));
    }
    Ok(items)
}

/// Writes the dataset in canonical form: numeric columns without a kind
/// suffix, rows grouped by query in item order, values in shortest
/// round-trip notation.
pub fn write_dataset<W: Write>(data: &RankedDataset, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(writer);
    let mut header = vec![QUERY_COLUMN.to_string(), RANK_COLUMN.to_string()];
    header.extend((0..data.dim()).map(|k| data.schema.header_cell(k)));
    wtr.write_record(&header)?;
    for q in &data.queries {
        for (k, item) in q.items.iter().enumerate() {
            let mut row = Vec::with_capacity(header.len());
            row.push(q.id.clone());
            row.push((q.ranking.position(k) + 1).to_string());
            row.extend(item.iter().enumerate().map(|(f, &v)| data.schema.decode(f, v)));
            wtr.write_record(&row)?;
        }
    }
    wtr.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn save_dataset(data: &RankedDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(data, file)
}
