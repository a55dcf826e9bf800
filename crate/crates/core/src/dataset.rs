//! Spots, counts and tissue labels, with CSV persistence.
//!
//! On-disk layout of a dataset directory (UTF-8, LF, '.' decimal point):
//!
//! ```text
//! features.csv   x0,x1,...     one row per spot, shortest round-trip decimals
//! counts.csv     g0,g1,...     non-negative integers
//! tissues.csv    tissue        integer label, contiguous from 0
//! meta.json      {"d", "n_genes", "n_spots", "gene_names", "provenance", "has_truth"}
//! truth.csv      g0,g1,...     optional noiseless targets (synthetic held-out sets)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    counts: Array2<u64>,
    tissue_ids: Vec<usize>,
    library_sizes: Vec<u64>,
    truth: Option<Array2<f64>>,
    gene_names: Option<Vec<String>>,
    provenance: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    d: usize,
    n_genes: usize,
    n_spots: usize,
    #[serde(default)]
    gene_names: Option<Vec<String>>,
    #[serde(default)]
    provenance: String,
    #[serde(default)]
    has_truth: bool,
}

impl Dataset {
    pub fn new(features: Array2<f64>, counts: Array2<u64>, tissue_ids: Vec<usize>) -> Result<Self> {
        let n = features.nrows();
        if counts.nrows() != n || tissue_ids.len() != n {
            return Err(Error::Argument(format!(
                "row counts differ: features {n}, counts {}, tissues {}",
                counts.nrows(),
                tissue_ids.len()
            )));
        }
        check_contiguous(&tissue_ids).map_err(Error::Argument)?;
        let library_sizes = counts.axis_iter(Axis(0)).map(|r| r.sum()).collect();
        Ok(Self {
            features,
            counts,
            tissue_ids,
            library_sizes,
            truth: None,
            gene_names: None,
            provenance: String::new(),
        })
    }

    /// Attach noiseless targets; evaluation then scores against these instead
    /// of the observed counts.
    pub fn with_truth(mut self, truth: Array2<f64>) -> Result<Self> {
        if truth.dim() != self.counts.dim() {
            return Err(Error::Argument(format!(
                "truth shape {:?} differs from counts shape {:?}",
                truth.dim(),
                self.counts.dim()
            )));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn with_gene_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_genes() {
            return Err(Error::Argument(format!(
                "{} gene names for {} genes",
                names.len(),
                self.n_genes()
            )));
        }
        self.gene_names = Some(names);
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Same spots with replaced counts; library sizes are recomputed.
    pub fn with_counts(&self, counts: Array2<u64>) -> Result<Self> {
        if counts.dim() != self.counts.dim() {
            return Err(Error::Argument("replacement counts change the shape".into()));
        }
        let mut out = self.clone();
        out.library_sizes = counts.axis_iter(Axis(0)).map(|r| r.sum()).collect();
        out.counts = counts;
        Ok(out)
    }

    pub fn n_spots(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_genes(&self) -> usize {
        self.counts.ncols()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_tissues(&self) -> usize {
        self.tissue_ids.iter().max().map_or(0, |m| m + 1)
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn counts(&self) -> &Array2<u64> {
        &self.counts
    }

    pub fn tissue_ids(&self) -> &[usize] {
        &self.tissue_ids
    }

    pub fn library_sizes(&self) -> &[u64] {
        &self.library_sizes
    }

    pub fn truth(&self) -> Option<&Array2<f64>> {
        self.truth.as_ref()
    }

    pub fn gene_names(&self) -> Option<&[String]> {
        self.gene_names.as_deref()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Evaluation targets: the noiseless truth when present, else the counts.
    pub fn targets(&self) -> Array2<f64> {
        match &self.truth {
            Some(t) => t.clone(),
            None => self.counts.mapv(|c| c as f64),
        }
    }

    pub fn total_count(&self) -> u64 {
        self.library_sizes.iter().sum()
    }

    /// Rows in the given order. Tissue ids are left as they are, so the
    /// result may not be contiguous; callers that need that re-index.
    fn take_rows(&self, rows: &[usize], tissue_ids: Vec<usize>) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), rows),
            counts: self.counts.select(Axis(0), rows),
            library_sizes: rows.iter().map(|&r| self.library_sizes[r]).collect(),
            truth: self.truth.as_ref().map(|t| t.select(Axis(0), rows)),
            tissue_ids,
            gene_names: self.gene_names.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// Concatenate datasets row-wise. Tissue ids are kept as given.
    pub fn concat(parts: &[Dataset]) -> Result<Dataset> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Argument("nothing to concatenate".into()))?;
        let fviews: Vec<_> = parts.iter().map(|p| p.features.view()).collect();
        let cviews: Vec<_> = parts.iter().map(|p| p.counts.view()).collect();
        let features = ndarray::concatenate(Axis(0), &fviews)
            .map_err(|e| Error::Argument(format!("feature widths differ: {e}")))?;
        let counts = ndarray::concatenate(Axis(0), &cviews)
            .map_err(|e| Error::Argument(format!("gene counts differ: {e}")))?;
        let tissue_ids = parts.iter().flat_map(|p| p.tissue_ids.iter().copied()).collect();
        let mut out = Dataset::new(features, counts, tissue_ids)?;
        out.gene_names = first.gene_names.clone();
        out.provenance = first.provenance.clone();
        if parts.iter().all(|p| p.truth.is_some()) {
            let tviews: Vec<_> = parts.iter().map(|p| p.truth.as_ref().unwrap().view()).collect();
            out.truth = Some(ndarray::concatenate(Axis(0), &tviews).expect("shapes checked"));
        }
        Ok(out)
    }
}

fn check_contiguous(ids: &[usize]) -> std::result::Result<(), String> {
    let present: BTreeSet<usize> = ids.iter().copied().collect();
    match present.iter().enumerate().find(|(k, &t)| *k != t) {
        Some((k, _)) => Err(format!("tissue ids are not contiguous from 0: {k} is missing")),
        None => Ok(()),
    }
}

/// Partition rows by tissue into train/val/test. Each split's tissue ids are
/// re-indexed to `0..` in ascending order of the original ids.
pub fn split_by_tissue(
    dataset: &Dataset,
    train: &[usize],
    val: &[usize],
    test: &[usize],
) -> Result<(Dataset, Dataset, Dataset)> {
    let n_tissues = dataset.n_tissues();
    let mut seen = BTreeSet::new();
    for (name, group) in [("train", train), ("val", val), ("test", test)] {
        if group.is_empty() {
            return Err(Error::Argument(format!("{name} tissue set is empty")));
        }
        for &t in group {
            if t >= n_tissues {
                return Err(Error::Argument(format!("unknown tissue id {t} in {name}")));
            }
            if !seen.insert(t) {
                return Err(Error::Argument(format!("tissue {t} appears in more than one split")));
            }
        }
    }
    let split = |group: &[usize]| {
        let remap: BTreeMap<usize, usize> = group
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(new, old)| (old, new))
            .collect();
        let rows: Vec<usize> = (0..dataset.n_spots())
            .filter(|&r| remap.contains_key(&dataset.tissue_ids[r]))
            .collect();
        let ids = rows.iter().map(|&r| remap[&dataset.tissue_ids[r]]).collect();
        dataset.take_rows(&rows, ids)
    };
    Ok((split(train), split(val), split(test)))
}

pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("features.csv"), &real_table("x", &dataset.features))?;
    let mut counts = header("g", dataset.n_genes());
    if dataset.n_genes() > 0 {
        for row in dataset.counts.rows() {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            counts.push_str(&line.join(","));
            counts.push('\n');
        }
    }
    write_file(&dir.join("counts.csv"), &counts)?;
    let mut tissues = String::from("tissue\n");
    for t in &dataset.tissue_ids {
        let _ = writeln!(tissues, "{t}");
    }
    write_file(&dir.join("tissues.csv"), &tissues)?;
    if let Some(truth) = &dataset.truth {
        write_file(&dir.join("truth.csv"), &real_table("g", truth))?;
    }
    let meta = Meta {
        d: dataset.dim(),
        n_genes: dataset.n_genes(),
        n_spots: dataset.n_spots(),
        gene_names: dataset.gene_names.clone(),
        provenance: dataset.provenance.clone(),
        has_truth: dataset.truth.is_some(),
    };
    let mut json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    json.push('\n');
    write_file(&dir.join("meta.json"), &json)
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let meta_path = dir.join("meta.json");
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: Meta =
        serde_json::from_str(&text).map_err(|e| Error::schema(&meta_path, e.to_string()))?;

    let features = read_table(&dir.join("features.csv"), meta.d, meta.n_spots, |s| {
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    })?;
    let counts = read_table(&dir.join("counts.csv"), meta.n_genes, meta.n_spots, |s| {
        s.parse::<u64>().ok()
    })?;
    let tissues_path = dir.join("tissues.csv");
    let tissues = read_table(&tissues_path, 1, meta.n_spots, |s| s.parse::<usize>().ok())?;
    let tissue_ids: Vec<usize> = tissues.into_iter().collect();
    check_contiguous(&tissue_ids).map_err(|m| Error::schema(&tissues_path, m))?;

    let mut ds = Dataset::new(features, counts, tissue_ids)?;
    if meta.has_truth {
        ds.truth = Some(read_table(&dir.join("truth.csv"), meta.n_genes, meta.n_spots, |s| {
            s.parse::<f64>().ok()
        })?);
    }
    if let Some(names) = meta.gene_names {
        ds = ds
            .with_gene_names(names)
            .map_err(|e| Error::schema(&meta_path, e.to_string()))?;
    }
    ds.provenance = meta.provenance;
    Ok(ds)
}

fn header(prefix: &str, width: usize) -> String {
    let cols: Vec<String> = (0..width).map(|k| format!("{prefix}{k}")).collect();
    cols.join(",") + "\n"
}

fn real_table(prefix: &str, table: &Array2<f64>) -> String {
    let mut out = header(prefix, table.ncols());
    if table.ncols() == 0 {
        return out;
    }
    for row in table.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Read a headed CSV of `rows x width` cells parsed by `parse`.
fn read_table<T: Clone + Default>(
    path: &Path,
    width: usize,
    rows: usize,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Array2<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    // Zero-width tables are stored as a bare header line.
    if width == 0 {
        return Ok(Array2::default((rows, 0)));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let head = reader.headers().map_err(|e| Error::schema(path, e.to_string()))?;
    if head.len() != width {
        return Err(Error::schema(path, format!("header has {} columns, expected {width}", head.len())));
    }
    let mut data = Vec::with_capacity(rows * width);
    let mut n = 0;
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| Error::schema(path, format!("row {row}: {e}")))?;
        if record.len() != width {
            return Err(Error::schema(
                path,
                format!("row {row} has {} columns, expected {width}", record.len()),
            ));
        }
        for cell in record.iter() {
            let v = parse(cell.trim())
                .ok_or_else(|| Error::schema(path, format!("row {row}: invalid value `{cell}`")))?;
            data.push(v);
        }
        n += 1;
    }
    if n != rows {
        return Err(Error::schema(path, format!("{n} rows, expected {rows}")));
    }
    Ok(Array2::from_shape_vec((rows, width), data).expect("sized above"))
}
